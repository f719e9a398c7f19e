//! Deviation sets two ways: exact cell enumeration against seeded
//! Monte-Carlo estimation with a Hoeffding confidence radius.
//!
//! Run with: cargo run --example deviation_probability

use num_rational::BigRational;
use slow_birkhoff::{deviation_prob_mc, deviation_set_exact, Dyadic, IntervalSet, StepFunction};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    let half = StepFunction::indicator(IntervalSet::from_interval(
        slow_birkhoff::DyadicInterval::new(Dyadic::zero(), Dyadic::half()).unwrap(),
    ))
    .unwrap();
    let center = half.integral();

    // at N = 1 the single-term average is 0 or 1: everything deviates
    let dev = deviation_set_exact(1, &half, &center, &rat(2, 5)).unwrap();
    println!("N=1 deviation set: {} (measure {})", dev, dev.measure());

    // at N = 2 the average is exactly 1/2 everywhere: nothing deviates
    let dev = deviation_set_exact(2, &half, &center, &rat(2, 5)).unwrap();
    println!("N=2 deviation set: {} (measure {})", dev, dev.measure());

    // a narrower indicator has richer deviation sets; the exact measure and
    // the Monte-Carlo estimate agree within the stated radius
    let f = StepFunction::indicator(IntervalSet::from_interval(
        slow_birkhoff::DyadicInterval::new(Dyadic::zero(), Dyadic::from_parts(1, 3).unwrap())
            .unwrap(),
    ))
    .unwrap();
    let center = f.integral();
    for n in [3u64, 5, 9, 17] {
        let exact = deviation_set_exact(n, &f, &center, &rat(1, 14))
            .unwrap()
            .measure();
        let est = deviation_prob_mc(n, &f, &center, &rat(1, 14), 20_000, 99).unwrap();
        println!(
            "N={:>2}: exact {}  mc {} +- {:.4} ({} samples, seed {})",
            n,
            exact,
            est.probability,
            est.confidence_radius,
            est.sample_count,
            est.seed
        );
    }
}
