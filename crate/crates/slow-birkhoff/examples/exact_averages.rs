//! Exact Birkhoff averages: the sum A(x,N,f) = (1/N) sum_{i=1..N} f(T^i x)
//! is an exact rational for any N, and at N = 2^m it equals the integral of
//! a rank-m function for every single point.
//!
//! Run with: cargo run --example exact_averages

use slow_birkhoff::{birkhoff_average, birkhoff_average_zn, Dyadic, IntervalSet, StepFunction};

fn main() {
    // f = indicator of [0, 1/2)
    let half = IntervalSet::from_interval(
        slow_birkhoff::DyadicInterval::new(Dyadic::zero(), Dyadic::half()).unwrap(),
    );
    let f = StepFunction::indicator(half).unwrap();
    println!("f = 1 on [0,1/2), integral {}", f.integral());

    let x = Dyadic::zero();
    for n in [1u64, 2, 3, 5, 8, 1000, 1_000_000] {
        let avg = birkhoff_average(&x, n, &f).unwrap();
        println!("  A(0, {:>7}, f) = {}", n, avg);
    }

    // rank-m functions average exactly to their integral over 2^m steps,
    // no matter where the orbit starts
    println!("exact-cycle identity at N = 2:");
    for num in 0..4u64 {
        let x = Dyadic::from_parts(num, 2).unwrap();
        println!(
            "  A({}, 2, f) = {}",
            x,
            birkhoff_average(&x, 2, &f).unwrap()
        );
    }

    // the square average for the product action
    let g = StepFunction::constant(num_rational::BigRational::new(3.into(), 7.into()), 2)
        .unwrap();
    let point = vec![Dyadic::zero(), Dyadic::half()];
    println!(
        "Z^2 square average of the constant 3/7 at N = 5: {}",
        birkhoff_average_zn(&point, 5, &g).unwrap()
    );
}
