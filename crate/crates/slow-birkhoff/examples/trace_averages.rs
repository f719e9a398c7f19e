//! Trace A(x, N, f) against N for a freshly constructed slow function: from
//! inside a tower the average sits at 0 for the tower's whole height, while
//! the integral has moved away.
//!
//! Run with: cargo run --release --example trace_averages

use num_rational::BigRational;
use num_traits::ToPrimitive;
use slow_birkhoff::trace::{sample_points, trace};
use slow_birkhoff::{run_construction, ConstructionParams, Dyadic, McSettings, StepFunction};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    let params = ConstructionParams {
        dimension: 1,
        f0: StepFunction::constant(rat(2, 1), 1).unwrap(),
        deviations: vec![rat(1, 16)],
        lower_scales: vec![10],
        budget: rat(1, 4),
        delta0: rat(1, 20),
        mc: McSettings {
            samples: 4_000,
            seed: 31,
            alpha: 0.01,
        },
        precision: 30,
        exact_threshold: 1 << 12,
        safety: rat(2, 1),
        scale_cap: 1 << 32,
    };
    let (spec, report) = run_construction(&params).unwrap();
    let h = spec.towers[0].height;
    println!(
        "single-stage function: tower height {}, integral {}",
        h, report.final_integral
    );

    // one point inside tower level 1 (= [1/2, 1/2+d)), one random point
    let mut points = vec![vec![Dyadic::half()]];
    points.extend(sample_points(&spec, 1, 5).unwrap());

    let rows = trace(&spec, &points, 4 * h).unwrap();
    println!("x_id  N          average   |A - int f|");
    for r in rows
        .iter()
        .filter(|r| r.n.is_power_of_two() && r.n >= 64)
    {
        println!(
            "{:>4}  {:>9}  {:>8.5}  {:.5}",
            r.x_id,
            r.n,
            r.average.to_f64().unwrap(),
            r.abs_deviation.to_f64().unwrap()
        );
    }
    println!(
        "(the x_id 0 rows pin the deviation at the full integral until N \
         reaches the tower height {})",
        h
    );
}
