//! The Z^2 variant: square averages over {1..N}^2 slowed down by box towers
//! built from the product odometer.
//!
//! Run with: cargo run --release --example slow_convergence_2d

use num_rational::BigRational;
use slow_birkhoff::{run_construction, ConstructionParams, McSettings, StepFunction};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    let params = ConstructionParams {
        dimension: 2,
        f0: StepFunction::constant(rat(1, 1), 2).unwrap(),
        deviations: vec![rat(1, 8), rat(1, 16)],
        lower_scales: vec![1, 10],
        budget: rat(1, 2),
        delta0: rat(1, 4),
        mc: McSettings {
            samples: 2_000,
            seed: 23,
            alpha: 0.01,
        },
        precision: 24,
        exact_threshold: 1 << 12,
        safety: rat(1, 1),
        scale_cap: 512,
    };

    let (spec, report) = run_construction(&params).unwrap();

    println!("Z^2 construction with {} box towers:", spec.towers.len());
    for (t, entry) in spec.towers.iter().zip(&spec.schedule) {
        let side_measure =
            BigRational::from_integer(t.height.into()) * t.base_width.to_rational();
        println!(
            "  N = {:>4}  side {:>6}  base [0,{})^2  measure {}",
            entry.n_scale,
            t.height,
            t.base_width,
            &side_measure * &side_measure
        );
    }
    println!(
        "m(C) = {}  integral(f) = {}",
        report.c_measure, report.final_integral
    );
    for st in &report.stages {
        println!(
            "  at N_{} = {:>4}: deviation probability {} vs floor {}",
            st.k, st.n_scale, st.final_estimate.probability, st.floor
        );
    }
    assert!(report.passed());
}
