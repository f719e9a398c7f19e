//! The full construction: force the Birkhoff averages of a step function to
//! deviate from its integral by more than a_k at every chosen scale N_k, on
//! a set of measure close to 1, by zeroing the function on exact Rokhlin
//! towers of rapidly growing height.
//!
//! Run with: cargo run --release --example slow_convergence

use num_rational::BigRational;
use slow_birkhoff::{run_construction, ConstructionParams, McSettings, StepFunction};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    let params = ConstructionParams {
        dimension: 1,
        f0: StepFunction::constant(rat(2, 1), 1).unwrap(),
        // target deviations a_k; each stage removes measure eps_k = 2 a_k
        deviations: vec![rat(1, 16), rat(1, 32), rat(1, 64)],
        lower_scales: vec![10, 100, 1000],
        budget: rat(1, 4),
        delta0: rat(1, 40),
        mc: McSettings {
            samples: 10_000,
            seed: 7,
            alpha: 0.01,
        },
        precision: 60,
        exact_threshold: 1 << 12,
        safety: rat(2, 1),
        scale_cap: 1 << 48,
    };

    let (spec, report) = run_construction(&params).unwrap();

    println!("constructed f = f0 * 1_C with {} towers:", spec.towers.len());
    for (t, entry) in spec.towers.iter().zip(&spec.schedule) {
        println!(
            "  N = {:>12}  tower height {:>14}  base width {}",
            entry.n_scale, t.height, t.base_width
        );
    }
    println!(
        "m(C) = {} (budget kept {} of the space), integral(f) = {}",
        report.c_measure,
        rat(3, 4),
        report.final_integral
    );
    println!("deviation guarantees for the final function:");
    for st in &report.stages {
        println!(
            "  at N_{} = {:>12}: m(|A - int f| > {}) = {}  (floor {}, {})",
            st.k,
            st.n_scale,
            &st.eps / rat(2, 1),
            st.final_estimate.probability,
            st.floor,
            if st.floor_met { "met" } else { "missed" }
        );
    }
    assert!(report.passed());
}
