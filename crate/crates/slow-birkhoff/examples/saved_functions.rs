//! Persist a constructed function, reload it, and re-verify its deviation
//! guarantees independently (fresh seed, more samples).
//!
//! Run with: cargo run --release --example saved_functions

use num_rational::BigRational;
use slow_birkhoff::funcspec::FunctionSpec;
use slow_birkhoff::{run_construction, verify, ConstructionParams, McSettings, StepFunction};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    let params = ConstructionParams {
        dimension: 1,
        f0: StepFunction::constant(rat(2, 1), 1).unwrap(),
        deviations: vec![rat(1, 32), rat(1, 64)],
        lower_scales: vec![5, 50],
        budget: rat(1, 8),
        delta0: rat(1, 20),
        mc: McSettings {
            samples: 4_000,
            seed: 41,
            alpha: 0.01,
        },
        precision: 60,
        exact_threshold: 1 << 12,
        safety: rat(2, 1),
        scale_cap: 1 << 44,
    };
    let (spec, _) = run_construction(&params).unwrap();

    // the text form round-trips exactly
    let text = spec.to_text();
    println!("--- function.spec ---\n{}--------------------", text);
    let reloaded = FunctionSpec::parse_text(&text).unwrap();
    assert_eq!(reloaded, spec);

    // an independent check with twice the samples and a fresh seed
    let mc = McSettings {
        samples: 8_000,
        seed: 4242,
        alpha: 0.01,
    };
    let report = verify(&reloaded, &mc, 1 << 12).unwrap();
    println!(
        "re-verified: m(C) = {}, integral = {}",
        report.c_measure, report.final_integral
    );
    for st in &report.stages {
        println!(
            "  N_{} = {:>8}: final probability {} (radius {:.4}) vs floor {} -> {}",
            st.k,
            st.n_scale,
            st.final_estimate.probability,
            st.final_estimate.confidence_radius,
            st.floor,
            if st.floor_met { "met" } else { "missed" }
        );
    }
    assert!(report.all_floors_met());
}
