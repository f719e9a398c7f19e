//! Acceptance suite. Each test prints one pass/fail line; every tolerance is
//! pinned in the assertions. Exactness criteria use zero tolerance; the
//! Monte-Carlo criteria state their Hoeffding radii explicitly.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use common::{random_interval_set, random_step_fn, random_step_fn_2d, rat, TestRng};
use num_rational::BigRational;
use num_traits::{One, Signed};
use slow_birkhoff::csvout::report_csv;
use slow_birkhoff::{
    birkhoff_average, birkhoff_average_zn, build_tower, deviation_prob_mc, deviation_set_exact,
    run_construction, Dyadic, DeviationReport, FunctionSpec, McSettings, OdometerZ,
    StepFunction,
};

fn announce(criterion: u32, passed: bool, detail: &str, elapsed_s: f64, budget_s: f64) {
    println!(
        "criterion {}: {} ({detail}; {elapsed_s:.2}s of {budget_s:.0}s budget)",
        criterion,
        if passed { "PASS" } else { "FAIL" },
    );
    assert!(passed, "criterion {} failed: {}", criterion, detail);
    assert!(
        elapsed_s < budget_s,
        "criterion {} overran its {}s budget: {:.2}s",
        criterion,
        budget_s,
        elapsed_s
    );
}

#[test]
fn criterion_1_exactness_suite() {
    let start = Instant::now();
    let od = OdometerZ;
    let mut rng = TestRng::new(0xC1);
    let mut checked = 0u32;
    for _ in 0..1000 {
        let set = random_interval_set(&mut rng, 20, 6);
        let complement_sum = set.measure() + set.complement().measure();
        assert_eq!(complement_sum, BigRational::one(), "measure + complement != 1");
        let pre = od.preimage(&set).unwrap();
        assert_eq!(pre.measure(), set.measure(), "preimage changed measure");
        checked += 1;
    }
    announce(
        1,
        checked == 1000,
        "1000 random rank<=20 sets, exact complement and preimage measures",
        start.elapsed().as_secs_f64(),
        10.0,
    );
}

#[test]
fn criterion_2_tower_suite() {
    let start = Instant::now();
    let mut rng = TestRng::new(0xC2);
    for i in 0..200 {
        let h = 1 + rng.below(1 << 16);
        let eps = BigRational::new((1 + rng.below(2046) as i64).into(), 4096.into());
        let m = h.next_power_of_two().trailing_zeros();
        let p = m + 12;
        let t = build_tower(h, &eps, p).unwrap();

        // all level pairs disjoint: endpoints scaled to integers at rank p,
        // sorted intervals must not overlap
        let mut endpoints: Vec<(u128, u128)> = Vec::with_capacity(h as usize);
        let mut level_cells = 0u128;
        for level in 1..=h {
            for iv in t.level_set(level).unwrap().intervals() {
                let lo = iv.lo().scaled_numer_u128(p);
                let hi = iv.hi().scaled_numer_u128(p);
                endpoints.push((lo, hi));
                level_cells += hi - lo;
            }
        }
        endpoints.sort_unstable();
        for w in endpoints.windows(2) {
            assert!(w[0].1 <= w[1].0, "tower {} (h={}) has overlapping levels", i, h);
        }

        // exact measure h*d, within target, shortfall bound
        let measure = t.measure();
        assert_eq!(
            BigRational::new(level_cells.into(), num_bigint::BigInt::one() << p),
            measure,
            "levels do not sum to h*d"
        );
        assert_eq!(
            measure,
            BigRational::from_integer(h.into()) * t.base_width().to_rational()
        );
        assert!(measure <= eps, "tower overshoots target");
        let shortfall = &eps - &measure;
        let bound = BigRational::new(h.into(), num_bigint::BigInt::one() << p);
        assert!(
            shortfall < bound,
            "tower {} shortfall {} >= h*2^-p = {}",
            i,
            shortfall,
            bound
        );
    }
    announce(
        2,
        true,
        "200 random towers (h<=2^16): disjoint levels, exact h*d, shortfall < h*2^-p",
        start.elapsed().as_secs_f64(),
        30.0,
    );
}

#[test]
fn criterion_3_exact_cycle_identity() {
    let start = Instant::now();
    let mut rng = TestRng::new(0xC3);
    for _ in 0..100 {
        let f = random_step_fn(&mut rng, 10, 6);
        let x = Dyadic::from_parts(rng.below(1 << 20), 20).unwrap();
        let avg = birkhoff_average(&x, 1 << 10, &f).unwrap();
        assert_eq!(avg, f.integral(), "Z exact-cycle identity violated");
    }
    for _ in 0..100 {
        let f = random_step_fn_2d(&mut rng, 5);
        let x = vec![
            Dyadic::from_parts(rng.below(1 << 12), 12).unwrap(),
            Dyadic::from_parts(rng.below(1 << 12), 12).unwrap(),
        ];
        let avg = birkhoff_average_zn(&x, 1 << 5, &f).unwrap();
        assert_eq!(avg, f.integral(), "Z^2 exact-cycle identity violated");
    }
    announce(
        3,
        true,
        "A(x, 2^m, f) = integral exactly for 100 random f (Z) and 100 (Z^2)",
        start.elapsed().as_secs_f64(),
        60.0,
    );
}

#[test]
fn criterion_4_oracle_agreement() {
    let start = Instant::now();
    let mut rng = TestRng::new(0xC4);
    let mut within = 0u32;
    let total = 25u32;
    for trial in 0..total {
        let f = random_step_fn(&mut rng, 8, 5);
        let n = 1 + rng.below(256);
        let center = f.integral();
        let threshold = BigRational::new((1 + rng.below(40) as i64).into(), 100.into());
        let exact = deviation_set_exact(n, &f, &center, &threshold)
            .unwrap()
            .measure();
        let est = deviation_prob_mc(n, &f, &center, &threshold, 10_000, 1000 + trial as u64)
            .unwrap();
        let gap = (est.probability.clone() - &exact).abs();
        let radius = BigRational::from_float(est.confidence_radius).unwrap();
        if gap <= radius {
            within += 1;
        }
    }
    announce(
        4,
        within >= 24,
        &format!(
            "{}/{} Monte-Carlo estimates within one Hoeffding radius of the exact measure",
            within, total
        ),
        start.elapsed().as_secs_f64(),
        120.0,
    );
}

/// The desk-scale Z-action run: f0 = 1, K = 3, a_k = 2^-k/8, delta0 = 1/40,
/// M_k = 10^k, 10^4 samples. The eps_k = 2 a_k sum to 7/32, so the measure
/// budget is 1/4.
fn z_action_desk_params() -> slow_birkhoff::ConstructionParams {
    slow_birkhoff::ConstructionParams {
        dimension: 1,
        f0: StepFunction::constant(rat(1, 1), 1).unwrap(),
        deviations: vec![rat(1, 16), rat(1, 32), rat(1, 64)],
        lower_scales: vec![10, 100, 1000],
        budget: rat(1, 4),
        delta0: rat(1, 40),
        mc: McSettings {
            samples: 10_000,
            seed: 17,
            alpha: 0.01,
        },
        precision: 60,
        exact_threshold: 1 << 12,
        safety: rat(2, 1),
        scale_cap: 1 << 48,
    }
}

fn z_action_desk_run() -> &'static (FunctionSpec, DeviationReport, f64) {
    static RUN: OnceLock<(FunctionSpec, DeviationReport, f64)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let (spec, report) = run_construction(&z_action_desk_params()).unwrap();
        (spec, report, start.elapsed().as_secs_f64())
    })
}

#[test]
fn criterion_5_slow_z_action_desk_scale() {
    let (_, report, elapsed) = z_action_desk_run();
    let mut ok = report.failed_stage.is_none() && report.stages.len() == 3;
    for st in &report.stages {
        // floor 1 - 2 sum_{i>=k} delta_i = 1 - 4 delta_k, minus the radius
        let radius = BigRational::from_float(st.final_estimate.confidence_radius).unwrap();
        ok &= st.final_estimate.probability > &st.floor - radius;
        ok &= st.floor == BigRational::one() - rat(4, 1) * &st.delta;
        ok &= st.n_scale > [0, 10, 100, 1000][st.k];
    }
    ok &= report.c_measure >= rat(3, 4);
    let detail = format!(
        "exit 0, floors {} with final probs {}",
        report
            .stages
            .iter()
            .map(|s| slow_birkhoff::text::format_rational(&s.floor))
            .collect::<Vec<_>>()
            .join("/"),
        report
            .stages
            .iter()
            .map(|s| slow_birkhoff::text::format_rational(&s.final_estimate.probability))
            .collect::<Vec<_>>()
            .join("/"),
    );
    announce(5, ok, &detail, *elapsed, 300.0);
}

#[test]
fn criterion_6_slow_z2_action_desk_scale() {
    let start = Instant::now();
    let params = slow_birkhoff::ConstructionParams {
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
    let (_, report) = run_construction(&params).unwrap();
    let mut ok = report.failed_stage.is_none() && report.stages.len() == 2;
    for st in &report.stages {
        ok &= st.n_scale <= 512;
        let radius = BigRational::from_float(st.final_estimate.confidence_radius).unwrap();
        ok &= st.final_estimate.probability > &st.floor - radius;
    }
    announce(
        6,
        ok,
        &format!(
            "Z^2 run with N_k = {}, both floors hold within radius",
            report
                .stages
                .iter()
                .map(|s| s.n_scale.to_string())
                .collect::<Vec<_>>()
                .join("/")
        ),
        start.elapsed().as_secs_f64(),
        600.0,
    );
}

#[test]
fn criterion_7_integral_drop() {
    let start = Instant::now();
    let (_, report, _) = z_action_desk_run();
    let st1 = &report.stages[0];
    // exact rational comparison: int f0 - int f1 > 0.9 * eps_1 * int f0
    let f0_integral = BigRational::one();
    let drop = &f0_integral - &st1.integral_fk;
    let floor = rat(9, 10) * &st1.eps * &f0_integral;
    let ok = drop > floor && st1.drop_ok;
    announce(
        7,
        ok,
        &format!(
            "stage-1 drop {} > 0.9 eps_1 = {} (exact rationals)",
            slow_birkhoff::text::format_rational(&drop),
            slow_birkhoff::text::format_rational(&floor)
        ),
        start.elapsed().as_secs_f64(),
        300.0,
    );
}

#[test]
fn criterion_8_determinism() {
    let start = Instant::now();
    let (_, first, _) = z_action_desk_run();
    let (_, second) = run_construction(&z_action_desk_params()).unwrap();
    let ok = report_csv(first) == report_csv(&second);
    announce(
        8,
        ok,
        "identical seed reproduces report.csv byte for byte",
        start.elapsed().as_secs_f64(),
        300.0,
    );
}
