//! Birkhoff averages, exact deviation sets and Monte-Carlo deviation
//! probabilities.
//!
//! The sum convention is i = 1..N: A(x, N, f) = (1/N) * sum f(T^i x). The
//! off-by-one matters for the exact identities, so every routine here and in
//! the construction uses this convention.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::kernel::{cells_to_interval_set, compare, CompareMode, FnKernel};
use crate::step::StepFunction;

/// Sample points are uniform dyadics truncated at this rank; the sampling
/// bias is at most 2^-53 per coordinate, negligible against any Hoeffding
/// radius in play.
pub const SAMPLE_RANK: u32 = 53;

/// Default cap on N for exact deviation sets.
pub const DEFAULT_EXACT_THRESHOLD: u64 = 1 << 12;

/// Default Hoeffding miss probability.
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Default cap on N^n for the Z^n lattice average.
pub const DEFAULT_LATTICE_BUDGET: u128 = 1 << 40;

/// How a deviation probability was obtained.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EstimateMethod {
    Exact,
    MonteCarlo,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::Exact => "exact",
            EstimateMethod::MonteCarlo => "mc",
        }
    }
}

/// A measured (or exactly computed) probability with its confidence data.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationEstimate {
    /// Exact rational: cell-count fraction (exact) or hit fraction (MC).
    pub probability: BigRational,
    pub method: EstimateMethod,
    /// 0 for exact estimates.
    pub sample_count: u64,
    /// Hoeffding radius sqrt(ln(2/alpha) / (2 samples)); 0 for exact.
    pub confidence_radius: f64,
    pub seed: u64,
}

impl DeviationEstimate {
    pub fn exact(probability: BigRational) -> Self {
        DeviationEstimate {
            probability,
            method: EstimateMethod::Exact,
            sample_count: 0,
            confidence_radius: 0.0,
            seed: 0,
        }
    }
}

/// sqrt(ln(2/alpha) / (2 n)).
pub fn hoeffding_radius(samples: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * samples as f64)).sqrt()
}

/// Exact conversion of a nonnegative f64 to a rational (f64s are dyadic).
pub(crate) fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

// ---------------------------------------------------------------------------
// counter-based sample stream

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// The reversed index of sample `index`, coordinate `coord`: a pure function
/// of its arguments, so parallel evaluation order cannot change results.
pub(crate) fn sample_rev(seed: u64, tag: u64, index: u64, coord: u32) -> u128 {
    let mut state = splitmix(seed);
    state = splitmix(state ^ splitmix(tag));
    state = splitmix(state ^ splitmix(index));
    state = splitmix(state ^ splitmix(coord as u64));
    (state >> (64 - SAMPLE_RANK)) as u128
}

/// One seeded Monte-Carlo estimation job: the stream is fully determined by
/// (seed, tag, sample index, coordinate).
pub(crate) struct McJob {
    pub samples: u64,
    pub seed: u64,
    pub tag: u64,
    pub alpha: f64,
}

/// Deterministic Monte-Carlo deviation estimate for a compiled function.
pub(crate) fn mc_estimate(
    kernel: &FnKernel,
    n_steps: u64,
    center: &BigRational,
    threshold: &BigRational,
    mode: CompareMode,
    job: &McJob,
) -> DeviationEstimate {
    let dim = kernel.dim();
    let hits: u64 = (0..job.samples)
        .into_par_iter()
        .map(|s| {
            let x_rev: Vec<u128> = (0..dim as u32)
                .map(|j| sample_rev(job.seed, job.tag, s, j))
                .collect();
            let avg = kernel.average(&x_rev, n_steps);
            compare(&avg, center, threshold, mode) as u64
        })
        .sum();
    DeviationEstimate {
        probability: BigRational::new(BigInt::from(hits), BigInt::from(job.samples)),
        method: EstimateMethod::MonteCarlo,
        sample_count: job.samples,
        confidence_radius: hoeffding_radius(job.samples, job.alpha),
        seed: job.seed,
    }
}

// ---------------------------------------------------------------------------
// public operations

fn check_phase_point(x: &Dyadic) -> Result<()> {
    if x.is_one() {
        return Err(Error::InvalidDyadic("phase points lie in [0,1)".into()));
    }
    Ok(())
}

/// Exact Birkhoff average A(x, N, f) = (1/N) sum_{i=1..N} f(T^i x).
pub fn birkhoff_average(x: &Dyadic, n: u64, f: &StepFunction) -> Result<BigRational> {
    check_phase_point(x)?;
    if n == 0 {
        return Err(Error::PreconditionViolated("N must be >= 1".into()));
    }
    if f.dim() != 1 {
        return Err(Error::PreconditionViolated(
            "birkhoff_average is 1-d; use birkhoff_average_zn".into(),
        ));
    }
    let kernel = FnKernel::new(f, vec![])?;
    Ok(kernel.average(&[x.rev_index()], n))
}

/// Exact square average A(x, N, f) = (1/N^n) sum_{z in {1..N}^n} f(T^z x).
pub fn birkhoff_average_zn(x: &[Dyadic], n: u64, f: &StepFunction) -> Result<BigRational> {
    for xi in x {
        check_phase_point(xi)?;
    }
    if n == 0 {
        return Err(Error::PreconditionViolated("N must be >= 1".into()));
    }
    if f.dim() != x.len() {
        return Err(Error::PreconditionViolated(format!(
            "point has {} coordinates, f has dimension {}",
            x.len(),
            f.dim()
        )));
    }
    let cost = (n as u128)
        .checked_pow(f.dim() as u32)
        .unwrap_or(u128::MAX);
    if cost > DEFAULT_LATTICE_BUDGET {
        return Err(Error::EvalBudgetExceeded {
            cost,
            budget: DEFAULT_LATTICE_BUDGET,
        });
    }
    let kernel = FnKernel::new(f, vec![])?;
    let rev: Vec<u128> = x.iter().map(|xi| xi.rev_index()).collect();
    Ok(kernel.average(&rev, n))
}

/// Exact deviation set {x : |A(x,N,f) - center| > threshold} for the
/// Z-action, computed by refining [0,1) into the rank-Q cells on which every
/// orbit evaluation of f is constant and testing one representative per cell.
pub fn deviation_set_exact(
    n: u64,
    f: &StepFunction,
    center: &BigRational,
    threshold: &BigRational,
) -> Result<IntervalSet> {
    deviation_set_exact_with(n, f, center, threshold, DEFAULT_EXACT_THRESHOLD)
}

/// As [`deviation_set_exact`] with an explicit cap on N.
pub fn deviation_set_exact_with(
    n: u64,
    f: &StepFunction,
    center: &BigRational,
    threshold: &BigRational,
    exact_threshold: u64,
) -> Result<IntervalSet> {
    if n == 0 {
        return Err(Error::PreconditionViolated("N must be >= 1".into()));
    }
    if n > exact_threshold {
        return Err(Error::ExactThresholdExceeded {
            n,
            threshold: exact_threshold,
        });
    }
    if f.dim() != 1 {
        return Err(Error::PreconditionViolated(
            "exact deviation sets are 1-d only".into(),
        ));
    }
    let kernel = FnKernel::new(f, vec![])?;
    let cells = kernel.deviation_cells(n, center, threshold, CompareMode::Outside)?;
    cells_to_interval_set(&cells, kernel.max_rank())
}

/// Monte-Carlo estimate of m(x : |A(x,N,f) - center| > threshold) with the
/// default Hoeffding alpha. Deterministic given (seed, samples) regardless
/// of execution order.
pub fn deviation_prob_mc(
    n: u64,
    f: &StepFunction,
    center: &BigRational,
    threshold: &BigRational,
    samples: u64,
    seed: u64,
) -> Result<DeviationEstimate> {
    deviation_prob_mc_with(n, f, center, threshold, samples, seed, DEFAULT_ALPHA)
}

/// As [`deviation_prob_mc`] with an explicit alpha.
pub fn deviation_prob_mc_with(
    n: u64,
    f: &StepFunction,
    center: &BigRational,
    threshold: &BigRational,
    samples: u64,
    seed: u64,
    alpha: f64,
) -> Result<DeviationEstimate> {
    if n == 0 || samples == 0 {
        return Err(Error::PreconditionViolated(
            "N and samples must be >= 1".into(),
        ));
    }
    let kernel = FnKernel::new(f, vec![])?;
    Ok(mc_estimate(
        &kernel,
        n,
        center,
        threshold,
        CompareMode::Outside,
        &McJob {
            samples,
            seed,
            tag: 0,
            alpha,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{BoxSet, DyadicBox};
    use crate::interval::DyadicInterval;
    use crate::step::{Piece, Region};
    use num_traits::Signed;

    fn rat(n: i64, den: i64) -> BigRational {
        BigRational::new(n.into(), den.into())
    }

    fn d(num: u64, exp: u32) -> Dyadic {
        Dyadic::from_parts(num, exp).unwrap()
    }

    fn iv(a: (u64, u32), b: (u64, u32)) -> DyadicInterval {
        DyadicInterval::new(d(a.0, a.1), d(b.0, b.1)).unwrap()
    }

    fn half_indicator() -> StepFunction {
        StepFunction::indicator(IntervalSet::from_interval(iv((0, 0), (1, 1)))).unwrap()
    }

    #[test]
    fn constant_average() {
        let f = StepFunction::constant(rat(1, 1), 1).unwrap();
        for n in [1u64, 7, 100] {
            assert_eq!(birkhoff_average(&d(3, 3), n, &f).unwrap(), rat(1, 1));
        }
    }

    #[test]
    fn orbit_example() {
        // f = 1_{[0,1/2)}, x = 0, N = 2: f(1/2) = 0, f(1/4) = 1
        let f = half_indicator();
        assert_eq!(birkhoff_average(&d(0, 0), 2, &f).unwrap(), rat(1, 2));
    }

    #[test]
    fn exact_cycle_identity_rank2() {
        // f = 1_{[0,1/4)}, N = 4: average equals the integral for every x
        let f =
            StepFunction::indicator(IntervalSet::from_interval(iv((0, 0), (1, 2)))).unwrap();
        for num in 0..16u64 {
            assert_eq!(birkhoff_average(&d(num, 4), 4, &f).unwrap(), rat(1, 4));
        }
    }

    #[test]
    fn average_bounded_by_range() {
        let f = half_indicator();
        for num in 0..32u64 {
            let a = birkhoff_average(&d(num, 5), 3, &f).unwrap();
            assert!(a >= rat(0, 1) && a <= rat(1, 1));
        }
    }

    #[test]
    fn zn_constant_and_half_plane() {
        let c = StepFunction::constant(rat(3, 7), 2).unwrap();
        assert_eq!(
            birkhoff_average_zn(&[d(0, 0), d(1, 1)], 3, &c).unwrap(),
            rat(3, 7)
        );

        let on = DyadicBox::new(vec![iv((0, 0), (1, 1)), iv((0, 0), (1, 0))]).unwrap();
        let off = DyadicBox::new(vec![iv((1, 1), (1, 0)), iv((0, 0), (1, 0))]).unwrap();
        let f = StepFunction::new(vec![
            Piece {
                region: Region::Boxes(BoxSet::new(2, vec![on]).unwrap()),
                value: rat(1, 1),
            },
            Piece {
                region: Region::Boxes(BoxSet::new(2, vec![off]).unwrap()),
                value: rat(0, 1),
            },
        ])
        .unwrap();
        assert_eq!(
            birkhoff_average_zn(&[d(0, 0), d(0, 0)], 2, &f).unwrap(),
            rat(1, 2)
        );
    }

    #[test]
    fn deviation_set_trivial_cases() {
        let one = StepFunction::constant(rat(1, 1), 1).unwrap();
        let s = deviation_set_exact(4, &one, &rat(1, 1), &rat(1, 10)).unwrap();
        assert!(s.is_empty());

        let f = half_indicator();
        let s = deviation_set_exact(2, &f, &rat(1, 2), &rat(2, 5)).unwrap();
        assert!(s.is_empty());
        let s = deviation_set_exact(1, &f, &rat(1, 2), &rat(2, 5)).unwrap();
        assert_eq!(s, IntervalSet::unit());
    }

    #[test]
    fn deviation_set_threshold_guard() {
        let f = half_indicator();
        assert!(matches!(
            deviation_set_exact_with(100, &f, &rat(1, 2), &rat(1, 10), 50),
            Err(Error::ExactThresholdExceeded { .. })
        ));
    }

    #[test]
    fn lattice_budget_guard() {
        let f = StepFunction::constant(rat(1, 1), 2).unwrap();
        let x = [d(0, 0), d(0, 0)];
        assert!(matches!(
            birkhoff_average_zn(&x, 1 << 21, &f),
            Err(Error::EvalBudgetExceeded { .. })
        ));
        assert!(birkhoff_average_zn(&x, 1 << 19, &f).is_ok());
    }

    #[test]
    fn mc_zero_deviation_cases() {
        let one = StepFunction::constant(rat(1, 1), 1).unwrap();
        let est = deviation_prob_mc(5, &one, &rat(1, 1), &rat(1, 100), 500, 7).unwrap();
        assert_eq!(est.probability, rat(0, 1));

        let f = half_indicator();
        let est = deviation_prob_mc(2, &f, &rat(1, 2), &rat(2, 5), 500, 99).unwrap();
        assert_eq!(est.probability, rat(0, 1));
    }

    #[test]
    fn mc_deterministic_and_seed_sensitive() {
        let f = half_indicator();
        let a = deviation_prob_mc(3, &f, &rat(1, 2), &rat(1, 4), 2000, 1234).unwrap();
        let b = deviation_prob_mc(3, &f, &rat(1, 2), &rat(1, 4), 2000, 1234).unwrap();
        assert_eq!(a, b);
        let c = deviation_prob_mc(3, &f, &rat(1, 2), &rat(1, 4), 2000, 4321).unwrap();
        // same distribution, different draw; probabilities should be close
        let diff = (a.probability.clone() - c.probability.clone())
            .abs();
        assert!(diff < rat(1, 10), "seeds too far apart: {}", diff);
    }

    #[test]
    fn mc_matches_exact_measure() {
        // deviation of 1_{[0,1/2)} at N = 3 around center 1/2
        let f = half_indicator();
        let exact = {
            let kernel = FnKernel::new(&f, vec![]).unwrap();
            kernel
                .deviation_measure_exact(3, &rat(1, 2), &rat(1, 8), CompareMode::Outside)
                .unwrap()
        };
        let est = deviation_prob_mc(3, &f, &rat(1, 2), &rat(1, 8), 20_000, 5).unwrap();
        let gap = (est.probability.clone() - exact).abs();
        let radius = f64_to_rational(est.confidence_radius);
        assert!(gap <= radius, "gap {} radius {}", gap, radius);
    }

    #[test]
    fn radius_formula() {
        let r1 = hoeffding_radius(10_000, 0.01);
        let r2 = hoeffding_radius(20_000, 0.01);
        assert!((r1 / r2 - 2f64.sqrt()).abs() < 1e-12);
        assert!((r1 - ((2.0f64 / 0.01).ln() / 20_000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sample_stream_is_pure() {
        let a = sample_rev(42, 7, 1000, 1);
        let b = sample_rev(42, 7, 1000, 1);
        assert_eq!(a, b);
        assert!(a < 1u128 << SAMPLE_RANK);
        assert_ne!(a, sample_rev(42, 7, 1001, 1));
        assert_ne!(a, sample_rev(42, 7, 1000, 0));
        assert_ne!(a, sample_rev(43, 7, 1000, 1));
    }
}
