//! The staged construction of slowly converging averages.
//!
//! Stage k picks a scale N_k at which the current function's averages have
//! settled near its integral, then zeroes the function on a fresh tower of
//! height h_k >> N_k and measure eps_k = 2 a_k. Averages at scale N_k are
//! left untouched for most points while the integral drops, so the final
//! function deviates from its integral by more than a_k at every scale N_k
//! on a set of measure close to 1. All bookkeeping (integrals, measures,
//! tower footprints) is exact; deviation probabilities are exact where the
//! cell sweep is affordable and seeded Monte-Carlo otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::birkhoff::{f64_to_rational, mc_estimate, DeviationEstimate, EstimateMethod, McJob};
use crate::boxes::BoxSet;
use crate::dyadic::RANK_CAP;
use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, ScheduleEntry, TowerDescriptor};
use crate::interval::IntervalSet;
use crate::kernel::{CompareMode, FnKernel};
use crate::step::{Region, StepFunction};
use crate::tower::{build_factor, Tower, TowerFactor, TowerZn};

const MAX_CERT_RETRIES: u32 = 6;

/// Stage towers floor their base width at rank m_k + this slack rather than
/// the full configured precision: a non-dyadic target at rank m + 16 already
/// leaves a shortfall below h * 2^-(m+16) <= 2^-16 while keeping the tower's
/// reversed-index footprint to at most 2^16 fragments at any stage depth.
pub const TOWER_PRECISION_SLACK: u32 = 16;

/// Stream tags so every Monte-Carlo estimate draws an independent,
/// reproducible sample stream keyed by purpose and stage data.
mod purpose {
    pub const FIND: u64 = 1;
    pub const CERT: u64 = 2;
    pub const FINAL: u64 = 3;
}

fn mc_tag(purpose: u64, k: usize, n: u64, h: u64) -> u64 {
    let mut t = purpose.wrapping_mul(0x9E3779B97F4A7C15);
    t = t.wrapping_add((k as u64).wrapping_mul(0xBF58476D1CE4E5B9));
    t = t.wrapping_add(n.wrapping_mul(0x94D049BB133111EB));
    t.wrapping_add(h)
}

/// Monte-Carlo settings shared by every estimate in a run.
#[derive(Clone, Debug, PartialEq)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            samples: 10_000,
            seed: 1,
            alpha: crate::birkhoff::DEFAULT_ALPHA,
        }
    }
}

/// Everything a construction run needs.
#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub dimension: usize,
    pub f0: StepFunction,
    /// Target deviations a_1..a_K (eps_k = 2 a_k).
    pub deviations: Vec<BigRational>,
    /// Lower scale bounds M_1..M_K, strictly increasing.
    pub lower_scales: Vec<u64>,
    /// Upper bound on 1 - m(C); the sum of the eps_k must fit under it.
    pub budget: BigRational,
    /// delta_k = delta0 * 2^-k.
    pub delta0: BigRational,
    pub mc: McSettings,
    /// Dyadic rank for tower base widths.
    pub precision: u32,
    /// N at or below which deviation measures are computed exactly.
    pub exact_threshold: u64,
    /// Safety factor s in the height rule h = 2^ceil(log2(s N / delta)).
    pub safety: BigRational,
    /// Hard cap for the scale search.
    pub scale_cap: u64,
}

impl ConstructionParams {
    pub fn stage_count(&self) -> usize {
        self.deviations.len()
    }

    pub fn delta(&self, k: usize) -> BigRational {
        &self.delta0 / BigRational::from_integer(BigInt::one() << k)
    }

    pub fn eps(&self, k: usize) -> BigRational {
        &self.deviations[k - 1] * BigRational::from_integer(BigInt::from(2))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::PreconditionViolated("dimension must be >= 1".into()));
        }
        if self.f0.dim() != self.dimension {
            return Err(Error::PreconditionViolated(format!(
                "f0 has dimension {}, params say {}",
                self.f0.dim(),
                self.dimension
            )));
        }
        if self.deviations.len() != self.lower_scales.len() {
            return Err(Error::PreconditionViolated(format!(
                "{} deviations vs {} lower scales",
                self.deviations.len(),
                self.lower_scales.len()
            )));
        }
        if !self.budget.is_positive() || self.budget >= BigRational::one() {
            return Err(Error::PreconditionViolated(format!(
                "budget {} outside (0,1)",
                self.budget
            )));
        }
        let mut eps_total = BigRational::zero();
        for (i, a) in self.deviations.iter().enumerate() {
            if !a.is_positive() {
                return Err(Error::PreconditionViolated(format!(
                    "deviation a_{} = {} must be positive",
                    i + 1,
                    a
                )));
            }
            eps_total += self.eps(i + 1);
        }
        if eps_total > self.budget {
            return Err(Error::PreconditionViolated(format!(
                "sum of eps_k = 2 a_k is {}, exceeding budget {}",
                eps_total, self.budget
            )));
        }
        for w in self.lower_scales.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::PreconditionViolated(
                    "lower scales must be strictly increasing".into(),
                ));
            }
        }
        if !self.delta0.is_positive() {
            return Err(Error::PreconditionViolated("delta0 must be positive".into()));
        }
        for k in 1..=self.stage_count() {
            if self.delta(k) >= self.eps(k) {
                return Err(Error::PreconditionViolated(format!(
                    "delta_{k} = {} must stay below eps_{k} = {}",
                    self.delta(k),
                    self.eps(k)
                )));
            }
        }
        let integral_f0 = self.f0.integral();
        if !integral_f0.is_positive() {
            return Err(Error::PreconditionViolated(
                "f0 must have positive integral".into(),
            ));
        }
        let head_room = &integral_f0 * (BigRational::one() - &self.budget);
        for (i, a) in self.deviations.iter().enumerate() {
            if *a >= head_room {
                return Err(Error::PreconditionViolated(format!(
                    "a_{} = {} is too large relative to integral(f0)*(1-budget) = {}",
                    i + 1,
                    a,
                    head_room
                )));
            }
        }
        if self.precision > RANK_CAP {
            return Err(Error::RankCapExceeded {
                rank: self.precision,
                cap: RANK_CAP,
            });
        }
        if self.mc.samples == 0 {
            return Err(Error::PreconditionViolated("mc.samples must be >= 1".into()));
        }
        if !(self.mc.alpha > 0.0 && self.mc.alpha < 1.0) {
            return Err(Error::PreconditionViolated(format!(
                "mc.alpha {} outside (0,1)",
                self.mc.alpha
            )));
        }
        if self.safety < BigRational::one() {
            return Err(Error::PreconditionViolated(
                "safety factor must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-stage bookkeeping kept in the state and echoed into reports.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub k: usize,
    pub n_scale: u64,
    pub height: u64,
    pub eps: BigRational,
    pub delta: BigRational,
    pub integral_fk: BigRational,
    /// Certification of m(|A(x,N_k,f_k) - int f_k| > eps_k/2) > 1 - delta_k.
    pub stage_estimate: DeviationEstimate,
    /// Integral drop beats 0.9 eps_k * (the previous integral scale).
    pub drop_ok: bool,
    /// |int f_k - m(C_k) int f0| < delta_k.
    pub near_invariance_ok: bool,
}

/// The evolving construction: accumulated towers, the current truncation
/// f_k = f0 * 1_{C_k} held symbolically, and the stage history.
pub struct ConstructionState {
    dim: usize,
    f0: StepFunction,
    factors: Vec<TowerFactor>,
    kernel: FnKernel,
    records: Vec<StageRecord>,
    prev_scale: u64,
}

impl ConstructionState {
    pub fn initial(params: &ConstructionParams) -> Result<Self> {
        let kernel = FnKernel::new(&params.f0, vec![])?;
        Ok(ConstructionState {
            dim: params.dimension,
            f0: params.f0.clone(),
            factors: Vec::new(),
            kernel,
            records: Vec::new(),
            prev_scale: 0,
        })
    }

    pub fn stage(&self) -> usize {
        self.records.len()
    }

    pub fn history(&self) -> &[StageRecord] {
        &self.records
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exact integral of the current f_k.
    pub fn integral_f(&self) -> BigRational {
        self.kernel.integral()
    }

    /// Exact measure of the current C_k.
    pub fn measure_c(&self) -> BigRational {
        self.kernel.complement_measure()
    }

    pub fn towers_z(&self) -> Option<Vec<Tower>> {
        (self.dim == 1).then(|| {
            self.factors
                .iter()
                .map(|f| Tower::from_factor(f.clone()))
                .collect()
        })
    }

    pub fn towers_zn(&self) -> Option<Vec<TowerZn>> {
        (self.dim > 1).then(|| {
            self.factors
                .iter()
                .map(|f| TowerZn::from_factor(f.clone(), self.dim))
                .collect()
        })
    }

    /// Materializes C_k. Feasible at small scale only; the construction
    /// itself never calls this.
    pub fn c_set(&self) -> Result<Region> {
        if self.dim == 1 {
            let mut union = IntervalSet::empty();
            for f in &self.factors {
                union = union.union(&f.tower_set()?);
            }
            Ok(Region::Intervals(union.complement()))
        } else {
            let mut c = BoxSet::unit(self.dim);
            for f in &self.factors {
                let t = TowerZn::from_factor(f.clone(), self.dim);
                c = c.subtract(&crate::tower::tower_set_zn(&t)?);
            }
            Ok(Region::Boxes(c))
        }
    }

    /// Materializes f_k = restrict(f0, C_k). Small scale only.
    pub fn f_k(&self) -> Result<StepFunction> {
        self.f0.restrict(&self.c_set()?)
    }

    pub(crate) fn kernel(&self) -> &FnKernel {
        &self.kernel
    }
}

fn make_kernel(f0: &StepFunction, factors: &[TowerFactor]) -> Result<FnKernel> {
    let cells = factors
        .iter()
        .map(|f| f.cells())
        .collect::<Result<Vec<_>>>()?;
    FnKernel::new(f0, cells)
}

/// Exact-or-Monte-Carlo deviation/concentration estimate for a compiled
/// function. Exact whenever the 1-d cell sweep is affordable and N is within
/// the configured exact threshold.
fn estimate(
    kernel: &FnKernel,
    n: u64,
    center: &BigRational,
    threshold: &BigRational,
    mode: CompareMode,
    params: &ConstructionParams,
    tag: u64,
) -> Result<DeviationEstimate> {
    if kernel.dim() == 1
        && n <= params.exact_threshold
        && kernel.max_rank() <= crate::kernel::MAX_SWEEP_RANK
    {
        let m = kernel.deviation_measure_exact(n, center, threshold, mode)?;
        return Ok(DeviationEstimate::exact(m));
    }
    Ok(mc_estimate(
        kernel,
        n,
        center,
        threshold,
        mode,
        &McJob {
            samples: params.mc.samples,
            seed: params.mc.seed,
            tag,
            alpha: params.mc.alpha,
        },
    ))
}

/// Does the estimate establish probability > 1 - delta?
///
/// Exact estimates compare directly. Monte-Carlo estimates must clear the
/// bound with a margin of one confidence radius; when delta is smaller than
/// the radius that demand degenerates to "every sample passed", the
/// strongest statement a finite sample can make (the search still
/// terminates because the odometer's averages converge uniformly, so the
/// true probability eventually hits 1 exactly).
fn establishes(est: &DeviationEstimate, delta: &BigRational) -> bool {
    let bound = BigRational::one() - delta;
    match est.method {
        EstimateMethod::Exact => est.probability > bound,
        EstimateMethod::MonteCarlo => {
            let radius = f64_to_rational(est.confidence_radius);
            let demanded = (&bound + radius).min(BigRational::one());
            est.probability > bound && est.probability >= demanded
        }
    }
}

/// Stage certification: probability > 1 - delta as estimated.
fn certifies(est: &DeviationEstimate, delta: &BigRational) -> bool {
    est.probability > BigRational::one() - delta
}

/// Finds the smallest tested N > lower (N = lower+1, then doubling) at which
/// the averages of the compiled function concentrate:
/// m(x : |A(x,N,f) - int f| < eps/10) > 1 - delta.
pub(crate) fn find_scale_kernel(
    kernel: &FnKernel,
    integral: &BigRational,
    eps: &BigRational,
    delta: &BigRational,
    lower: u64,
    params: &ConstructionParams,
    stage: usize,
) -> Result<(u64, DeviationEstimate)> {
    let threshold = eps / BigRational::from_integer(BigInt::from(10));
    let mut n = lower
        .checked_add(1)
        .ok_or(Error::ScaleSearchExhausted { cap: params.scale_cap })?;
    loop {
        if n > params.scale_cap {
            return Err(Error::ScaleSearchExhausted {
                cap: params.scale_cap,
            });
        }
        let est = estimate(
            kernel,
            n,
            integral,
            &threshold,
            CompareMode::Inside,
            params,
            mc_tag(purpose::FIND, stage, n, 0),
        )?;
        if establishes(&est, delta) {
            return Ok((n, est));
        }
        n = n
            .checked_mul(2)
            .ok_or(Error::ScaleSearchExhausted { cap: params.scale_cap })?;
    }
}

/// Public wrapper: scale search for a materialized step function.
pub fn find_scale(
    f: &StepFunction,
    eps: &BigRational,
    delta: &BigRational,
    lower: u64,
    params: &ConstructionParams,
) -> Result<u64> {
    if !f.integral().is_positive() {
        return Err(Error::PreconditionViolated(
            "find_scale needs a function with positive integral".into(),
        ));
    }
    if !(delta.is_positive() && *delta < BigRational::one()) {
        return Err(Error::PreconditionViolated(format!(
            "delta {} outside (0,1)",
            delta
        )));
    }
    let kernel = FnKernel::new(f, vec![])?;
    let integral = kernel.integral();
    find_scale_kernel(&kernel, &integral, eps, delta, lower, params, 0).map(|(n, _)| n)
}

/// Height rule h = 2^ceil(log2(s N / delta)): the fraction of tower levels
/// whose forward N-orbit stays inside the tower is at least
/// 1 - N/h >= 1 - delta/s.
pub fn choose_height(n: u64, delta: &BigRational, safety: &BigRational) -> Result<u64> {
    if n == 0 {
        return Err(Error::PreconditionViolated("N must be >= 1".into()));
    }
    if !(delta.is_positive() && *delta < BigRational::one()) {
        return Err(Error::PreconditionViolated(format!(
            "delta {} outside (0,1)",
            delta
        )));
    }
    if *safety < BigRational::one() {
        return Err(Error::PreconditionViolated("safety must be >= 1".into()));
    }
    let target = safety * BigRational::from_integer(BigInt::from(n)) / delta;
    let mut h: u64 = 1;
    while BigRational::from_integer(BigInt::from(h)) < target {
        h = h.checked_mul(2).ok_or_else(|| {
            Error::PreconditionViolated(format!(
                "tower height overflows u64 for N={} delta={} s={}",
                n, delta, safety
            ))
        })?;
    }
    Ok(h)
}

/// Runs stage k (must be the next stage) and returns the advanced state.
pub fn run_stage(
    state: ConstructionState,
    k: usize,
    params: &ConstructionParams,
) -> Result<ConstructionState> {
    if k != state.stage() + 1 || k > params.stage_count() {
        return Err(Error::PreconditionViolated(format!(
            "stage {} is not the next stage (completed {})",
            k,
            state.stage()
        )));
    }
    let eps = params.eps(k);
    let delta = params.delta(k);

    let spent: BigRational = (1..=k).map(|j| params.eps(j)).sum();
    if spent > params.budget {
        return Err(Error::BudgetExhausted { stage: k });
    }

    let prev_integral = state.kernel.integral();
    let truncation_floor = &prev_integral - &eps * params.f0.max_value();
    if truncation_floor <= &eps / BigRational::from_integer(BigInt::from(2)) {
        return Err(Error::PreconditionViolated(format!(
            "a_{} too large: integral {} cannot absorb a cut of measure {}",
            k, prev_integral, eps
        )));
    }

    let lower = params.lower_scales[k - 1].max(state.prev_scale);
    let (n_k, _scale_est) = find_scale_kernel(
        &state.kernel,
        &prev_integral,
        &eps,
        &delta,
        lower,
        params,
        k,
    )?;

    let half_eps = &eps / BigRational::from_integer(BigInt::from(2));
    let mut height = choose_height(n_k, &delta, &params.safety)?;
    for _retry in 0..=MAX_CERT_RETRIES {
        let rank_floor = crate::tower::ceil_log2(height);
        let precision = params.precision.min(rank_floor + TOWER_PRECISION_SLACK);
        let factor = build_factor(height, &eps, precision, state.dim as u32)?;
        let mut factors = state.factors.clone();
        factors.push(factor);
        let kernel_k = make_kernel(&state.f0, &factors)?;
        let integral_k = kernel_k.integral();

        let est = estimate(
            &kernel_k,
            n_k,
            &integral_k,
            &half_eps,
            CompareMode::Outside,
            params,
            mc_tag(purpose::CERT, k, n_k, height),
        )?;
        if certifies(&est, &delta) {
            let c_measure = kernel_k.complement_measure();
            let near_invariance_ok =
                (&integral_k - &c_measure * params.f0.integral()).abs() < delta;
            let drop = &prev_integral - &integral_k;
            let drop_scale = if k == 1 {
                params.f0.integral()
            } else {
                prev_integral.clone()
            };
            let drop_ok =
                drop > BigRational::new(BigInt::from(9), BigInt::from(10)) * &eps * drop_scale;
            let record = StageRecord {
                k,
                n_scale: n_k,
                height,
                eps,
                delta,
                integral_fk: integral_k,
                stage_estimate: est,
                drop_ok,
                near_invariance_ok,
            };
            let mut records = state.records;
            records.push(record);
            return Ok(ConstructionState {
                dim: state.dim,
                f0: state.f0,
                factors,
                kernel: kernel_k,
                records,
                prev_scale: n_k,
            });
        }
        height = height.checked_mul(2).ok_or(Error::CertificationFailed {
            stage: k,
            retries: MAX_CERT_RETRIES,
        })?;
    }
    Err(Error::CertificationFailed {
        stage: k,
        retries: MAX_CERT_RETRIES,
    })
}

/// One verified row of the final report.
#[derive(Clone, Debug)]
pub struct StageReport {
    pub k: usize,
    pub n_scale: u64,
    pub height: u64,
    pub eps: BigRational,
    pub delta: BigRational,
    pub integral_fk: BigRational,
    pub stage_estimate: DeviationEstimate,
    pub final_estimate: DeviationEstimate,
    /// Theoretical floor 1 - 2 sum_{i>=k} delta_i = 1 - 4 delta_k.
    pub floor: BigRational,
    /// final probability > floor - confidence radius
    pub floor_met: bool,
    pub drop_ok: bool,
    pub near_invariance_ok: bool,
}

/// Full outcome of a construction or verification run.
#[derive(Clone, Debug)]
pub struct DeviationReport {
    pub dimension: usize,
    pub stages: Vec<StageReport>,
    pub final_integral: BigRational,
    pub c_measure: BigRational,
    pub seed: u64,
    /// Some(stage) when stage certification gave up; the report covers the
    /// completed prefix.
    pub failed_stage: Option<usize>,
}

impl DeviationReport {
    pub fn all_floors_met(&self) -> bool {
        self.stages.iter().all(|s| s.floor_met)
    }

    pub fn passed(&self) -> bool {
        self.failed_stage.is_none() && self.all_floors_met()
    }
}

/// The theoretical floor for stage k: 1 - 2 sum_{i >= k} delta_i with
/// delta_i = delta0 2^-i, i.e. 1 - 4 delta_k.
fn floor_for(delta_k: &BigRational) -> BigRational {
    BigRational::one() - BigRational::from_integer(BigInt::from(4)) * delta_k
}

fn final_pass(
    kernel: &FnKernel,
    schedule: &[ScheduleEntry],
    records: Vec<StageRecord>,
    params: &ConstructionParams,
    failed_stage: Option<usize>,
) -> Result<DeviationReport> {
    let final_integral = kernel.integral();
    let c_measure = kernel.complement_measure();
    let mut stages = Vec::with_capacity(records.len());
    for rec in records {
        let entry = &schedule[rec.k - 1];
        let final_est = estimate(
            kernel,
            rec.n_scale,
            &final_integral,
            &entry.deviation,
            CompareMode::Outside,
            params,
            mc_tag(purpose::FINAL, rec.k, rec.n_scale, 0),
        )?;
        let floor = floor_for(&rec.delta);
        let radius = f64_to_rational(final_est.confidence_radius);
        let floor_met = final_est.probability > &floor - radius;
        stages.push(StageReport {
            k: rec.k,
            n_scale: rec.n_scale,
            height: rec.height,
            eps: rec.eps,
            delta: rec.delta,
            integral_fk: rec.integral_fk,
            stage_estimate: rec.stage_estimate,
            final_estimate: final_est,
            floor,
            floor_met,
            drop_ok: rec.drop_ok,
            near_invariance_ok: rec.near_invariance_ok,
        });
    }
    Ok(DeviationReport {
        dimension: params.dimension,
        stages,
        final_integral,
        c_measure,
        seed: params.mc.seed,
        failed_stage,
    })
}

/// Runs the whole construction. Stage-certification failure is reported, not
/// raised: the returned report covers the completed prefix and
/// `failed_stage` marks the stage that gave up. Config and arithmetic
/// errors are raised.
pub fn run_construction(params: &ConstructionParams) -> Result<(FunctionSpec, DeviationReport)> {
    params.validate()?;
    let mut state = ConstructionState::initial(params)?;
    let mut failed_stage = None;
    for k in 1..=params.stage_count() {
        match run_stage(state, k, params) {
            Ok(next) => state = next,
            Err(Error::CertificationFailed { stage, .. }) => {
                failed_stage = Some(stage);
                // state was consumed; rebuild the completed prefix
                state = rebuild_state(params, k - 1)?;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let schedule: Vec<ScheduleEntry> = state
        .records
        .iter()
        .map(|r| ScheduleEntry {
            n_scale: r.n_scale,
            deviation: params.deviations[r.k - 1].clone(),
            delta: r.delta.clone(),
        })
        .collect();
    let spec = FunctionSpec {
        dimension: params.dimension,
        f0: params.f0.clone(),
        towers: state
            .factors
            .iter()
            .map(|f| TowerDescriptor {
                base_width: f.d.clone(),
                height: f.height,
                rank_floor: f.rank_floor,
            })
            .collect(),
        schedule: schedule.clone(),
    };
    let c_floor = BigRational::one() - &params.budget;
    let report = final_pass(
        state.kernel(),
        &schedule,
        state.records.clone(),
        params,
        failed_stage,
    )?;
    if report.c_measure < c_floor {
        return Err(Error::PreconditionViolated(format!(
            "budget accounting violated: m(C) = {} below {}",
            report.c_measure, c_floor
        )));
    }
    Ok((spec, report))
}

// run_stage consumes its state; after a certification failure the completed
// prefix is re-run deterministically (stages are pure functions of params).
fn rebuild_state(params: &ConstructionParams, upto: usize) -> Result<ConstructionState> {
    let mut state = ConstructionState::initial(params)?;
    for k in 1..=upto {
        state = run_stage(state, k, params)?;
    }
    Ok(state)
}

/// Independent re-verification of a saved function: recomputes the exact
/// integral and complement measure, re-certifies each stage and re-checks
/// every final floor with fresh (possibly overridden) Monte-Carlo settings.
pub fn verify(spec: &FunctionSpec, mc: &McSettings, exact_threshold: u64) -> Result<DeviationReport> {
    let factors: Vec<TowerFactor> = spec
        .towers
        .iter()
        .map(|t| TowerFactor {
            d: t.base_width.clone(),
            height: t.height,
            rank_floor: t.rank_floor,
        })
        .collect();
    if spec.schedule.len() != factors.len() {
        return Err(Error::MalformedSpec(format!(
            "{} schedule entries vs {} towers",
            spec.schedule.len(),
            factors.len()
        )));
    }
    let params = ConstructionParams {
        dimension: spec.dimension,
        f0: spec.f0.clone(),
        deviations: spec.schedule.iter().map(|e| e.deviation.clone()).collect(),
        lower_scales: (1..=spec.schedule.len() as u64).collect(),
        budget: BigRational::new(BigInt::one(), BigInt::from(2)),
        delta0: BigRational::one(),
        mc: mc.clone(),
        precision: RANK_CAP,
        exact_threshold,
        safety: BigRational::one(),
        scale_cap: u64::MAX,
    };

    // re-create stage records by re-certifying against the stored towers
    let mut records = Vec::new();
    let mut prev_integral = spec.f0.integral();
    for (i, entry) in spec.schedule.iter().enumerate() {
        let k = i + 1;
        let kernel_k = make_kernel(&spec.f0, &factors[..k])?;
        let integral_k = kernel_k.integral();
        let eps = &entry.deviation * BigRational::from_integer(BigInt::from(2));
        let half_eps = &eps / BigRational::from_integer(BigInt::from(2));
        let est = estimate(
            &kernel_k,
            entry.n_scale,
            &integral_k,
            &half_eps,
            CompareMode::Outside,
            &params,
            mc_tag(purpose::CERT, k, entry.n_scale, factors[i].height),
        )?;
        let c_measure = kernel_k.complement_measure();
        let near_invariance_ok =
            (&integral_k - &c_measure * spec.f0.integral()).abs() < entry.delta;
        let drop = &prev_integral - &integral_k;
        let drop_scale = if k == 1 {
            spec.f0.integral()
        } else {
            prev_integral.clone()
        };
        let drop_ok =
            drop > BigRational::new(BigInt::from(9), BigInt::from(10)) * &eps * drop_scale;
        records.push(StageRecord {
            k,
            n_scale: entry.n_scale,
            height: factors[i].height,
            eps,
            delta: entry.delta.clone(),
            integral_fk: integral_k.clone(),
            stage_estimate: est,
            drop_ok,
            near_invariance_ok,
        });
        prev_integral = integral_k;
    }

    let kernel = make_kernel(&spec.f0, &factors)?;
    final_pass(&kernel, &spec.schedule, records, &params, None)
}
