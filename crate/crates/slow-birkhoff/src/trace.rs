//! Average-versus-N traces for a saved function: the data behind plots of
//! A(x, N, f) approaching (or stubbornly avoiding) the integral.

use num_rational::BigRational;
use num_traits::Signed;

use crate::birkhoff::sample_rev;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::funcspec::FunctionSpec;

/// Largest admissible N for a trace.
pub const TRACE_SCALE_CAP: u64 = 1 << 48;

/// Dense rows up to this N, log-spaced beyond.
const DENSE_LIMIT: u64 = 4096;

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub x_id: usize,
    pub n: u64,
    pub average: BigRational,
    pub integral: BigRational,
    pub abs_deviation: BigRational,
}

/// The N values a trace reports: every N up to 4096, then a geometric
/// subset (ratio 9/8, rounded) up to and including n_max.
pub fn trace_scales(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n_max.min(DENSE_LIMIT)).collect();
    let mut n = DENSE_LIMIT;
    while n < n_max {
        n = (n + n / 8).max(n + 1).min(n_max);
        out.push(n);
    }
    out
}

/// Evaluates A(x, N, f) for every reported N and every given point.
pub fn trace(
    spec: &FunctionSpec,
    points: &[Vec<Dyadic>],
    n_max: u64,
) -> Result<Vec<TraceRow>> {
    if n_max == 0 || n_max > TRACE_SCALE_CAP {
        return Err(Error::PreconditionViolated(format!(
            "trace scale {} outside 1..={}",
            n_max, TRACE_SCALE_CAP
        )));
    }
    let kernel = spec.kernel()?;
    let integral = kernel.integral();
    let scales = trace_scales(n_max);
    let mut rows = Vec::with_capacity(points.len() * scales.len());
    for (x_id, point) in points.iter().enumerate() {
        if point.len() != spec.dimension {
            return Err(Error::PreconditionViolated(format!(
                "point {} has {} coordinates, function has dimension {}",
                x_id,
                point.len(),
                spec.dimension
            )));
        }
        let rev: Vec<u128> = point.iter().map(|x| x.rev_index()).collect();
        for &n in &scales {
            let average = kernel.average(&rev, n);
            let abs_deviation = (&average - &integral).abs();
            rows.push(TraceRow {
                x_id,
                n,
                average,
                integral: integral.clone(),
                abs_deviation,
            });
        }
    }
    Ok(rows)
}

/// Deterministic sample points for a trace (rank-53 truncations of the
/// counter stream, tagged separately from every estimator stream).
pub fn sample_points(spec: &FunctionSpec, count: usize, seed: u64) -> Result<Vec<Vec<Dyadic>>> {
    const TRACE_TAG: u64 = 4;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut point = Vec::with_capacity(spec.dimension);
        for j in 0..spec.dimension {
            let rev = sample_rev(seed, TRACE_TAG, i as u64, j as u32);
            point.push(Dyadic::from_rev_index(rev, crate::birkhoff::SAMPLE_RANK)?);
        }
        out.push(point);
    }
    Ok(out)
}
