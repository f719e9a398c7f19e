//! The dyadic adding machine (binary odometer) and its n-fold product.
//!
//! T adds 1/2 to the leading binary digit with carry propagating toward less
//! significant digits. On each interval [1-2^-k, 1-2^-k-1) it is the
//! translation x -> x - (1-2^-k) + 2^-k-1; it preserves Lebesgue measure and
//! is ergodic. In reversed-index coordinates ([`Dyadic::rev_index`]) the map
//! is simply +1, which is what every routine here uses.

use crate::dyadic::{Dyadic, RANK_CAP};
use crate::error::{Error, Result};
use crate::interval::{DyadicInterval, IntervalSet};

/// The binary odometer on [0, 1) as a Z-action.
#[derive(Clone, Copy, Debug, Default)]
pub struct OdometerZ;

impl OdometerZ {
    pub fn new() -> Self {
        OdometerZ
    }

    /// One forward step T(x).
    pub fn step(&self, x: &Dyadic) -> Result<Dyadic> {
        self.iterate(x, 1)
    }

    /// T^k (x), k possibly negative.
    ///
    /// Fails with [`Error::NotRepresentable`] when the result would need an
    /// infinite binary expansion (the inverse orbit of 0) and with a rank
    /// error when the expansion outgrows [`RANK_CAP`].
    pub fn iterate(&self, x: &Dyadic, k: i64) -> Result<Dyadic> {
        if x.is_one() {
            return Err(Error::InvalidDyadic("phase points lie in [0,1)".into()));
        }
        let rev = x.rev_index();
        let shifted = if k >= 0 {
            rev + k as u128
        } else {
            let back = (-(k as i128)) as u128;
            if back > rev {
                return Err(Error::NotRepresentable);
            }
            rev - back
        };
        let rank = 128 - shifted.leading_zeros();
        if rank > RANK_CAP {
            return Err(Error::RankCapExceeded {
                rank,
                cap: RANK_CAP,
            });
        }
        Dyadic::from_rev_index(shifted, rank.max(x.rank()))
    }

    /// Exact preimage T^-1(a) of a canonical interval set.
    ///
    /// Membership contract: x is in the result iff step(x) is in `a`. T maps
    /// rank-r cells onto rank-r cells, so preimages of dyadic interval sets
    /// are dyadic interval sets of the same measure.
    pub fn preimage(&self, a: &IntervalSet) -> Result<IntervalSet> {
        let mut pieces: Vec<DyadicInterval> = Vec::new();
        for iv in a.intervals() {
            self.preimage_interval(iv, &mut pieces)?;
        }
        Ok(IntervalSet::from_intervals(pieces))
    }

    /// T^-1([lo, hi)). T translates [1-2^-k, 1-2^-(k+1)) onto [2^-(k+1), 2^-k),
    /// so the inverse walks the target through those image pieces; the
    /// residual [0, 2^-r) (r = endpoint rank) pulls back to [1-2^-r, 1).
    fn preimage_interval(
        &self,
        iv: &DyadicInterval,
        out: &mut Vec<DyadicInterval>,
    ) -> Result<()> {
        let r = iv.rank().max(1);
        let lo = iv.lo();
        let hi = iv.hi();
        for k in 0..r {
            let img_lo = Dyadic::from_parts(1, k + 1)?;
            let img_hi = if k == 0 {
                Dyadic::one()
            } else {
                Dyadic::from_parts(1, k)?
            };
            let s = lo.clone().max(img_lo);
            let e = hi.clone().min(img_hi);
            if s < e {
                // inverse translation: z -> z + (1 - 2^-k) - 2^-(k+1)
                let off = Dyadic::one().sub(&Dyadic::from_parts(1, k)?)?;
                let a = s.add(&off)?.sub(&Dyadic::from_parts(1, k + 1)?)?;
                let b = e.add(&off)?.sub(&Dyadic::from_parts(1, k + 1)?)?;
                out.push(DyadicInterval::new(a, b)?);
            }
        }
        // residual: endpoints are multiples of 2^-r, so iv covers [0, 2^-r)
        // iff lo == 0
        if lo.is_zero() {
            let a = Dyadic::one().sub(&Dyadic::from_parts(1, r)?)?;
            out.push(DyadicInterval::new(a, Dyadic::one())?);
        }
        Ok(())
    }
}

/// The n-fold product odometer as a Z^n-action: T^z acts coordinatewise by
/// z_j-fold iteration of the 1-d odometer. Ergodicity of the product follows
/// from the coordinatewise spectral argument for the adding machine (the
/// eigenvalue groups are coprime-free dyadic roots of unity meeting only in
/// 1); the code relies on the permutation structure only.
#[derive(Clone, Copy, Debug)]
pub struct OdometerZn {
    dim: usize,
}

impl OdometerZn {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::PreconditionViolated("dimension must be >= 1".into()));
        }
        Ok(OdometerZn { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// T^z(x): coordinate j of the result is iterate(x_j, z_j).
    pub fn step_zn(&self, x: &[Dyadic], z: &[i64]) -> Result<Vec<Dyadic>> {
        if x.len() != self.dim || z.len() != self.dim {
            return Err(Error::PreconditionViolated(format!(
                "expected {} coordinates",
                self.dim
            )));
        }
        let od = OdometerZ;
        x.iter()
            .zip(z)
            .map(|(xj, &zj)| od.iterate(xj, zj))
            .collect()
    }
}
