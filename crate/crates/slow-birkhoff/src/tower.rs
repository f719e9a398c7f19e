//! Exact Rokhlin towers for the odometer.
//!
//! A tower is a base interval [0, d) together with its levels T^i([0, d)),
//! i = 1..h (the base itself is not a level). Because T permutes the rank-m
//! cells cyclically and d <= 2^-m with 2^m >= h, the levels are pairwise
//! disjoint with zero residual error, and the tower measure is exactly h*d.
//!
//! In reversed-index coordinates a tower occupies { rho : rho mod 2^q in W }
//! where q is the rank of d and W is a union of at most numerator(d) short
//! intervals. That footprint is what the averaging kernels consume.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::boxes::{BoxSet, DyadicBox};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{DyadicInterval, IntervalSet};
use crate::revspace::{bitrev, PeriodicCells};

/// Largest number of base fragments (numerator of d) a tower may carry.
const MAX_BASE_FRAGMENTS: u32 = 20;

/// Largest interval count `tower_set` will materialize.
const MAX_MATERIALIZED: u128 = 1 << 21;

/// Smallest power of two >= h, as an exponent.
pub(crate) fn ceil_log2(h: u64) -> u32 {
    h.next_power_of_two().trailing_zeros()
}

/// The shared 1-d data of a tower: base width, height, rank floor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TowerFactor {
    pub d: Dyadic,
    pub height: u64,
    pub rank_floor: u32,
}

impl TowerFactor {
    /// Reversed-index footprint of the union of levels.
    pub fn cells(&self) -> Result<PeriodicCells> {
        let q = self.d.rank();
        let m = self.rank_floor;
        debug_assert!(q >= m);
        let frag_bits = self
            .d
            .numerator()
            .bits()
            .max(1) as u32;
        if frag_bits > MAX_BASE_FRAGMENTS {
            return Err(Error::TowerTooFine {
                bits: frag_bits,
                max: MAX_BASE_FRAGMENTS,
            });
        }
        let frags = self.d.numerator().to_u128().expect("capped fragment count");
        let h = self.height as u128;
        let mut intervals = Vec::with_capacity(frags as usize);
        for c in 0..frags {
            let base = bitrev(c, q - m) << m;
            intervals.push((base + 1, base + h + 1));
        }
        Ok(PeriodicCells::new(q, intervals))
    }

    /// The i-th level (1 <= i <= height) as an exact interval set.
    pub fn level_set(&self, i: u64) -> Result<IntervalSet> {
        if i == 0 || i > self.height {
            return Err(Error::PreconditionViolated(format!(
                "level {} outside 1..={}",
                i, self.height
            )));
        }
        let m = self.rank_floor;
        if i < (1u64 << m) {
            // T^i translates [0, d) to [v_i, v_i + d), v_i the value of the
            // rank-m cell with reversed index i
            let v = Dyadic::from_rev_index(i as u128, m)?;
            let hi = v.add(&self.d)?;
            Ok(IntervalSet::from_interval(DyadicInterval::new(v, hi)?))
        } else {
            // i = 2^m: the carry passes rank m; the level is the deep
            // odometer image of the base, scaled into the first cell
            debug_assert_eq!(i, 1u64 << m);
            let w = Dyadic::new(self.d.numerator().clone(), self.d.rank() - m)?;
            let mut out = Vec::new();
            for (lo, hi) in image_of_initial(&w)? {
                out.push(DyadicInterval::new(
                    lo.scale_down(m)?,
                    hi.scale_down(m)?,
                )?);
            }
            Ok(IntervalSet::from_intervals(out))
        }
    }

    pub fn measure(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.height)) * self.d.to_rational()
    }

    /// Union of all levels, materialized.
    pub fn tower_set(&self) -> Result<IntervalSet> {
        let size = self.height as u128 * self.d.numerator().to_u128().unwrap_or(u128::MAX);
        if size > MAX_MATERIALIZED {
            return Err(Error::SetTooLarge {
                size,
                max: MAX_MATERIALIZED,
            });
        }
        let mut ivs = Vec::with_capacity(self.height as usize);
        for i in 1..=self.height {
            ivs.extend(self.level_set(i)?.intervals().iter().cloned());
        }
        Ok(IntervalSet::from_intervals(ivs))
    }
}

/// T([0, w)) for 0 < w < 1, as exact intervals (scaled endpoints).
///
/// T([0,w)) = [1/2, 1/2 + w) when w <= 1/2; past that the carry recurses:
/// T(1/2 + y) = T(2y)/2.
fn image_of_initial(w: &Dyadic) -> Result<Vec<(Dyadic, Dyadic)>> {
    if w.is_zero() || w.is_one() {
        return Err(Error::InvalidDyadic(format!("width {} outside (0,1)", w)));
    }
    let half = Dyadic::half();
    if *w <= half {
        return Ok(vec![(half.clone(), half.add(w)?)]);
    }
    let mut out = vec![(half.clone(), Dyadic::one())];
    // 2(w - 1/2)
    let rest = w.sub(&half)?;
    let doubled = Dyadic::new(rest.numerator().clone(), rest.rank() - 1)?;
    for (lo, hi) in image_of_initial(&doubled)? {
        out.push((lo.scale_down(1)?, hi.scale_down(1)?));
    }
    Ok(out)
}

/// A Rokhlin tower for the 1-d odometer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    factor: TowerFactor,
}

impl Tower {
    pub(crate) fn from_factor(factor: TowerFactor) -> Self {
        Tower { factor }
    }

    pub fn base_width(&self) -> &Dyadic {
        &self.factor.d
    }

    pub fn base(&self) -> IntervalSet {
        if self.factor.d.is_zero() {
            return IntervalSet::empty();
        }
        IntervalSet::from_interval(
            DyadicInterval::new(Dyadic::zero(), self.factor.d.clone()).unwrap(),
        )
    }

    pub fn height(&self) -> u64 {
        self.factor.height
    }

    pub fn rank_floor(&self) -> u32 {
        self.factor.rank_floor
    }

    /// Exact tower measure h * d.
    pub fn measure(&self) -> BigRational {
        self.factor.measure()
    }

    /// The i-th level T^i(base), 1 <= i <= height.
    pub fn level_set(&self, i: u64) -> Result<IntervalSet> {
        self.factor.level_set(i)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) fn factor(&self) -> &TowerFactor {
        &self.factor
    }
}

/// A box tower for the Z^n product odometer: base [0, d)^n, levels T^z(base)
/// over the cube z in {1..h}^n. The union is the n-fold product of the 1-d
/// tower set, and the levels are pairwise disjoint exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerZn {
    factor: TowerFactor,
    dim: usize,
}

impl TowerZn {
    pub(crate) fn from_factor(factor: TowerFactor, dim: usize) -> Self {
        TowerZn { factor, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_width(&self) -> &Dyadic {
        &self.factor.d
    }

    pub fn side(&self) -> u64 {
        self.factor.height
    }

    pub fn rank_floor(&self) -> u32 {
        self.factor.rank_floor
    }

    pub fn base(&self) -> Result<DyadicBox> {
        let iv = DyadicInterval::new(Dyadic::zero(), self.factor.d.clone())?;
        DyadicBox::new(vec![iv; self.dim])
    }

    /// Exact tower measure (h * d)^n.
    pub fn measure(&self) -> BigRational {
        let one_dim = self.factor.measure();
        let mut acc = BigRational::one();
        for _ in 0..self.dim {
            acc *= &one_dim;
        }
        acc
    }

    /// The level T^z(base) for z in {1..h}^n.
    pub fn level_set(&self, z: &[u64]) -> Result<BoxSet> {
        if z.len() != self.dim {
            return Err(Error::PreconditionViolated(format!(
                "expected {} coordinates",
                self.dim
            )));
        }
        let per_coord: Vec<IntervalSet> = z
            .iter()
            .map(|&i| self.factor.level_set(i))
            .collect::<Result<_>>()?;
        let mut boxes = vec![vec![]];
        for set in &per_coord {
            let mut next = Vec::new();
            for prefix in &boxes {
                for iv in set.intervals() {
                    let mut sides: Vec<DyadicInterval> = prefix.clone();
                    sides.push(iv.clone());
                    next.push(sides);
                }
            }
            boxes = next;
        }
        BoxSet::new(
            self.dim,
            boxes
                .into_iter()
                .map(DyadicBox::new)
                .collect::<Result<_>>()?,
        )
    }

}

/// Builds a 1-d tower of the given height whose measure approaches
/// `target_measure` from below: d is the largest dyadic of rank <= precision
/// with d <= min(target/h, 2^-m), m = ceil(log2 h). The shortfall
/// target - h*d is below h * 2^-precision whenever target/h binds.
pub fn build_tower(height: u64, target_measure: &BigRational, precision: u32) -> Result<Tower> {
    let factor = build_factor(height, target_measure, precision, 1)?;
    Ok(Tower::from_factor(factor))
}

/// The Z^n analogue: d is the largest dyadic of rank <= precision with
/// (h*d)^n <= target and d <= 2^-m.
pub fn build_tower_zn(
    side: u64,
    target_measure: &BigRational,
    precision: u32,
    dimension: usize,
) -> Result<TowerZn> {
    if dimension == 0 {
        return Err(Error::PreconditionViolated("dimension must be >= 1".into()));
    }
    let factor = build_factor(side, target_measure, precision, dimension as u32)?;
    Ok(TowerZn::from_factor(factor, dimension))
}

pub(crate) fn build_factor(
    height: u64,
    target: &BigRational,
    precision: u32,
    dim: u32,
) -> Result<TowerFactor> {
    if height == 0 {
        return Err(Error::PreconditionViolated("height must be >= 1".into()));
    }
    if !target.is_positive() || *target >= BigRational::one() {
        return Err(Error::PreconditionViolated(format!(
            "target measure {} outside (0,1)",
            target
        )));
    }
    let m = ceil_log2(height);
    if precision < m {
        return Err(Error::PrecisionTooShallow {
            given: precision,
            needed: m,
            height,
        });
    }
    let cap = BigUint::one() << (precision - m);
    let scaled = if dim == 1 {
        // floor(target * 2^p / h)
        let num = target.numer().to_biguint().unwrap() << precision;
        let den = target.denom().to_biguint().unwrap() * BigUint::from(height);
        (num / den).min(cap)
    } else {
        // largest t <= 2^(p-m) with (t*h)^dim <= target * 2^(p*dim)
        let bound =
            target.numer().to_biguint().unwrap() << (precision as u64 * dim as u64);
        let den = target.denom().to_biguint().unwrap();
        let admissible = |t: &BigUint| -> bool {
            let lhs = (t * BigUint::from(height)).pow(dim) * &den;
            lhs <= bound
        };
        let mut lo = BigUint::zero();
        let mut hi = cap.clone() + BigUint::one();
        // invariant: admissible(lo), !admissible(hi)
        if admissible(&cap) {
            lo = cap;
        } else {
            while &hi - &lo > BigUint::one() {
                let mid: BigUint = (&lo + &hi) >> 1;
                if admissible(&mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        lo
    };
    if scaled.is_zero() {
        return Err(Error::MeasureTooSmall {
            target: target.to_string(),
            precision,
            height,
        });
    }
    let d = Dyadic::new(scaled, precision)?;
    Ok(TowerFactor {
        d,
        height,
        rank_floor: m,
    })
}

/// The union of a 1-d tower's levels as a canonical interval set.
pub fn tower_set(t: &Tower) -> Result<IntervalSet> {
    t.factor.tower_set()
}

/// The union of a box tower's levels as a disjoint box set: the n-fold
/// product of the 1-d tower set.
pub fn tower_set_zn(t: &TowerZn) -> Result<BoxSet> {
    let one_dim = t.factor.tower_set()?;
    let count = (one_dim.len() as u128)
        .checked_pow(t.dim as u32)
        .unwrap_or(u128::MAX);
    if count > MAX_MATERIALIZED {
        return Err(Error::SetTooLarge {
            size: count,
            max: MAX_MATERIALIZED,
        });
    }
    let mut boxes: Vec<Vec<DyadicInterval>> = vec![vec![]];
    for _ in 0..t.dim {
        let mut next = Vec::new();
        for prefix in &boxes {
            for iv in one_dim.intervals() {
                let mut sides = prefix.clone();
                sides.push(iv.clone());
                next.push(sides);
            }
        }
        boxes = next;
    }
    BoxSet::new(
        t.dim,
        boxes
            .into_iter()
            .map(DyadicBox::new)
            .collect::<Result<_>>()?,
    )
}
