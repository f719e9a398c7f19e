//! Exact dyadic rationals in [0, 1].
//!
//! A `Dyadic` is `numerator / 2^exponent` in canonical form: either the
//! exponent is 0 or the numerator is odd. Values are restricted to the unit
//! interval because every point of the phase space and every interval
//! endpoint lives there. Operations that would need an exponent beyond
//! [`RANK_CAP`] are rejected instead of silently growing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Maximum admissible exponent (binary rank) for any dyadic produced by this
/// crate. Deep enough for 2^-53-rank sample points iterated through every
/// desk-scale tower; shallow enough that bit-reversed cell indices fit in
/// machine words.
pub const RANK_CAP: u32 = 64;

/// An exact dyadic rational in [0, 1], canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numer: BigUint,
    exp: u32,
}

impl Dyadic {
    /// Builds `numer / 2^exp`, canonicalizing and validating range and rank.
    pub fn new(numer: BigUint, exp: u32) -> Result<Self> {
        let (numer, exp) = reduce(numer, exp);
        if exp > RANK_CAP {
            return Err(Error::RankCapExceeded {
                rank: exp,
                cap: RANK_CAP,
            });
        }
        if numer > BigUint::one() << exp {
            return Err(Error::InvalidDyadic(format!(
                "{}/2^{} lies outside [0,1]",
                numer, exp
            )));
        }
        Ok(Dyadic { numer, exp })
    }

    /// `num / 2^exp` from machine integers.
    pub fn from_parts(num: u64, exp: u32) -> Result<Self> {
        Self::new(BigUint::from(num), exp)
    }

    pub fn zero() -> Self {
        Dyadic {
            numer: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            numer: BigUint::one(),
            exp: 0,
        }
    }

    pub fn half() -> Self {
        Dyadic {
            numer: BigUint::one(),
            exp: 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0 && self.numer.is_one()
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numer
    }

    /// Binary rank: the canonical exponent.
    pub fn rank(&self) -> u32 {
        self.exp
    }

    /// The value as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numer.clone()),
            BigInt::from(BigUint::one() << self.exp),
        )
    }

    /// Numerator rescaled to rank `r` (requires `r >= self.rank()`).
    pub fn scaled_numer(&self, r: u32) -> BigUint {
        debug_assert!(r >= self.exp);
        self.numer.clone() << (r - self.exp)
    }

    /// Numerator rescaled to rank `r` as a machine word. Valid whenever
    /// `r <= RANK_CAP` since the value is at most 1.
    pub fn scaled_numer_u128(&self, r: u32) -> u128 {
        debug_assert!(r >= self.exp && r <= RANK_CAP + 4);
        let base = self.numer.to_u128().expect("rank-capped numerator fits u128");
        base << (r - self.exp)
    }

    /// Index of the rank-`m` cell containing this point: floor(x * 2^m).
    pub fn cell_index(&self, m: u32) -> u128 {
        let idx = if self.exp <= m {
            self.numer.clone() << (m - self.exp)
        } else {
            self.numer.clone() >> (self.exp - m)
        };
        idx.to_u128().expect("cell index fits u128 for values in [0,1]")
    }

    /// `self / 2^k`.
    pub fn scale_down(&self, k: u32) -> Result<Dyadic> {
        if self.is_zero() {
            return Ok(Dyadic::zero());
        }
        Dyadic::new(self.numer.clone(), self.exp + k)
    }

    /// Exact sum, if it stays in [0, 1].
    pub fn add(&self, other: &Dyadic) -> Result<Dyadic> {
        let r = self.exp.max(other.exp);
        Dyadic::new(self.scaled_numer(r) + other.scaled_numer(r), r)
    }

    /// Exact difference `self - other`; errors when negative.
    pub fn sub(&self, other: &Dyadic) -> Result<Dyadic> {
        let r = self.exp.max(other.exp);
        let a = self.scaled_numer(r);
        let b = other.scaled_numer(r);
        if b > a {
            return Err(Error::InvalidDyadic(format!(
                "{} - {} is negative",
                self, other
            )));
        }
        Dyadic::new(a - b, r)
    }

    /// The bit-reversed cell index of this point: digit i of the binary
    /// expansion becomes bit i-1. The odometer acts on these indices as +1.
    pub fn rev_index(&self) -> u128 {
        if self.exp == 0 {
            return 0;
        }
        let n = self.numer.to_u128().expect("rank-capped numerator fits u128");
        n.reverse_bits() >> (128 - self.exp)
    }

    /// Rebuilds a point from a bit-reversed index with `rank` binary digits.
    pub fn from_rev_index(rev: u128, rank: u32) -> Result<Dyadic> {
        if rank > RANK_CAP {
            return Err(Error::RankCapExceeded {
                rank,
                cap: RANK_CAP,
            });
        }
        if rank == 0 {
            if rev != 0 {
                return Err(Error::InvalidDyadic("rev index needs rank > 0".into()));
            }
            return Ok(Dyadic::zero());
        }
        if rev >> rank != 0 {
            return Err(Error::InvalidDyadic(format!(
                "rev index {} does not fit rank {}",
                rev, rank
            )));
        }
        let numer = rev.reverse_bits() >> (128 - rank);
        Dyadic::new(BigUint::from(numer), rank)
    }
}

fn reduce(mut numer: BigUint, mut exp: u32) -> (BigUint, u32) {
    if numer.is_zero() {
        return (numer, 0);
    }
    let tz = numer.trailing_zeros().unwrap_or(0) as u32;
    let shift = tz.min(exp);
    numer >>= shift;
    exp -= shift;
    (numer, exp)
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let r = self.exp.max(other.exp);
        self.scaled_numer(r).cmp(&other.scaled_numer(r))
    }
}

impl fmt::Display for Dyadic {
    /// Canonical textual form `numerator/2^exponent`, e.g. `3/2^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numer, self.exp)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (num, rest) = s
            .split_once("/2^")
            .ok_or_else(|| Error::InvalidDyadic(format!("expected num/2^exp, got {:?}", s)))?;
        let numer = num
            .trim()
            .parse::<BigUint>()
            .map_err(|e| Error::InvalidDyadic(format!("bad numerator {:?}: {}", num, e)))?;
        let exp = rest
            .trim()
            .parse::<u32>()
            .map_err(|e| Error::InvalidDyadic(format!("bad exponent {:?}: {}", rest, e)))?;
        Dyadic::new(numer, exp)
    }
}
