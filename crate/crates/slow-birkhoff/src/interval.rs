//! Half-open dyadic intervals and canonical disjoint unions of them.
//!
//! An `IntervalSet` keeps a strictly increasing list of pairwise disjoint
//! `[lo, hi)` intervals with maximal merging (no two adjacent intervals share
//! an endpoint), so structural equality is set equality and all measures are
//! exact rationals.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Half-open interval `[lo, hi)` with dyadic endpoints in [0, 1].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInterval(format!(
                "[{},{}) is empty or reversed",
                lo, hi
            )));
        }
        Ok(DyadicInterval { lo, hi })
    }

    /// The whole phase space `[0, 1)`.
    pub fn unit() -> Self {
        DyadicInterval {
            lo: Dyadic::zero(),
            hi: Dyadic::one(),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn length(&self) -> BigRational {
        self.hi.to_rational() - self.lo.to_rational()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        *x >= self.lo && *x < self.hi
    }

    /// Max endpoint rank.
    pub fn rank(&self) -> u32 {
        self.lo.rank().max(self.hi.rank())
    }

    pub fn intersect(&self, other: &DyadicInterval) -> Option<DyadicInterval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo < hi {
            Some(DyadicInterval { lo, hi })
        } else {
            None
        }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.lo, self.hi)
    }
}

impl FromStr for DyadicInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidInterval(format!("expected [lo,hi), got {:?}", s)))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::InvalidInterval(format!("missing comma in {:?}", s)))?;
        DyadicInterval::new(a.parse()?, b.parse()?)
    }
}

/// Canonical finite union of disjoint half-open dyadic intervals in [0, 1).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntervalSet {
    intervals: Vec<DyadicInterval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: vec![] }
    }

    /// The full space `[0, 1)`.
    pub fn unit() -> Self {
        IntervalSet {
            intervals: vec![DyadicInterval::unit()],
        }
    }

    pub fn from_interval(iv: DyadicInterval) -> Self {
        IntervalSet {
            intervals: vec![iv],
        }
    }

    /// Canonicalizes an arbitrary collection: sorts, merges overlaps and
    /// adjacencies.
    pub fn from_intervals(mut ivs: Vec<DyadicInterval>) -> Self {
        ivs.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<DyadicInterval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[DyadicInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Max endpoint rank over all intervals (0 for the empty set).
    pub fn rank(&self) -> u32 {
        self.intervals.iter().map(|iv| iv.rank()).max().unwrap_or(0)
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> BigRational {
        self.intervals
            .iter()
            .fold(BigRational::zero(), |acc, iv| acc + iv.length())
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        // binary search on lo
        let idx = self.intervals.partition_point(|iv| iv.lo <= *x);
        idx > 0 && self.intervals[idx - 1].contains(x)
    }

    /// Set union; canonical.
    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        IntervalSet::from_intervals(all)
    }

    /// Set intersection; canonical.
    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let a = &self.intervals[i];
            let b = &other.intervals[j];
            if let Some(iv) = a.intersect(b) {
                out.push(iv);
            }
            if a.hi <= b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { intervals: out }
    }

    /// Complement within `[0, 1)`; canonical. Measures add up to 1 exactly.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = Dyadic::zero();
        for iv in &self.intervals {
            if cursor < iv.lo {
                out.push(DyadicInterval {
                    lo: cursor,
                    hi: iv.lo.clone(),
                });
            }
            cursor = iv.hi.clone();
        }
        if cursor < Dyadic::one() {
            out.push(DyadicInterval {
                lo: cursor,
                hi: Dyadic::one(),
            });
        }
        IntervalSet { intervals: out }
    }

    /// Set difference `self \ other`.
    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    /// Serializes as comma-joined `[lo,hi)` strings; empty set is `empty`.
    pub fn to_text(&self) -> String {
        if self.intervals.is_empty() {
            return "empty".to_string();
        }
        self.intervals
            .iter()
            .map(|iv| iv.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "empty" {
            return Ok(IntervalSet::empty());
        }
        // split on commas that separate intervals: "),[" boundaries
        let mut ivs = Vec::new();
        for part in s.split("),") {
            let part = if part.ends_with(')') {
                part.to_string()
            } else {
                format!("{})", part)
            };
            ivs.push(part.parse::<DyadicInterval>()?);
        }
        Ok(IntervalSet::from_intervals(ivs))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
