//! Bit-reversed cell arithmetic for the odometer.
//!
//! Writing a point x = 0.b1 b2 b3... in binary, the integer with bits
//! (b1, b2, ...) in positions (0, 1, ...) is the *reversed index* of x. The
//! odometer adds 1 to that index, so the rank-q cells are visited in plain
//! counting order, and every orbit question about a union of rank-q cells
//! becomes a window count over the integers.
//!
//! A [`PeriodicCells`] is a set of the form { rho : rho mod 2^q in W } for a
//! finite union of index intervals W. Towers, step-function pieces and their
//! intersections all reduce to conjunctions of such conditions; a
//! [`CellCounter`] counts window hits for a conjunction in O(log) time per
//! query using per-suffix full-period counts.

use num_bigint::BigInt;
use num_rational::BigRational;

/// Reverses the low `bits` bits of `x`.
pub(crate) fn bitrev(x: u128, bits: u32) -> u128 {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (128 - bits)
    }
}

/// { rho : rho mod 2^q in union of [a, b) intervals }.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PeriodicCells {
    pub q: u32,
    /// Sorted, disjoint, non-adjacent half-open intervals within [0, 2^q).
    pub intervals: Vec<(u128, u128)>,
}

impl PeriodicCells {
    pub fn new(q: u32, mut intervals: Vec<(u128, u128)>) -> Self {
        debug_assert!(q < 127);
        let period = 1u128 << q;
        intervals.retain(|&(a, b)| a < b);
        for &(a, b) in &intervals {
            debug_assert!(a < b && b <= period, "interval out of period");
        }
        intervals.sort_unstable();
        let mut merged: Vec<(u128, u128)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        PeriodicCells {
            q,
            intervals: merged,
        }
    }

    /// A single residue class: { rho : rho mod 2^q == cell }.
    pub fn residue(q: u32, cell: u128) -> Self {
        PeriodicCells {
            q,
            intervals: vec![(cell, cell + 1)],
        }
    }

    pub fn cells_per_period(&self) -> u128 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn measure(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.cells_per_period()),
            BigInt::from(1u128 << self.q),
        )
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn contains(&self, rho: u128) -> bool {
        let r = rho & ((1u128 << self.q) - 1);
        let idx = self.intervals.partition_point(|&(a, _)| a <= r);
        idx > 0 && r < self.intervals[idx - 1].1
    }
}

/// Counts window hits of a conjunction of [`PeriodicCells`] conditions.
///
/// Conditions are stored sorted by descending period so the count recursion
/// always splits on the coarsest remaining structure; `suffix_pc[i]` caches
/// the hit count of conditions i.. over one full period of condition i.
#[derive(Clone, Debug)]
pub(crate) struct CellCounter {
    conds: Vec<PeriodicCells>,
    suffix_pc: Vec<u128>,
}

impl CellCounter {
    pub fn new(mut conds: Vec<PeriodicCells>) -> Self {
        conds.sort_by_key(|c| std::cmp::Reverse(c.q));
        let mut counter = CellCounter {
            conds,
            suffix_pc: Vec::new(),
        };
        let n = counter.conds.len();
        counter.suffix_pc = vec![0; n];
        for i in (0..n).rev() {
            let q = counter.conds[i].q;
            counter.suffix_pc[i] = counter.count_in_period(i, 0, 1u128 << q);
        }
        counter
    }

    /// Number of lattice points rho in [a, b) satisfying every condition.
    pub fn count(&self, a: u128, b: u128) -> u128 {
        self.count_rec(0, a, b)
    }

    /// Fraction of cells satisfying every condition (exact).
    pub fn density(&self) -> BigRational {
        if self.conds.is_empty() {
            return BigRational::from_integer(BigInt::from(1));
        }
        BigRational::new(
            BigInt::from(self.suffix_pc[0]),
            BigInt::from(1u128 << self.conds[0].q),
        )
    }

    fn count_rec(&self, i: usize, a: u128, b: u128) -> u128 {
        if a >= b {
            return 0;
        }
        if i == self.conds.len() {
            return b - a;
        }
        let q = self.conds[i].q;
        let period = 1u128 << q;
        let len = b - a;
        let full = len >> q;
        let mut total = full * self.suffix_pc[i];
        let rem = len - (full << q);
        if rem > 0 {
            let a0 = a & (period - 1);
            if a0 + rem <= period {
                total += self.count_in_period(i, a0, a0 + rem);
            } else {
                total += self.count_in_period(i, a0, period);
                total += self.count_in_period(i, 0, a0 + rem - period);
            }
        }
        total
    }

    /// Window [a, b) within one period of condition i.
    fn count_in_period(&self, i: usize, a: u128, b: u128) -> u128 {
        let ivs = &self.conds[i].intervals;
        let start = ivs.partition_point(|&(_, e)| e <= a);
        let mut total = 0;
        for &(s, e) in &ivs[start..] {
            if s >= b {
                break;
            }
            total += self.count_rec(i + 1, s.max(a), e.min(b));
        }
        total
    }
}

/// Decomposes the scaled interval [lo, hi) (integers at rank `r`) into
/// dyadic-aligned blocks, returning (level, cell-index-at-level) pairs.
pub(crate) fn aligned_blocks(lo: u128, hi: u128, r: u32) -> Vec<(u32, u128)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let align = if a == 0 { r } else { a.trailing_zeros().min(r) };
        let mut t = align;
        while (1u128 << t) > hi - a {
            t -= 1;
        }
        out.push((r - t, a >> t));
        a += 1u128 << t;
    }
    out
}

/// The reversed-index residue class of one aligned block: a rank-`level`
/// value cell `cell` is { rho : rho mod 2^level == bitrev(cell) }.
pub(crate) fn block_cells(level: u32, cell: u128) -> PeriodicCells {
    PeriodicCells::residue(level, bitrev(cell, level))
}
