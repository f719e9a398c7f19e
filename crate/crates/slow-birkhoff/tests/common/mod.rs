//! Shared generators and independent oracles for the integration suites.
//!
//! The oracles deliberately avoid the library's set-algebra code paths:
//! rasterization works from raw endpoint rationals, so agreement between the
//! two routes is a real check, not a tautology.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use slow_birkhoff::{Dyadic, DyadicInterval, IntervalSet, Piece, Region, StepFunction};

pub fn rat(n: i64, den: i64) -> BigRational {
    BigRational::new(n.into(), den.into())
}

pub fn dy(num: u64, exp: u32) -> Dyadic {
    Dyadic::from_parts(num, exp).unwrap()
}

/// Deterministic xorshift64 for test data.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Random canonical interval set with endpoints of rank <= rank.
pub fn random_interval_set(rng: &mut TestRng, rank: u32, max_cuts: usize) -> IntervalSet {
    let cells = 1u64 << rank;
    let cuts = 2 + rng.below(max_cuts.max(1) as u64) as usize * 2;
    let mut points: Vec<u64> = (0..cuts).map(|_| rng.below(cells + 1)).collect();
    points.sort_unstable();
    points.dedup();
    let mut ivs = Vec::new();
    for pair in points.chunks(2) {
        if pair.len() == 2 && pair[0] < pair[1] {
            ivs.push(DyadicInterval::new(dy(pair[0], rank), dy(pair[1], rank)).unwrap());
        }
    }
    IntervalSet::from_intervals(ivs)
}

/// Random 1-d step function with breakpoints of rank <= rank and small
/// rational values; pieces partition [0,1) by construction.
pub fn random_step_fn(rng: &mut TestRng, rank: u32, max_pieces: usize) -> StepFunction {
    let cells = 1u64 << rank;
    let pieces = 2 + rng.below(max_pieces.max(2) as u64 - 1) as usize;
    let mut cuts: Vec<u64> = (0..pieces - 1).map(|_| 1 + rng.below(cells - 1)).collect();
    cuts.push(0);
    cuts.push(cells);
    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let region = IntervalSet::from_interval(
            DyadicInterval::new(dy(w[0], rank), dy(w[1], rank)).unwrap(),
        );
        let value = rat(rng.below(9) as i64, 1 + rng.below(4) as i64);
        out.push(Piece {
            region: Region::Intervals(region),
            value,
        });
    }
    StepFunction::new(out).unwrap()
}

/// Random 2-d step function: a full grid of rank-r cells per axis would be
/// huge, so cut each axis into a few rank-r slabs and give each cell of the
/// slab grid its own value.
pub fn random_step_fn_2d(rng: &mut TestRng, rank: u32) -> StepFunction {
    use slow_birkhoff::{BoxSet, DyadicBox};
    let cells = 1u64 << rank;
    let axis = |rng: &mut TestRng| -> Vec<(u64, u64)> {
        let mut cuts: Vec<u64> = (0..2).map(|_| 1 + rng.below(cells - 1)).collect();
        cuts.push(0);
        cuts.push(cells);
        cuts.sort_unstable();
        cuts.dedup();
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let xs = axis(rng);
    let ys = axis(rng);
    let mut pieces = Vec::new();
    for &(x0, x1) in &xs {
        for &(y0, y1) in &ys {
            let b = DyadicBox::new(vec![
                DyadicInterval::new(dy(x0, rank), dy(x1, rank)).unwrap(),
                DyadicInterval::new(dy(y0, rank), dy(y1, rank)).unwrap(),
            ])
            .unwrap();
            let value = rat(rng.below(7) as i64, 1 + rng.below(3) as i64);
            pieces.push(Piece {
                region: Region::Boxes(BoxSet::new(2, vec![b]).unwrap()),
                value,
            });
        }
    }
    StepFunction::new(pieces).unwrap()
}

/// Independent rasterization oracle: membership of each rank-r cell decided
/// by direct rational comparison of the cell midpoint against endpoints.
pub fn rasterize(set: &IntervalSet, r: u32) -> Vec<bool> {
    let cells = 1usize << r;
    let mut out = vec![false; cells];
    for iv in set.intervals() {
        let lo = iv.lo().to_rational();
        let hi = iv.hi().to_rational();
        for (j, slot) in out.iter_mut().enumerate() {
            let mid = BigRational::new(BigInt::from(2 * j as u64 + 1), BigInt::from(2u64 << r));
            if mid >= lo && mid < hi {
                *slot = true;
            }
        }
    }
    out
}

/// Measure from a rasterization (valid when all endpoints have rank <= r).
pub fn raster_measure(bits: &[bool]) -> BigRational {
    let hits = bits.iter().filter(|&&b| b).count();
    BigRational::new(BigInt::from(hits), BigInt::from(bits.len()))
}
