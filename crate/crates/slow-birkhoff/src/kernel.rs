//! Shared evaluation kernel: exact Birkhoff sums for a step function that
//! has optionally been zeroed on a list of towers.
//!
//! A function is compiled to reversed-index conditions: each piece region
//! breaks into dyadic-aligned blocks (one residue class each) and each tower
//! contributes a periodic window. Orbit sums then reduce to window counts of
//! conjunctions, organized per tower subset for the inclusion-exclusion over
//! the zeroed union. All counts are exact integers; averages are exact
//! rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{DyadicInterval, IntervalSet};
use crate::revspace::{aligned_blocks, block_cells, CellCounter, PeriodicCells};
use crate::step::{Region, StepFunction};

/// Inclusion-exclusion over tower subsets is exponential in the tower count.
const MAX_TOWERS: usize = 12;

/// Exact deviation sweeps walk every rank-Q cell.
pub(crate) const MAX_SWEEP_RANK: u32 = 24;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum CompareMode {
    /// |A - center| > threshold (deviation events)
    Outside,
    /// |A - center| < threshold (concentration events)
    Inside,
}

pub(crate) fn compare(
    avg: &BigRational,
    center: &BigRational,
    threshold: &BigRational,
    mode: CompareMode,
) -> bool {
    let gap = (avg - center).abs();
    match mode {
        CompareMode::Outside => gap > *threshold,
        CompareMode::Inside => gap < *threshold,
    }
}

struct SideKernel {
    /// counters[mask][block]: window counter for block ∧ towers-in-mask.
    counters: Vec<Vec<CellCounter>>,
}

impl SideKernel {
    fn count(&self, mask: usize, a: u128, b: u128) -> u128 {
        self.counters[mask].iter().map(|c| c.count(a, b)).sum()
    }

    fn density(&self, mask: usize) -> BigRational {
        self.counters[mask]
            .iter()
            .fold(BigRational::zero(), |acc, c| acc + c.density())
    }
}

struct BoxKernel {
    sides: Vec<SideKernel>,
}

struct PieceKernel {
    value: BigRational,
    boxes: Vec<BoxKernel>,
}

/// A compiled function f * 1_C where C is the complement of a tower union
/// (the tower list may be empty, in which case this is just f).
pub(crate) struct FnKernel {
    dim: usize,
    n_masks: usize,
    pieces: Vec<PieceKernel>,
    /// density of the 1-d intersection of each tower subset
    subset_density: Vec<BigRational>,
    max_rank: u32,
}

fn interval_blocks(iv: &DyadicInterval) -> Vec<PeriodicCells> {
    let r = iv.rank();
    let lo = iv.lo().scaled_numer_u128(r);
    let hi = iv.hi().scaled_numer_u128(r);
    aligned_blocks(lo, hi, r)
        .into_iter()
        .map(|(level, cell)| block_cells(level, cell))
        .collect()
}

impl FnKernel {
    pub fn new(f: &StepFunction, towers: Vec<PeriodicCells>) -> Result<FnKernel> {
        if towers.len() > MAX_TOWERS {
            return Err(Error::PreconditionViolated(format!(
                "at most {} towers per function (inclusion-exclusion cost)",
                MAX_TOWERS
            )));
        }
        let dim = f.dim();
        let n_masks = 1usize << towers.len();
        let mut max_rank = towers.iter().map(|t| t.q).max().unwrap_or(0);

        let mut pieces = Vec::new();
        for piece in f.pieces() {
            if piece.value.is_zero() {
                continue;
            }
            let box_sides: Vec<Vec<Vec<PeriodicCells>>> = match &piece.region {
                Region::Intervals(set) => {
                    if set.is_empty() {
                        continue;
                    }
                    let blocks: Vec<PeriodicCells> =
                        set.intervals().iter().flat_map(interval_blocks).collect();
                    vec![vec![blocks]]
                }
                Region::Boxes(bs) => bs
                    .boxes()
                    .iter()
                    .map(|b| b.sides().iter().map(interval_blocks).collect())
                    .collect(),
            };
            let mut boxes = Vec::new();
            for sides_blocks in box_sides {
                let mut sides = Vec::new();
                for blocks in sides_blocks {
                    for b in &blocks {
                        max_rank = max_rank.max(b.q);
                    }
                    let mut counters = Vec::with_capacity(n_masks);
                    for mask in 0..n_masks {
                        let per_block: Vec<CellCounter> = blocks
                            .iter()
                            .map(|b| {
                                let mut conds = vec![b.clone()];
                                for (t, tc) in towers.iter().enumerate() {
                                    if mask >> t & 1 == 1 {
                                        conds.push(tc.clone());
                                    }
                                }
                                CellCounter::new(conds)
                            })
                            .collect();
                        counters.push(per_block);
                    }
                    sides.push(SideKernel { counters });
                }
                boxes.push(BoxKernel { sides });
            }
            pieces.push(PieceKernel {
                value: piece.value.clone(),
                boxes,
            });
        }

        let mut subset_density = Vec::with_capacity(n_masks);
        for mask in 0..n_masks {
            let conds: Vec<PeriodicCells> = towers
                .iter()
                .enumerate()
                .filter(|(t, _)| mask >> t & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            subset_density.push(CellCounter::new(conds).density());
        }

        Ok(FnKernel {
            dim,
            n_masks,
            pieces,
            subset_density,
            max_rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_rank(&self) -> u32 {
        self.max_rank
    }

    /// Exact Birkhoff average over the cube window {1..n}^dim from the point
    /// with the given reversed coordinates.
    pub fn average(&self, x_rev: &[u128], n: u64) -> BigRational {
        debug_assert_eq!(x_rev.len(), self.dim);
        let mut total = BigRational::zero();
        for piece in &self.pieces {
            let mut hits = BigInt::zero();
            for bx in &piece.boxes {
                for mask in 0..self.n_masks {
                    let mut prod = BigInt::one();
                    for (j, side) in bx.sides.iter().enumerate() {
                        let a = x_rev[j] + 1;
                        let c = side.count(mask, a, a + n as u128);
                        if c == 0 {
                            prod = BigInt::zero();
                            break;
                        }
                        prod *= BigInt::from(c);
                    }
                    if (mask.count_ones() & 1) == 1 {
                        hits -= prod;
                    } else {
                        hits += prod;
                    }
                }
            }
            total += &piece.value * BigRational::from_integer(hits);
        }
        let mut denom = BigInt::one();
        for _ in 0..self.dim {
            denom *= BigInt::from(n);
        }
        total / BigRational::from_integer(denom)
    }

    /// Exact integral of the compiled function over [0,1)^dim.
    pub fn integral(&self) -> BigRational {
        let mut total = BigRational::zero();
        for piece in &self.pieces {
            let mut mass = BigRational::zero();
            for bx in &piece.boxes {
                for mask in 0..self.n_masks {
                    let mut prod = BigRational::one();
                    for side in &bx.sides {
                        prod *= side.density(mask);
                    }
                    if (mask.count_ones() & 1) == 1 {
                        mass -= prod;
                    } else {
                        mass += prod;
                    }
                }
            }
            total += &piece.value * mass;
        }
        total
    }

    /// Exact measure of the complement of the tower union in [0,1)^dim.
    pub fn complement_measure(&self) -> BigRational {
        let mut total = BigRational::zero();
        for mask in 0..self.n_masks {
            let mut prod = BigRational::one();
            for _ in 0..self.dim {
                prod *= &self.subset_density[mask];
            }
            if (mask.count_ones() & 1) == 1 {
                total -= prod;
            } else {
                total += prod;
            }
        }
        total
    }

    /// Exact measure of {x : |A(x,n,f) - center| <mode> threshold} by sweeping
    /// every rank-Q cell; 1-d only.
    pub fn deviation_measure_exact(
        &self,
        n: u64,
        center: &BigRational,
        threshold: &BigRational,
        mode: CompareMode,
    ) -> Result<BigRational> {
        let cells = self.deviation_cells(n, center, threshold, mode)?;
        let q = self.max_rank;
        Ok(BigRational::new(
            BigInt::from(cells.len()),
            BigInt::one() << q,
        ))
    }

    /// Reversed indices of the rank-Q cells where the average satisfies the
    /// comparison; 1-d only.
    pub fn deviation_cells(
        &self,
        n: u64,
        center: &BigRational,
        threshold: &BigRational,
        mode: CompareMode,
    ) -> Result<Vec<u128>> {
        if self.dim != 1 {
            return Err(Error::PreconditionViolated(
                "exact deviation sets are 1-d only; use Monte-Carlo for Z^n".into(),
            ));
        }
        let q = self.max_rank;
        if q > MAX_SWEEP_RANK {
            return Err(Error::SweepRankExceeded {
                rank: q,
                max: MAX_SWEEP_RANK,
            });
        }
        let mut out = Vec::new();
        for rho in 0..(1u128 << q) {
            let avg = self.average(&[rho], n);
            if compare(&avg, center, threshold, mode) {
                out.push(rho);
            }
        }
        Ok(out)
    }

}

/// Converts a set of rank-q reversed cell indices into a canonical interval
/// set in value space.
pub(crate) fn cells_to_interval_set(cells: &[u128], q: u32) -> Result<IntervalSet> {
    let width = Dyadic::from_parts(1, q)?;
    let mut ivs = Vec::with_capacity(cells.len());
    for &rho in cells {
        let lo = Dyadic::from_rev_index(rho, q)?;
        let hi = lo.add(&width)?;
        ivs.push(DyadicInterval::new(lo, hi)?);
    }
    Ok(IntervalSet::from_intervals(ivs))
}
