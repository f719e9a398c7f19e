//! Piecewise-constant nonnegative functions with dyadic breakpoints.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::boxes::BoxSet;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;

/// A region of the phase space: an interval set on [0,1) or a box set on
/// [0,1)^n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Region {
    Intervals(IntervalSet),
    Boxes(BoxSet),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Intervals(_) => 1,
            Region::Boxes(b) => b.dim(),
        }
    }

    pub fn measure(&self) -> BigRational {
        match self {
            Region::Intervals(s) => s.measure(),
            Region::Boxes(b) => b.measure(),
        }
    }

    pub fn rank(&self) -> u32 {
        match self {
            Region::Intervals(s) => s.rank(),
            Region::Boxes(b) => b.rank(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Region::Intervals(s) => s.is_empty(),
            Region::Boxes(b) => b.is_empty(),
        }
    }

    pub fn contains(&self, point: &[Dyadic]) -> bool {
        match self {
            Region::Intervals(s) => point.len() == 1 && s.contains(&point[0]),
            Region::Boxes(b) => b.contains(point),
        }
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        match (self, other) {
            (Region::Intervals(a), Region::Intervals(b)) => {
                Ok(Region::Intervals(a.intersect(b)))
            }
            (Region::Boxes(a), Region::Boxes(b)) if a.dim() == b.dim() => {
                Ok(Region::Boxes(a.intersect(b)))
            }
            _ => Err(Error::InvalidInterval(
                "region dimensions do not match".into(),
            )),
        }
    }

    pub fn subtract(&self, other: &Region) -> Result<Region> {
        match (self, other) {
            (Region::Intervals(a), Region::Intervals(b)) => {
                Ok(Region::Intervals(a.subtract(b)))
            }
            (Region::Boxes(a), Region::Boxes(b)) if a.dim() == b.dim() => {
                Ok(Region::Boxes(a.subtract(b)))
            }
            _ => Err(Error::InvalidInterval(
                "region dimensions do not match".into(),
            )),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Region::Intervals(s) => s.to_text(),
            Region::Boxes(b) => b.to_text(),
        }
    }
}

/// One constant piece of a step function.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Piece {
    pub region: Region,
    pub value: BigRational,
}

/// Nonnegative step function whose pieces partition [0,1)^n exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepFunction {
    dim: usize,
    pieces: Vec<Piece>,
}

impl StepFunction {
    /// Validates: matching dimensions, nonnegative values, pairwise disjoint
    /// regions whose measures sum to 1 (with half-open dyadic pieces this
    /// forces an exact partition).
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidStepFunction("needs at least one piece".into()));
        }
        let dim = pieces[0].region.dim();
        let mut total = BigRational::zero();
        for p in &pieces {
            if p.region.dim() != dim {
                return Err(Error::InvalidStepFunction(
                    "pieces have mixed dimensions".into(),
                ));
            }
            if p.value < BigRational::zero() {
                return Err(Error::InvalidStepFunction(format!(
                    "negative value {}",
                    p.value
                )));
            }
            total += p.region.measure();
        }
        if total != BigRational::one() {
            return Err(Error::InvalidStepFunction(format!(
                "piece measures sum to {}, not 1",
                total
            )));
        }
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                let inter = pieces[i].region.intersect(&pieces[j].region)?;
                if !inter.is_empty() {
                    return Err(Error::InvalidStepFunction(format!(
                        "pieces {} and {} overlap",
                        i, j
                    )));
                }
            }
        }
        Ok(StepFunction { dim, pieces })
    }

    /// The constant function `value` on [0,1)^n.
    pub fn constant(value: BigRational, dim: usize) -> Result<Self> {
        let region = if dim == 1 {
            Region::Intervals(IntervalSet::unit())
        } else {
            Region::Boxes(BoxSet::unit(dim))
        };
        StepFunction::new(vec![Piece { region, value }])
    }

    /// Indicator of `set` (value 1 on it, 0 off it).
    pub fn indicator(set: IntervalSet) -> Result<Self> {
        let off = set.complement();
        let mut pieces = vec![Piece {
            region: Region::Intervals(set),
            value: BigRational::one(),
        }];
        if !off.is_empty() {
            pieces.push(Piece {
                region: Region::Intervals(off),
                value: BigRational::zero(),
            });
        }
        StepFunction::new(pieces)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Max endpoint rank over all pieces.
    pub fn rank(&self) -> u32 {
        self.pieces.iter().map(|p| p.region.rank()).max().unwrap_or(0)
    }

    pub fn max_value(&self) -> BigRational {
        self.pieces
            .iter()
            .map(|p| p.value.clone())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn min_value(&self) -> BigRational {
        self.pieces
            .iter()
            .map(|p| p.value.clone())
            .min()
            .unwrap_or_else(BigRational::zero)
    }

    /// Point evaluation.
    pub fn eval(&self, point: &[Dyadic]) -> BigRational {
        for p in &self.pieces {
            if p.region.contains(point) {
                return p.value.clone();
            }
        }
        BigRational::zero()
    }

    /// Exact integral over the whole space.
    pub fn integral(&self) -> BigRational {
        self.pieces
            .iter()
            .fold(BigRational::zero(), |acc, p| {
                acc + &p.value * p.region.measure()
            })
    }

    /// Exact integral over `region`: sum of value * measure(piece ∩ region).
    pub fn integral_over(&self, region: &Region) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for p in &self.pieces {
            let inter = p.region.intersect(region)?;
            acc += &p.value * inter.measure();
        }
        Ok(acc)
    }

    /// Truncation `f * 1_C`: equals `self` on `c`, 0 off it.
    pub fn restrict(&self, c: &Region) -> Result<StepFunction> {
        let mut pieces = Vec::new();
        let mut zero_region: Option<Region> = None;
        for p in &self.pieces {
            let inside = p.region.intersect(c)?;
            if !inside.is_empty() {
                pieces.push(Piece {
                    region: inside,
                    value: p.value.clone(),
                });
            }
            let outside = p.region.subtract(c)?;
            if !outside.is_empty() {
                zero_region = Some(match zero_region {
                    None => outside,
                    Some(z) => match (z, outside) {
                        (Region::Intervals(a), Region::Intervals(b)) => {
                            Region::Intervals(a.union(&b))
                        }
                        (Region::Boxes(a), Region::Boxes(b)) => {
                            Region::Boxes(a.union_disjoint(&b)?)
                        }
                        _ => unreachable!("dimensions already checked"),
                    },
                });
            }
        }
        if let Some(z) = zero_region {
            pieces.push(Piece {
                region: z,
                value: BigRational::zero(),
            });
        }
        StepFunction::new(pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::DyadicInterval;

    fn d(num: u64, exp: u32) -> Dyadic {
        Dyadic::from_parts(num, exp).unwrap()
    }

    fn iv(a: (u64, u32), b: (u64, u32)) -> DyadicInterval {
        DyadicInterval::new(d(a.0, a.1), d(b.0, b.1)).unwrap()
    }

    fn rat(n: i64, den: i64) -> BigRational {
        BigRational::new(n.into(), den.into())
    }

    fn half_indicator() -> StepFunction {
        StepFunction::indicator(IntervalSet::from_interval(iv((0, 0), (1, 1)))).unwrap()
    }

    #[test]
    fn constant_integral() {
        let f = StepFunction::constant(rat(2, 1), 1).unwrap();
        assert_eq!(f.integral(), rat(2, 1));
        let g = StepFunction::constant(rat(2, 1), 3).unwrap();
        assert_eq!(g.integral(), rat(2, 1));
    }

    #[test]
    fn partition_validation() {
        // missing half the space
        let p = Piece {
            region: Region::Intervals(IntervalSet::from_interval(iv((0, 0), (1, 1)))),
            value: rat(1, 1),
        };
        assert!(StepFunction::new(vec![p]).is_err());
    }

    #[test]
    fn indicator_integral_over() {
        let f = half_indicator();
        // integral of 1_{[0,1/2)} over [1/4,3/4) is 1/4
        let over = Region::Intervals(IntervalSet::from_interval(iv((1, 2), (3, 2))));
        assert_eq!(f.integral_over(&over).unwrap(), rat(1, 4));
    }

    #[test]
    fn restrict_examples() {
        let f = half_indicator();
        // restrict to the whole space: same integral everywhere
        let all = Region::Intervals(IntervalSet::unit());
        assert_eq!(f.restrict(&all).unwrap().integral(), f.integral());
        // restrict to empty: zero function
        let nothing = Region::Intervals(IntervalSet::empty());
        let z = f.restrict(&nothing).unwrap();
        assert_eq!(z.integral(), rat(0, 1));
        // restrict(1_{[0,1/2)}, [1/4,1)) = 1_{[1/4,1/2)}
        let c = Region::Intervals(IntervalSet::from_interval(iv((1, 2), (1, 0))));
        let r = f.restrict(&c).unwrap();
        assert_eq!(r.integral(), rat(1, 4));
        assert_eq!(r.eval(&[d(1, 1)]), rat(0, 1));
        assert_eq!(r.eval(&[d(1, 2)]), rat(1, 1));
        assert_eq!(r.eval(&[d(3, 3)]), rat(1, 1));
        assert_eq!(r.eval(&[d(0, 0)]), rat(0, 1));
    }

    #[test]
    fn restrict_preserves_integral_identity() {
        let f = half_indicator();
        let c = Region::Intervals(IntervalSet::from_interval(iv((1, 3), (5, 3))));
        let r = f.restrict(&c).unwrap();
        assert_eq!(r.integral(), f.integral_over(&c).unwrap());
    }
}
