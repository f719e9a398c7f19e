//! Axis-aligned dyadic boxes in [0,1)^n and disjoint unions of them.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::DyadicInterval;

/// Product of `n` half-open dyadic intervals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DyadicBox {
    sides: Vec<DyadicInterval>,
}

impl DyadicBox {
    pub fn new(sides: Vec<DyadicInterval>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidInterval("box needs dimension >= 1".into()));
        }
        Ok(DyadicBox { sides })
    }

    /// `[0,1)^n`.
    pub fn unit(dim: usize) -> Self {
        DyadicBox {
            sides: vec![DyadicInterval::unit(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[DyadicInterval] {
        &self.sides
    }

    pub fn measure(&self) -> BigRational {
        self.sides
            .iter()
            .fold(BigRational::one(), |acc, iv| acc * iv.length())
    }

    pub fn contains(&self, point: &[Dyadic]) -> bool {
        self.sides.len() == point.len()
            && self.sides.iter().zip(point).all(|(iv, x)| iv.contains(x))
    }

    pub fn rank(&self) -> u32 {
        self.sides.iter().map(|iv| iv.rank()).max().unwrap_or(0)
    }

    pub fn intersect(&self, other: &DyadicBox) -> Option<DyadicBox> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut sides = Vec::with_capacity(self.dim());
        for (a, b) in self.sides.iter().zip(&other.sides) {
            sides.push(a.intersect(b)?);
        }
        Some(DyadicBox { sides })
    }

    /// `self \ other` as a disjoint list of boxes (coordinate sweep).
    pub fn subtract(&self, other: &DyadicBox) -> Vec<DyadicBox> {
        let inter = match self.intersect(other) {
            Some(i) => i,
            None => return vec![self.clone()],
        };
        let mut out = Vec::new();
        let mut core = self.sides.clone();
        for j in 0..self.dim() {
            let side = &core[j];
            let cut = &inter.sides[j];
            if side.lo() < cut.lo() {
                let mut sides = core.clone();
                sides[j] = DyadicInterval::new(side.lo().clone(), cut.lo().clone()).unwrap();
                out.push(DyadicBox { sides });
            }
            if cut.hi() < side.hi() {
                let mut sides = core.clone();
                sides[j] = DyadicInterval::new(cut.hi().clone(), side.hi().clone()).unwrap();
                out.push(DyadicBox { sides });
            }
            core[j] = cut.clone();
        }
        out
    }
}

impl fmt::Display for DyadicBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sides.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Disjoint union of dyadic boxes, all of one dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoxSet {
    dim: usize,
    boxes: Vec<DyadicBox>,
}

impl BoxSet {
    /// Validates pairwise disjointness.
    pub fn new(dim: usize, boxes: Vec<DyadicBox>) -> Result<Self> {
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::InvalidInterval(format!(
                    "box dimension {} != set dimension {}",
                    b.dim(),
                    dim
                )));
            }
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].intersect(&boxes[j]).is_some() {
                    return Err(Error::InvalidInterval(format!(
                        "boxes {} and {} overlap",
                        boxes[i], boxes[j]
                    )));
                }
            }
        }
        Ok(BoxSet { dim, boxes })
    }

    pub fn empty(dim: usize) -> Self {
        BoxSet { dim, boxes: vec![] }
    }

    pub fn unit(dim: usize) -> Self {
        BoxSet {
            dim,
            boxes: vec![DyadicBox::unit(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[DyadicBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.boxes.iter().map(|b| b.rank()).max().unwrap_or(0)
    }

    /// Exact product-measure of the disjoint union.
    pub fn measure(&self) -> BigRational {
        self.boxes
            .iter()
            .fold(BigRational::zero(), |acc, b| acc + b.measure())
    }

    pub fn contains(&self, point: &[Dyadic]) -> bool {
        self.boxes.iter().any(|b| b.contains(point))
    }

    pub fn intersect(&self, other: &BoxSet) -> BoxSet {
        let mut out = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                if let Some(i) = a.intersect(b) {
                    out.push(i);
                }
            }
        }
        BoxSet {
            dim: self.dim,
            boxes: out,
        }
    }

    /// `self \ other`.
    pub fn subtract(&self, other: &BoxSet) -> BoxSet {
        let mut current = self.boxes.clone();
        for cut in &other.boxes {
            let mut next = Vec::new();
            for b in current {
                next.extend(b.subtract(cut));
            }
            current = next;
        }
        BoxSet {
            dim: self.dim,
            boxes: current,
        }
    }

    /// Disjoint union with `other` (inputs must not overlap).
    pub fn union_disjoint(&self, other: &BoxSet) -> Result<BoxSet> {
        let mut boxes = self.boxes.clone();
        boxes.extend(other.boxes.iter().cloned());
        BoxSet::new(self.dim, boxes)
    }

    pub fn to_text(&self) -> String {
        if self.boxes.is_empty() {
            return "empty".to_string();
        }
        self.boxes
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse_text(dim: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "empty" {
            return Ok(BoxSet::empty(dim));
        }
        let mut boxes = Vec::new();
        for part in s.split(';') {
            let mut sides = Vec::new();
            for side in part.split('x') {
                sides.push(side.trim().parse::<DyadicInterval>()?);
            }
            boxes.push(DyadicBox::new(sides)?);
        }
        BoxSet::new(dim, boxes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn d(num: u64, exp: u32) -> Dyadic {
        Dyadic::from_parts(num, exp).unwrap()
    }

    fn iv(a: (u64, u32), b: (u64, u32)) -> DyadicInterval {
        DyadicInterval::new(d(a.0, a.1), d(b.0, b.1)).unwrap()
    }

    fn rat(n: i64, den: i64) -> BigRational {
        BigRational::new(n.into(), den.into())
    }

    #[test]
    fn product_measure() {
        // [0,1/4) x [0,1/2) has measure 1/8
        let b = DyadicBox::new(vec![iv((0, 0), (1, 2)), iv((0, 0), (1, 1))]).unwrap();
        assert_eq!(b.measure(), rat(1, 8));
    }

    #[test]
    fn disjointness_validation() {
        let a = DyadicBox::new(vec![iv((0, 0), (1, 1)), iv((0, 0), (1, 1))]).unwrap();
        let b = DyadicBox::new(vec![iv((1, 2), (1, 0)), iv((0, 0), (1, 1))]).unwrap();
        assert!(BoxSet::new(2, vec![a.clone(), b]).is_err());
        let c = DyadicBox::new(vec![iv((1, 1), (1, 0)), iv((0, 0), (1, 1))]).unwrap();
        assert!(BoxSet::new(2, vec![a, c]).is_ok());
    }

    #[test]
    fn subtract_splits() {
        let unit = BoxSet::unit(2);
        let hole = BoxSet::new(
            2,
            vec![DyadicBox::new(vec![iv((1, 2), (1, 1)), iv((1, 2), (1, 1))]).unwrap()],
        )
        .unwrap();
        let remain = unit.subtract(&hole);
        assert_eq!(remain.measure(), rat(15, 16));
        assert!(!remain.contains(&[d(1, 2), d(1, 2)]));
        assert!(remain.contains(&[d(0, 0), d(0, 0)]));
        // pieces stay pairwise disjoint
        assert!(BoxSet::new(2, remain.boxes().to_vec()).is_ok());
    }

    #[test]
    fn text_roundtrip() {
        let set = BoxSet::new(
            2,
            vec![
                DyadicBox::new(vec![iv((0, 0), (1, 2)), iv((0, 0), (1, 1))]).unwrap(),
                DyadicBox::new(vec![iv((1, 1), (3, 2)), iv((1, 1), (1, 0))]).unwrap(),
            ],
        )
        .unwrap();
        let txt = set.to_text();
        assert_eq!(BoxSet::parse_text(2, &txt).unwrap(), set);
    }
}
