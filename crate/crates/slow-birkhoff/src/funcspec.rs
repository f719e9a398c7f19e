//! Persisted description of a constructed function: f0, the tower list and
//! the construction schedule. The file is a versioned line-based text format
//! that round-trips exactly, so a saved function can be re-verified or
//! traced bit-for-bit later.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::boxes::BoxSet;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::kernel::FnKernel;
use crate::step::{Piece, Region, StepFunction};
use crate::text::{format_rational, parse_rational};
use crate::tower::TowerFactor;

const MAGIC: &str = "slow-birkhoff-function";
const VERSION: u32 = 1;

/// One tower: base width d (as "num/2^exp"), height h, rank floor m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerDescriptor {
    pub base_width: Dyadic,
    pub height: u64,
    pub rank_floor: u32,
}

/// One construction stage: the scale N_k, target deviation a_k and delta_k.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleEntry {
    pub n_scale: u64,
    pub deviation: BigRational,
    pub delta: BigRational,
}

/// A fully reproducible constructed function.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSpec {
    pub dimension: usize,
    pub f0: StepFunction,
    pub towers: Vec<TowerDescriptor>,
    pub schedule: Vec<ScheduleEntry>,
}

impl FunctionSpec {
    /// The compiled final function f = f0 * 1_C.
    pub(crate) fn kernel(&self) -> Result<FnKernel> {
        let cells = self
            .towers
            .iter()
            .map(|t| {
                TowerFactor {
                    d: t.base_width.clone(),
                    height: t.height,
                    rank_floor: t.rank_floor,
                }
                .cells()
            })
            .collect::<Result<Vec<_>>>()?;
        FnKernel::new(&self.f0, cells)
    }

    /// Exact integral of the final function.
    pub fn final_integral(&self) -> Result<BigRational> {
        Ok(self.kernel()?.integral())
    }

    /// Exact measure of C.
    pub fn c_measure(&self) -> Result<BigRational> {
        Ok(self.kernel()?.complement_measure())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} v{}\n", MAGIC, VERSION));
        out.push_str(&format!("dimension {}\n", self.dimension));
        out.push_str(&format!("f0.pieces {}\n", self.f0.pieces().len()));
        for (i, piece) in self.f0.pieces().iter().enumerate() {
            out.push_str(&format!(
                "f0.piece.{}.value {}\n",
                i,
                format_rational(&piece.value)
            ));
            out.push_str(&format!(
                "f0.piece.{}.region {}\n",
                i,
                piece.region.to_text()
            ));
        }
        out.push_str(&format!("towers {}\n", self.towers.len()));
        for (i, t) in self.towers.iter().enumerate() {
            out.push_str(&format!("tower.{}.d {}\n", i, t.base_width));
            out.push_str(&format!("tower.{}.h {}\n", i, t.height));
            out.push_str(&format!("tower.{}.m {}\n", i, t.rank_floor));
        }
        out.push_str(&format!("schedule {}\n", self.schedule.len()));
        for (i, e) in self.schedule.iter().enumerate() {
            out.push_str(&format!("stage.{}.N {}\n", i, e.n_scale));
            out.push_str(&format!(
                "stage.{}.a {}\n",
                i,
                format_rational(&e.deviation)
            ));
            out.push_str(&format!(
                "stage.{}.delta {}\n",
                i,
                format_rational(&e.delta)
            ));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<FunctionSpec> {
        let bad = |msg: String| Error::MalformedSpec(msg);
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| bad("empty file".into()))?;
        let expected = format!("{} v{}", MAGIC, VERSION);
        if header.trim() != expected {
            return Err(bad(format!(
                "bad header {:?}, expected {:?}",
                header, expected
            )));
        }
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (ln, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| bad(format!("line {}: missing value", ln + 1)))?;
            if kv.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(bad(format!("line {}: duplicate key {}", ln + 1, key)));
            }
        }
        let take = |kv: &mut BTreeMap<String, String>, key: &str| -> Result<String> {
            kv.remove(key)
                .ok_or_else(|| Error::MalformedSpec(format!("missing key {}", key)))
        };
        let dimension: usize = take(&mut kv, "dimension")?
            .parse()
            .map_err(|_| bad("bad dimension".into()))?;
        if dimension == 0 {
            return Err(bad("dimension must be >= 1".into()));
        }

        let n_pieces: usize = take(&mut kv, "f0.pieces")?
            .parse()
            .map_err(|_| bad("bad f0.pieces".into()))?;
        let mut pieces = Vec::with_capacity(n_pieces);
        for i in 0..n_pieces {
            let value = parse_rational(&take(&mut kv, &format!("f0.piece.{}.value", i))?)
                .map_err(|e| bad(format!("piece {} value: {}", i, e)))?;
            let region_text = take(&mut kv, &format!("f0.piece.{}.region", i))?;
            let region = if dimension == 1 {
                Region::Intervals(IntervalSet::parse_text(&region_text).map_err(|e| {
                    bad(format!("piece {} region: {}", i, e))
                })?)
            } else {
                Region::Boxes(BoxSet::parse_text(dimension, &region_text).map_err(|e| {
                    bad(format!("piece {} region: {}", i, e))
                })?)
            };
            pieces.push(Piece { region, value });
        }
        let f0 = StepFunction::new(pieces)
            .map_err(|e| bad(format!("invalid f0: {}", e)))?;

        let n_towers: usize = take(&mut kv, "towers")?
            .parse()
            .map_err(|_| bad("bad towers count".into()))?;
        let mut towers = Vec::with_capacity(n_towers);
        for i in 0..n_towers {
            let d: Dyadic = take(&mut kv, &format!("tower.{}.d", i))?
                .parse()
                .map_err(|e| bad(format!("tower {} width: {}", i, e)))?;
            let height: u64 = take(&mut kv, &format!("tower.{}.h", i))?
                .parse()
                .map_err(|_| bad(format!("tower {} height", i)))?;
            let rank_floor: u32 = take(&mut kv, &format!("tower.{}.m", i))?
                .parse()
                .map_err(|_| bad(format!("tower {} rank floor", i)))?;
            if height == 0 || (1u64.checked_shl(rank_floor).unwrap_or(0)) < height {
                return Err(bad(format!(
                    "tower {}: rank floor {} does not cover height {}",
                    i, rank_floor, height
                )));
            }
            if d.rank() < rank_floor || d.is_zero() {
                return Err(bad(format!(
                    "tower {}: width {} too wide for rank floor {}",
                    i, d, rank_floor
                )));
            }
            towers.push(TowerDescriptor {
                base_width: d,
                height,
                rank_floor,
            });
        }

        let n_stages: usize = take(&mut kv, "schedule")?
            .parse()
            .map_err(|_| bad("bad schedule count".into()))?;
        let mut schedule = Vec::with_capacity(n_stages);
        let mut prev_n = 0u64;
        for i in 0..n_stages {
            let n_scale: u64 = take(&mut kv, &format!("stage.{}.N", i))?
                .parse()
                .map_err(|_| bad(format!("stage {} N", i)))?;
            let deviation = parse_rational(&take(&mut kv, &format!("stage.{}.a", i))?)
                .map_err(|e| bad(format!("stage {} a: {}", i, e)))?;
            let delta = parse_rational(&take(&mut kv, &format!("stage.{}.delta", i))?)
                .map_err(|e| bad(format!("stage {} delta: {}", i, e)))?;
            if n_scale <= prev_n {
                return Err(bad("schedule scales must increase".into()));
            }
            prev_n = n_scale;
            schedule.push(ScheduleEntry {
                n_scale,
                deviation,
                delta,
            });
        }

        if !kv.is_empty() {
            let keys: Vec<_> = kv.keys().cloned().collect();
            return Err(bad(format!("unknown keys: {}", keys.join(", "))));
        }

        Ok(FunctionSpec {
            dimension,
            f0,
            towers,
            schedule,
        })
    }
}
