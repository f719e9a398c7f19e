//! Batch configuration: a flat key-value text format with dotted keys.
//!
//! ```text
//! # construct a 3-stage function
//! dimension = 1
//! f0 = constant:1/1
//! deviations = geometric:1/16,1/2,3
//! lower_scales = geometric:10,10,3
//! budget = 1/4
//! delta0 = 1/40
//! mc.samples = 10000
//! mc.seed = 17
//! mc.alpha = 1/100
//! precision = 56
//! exact_threshold = 4096
//! safety = 2
//! ```
//!
//! Unknown keys are rejected so typos cannot silently fall back to
//! defaults. Rationals are `p/q`; lists are comma-separated; geometric
//! shorthand is `geometric:<first>,<ratio>,<count>`.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::boxes::BoxSet;
use crate::construction::{ConstructionParams, McSettings};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::step::{Piece, Region, StepFunction};
use crate::text::parse_rational;

const KNOWN_KEYS: &[&str] = &[
    "dimension",
    "f0",
    "deviations",
    "lower_scales",
    "budget",
    "delta0",
    "mc.samples",
    "mc.seed",
    "mc.alpha",
    "precision",
    "exact_threshold",
    "safety",
    "scale_cap",
];

/// Parsed and validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: ConstructionParams,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {}", path.display(), e)))?;
        RunConfig::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<RunConfig> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", ln + 1))
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "line {}: unknown key {:?}",
                    ln + 1,
                    key
                )));
            }
            if kv
                .insert(key.clone(), (ln + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::InvalidConfig(format!(
                    "line {}: duplicate key {:?}",
                    ln + 1,
                    key
                )));
            }
        }

        let ctx = |key: &str, kv: &BTreeMap<String, (usize, String)>, what: &str| {
            let line = kv.get(key).map(|(l, _)| *l).unwrap_or(0);
            Error::InvalidConfig(format!("line {}: key {:?}: {}", line, key, what))
        };

        let get = |key: &str| kv.get(key).map(|(_, v)| v.as_str());

        let parse_u64 = |key: &str, default: u64| -> Result<u64> {
            match get(key) {
                None => Ok(default),
                Some(v) => v
                    .parse::<u64>()
                    .map_err(|_| ctx(key, &kv, "expected an integer")),
            }
        };
        let parse_rat = |key: &str, default: &str| -> Result<BigRational> {
            let v = get(key).unwrap_or(default);
            parse_rational(v).map_err(|e| ctx(key, &kv, &e.to_string()))
        };

        let dimension = parse_u64("dimension", 1)? as usize;
        if dimension == 0 {
            return Err(ctx("dimension", &kv, "must be >= 1"));
        }

        let f0 = parse_f0(get("f0").unwrap_or("constant:2"), dimension)
            .map_err(|e| ctx("f0", &kv, &e.to_string()))?;

        let deviations = parse_rational_list(
            get("deviations")
                .ok_or_else(|| ctx("deviations", &kv, "required key missing"))?,
        )
        .map_err(|e| ctx("deviations", &kv, &e.to_string()))?;

        let lower_scales = parse_integer_list(
            get("lower_scales")
                .ok_or_else(|| ctx("lower_scales", &kv, "required key missing"))?,
        )
        .map_err(|e| ctx("lower_scales", &kv, &e.to_string()))?;

        let budget_text =
            get("budget").ok_or_else(|| ctx("budget", &kv, "required key missing"))?;
        let budget =
            parse_rational(budget_text).map_err(|e| ctx("budget", &kv, &e.to_string()))?;
        let delta0_text =
            get("delta0").ok_or_else(|| ctx("delta0", &kv, "required key missing"))?;
        let delta0 =
            parse_rational(delta0_text).map_err(|e| ctx("delta0", &kv, &e.to_string()))?;

        let alpha_rat = parse_rat("mc.alpha", "1/100")?;
        let alpha = alpha_rat
            .to_f64()
            .filter(|a| *a > 0.0 && *a < 1.0)
            .ok_or_else(|| ctx("mc.alpha", &kv, "must lie in (0,1)"))?;

        let params = ConstructionParams {
            dimension,
            f0,
            deviations,
            lower_scales,
            budget,
            delta0,
            mc: McSettings {
                samples: parse_u64("mc.samples", 10_000)?,
                seed: parse_u64("mc.seed", 1)?,
                alpha,
            },
            precision: parse_u64("precision", 56)? as u32,
            exact_threshold: parse_u64("exact_threshold", 4096)?,
            safety: parse_rat("safety", "2")?,
            scale_cap: parse_u64("scale_cap", 1 << 48)?,
        };
        params.validate()?;
        Ok(RunConfig { params })
    }
}

/// `constant:<rational>` or `pieces:<region>:<value>|<region>:<value>|...`
fn parse_f0(text: &str, dimension: usize) -> Result<StepFunction> {
    let text = text.trim();
    if let Some(c) = text.strip_prefix("constant:") {
        return StepFunction::constant(parse_rational(c)?, dimension);
    }
    if let Some(body) = text.strip_prefix("pieces:") {
        let mut pieces = Vec::new();
        for part in body.split('|') {
            let (region_text, value_text) = part.rsplit_once(':').ok_or_else(|| {
                Error::InvalidConfig(format!("piece {:?} needs <region>:<value>", part))
            })?;
            let region = if dimension == 1 {
                Region::Intervals(IntervalSet::parse_text(region_text)?)
            } else {
                Region::Boxes(BoxSet::parse_text(dimension, region_text)?)
            };
            pieces.push(Piece {
                region,
                value: parse_rational(value_text)?,
            });
        }
        return StepFunction::new(pieces);
    }
    Err(Error::InvalidConfig(format!(
        "f0 must be constant:<value> or pieces:..., got {:?}",
        text
    )))
}

/// `a,b,c` or `geometric:<first>,<ratio>,<count>`.
fn parse_rational_list(text: &str) -> Result<Vec<BigRational>> {
    let text = text.trim();
    if let Some(body) = text.strip_prefix("geometric:") {
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(
                "geometric takes <first>,<ratio>,<count>".into(),
            ));
        }
        let first = parse_rational(parts[0])?;
        let ratio = parse_rational(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig("bad geometric count".into()))?;
        let mut out = Vec::with_capacity(count);
        let mut cur = first;
        for _ in 0..count {
            out.push(cur.clone());
            cur *= &ratio;
        }
        return Ok(out);
    }
    text.split(',').map(parse_rational).collect()
}

fn parse_integer_list(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if let Some(body) = text.strip_prefix("geometric:") {
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(
                "geometric takes <first>,<ratio>,<count>".into(),
            ));
        }
        let first: u64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig("bad geometric first".into()))?;
        let ratio: u64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig("bad geometric ratio".into()))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig("bad geometric count".into()))?;
        let mut out = Vec::with_capacity(count);
        let mut cur = first;
        for _ in 0..count {
            out.push(cur);
            cur = cur
                .checked_mul(ratio)
                .ok_or_else(|| Error::InvalidConfig("geometric scale overflow".into()))?;
        }
        return Ok(out);
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidConfig(format!("bad integer {:?}", s)))
        })
        .collect()
}
