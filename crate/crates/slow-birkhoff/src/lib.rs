//! Exactly computable slow convergence of Birkhoff averages.
//!
//! This crate realizes, over the binary odometer on [0,1) (and its n-fold
//! product on [0,1)^n), the construction that makes Birkhoff averages
//! converge arbitrarily slowly: repeatedly zero a nonnegative step function
//! on tall Rokhlin towers so that at each prescribed scale N_k the averages
//! of the final function deviate from its integral on a set of measure close
//! to 1. Everything the construction asserts is checked either exactly (all
//! set algebra, measures and integrals are dyadic-rational arithmetic) or by
//! seeded Monte-Carlo estimation with Hoeffding confidence radii.
//!
//! The main entry points:
//!
//! - [`dyadic::Dyadic`], [`interval::IntervalSet`], [`boxes::BoxSet`],
//!   [`step::StepFunction`]: exact phase-space arithmetic;
//! - [`odometer::OdometerZ`], [`odometer::OdometerZn`]: the actions;
//! - [`tower::build_tower`], [`tower::build_tower_zn`]: exact Rokhlin towers;
//! - [`birkhoff`]: averages, exact deviation sets, Monte-Carlo deviation
//!   probabilities;
//! - [`construction`]: the staged construction, certification and
//!   verification;
//! - [`funcspec::FunctionSpec`]: the persisted, reproducible description of
//!   a constructed function;
//! - [`config::RunConfig`]: the batch configuration format used by the CLI.
//!
//! Run `cargo run --example slow_convergence` for an end-to-end tour, or see
//! the `examples/` directory for one runnable example per capability.

pub mod birkhoff;
pub mod boxes;
pub mod config;
pub mod construction;
pub mod csvout;
pub mod dyadic;
pub mod error;
pub mod funcspec;
pub mod interval;
mod kernel;
pub mod odometer;
mod revspace;
pub mod step;
pub mod text;
pub mod tower;
pub mod trace;

pub use birkhoff::{
    birkhoff_average, birkhoff_average_zn, deviation_prob_mc, deviation_set_exact,
    hoeffding_radius, DeviationEstimate, EstimateMethod,
};
pub use boxes::{BoxSet, DyadicBox};
pub use config::RunConfig;
pub use construction::{
    choose_height, find_scale, run_construction, run_stage, verify, ConstructionParams,
    ConstructionState, DeviationReport, McSettings, StageRecord, StageReport,
};
pub use dyadic::{Dyadic, RANK_CAP};
pub use error::{Error, Result};
pub use funcspec::{FunctionSpec, ScheduleEntry, TowerDescriptor};
pub use interval::{DyadicInterval, IntervalSet};
pub use odometer::{OdometerZ, OdometerZn};
pub use step::{Piece, Region, StepFunction};
pub use tower::{build_tower, build_tower_zn, tower_set, tower_set_zn, Tower, TowerZn};
