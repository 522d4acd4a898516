//! Guided team-partitioning: split a pool of feature vectors into `k` teams
//! (optionally discarding `l` points) so that each team's centroid lands as
//! close as possible to a prescribed target vector.
//!
//! The crate provides:
//!
//! - the cost model (squared-L2 centroid-to-target distances) in [`cost`],
//! - characteristic-item-selection solvers (greedy and relaxed-QP rounding)
//!   in [`cis`],
//! - the max-benefit partitioning heuristic in [`partition`],
//! - the full budgeted solver (partition + per-team benefit matrices + a
//!   removal-budget dynamic program) in [`guided`],
//! - seven comparison baselines plus optimal centroid-to-target matching in
//!   [`baselines`] and [`hungarian`],
//! - target generators and a planted-cluster synthetic benchmark in
//!   [`datagen`],
//! - exact brute-force oracles for small instances in [`oracle`],
//! - CSV/JSON I/O and seeded experiment sweeps in [`io`] and [`experiment`].
//!
//! Everything is deterministic: stochastic components take an explicit seed
//! and identical inputs produce identical outputs, byte for byte.

pub mod baselines;
pub mod cis;
pub mod cost;
pub mod datagen;
pub mod experiment;
pub mod guided;
pub mod hungarian;
pub mod io;
pub mod oracle;
pub mod partition;
pub mod sobol;
pub mod types;

mod rng;
mod timing;

pub use types::{
    Assignment, CandidatePool, Error, FeatureVector, Partitioning, Result, SolveReport, TargetSet,
};
