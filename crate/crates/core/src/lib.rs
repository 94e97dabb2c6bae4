//! Net-zero pathway investment sandbox.
//!
//! - [`sheetdag`]: formula parser and incremental spreadsheet DAG.
//! - [`pricing`]: mean-reverting log-price process and forecasts.
//! - [`env`]: the 20-year deployment environment and its reward.
//! - [`solvers`]: coordinate golden-section search, local search,
//!   surrogate actor-critic, random and brute-force baselines.

pub mod sheetdag;
pub mod pricing;
pub mod env;
pub mod solvers;
