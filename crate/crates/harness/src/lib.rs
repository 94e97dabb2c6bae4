//! Evaluation harness: configuration loading, seed sets, run manifests
//! and the `netzero` command-line front end.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod seeds;

pub use commands::{
    cmd_episode, cmd_evaluate, cmd_leaderboard, cmd_optimize, cmd_oracle, run_solver, LeaderboardRow, PlanSource,
    RunOptions, SolverKind, SolverRun,
};
pub use config::{load_config, sha256_hex, HarnessConfig, LoadedConfig};
pub use error::HarnessError;
pub use seeds::{default_seed_set, parse_seed_set};
