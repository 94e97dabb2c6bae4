//! Plan optimisers.
//!
//! All solvers maximise an [`Objective`] over the box of plan coordinates
//! described by a [`PlanLayout`]. Coordinates not in the layout stay at 0.

mod baseline;
mod coordinate;
mod ddpg;
mod golden;
mod local;
mod objective;
mod surrogate;

use thiserror::Error;

use crate::env::{EnvError, Plan, Tech};

pub use baseline::{brute_force_oracle, random_plan, OracleOutcome, TinyInstance};
pub use coordinate::{eg_coordinate_maximize, CoordinateOutcome};
pub use ddpg::{ddpg_lite_optimize, ActorCritic, SurrogateConfig, SurrogateOutcome};
pub use golden::{golden_section_search, INV_PHI, try_golden_section_search, GoldenSectionConfig, GoldenSectionResult};
pub use local::{is_delta_local_optimum, vultures_local_search, LocalSearchConfig, LocalSearchOutcome};
pub use objective::{evaluate_plan_mean, EnvObjective, FnObjective, Objective, PlanEvaluation, SeedSet};
pub use surrogate::{Adam, SurrogateNet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("objective is not deterministic: {first} then {second}")]
    NondeterministicObjective { first: f64, second: f64 },
    #[error("critic loss became non-finite at iteration {iteration}")]
    DivergenceDetected { iteration: usize },
    #[error("search space of {size} plans exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },
    #[error("invalid tiny instance: {0}")]
    InvalidInstance(String),
    #[error("invalid seed set: {0}")]
    InvalidSeedSet(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// One decision variable: the new capacity of `tech` in year `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coord {
    pub t: usize,
    pub tech: Tech,
}

impl Coord {
    pub fn upper_bound(self) -> f64 {
        self.tech.upper_bound()
    }
}

/// Which coordinates of a plan are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanLayout {
    pub horizon: usize,
    pub techs: Vec<Tech>,
}

impl PlanLayout {
    /// All three technologies over `horizon` years.
    pub fn full(horizon: usize) -> Self {
        Self {
            horizon,
            techs: Tech::ALL.to_vec(),
        }
    }

    pub fn with_techs(horizon: usize, techs: &[Tech]) -> Self {
        let mut techs = techs.to_vec();
        techs.sort();
        techs.dedup();
        Self { horizon, techs }
    }

    pub fn dim(&self) -> usize {
        self.horizon * self.techs.len()
    }

    /// Coordinates ordered by year, then by technology (w, b, g).
    pub fn coords(&self) -> Vec<Coord> {
        (0..self.horizon)
            .flat_map(|t| self.techs.iter().map(move |&tech| Coord { t, tech }))
            .collect()
    }

    pub fn zero_plan(&self) -> Plan {
        Plan::zeros(self.horizon)
    }

    pub fn read(&self, plan: &Plan) -> Vec<f64> {
        self.coords().iter().map(|c| plan.get(c.t, c.tech)).collect()
    }

    /// Plan with the layout's coordinates set from `values` (clamped).
    pub fn plan_from(&self, values: &[f64]) -> Plan {
        let mut plan = self.zero_plan();
        for (c, &v) in self.coords().iter().zip(values) {
            plan.set(c.t, c.tech, v);
        }
        plan
    }
}
