//! Reference points: uniformly random plans and an exhaustive grid oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EnvObjective, Objective, PlanLayout, SolverError};
use crate::env::{EnvConfig, Plan, Tech};

/// Every layout coordinate uniform on `[0, bound]`.
pub fn random_plan(layout: &PlanLayout, seed: u64) -> Plan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = layout
        .coords()
        .iter()
        .map(|c| rng.random_range(0.0..=c.upper_bound()))
        .collect();
    layout.plan_from(&values)
}

pub const ORACLE_MAX_HORIZON: usize = 4;
pub const ORACLE_MAX_TECHS: usize = 2;
pub const ORACLE_MAX_PLANS: f64 = 1e6;

/// Reduced problem for exhaustive search: a short horizon and a subset of
/// technologies; the others are held at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyInstance {
    pub env: EnvConfig,
    pub techs: Vec<Tech>,
}

impl TinyInstance {
    pub fn validate(&self) -> Result<(), SolverError> {
        self.env.validate()?;
        if self.env.horizon > ORACLE_MAX_HORIZON {
            return Err(SolverError::InvalidInstance(format!(
                "horizon {} exceeds {ORACLE_MAX_HORIZON}",
                self.env.horizon
            )));
        }
        let layout = self.layout();
        if layout.techs.is_empty() || layout.techs.len() > ORACLE_MAX_TECHS {
            return Err(SolverError::InvalidInstance(format!(
                "need 1 to {ORACLE_MAX_TECHS} distinct technologies, got {}",
                layout.techs.len()
            )));
        }
        Ok(())
    }

    pub fn layout(&self) -> PlanLayout {
        PlanLayout::with_techs(self.env.horizon, &self.techs)
    }

    /// Zero-volatility objective restricted to the instance's technologies.
    pub fn objective(&self) -> Result<EnvObjective, SolverError> {
        Ok(EnvObjective::deterministic(&self.env)?.restricted_to(&self.techs))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub plan: Plan,
    pub score: f64,
    pub evaluated: usize,
}

/// Exhaustive search over the level grid.
///
/// `levels` are fractions of each technology's upper bound, so `1.0` means
/// full build. Ties keep the plan enumerated first (lowest mixed-radix
/// index, first coordinate most significant).
pub fn brute_force_oracle(instance: &TinyInstance, levels: &[f64]) -> Result<OracleOutcome, SolverError> {
    instance.validate()?;
    if levels.is_empty() {
        return Err(SolverError::InvalidInstance("levels list is empty".into()));
    }
    if let Some(l) = levels.iter().find(|l| !(l.is_finite() && (0.0..=1.0).contains(*l))) {
        return Err(SolverError::InvalidInstance(format!("level {l} is not a fraction in [0, 1]")));
    }
    let layout = instance.layout();
    let dim = layout.dim();
    let size = (levels.len() as f64).powi(dim as i32);
    if size > ORACLE_MAX_PLANS {
        return Err(SolverError::SearchSpaceTooLarge {
            size,
            limit: ORACLE_MAX_PLANS,
        });
    }
    let count = size as usize;
    let objective = instance.objective()?;
    let coords = layout.coords();
    let plan_at = |mut index: usize| {
        let mut values = vec![0.0; dim];
        for k in (0..dim).rev() {
            values[k] = levels[index % levels.len()] * coords[k].upper_bound();
            index /= levels.len();
        }
        layout.plan_from(&values)
    };

    let scores = (0..count)
        .into_par_iter()
        .map(|i| objective.evaluate(&plan_at(i)))
        .collect::<Result<Vec<f64>, _>>()?;
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok(OracleOutcome {
        plan: plan_at(best),
        score: scores[best],
        evaluated: count,
    })
}
