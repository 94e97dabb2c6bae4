//! Greedy ±delta local search on a deterministic objective.
//!
//! Each round tries adding and removing `delta` GW on every coordinate
//! (at most `2 * dim` neighbours, clamped to bounds, no-op moves skipped)
//! and applies the single best strictly improving move. Ties go to the
//! lowest `(t, tech, direction)` with "add" before "remove".

use serde::{Deserialize, Serialize};

use super::{Objective, SolverError};
use crate::env::Plan;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalSearchConfig {
    /// Step size in GW.
    pub delta: f64,
    pub max_rounds: usize,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            delta: 1.0,
            max_rounds: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchOutcome {
    pub plan: Plan,
    pub value: f64,
    /// Moves applied.
    pub rounds: usize,
    /// True when the search stopped because no move improves.
    pub converged: bool,
    /// Incumbent value after each round, starting with the start value.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

struct Move {
    plan: Plan,
    value: f64,
}

fn best_move(
    objective: &dyn Objective,
    plan: &Plan,
    value: f64,
    delta: f64,
    evaluations: &mut usize,
) -> Result<Option<Move>, SolverError> {
    let mut best: Option<Move> = None;
    for c in objective.layout().coords() {
        let x = plan.get(c.t, c.tech);
        for step in [delta, -delta] {
            let mut candidate = plan.clone();
            candidate.set(c.t, c.tech, x + step);
            if candidate.get(c.t, c.tech) == x {
                continue;
            }
            let v = objective.evaluate(&candidate)?;
            *evaluations += 1;
            let threshold = best.as_ref().map_or(value, |m| m.value);
            if v > threshold {
                best = Some(Move {
                    plan: candidate,
                    value: v,
                });
            }
        }
    }
    Ok(best)
}

pub fn vultures_local_search(
    objective: &dyn Objective,
    start: &Plan,
    cfg: &LocalSearchConfig,
) -> Result<LocalSearchOutcome, SolverError> {
    if !(cfg.delta.is_finite() && cfg.delta > 0.0) {
        return Err(SolverError::InvalidConfig(format!(
            "local search delta must be > 0, got {}",
            cfg.delta
        )));
    }
    let first = objective.evaluate(start)?;
    let second = objective.evaluate(start)?;
    if first.to_bits() != second.to_bits() {
        return Err(SolverError::NondeterministicObjective { first, second });
    }

    let mut plan = start.clone();
    let mut value = first;
    let mut history = vec![value];
    let mut evaluations = 2;
    let mut rounds = 0;
    let mut converged = false;
    while rounds < cfg.max_rounds {
        match best_move(objective, &plan, value, cfg.delta, &mut evaluations)? {
            Some(m) => {
                plan = m.plan;
                value = m.value;
                rounds += 1;
                history.push(value);
            }
            None => {
                converged = true;
                break;
            }
        }
    }

    Ok(LocalSearchOutcome {
        plan,
        value,
        rounds,
        converged,
        history,
        evaluations,
    })
}

/// True if no single ±delta move strictly improves `plan`.
pub fn is_delta_local_optimum(
    objective: &dyn Objective,
    plan: &Plan,
    delta: f64,
) -> Result<bool, SolverError> {
    let value = objective.evaluate(plan)?;
    let mut evals = 0;
    Ok(best_move(objective, plan, value, delta, &mut evals)?.is_none())
}
