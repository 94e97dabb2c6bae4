use rayon::prelude::*;

use super::{PlanLayout, SolverError};
use crate::env::{episode_score, EnvConfig, Plan, Tech};

/// Something to maximise over plans.
pub trait Objective: Sync {
    fn layout(&self) -> &PlanLayout;

    fn evaluate(&self, plan: &Plan) -> Result<f64, SolverError>;
}

/// Wraps a closure; handy for synthetic test problems.
pub struct FnObjective<F> {
    layout: PlanLayout,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&Plan) -> f64 + Sync,
{
    pub fn new(layout: PlanLayout, f: F) -> Self {
        Self { layout, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&Plan) -> f64 + Sync,
{
    fn layout(&self) -> &PlanLayout {
        &self.layout
    }

    fn evaluate(&self, plan: &Plan) -> Result<f64, SolverError> {
        Ok((self.f)(plan))
    }
}

/// Named, ordered list of distinct episode seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    name: String,
    seeds: Vec<u64>,
}

impl SeedSet {
    pub fn new(name: impl Into<String>, seeds: Vec<u64>) -> Result<Self, SolverError> {
        if seeds.is_empty() {
            return Err(SolverError::InvalidSeedSet("seed set is empty".into()));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(SolverError::InvalidSeedSet(format!("duplicate seed {}", w[0])));
        }
        Ok(Self {
            name: name.into(),
            seeds,
        })
    }

    /// `count` consecutive seeds starting at `base`.
    pub fn range(name: impl Into<String>, base: u64, count: usize) -> Result<Self, SolverError> {
        Self::new(name, (0..count as u64).map(|i| base + i).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEvaluation {
    pub mean: f64,
    pub std_error: f64,
    /// Per-seed scores in seed-set order.
    pub scores: Vec<f64>,
}

impl PlanEvaluation {
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let n = scores.len();
        let first = scores[0];
        if scores.iter().all(|s| s.to_bits() == first.to_bits()) {
            return Self {
                mean: first,
                std_error: 0.0,
                scores,
            };
        }
        let mean = scores.iter().sum::<f64>() / n as f64;
        let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            scores,
        }
    }
}

fn scores_over(config: &EnvConfig, plan: &Plan, seeds: &[u64]) -> Result<Vec<f64>, SolverError> {
    // Collected in seed order, so the reduction does not depend on scheduling.
    seeds
        .par_iter()
        .map(|&s| episode_score(config, s, plan).map_err(SolverError::from))
        .collect()
}

/// Mean and standard error of the episode score over a seed set.
pub fn evaluate_plan_mean(
    config: &EnvConfig,
    plan: &Plan,
    seeds: &SeedSet,
) -> Result<PlanEvaluation, SolverError> {
    Ok(PlanEvaluation::from_scores(scores_over(config, plan, seeds.seeds())?))
}

/// Episode score of a plan, either averaged over a seed set or from a
/// single zero-volatility episode.
#[derive(Debug, Clone)]
pub struct EnvObjective {
    config: EnvConfig,
    seeds: Vec<u64>,
    layout: PlanLayout,
}

impl EnvObjective {
    pub fn mean_over(config: &EnvConfig, seeds: &SeedSet) -> Result<Self, SolverError> {
        config.validate()?;
        Ok(Self {
            config: config.clone(),
            seeds: seeds.seeds().to_vec(),
            layout: PlanLayout::full(config.horizon),
        })
    }

    /// Volatility removed; every evaluation is one deterministic episode.
    pub fn deterministic(config: &EnvConfig) -> Result<Self, SolverError> {
        config.validate()?;
        Ok(Self {
            config: config.deterministic(),
            seeds: vec![0],
            layout: PlanLayout::full(config.horizon),
        })
    }

    pub fn restricted_to(mut self, techs: &[Tech]) -> Self {
        self.layout = PlanLayout::with_techs(self.config.horizon, techs);
        self
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }
}

impl Objective for EnvObjective {
    fn layout(&self) -> &PlanLayout {
        &self.layout
    }

    fn evaluate(&self, plan: &Plan) -> Result<f64, SolverError> {
        if let [seed] = self.seeds[..] {
            return Ok(episode_score(&self.config, seed, plan)?);
        }
        let scores = scores_over(&self.config, plan, &self.seeds)?;
        Ok(scores.iter().sum::<f64>() / scores.len() as f64)
    }
}
