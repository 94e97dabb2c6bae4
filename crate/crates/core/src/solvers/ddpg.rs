//! DDPG-lite: the whole plan is one action of a single-round game.
//!
//! The actor is one unconstrained parameter per coordinate, squashed to
//! the bounds by a scaled sigmoid. Each iteration samples a batch of
//! noisy actions around the actor, scores them with the true objective,
//! regresses the critic onto the (standardised) returns and moves the
//! actor up the critic's action gradient. There is no discounting, no
//! replay buffer and no target network.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Adam, Objective, PlanLayout, SolverError, SurrogateNet};
use crate::env::Plan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateConfig {
    /// Hidden layer widths of the critic.
    pub hidden: Vec<usize>,
    pub critic_lr: f64,
    pub actor_lr: f64,
    /// Multiplier applied to the actor learning rate after every iteration.
    pub actor_lr_decay: f64,
    /// Std of the Gaussian exploration noise, in units of the box width.
    pub exploration_std: f64,
    /// Multiplier applied to the exploration std after every iteration.
    pub exploration_decay: f64,
    pub batch_size: usize,
    pub iterations: usize,
    /// Critic gradient steps per batch.
    pub critic_epochs: usize,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 64],
            critic_lr: 3e-3,
            actor_lr: 0.05,
            actor_lr_decay: 0.99,
            exploration_std: 0.05,
            exploration_decay: 0.995,
            batch_size: 64,
            iterations: 300,
            critic_epochs: 10,
        }
    }
}

impl SurrogateConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.to_string()));
        if self.hidden.iter().any(|&w| w == 0) {
            return bad("critic layer widths must be >= 1");
        }
        if !(self.critic_lr.is_finite() && self.critic_lr > 0.0) {
            return bad("critic learning rate must be > 0");
        }
        if !(self.actor_lr.is_finite() && self.actor_lr > 0.0) {
            return bad("actor learning rate must be > 0");
        }
        if !(self.exploration_std.is_finite() && self.exploration_std >= 0.0) {
            return bad("exploration std must be >= 0");
        }
        if !(self.actor_lr_decay > 0.0 && self.actor_lr_decay <= 1.0) {
            return bad("actor learning-rate decay must be in (0, 1]");
        }
        if !(self.exploration_decay > 0.0 && self.exploration_decay <= 1.0) {
            return bad("exploration decay must be in (0, 1]");
        }
        if self.batch_size < 2 {
            return bad("batch size must be >= 2");
        }
        if self.critic_epochs == 0 {
            return bad("critic epochs must be >= 1");
        }
        Ok(())
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Actor parameters, critic and their optimisers.
#[derive(Debug, Clone)]
pub struct ActorCritic {
    layout: PlanLayout,
    upper: Vec<f64>,
    theta: Vec<f64>,
    critic: SurrogateNet,
    critic_opt: Adam,
    actor_opt: Adam,
    critic_epochs: usize,
}

impl ActorCritic {
    /// Actor starts at the middle of the box.
    pub fn new(layout: &PlanLayout, cfg: &SurrogateConfig, seed: u64) -> Result<Self, SolverError> {
        cfg.validate()?;
        let dim = layout.dim();
        if dim == 0 {
            return Err(SolverError::InvalidConfig("layout has no free coordinates".into()));
        }
        let critic = SurrogateNet::new(dim, &cfg.hidden, seed ^ 0x9e37_79b9_7f4a_7c15);
        Ok(Self {
            layout: layout.clone(),
            upper: layout.coords().iter().map(|c| c.upper_bound()).collect(),
            theta: vec![0.0; dim],
            critic_opt: Adam::new(critic.num_params(), cfg.critic_lr),
            actor_opt: Adam::new(dim, cfg.actor_lr),
            critic,
            critic_epochs: cfg.critic_epochs,
        })
    }

    pub fn critic(&self) -> &SurrogateNet {
        &self.critic
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Actor output as fractions of each coordinate's bound.
    pub fn unit_action(&self) -> Vec<f64> {
        self.theta.iter().map(|&t| sigmoid(t)).collect()
    }

    pub fn plan(&self) -> Plan {
        self.plan_for(&self.unit_action())
    }

    pub fn plan_for(&self, unit: &[f64]) -> Plan {
        let values: Vec<f64> = unit.iter().zip(&self.upper).map(|(u, ub)| u * ub).collect();
        self.layout.plan_from(&values)
    }

    /// Critic input for a unit action: rescaled to `[-1, 1]`.
    pub fn critic_input(unit: &[f64]) -> Vec<f64> {
        unit.iter().map(|u| 2.0 * u - 1.0).collect()
    }

    /// Critic estimate at a unit action.
    pub fn q(&self, unit: &[f64]) -> f64 {
        self.critic.forward(&Self::critic_input(unit))
    }

    /// Regresses the critic onto `returns` and gives the final batch loss.
    /// Returns are standardised with the batch mean and std first.
    pub fn fit_critic(&mut self, units: &[Vec<f64>], returns: &[f64]) -> f64 {
        let n = returns.len() as f64;
        let mean = returns.iter().sum::<f64>() / n;
        let sd = (returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt();
        let scale = if sd > 0.0 { sd } else { 1.0 };
        let targets: Vec<f64> = returns.iter().map(|r| (r - mean) / scale).collect();
        let inputs: Vec<Vec<f64>> = units.iter().map(|u| Self::critic_input(u)).collect();
        let mut loss = f64::NAN;
        for _ in 0..self.critic_epochs {
            let (l, g) = self.critic.loss_and_gradient(&inputs, &targets);
            loss = l;
            if !l.is_finite() {
                break;
            }
            self.critic_opt.step(self.critic.params_mut(), &g);
        }
        loss
    }

    /// Moves the actor one Adam step up dQ/dtheta.
    pub fn actor_step(&mut self) {
        let unit = self.unit_action();
        let dq = self.critic.input_gradient(&Self::critic_input(&unit));
        // ascent: descend on -Q; dz/du = 2, du/dtheta = u(1-u)
        let grad: Vec<f64> = dq.iter().zip(&unit).map(|(g, u)| -2.0 * g * u * (1.0 - u)).collect();
        self.actor_opt.step(&mut self.theta, &grad);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateOutcome {
    pub plan: Plan,
    pub value: f64,
    /// Mean objective of each exploration batch.
    pub history: Vec<f64>,
    pub critic_losses: Vec<f64>,
    pub evaluations: usize,
}

pub fn ddpg_lite_optimize(
    objective: &dyn Objective,
    cfg: &SurrogateConfig,
    seed: u64,
) -> Result<SurrogateOutcome, SolverError> {
    let mut ac = ActorCritic::new(objective.layout(), cfg, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut std = cfg.exploration_std;
    let mut history = Vec::with_capacity(cfg.iterations);
    let mut critic_losses = Vec::with_capacity(cfg.iterations);
    let mut evaluations = 0;

    for iteration in 0..cfg.iterations {
        let centre = ac.unit_action();
        let units: Vec<Vec<f64>> = (0..cfg.batch_size)
            .map(|_| {
                centre
                    .iter()
                    .map(|&u| {
                        let e: f64 = StandardNormal.sample(&mut rng);
                        (u + std * e).clamp(0.0, 1.0)
                    })
                    .collect()
            })
            .collect();
        let returns = units
            .par_iter()
            .map(|u| objective.evaluate(&ac.plan_for(u)))
            .collect::<Result<Vec<f64>, _>>()?;
        evaluations += returns.len();
        if returns.iter().any(|r| !r.is_finite()) {
            return Err(SolverError::DivergenceDetected { iteration });
        }
        history.push(returns.iter().sum::<f64>() / returns.len() as f64);

        let loss = ac.fit_critic(&units, &returns);
        if !loss.is_finite() || !ac.critic.is_finite() {
            return Err(SolverError::DivergenceDetected { iteration });
        }
        critic_losses.push(loss);
        ac.actor_step();
        std *= cfg.exploration_decay;
        ac.actor_opt.lr *= cfg.actor_lr_decay;
    }

    let plan = ac.plan();
    let value = objective.evaluate(&plan)?;
    Ok(SurrogateOutcome {
        plan,
        value,
        history,
        critic_losses,
        evaluations: evaluations + 1,
    })
}
