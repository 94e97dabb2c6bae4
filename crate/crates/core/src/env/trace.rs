use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    Action, EmissionAccount, EnvConfig, EnvError, EnvState, Observation, ObservationMode, Plan,
    RewardBreakdown, FIRST_YEAR,
};
use crate::pricing::Prices;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub year: u32,
    pub action: Action,
    /// Observation returned after the step.
    pub observation: Observation,
    pub breakdown: RewardBreakdown,
    pub prices: Prices,
    pub emissions: EmissionAccount,
    pub cumulative_reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub seed: u64,
    pub mode: ObservationMode,
    pub steps: Vec<StepRecord>,
    /// Sum of the step totals.
    pub score: f64,
}

pub const TRACE_CSV_HEADER: &str = "t,year,w,b,g,revenue,capex,opex,decom,co2,jobs_term,reward,\
carbon_price,ccs_capex,wind_capex,wind_devex,cumulative_reward";

impl EpisodeTrace {
    /// One row per step; column order is fixed by [`TRACE_CSV_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for s in &self.steps {
            let b = &s.breakdown;
            let p = &s.prices;
            let a = &s.action;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.t,
                s.year,
                a.w,
                a.b,
                a.g,
                b.revenue,
                b.capex,
                b.opex,
                b.decom,
                b.co2,
                b.jobs_term,
                b.total,
                p.carbon_price,
                p.ccs_capex,
                p.wind_capex,
                p.wind_devex,
                s.cumulative_reward
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }
}

fn check_plan(config: &EnvConfig, plan: &Plan) -> Result<(), EnvError> {
    if plan.horizon() != config.horizon {
        return Err(EnvError::PlanLength {
            expected: config.horizon,
            found: plan.horizon(),
        });
    }
    Ok(())
}

/// Runs the open-loop episode for `plan` and records every step.
pub fn run_plan(config: &EnvConfig, seed: u64, plan: &Plan) -> Result<EpisodeTrace, EnvError> {
    run_plan_with_mode(config, seed, plan, ObservationMode::OpenLoop)
}

pub fn run_plan_with_mode(
    config: &EnvConfig,
    seed: u64,
    plan: &Plan,
    mode: ObservationMode,
) -> Result<EpisodeTrace, EnvError> {
    check_plan(config, plan)?;
    let (mut state, _) = EnvState::reset(config, seed, mode)?;
    let mut steps = Vec::with_capacity(config.horizon);
    let mut score = 0.0;
    for (t, &action) in plan.actions().iter().enumerate() {
        let out = state.step(config, action)?;
        score += out.breakdown.total;
        steps.push(StepRecord {
            t,
            year: FIRST_YEAR + t as u32,
            action,
            observation: out.observation,
            breakdown: out.breakdown,
            prices: out.prices,
            emissions: out.emissions,
            cumulative_reward: state.cumulative_reward(),
        });
    }
    Ok(EpisodeTrace {
        seed,
        mode,
        steps,
        score,
    })
}

/// Episode score without recording a trace.
pub fn episode_score(config: &EnvConfig, seed: u64, plan: &Plan) -> Result<f64, EnvError> {
    check_plan(config, plan)?;
    let (mut state, _) = EnvState::reset(config, seed, ObservationMode::OpenLoop)?;
    let mut score = 0.0;
    for &action in plan.actions() {
        score += state.step(config, action)?.breakdown.total;
    }
    Ok(score)
}
