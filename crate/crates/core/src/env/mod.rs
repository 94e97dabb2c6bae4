//! The yearly deployment environment.
//!
//! Each step the agent chooses new capacity (GW) of offshore wind, blue
//! hydrogen and green hydrogen. The step reward is
//!
//! ```text
//! R_t = revenue_t - (capex_t + opex_t + decom_t + co2_t) + w_t * J_t
//! ```
//!
//! where `J_t` is the jobs increment and `w_t` the jobs weight (`t` by
//! default). Carbon capture is not controlled: a fixed fraction
//! `t / (horizon - 1)` of gross emissions is captured, so net emissions are
//! zero in the final year. Step-`t` rewards use step-`t` prices; prices are
//! advanced afterwards.

mod config;
mod sheet;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pricing::{PriceState, Prices, PricingError, SeriesMap};
use crate::sheetdag::SheetError;

pub use config::{EnvConfig, JobsIndexing, Tech, TechMap, TechParams};
pub use sheet::{bind_sheet_backend, sheet_definition, SheetBackend};
pub use trace::{episode_score, run_plan, run_plan_with_mode, EpisodeTrace, StepRecord};

/// Calendar year of step 0.
pub const FIRST_YEAR: u32 = 2031;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("action component is not finite: {0:?}")]
    NonFiniteAction([f64; 3]),
    #[error("action {0:?} is outside [0,27] x [0,25] x [0,24]")]
    ActionOutOfBounds([f64; 3]),
    #[error("plan has {found} actions, expected {expected}")]
    PlanLength { expected: usize, found: usize },
    #[error("episode already finished")]
    EpisodeDone,
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Sheet(#[from] SheetError),
}

/// New capacity in GW for one year.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Action {
    pub w: f64,
    pub b: f64,
    pub g: f64,
}

impl Action {
    pub const ZERO: Action = Action {
        w: 0.0,
        b: 0.0,
        g: 0.0,
    };

    pub const MAX: Action = Action {
        w: 27.0,
        b: 25.0,
        g: 24.0,
    };

    /// Checked constructor; rejects values outside the bounds.
    pub fn new(w: f64, b: f64, g: f64) -> Result<Self, EnvError> {
        let raw = [w, b, g];
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(EnvError::NonFiniteAction(raw));
        }
        let a = Action { w, b, g };
        if Tech::ALL
            .iter()
            .any(|&k| !(0.0..=k.upper_bound()).contains(&a.get(k)))
        {
            return Err(EnvError::ActionOutOfBounds(raw));
        }
        Ok(a)
    }

    pub fn get(&self, tech: Tech) -> f64 {
        match tech {
            Tech::Wind => self.w,
            Tech::Blue => self.b,
            Tech::Green => self.g,
        }
    }

    pub fn set(&mut self, tech: Tech, value: f64) {
        match tech {
            Tech::Wind => self.w = value,
            Tech::Blue => self.b = value,
            Tech::Green => self.g = value,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.w, self.b, self.g]
    }

    pub fn in_bounds(&self) -> bool {
        Tech::ALL.iter().all(|&k| {
            let v = self.get(k);
            v.is_finite() && (0.0..=k.upper_bound()).contains(&v)
        })
    }
}

impl Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [w, b, g] = <[f64; 3]>::deserialize(d)?;
        Action::new(w, b, g).map_err(serde::de::Error::custom)
    }
}

/// Componentwise clamp of a raw action triple onto the action box.
pub fn clamp_action(raw: [f64; 3]) -> Result<Action, EnvError> {
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(EnvError::NonFiniteAction(raw));
    }
    let mut a = Action::ZERO;
    for (k, v) in Tech::ALL.into_iter().zip(raw) {
        a.set(k, v.clamp(0.0, k.upper_bound()));
    }
    Ok(a)
}

/// One action per year. Serialised as an array of `[w, b, g]` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Action>", into = "Vec<Action>")]
pub struct Plan {
    actions: Vec<Action>,
}

impl Plan {
    pub fn new(actions: Vec<Action>) -> Result<Self, EnvError> {
        if actions.is_empty() || actions.len() > crate::pricing::HORIZON {
            return Err(EnvError::PlanLength {
                expected: crate::pricing::HORIZON,
                found: actions.len(),
            });
        }
        if let Some(bad) = actions.iter().find(|a| !a.in_bounds()) {
            return Err(EnvError::ActionOutOfBounds(bad.to_array()));
        }
        Ok(Self { actions })
    }

    pub fn zeros(horizon: usize) -> Self {
        Self {
            actions: vec![Action::ZERO; horizon],
        }
    }

    pub fn uniform(horizon: usize, action: Action) -> Self {
        Self {
            actions: vec![action; horizon],
        }
    }

    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn get(&self, t: usize, tech: Tech) -> f64 {
        self.actions[t].get(tech)
    }

    /// Sets one coordinate, clamping it onto the technology's bounds.
    pub fn set(&mut self, t: usize, tech: Tech, value: f64) {
        let v = if value.is_nan() { 0.0 } else { value };
        self.actions[t].set(tech, v.clamp(0.0, tech.upper_bound()));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialises")
    }

    pub fn from_json_str(text: &str) -> Result<Self, EnvError> {
        serde_json::from_str(text).map_err(|e| EnvError::InvalidConfig(format!("plan: {e}")))
    }
}

impl TryFrom<Vec<Action>> for Plan {
    type Error = EnvError;

    fn try_from(actions: Vec<Action>) -> Result<Self, Self::Error> {
        Plan::new(actions)
    }
}

impl From<Plan> for Vec<Action> {
    fn from(plan: Plan) -> Self {
        plan.actions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationMode {
    /// Step count and last reward only.
    #[default]
    OpenLoop,
    /// Adds price forecasts for the remaining horizon.
    ClosedLoop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Observation {
    OpenLoop {
        step: usize,
        last_reward: f64,
    },
    ClosedLoop {
        step: usize,
        last_reward: f64,
        forecasts: SeriesMap<Vec<f64>>,
    },
}

impl Observation {
    pub fn step(&self) -> usize {
        match self {
            Observation::OpenLoop { step, .. } | Observation::ClosedLoop { step, .. } => *step,
        }
    }

    pub fn last_reward(&self) -> f64 {
        match self {
            Observation::OpenLoop { last_reward, .. }
            | Observation::ClosedLoop { last_reward, .. } => *last_reward,
        }
    }
}

/// The terms of one step's reward.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub revenue: f64,
    pub capex: f64,
    pub opex: f64,
    pub decom: f64,
    pub co2: f64,
    pub jobs_term: f64,
    pub total: f64,
}

impl RewardBreakdown {
    /// `revenue - (capex + opex + decom + co2) + jobs_term`, evaluated in
    /// exactly the order used for `total`.
    pub fn identity_total(&self) -> f64 {
        self.revenue - (self.capex + self.opex + self.decom + self.co2) + self.jobs_term
    }
}

/// Emissions bookkeeping behind `co2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EmissionAccount {
    pub gross: f64,
    pub captured: f64,
    /// New capture capacity this step.
    pub ccus_new: f64,
    /// Carbon price times net (uncaptured) emissions.
    pub carbon_cost: f64,
    /// CCS capex price times new capture capacity.
    pub ccus_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub breakdown: RewardBreakdown,
    /// Prices used for this step's reward.
    pub prices: Prices,
    pub emissions: EmissionAccount,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    t: usize,
    capacity: TechMap<f64>,
    prev_action: Action,
    price_state: PriceState,
    cumulative_reward: f64,
    last_reward: f64,
    prev_capture: f64,
    mode: ObservationMode,
}

impl EnvState {
    pub fn reset(
        config: &EnvConfig,
        seed: u64,
        mode: ObservationMode,
    ) -> Result<(Self, Observation), EnvError> {
        config.validate()?;
        let state = Self {
            t: 0,
            capacity: TechMap::default(),
            prev_action: Action::ZERO,
            price_state: PriceState::reset(&config.noise, seed)?,
            cumulative_reward: 0.0,
            last_reward: 0.0,
            prev_capture: 0.0,
            mode,
        };
        let obs = state.observe(config, mode);
        Ok((state, obs))
    }

    pub fn step_index(&self) -> usize {
        self.t
    }

    pub fn capacity(&self) -> &TechMap<f64> {
        &self.capacity
    }

    pub fn cumulative_reward(&self) -> f64 {
        self.cumulative_reward
    }

    pub fn price_state(&self) -> &PriceState {
        &self.price_state
    }

    pub fn mode(&self) -> ObservationMode {
        self.mode
    }

    pub fn is_done(&self, config: &EnvConfig) -> bool {
        self.t >= config.horizon
    }

    pub fn observe(&self, config: &EnvConfig, mode: ObservationMode) -> Observation {
        match mode {
            ObservationMode::OpenLoop => Observation::OpenLoop {
                step: self.t,
                last_reward: self.last_reward,
            },
            ObservationMode::ClosedLoop => {
                let remaining = config.horizon.saturating_sub(self.t + 1);
                let forecasts = self
                    .price_state
                    .forecast(&config.noise)
                    .map(|_, f| f.iter().take(remaining).copied().collect());
                Observation::ClosedLoop {
                    step: self.t,
                    last_reward: self.last_reward,
                    forecasts,
                }
            }
        }
    }

    /// Applies one in-bounds action (clamp first with [`clamp_action`]).
    pub fn step(&mut self, config: &EnvConfig, action: Action) -> Result<StepOutcome, EnvError> {
        if self.is_done(config) {
            return Err(EnvError::EpisodeDone);
        }
        if !action.in_bounds() {
            return Err(EnvError::ActionOutOfBounds(action.to_array()));
        }
        let t = self.t;
        let p = self.price_state.prices();

        for k in Tech::ALL {
            self.capacity[k] += action.get(k);
        }
        let cap = self.capacity;

        let mut revenue = 0.0;
        let mut opex = 0.0;
        let mut decom = 0.0;
        let mut gross = 0.0;
        let mut jobs = 0.0;
        for k in Tech::ALL {
            let c = config.tech(k);
            let a = action.get(k);
            revenue = revenue + c.revenue_rate * c.capacity_factor * cap[k];
            opex = opex + c.opex_rate * cap[k];
            decom = decom + c.decom_rate * a;
            gross = gross + c.emission_intensity * cap[k];
            jobs = jobs + c.build_jobs * (a - self.prev_action.get(k));
            jobs = jobs + c.ops_jobs * a;
        }
        let capex = (p.wind_capex + p.wind_devex) * action.w
            + config.blue.capex_rate * action.b
            + config.green.capex_rate * action.g;

        let captured = config.ramp(t) * gross;
        let ccus_new = (captured - self.prev_capture).max(0.0);
        let carbon_cost = p.carbon_price * (gross - captured);
        let ccus_cost = p.ccs_capex * ccus_new;
        let co2 = carbon_cost + ccus_cost;
        let jobs_term = config.jobs_weight(t) * jobs;

        let mut breakdown = RewardBreakdown {
            revenue,
            capex,
            opex,
            decom,
            co2,
            jobs_term,
            total: 0.0,
        };
        breakdown.total = breakdown.identity_total();

        self.cumulative_reward += breakdown.total;
        self.last_reward = breakdown.total;
        self.prev_capture = captured;
        self.prev_action = action;
        self.t += 1;
        if self.t < config.horizon {
            self.price_state.advance(&config.noise)?;
        }

        Ok(StepOutcome {
            observation: self.observe(config, self.mode),
            breakdown,
            prices: p,
            emissions: EmissionAccount {
                gross,
                captured,
                ccus_new,
                carbon_cost,
                ccus_cost,
            },
            done: self.t >= config.horizon,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_cost_config() -> EnvConfig {
        let mut cfg = EnvConfig::placeholder();
        for k in Tech::ALL {
            *cfg.tech_mut(k) = TechParams {
                capacity_factor: 1.0,
                revenue_rate: 0.0,
                capex_rate: 0.0,
                opex_rate: 0.0,
                decom_rate: 0.0,
                emission_intensity: 0.0,
                build_jobs: 0.0,
                ops_jobs: 0.0,
            };
        }
        cfg.wind.revenue_rate = 2.0;
        cfg
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_action([30.0, -1.0, 5.0]).unwrap(), Action { w: 27.0, b: 0.0, g: 5.0 });
        assert_eq!(clamp_action([0.0, 0.0, 0.0]).unwrap(), Action::ZERO);
        assert_eq!(clamp_action([27.0, 25.0, 24.0]).unwrap(), Action::MAX);
        assert!(matches!(
            clamp_action([f64::NAN, 0.0, 0.0]),
            Err(EnvError::NonFiniteAction(_))
        ));
        assert!(clamp_action([0.0, f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn checked_action() {
        assert!(Action::new(27.0, 25.0, 24.0).is_ok());
        assert!(matches!(Action::new(27.1, 0.0, 0.0), Err(EnvError::ActionOutOfBounds(_))));
        assert!(Action::new(0.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn reset_observations() {
        let cfg = EnvConfig::placeholder();
        let (s, obs) = EnvState::reset(&cfg, 7, ObservationMode::OpenLoop).unwrap();
        assert_eq!(obs, Observation::OpenLoop { step: 0, last_reward: 0.0 });
        let (s2, _) = EnvState::reset(&cfg, 7, ObservationMode::OpenLoop).unwrap();
        assert_eq!(s, s2);

        let (_, obs) = EnvState::reset(&cfg, 7, ObservationMode::ClosedLoop).unwrap();
        let Observation::ClosedLoop { forecasts, .. } = obs else { panic!() };
        assert!(forecasts.iter().all(|(_, f)| f.len() == 19));
    }

    #[test]
    fn single_step_hand_computation() {
        let cfg = zero_cost_config().deterministic();
        let (mut s, _) = EnvState::reset(&cfg, 0, ObservationMode::OpenLoop).unwrap();
        // only blue is built so the wind capex price path does not enter
        let mut cfg_b = cfg.clone();
        cfg_b.blue.revenue_rate = 2.0;
        cfg_b.wind.revenue_rate = 0.0;
        let out = s.step(&cfg_b, Action { w: 0.0, b: 1.0, g: 0.0 }).unwrap();
        assert_eq!(out.breakdown.revenue, 2.0);
        assert_eq!(out.breakdown.total, 2.0);
        assert_eq!(out.breakdown.jobs_term, 0.0);

        // wind: revenue 2 per GW, capex = wind capex + devex prices at t=0
        let (mut s, _) = EnvState::reset(&cfg, 0, ObservationMode::OpenLoop).unwrap();
        let out = s.step(&cfg, Action { w: 1.0, b: 0.0, g: 0.0 }).unwrap();
        let p0 = cfg.noise.reference_prices(0);
        assert_eq!(out.breakdown.revenue, 2.0);
        let expected_capex = p0.wind_capex + p0.wind_devex;
        assert!((out.breakdown.capex - expected_capex).abs() < 1e-9);
        assert_eq!(out.breakdown.total, 2.0 - out.breakdown.capex);
    }

    #[test]
    fn episode_ends() {
        let mut cfg = EnvConfig::placeholder();
        cfg.horizon = 2;
        let (mut s, _) = EnvState::reset(&cfg, 1, ObservationMode::OpenLoop).unwrap();
        assert!(!s.step(&cfg, Action::ZERO).unwrap().done);
        assert!(s.step(&cfg, Action::ZERO).unwrap().done);
        assert_eq!(s.step(&cfg, Action::ZERO), Err(EnvError::EpisodeDone));
    }

    #[test]
    fn jobs_term_uses_change_in_build_rate() {
        let mut cfg = zero_cost_config().deterministic();
        cfg.wind.revenue_rate = 0.0;
        cfg.blue.build_jobs = 10.0;
        cfg.blue.ops_jobs = 1.0;
        let (mut s, _) = EnvState::reset(&cfg, 0, ObservationMode::OpenLoop).unwrap();
        let a = Action { w: 0.0, b: 2.0, g: 0.0 };
        let r0 = s.step(&cfg, a).unwrap().breakdown;
        assert_eq!(r0.jobs_term, 0.0); // weight 0 at t = 0
        let r1 = s.step(&cfg, Action { w: 0.0, b: 5.0, g: 0.0 }).unwrap().breakdown;
        assert_eq!(r1.jobs_term, 1.0 * (10.0 * 3.0 + 1.0 * 5.0));
        let r2 = s.step(&cfg, Action::ZERO).unwrap().breakdown;
        assert_eq!(r2.jobs_term, 2.0 * (10.0 * -5.0));
    }

    #[test]
    fn plan_json_shape() {
        let mut plan = Plan::zeros(20);
        plan.set(19, Tech::Green, 30.0);
        assert_eq!(plan.get(19, Tech::Green), 24.0);
        let text = plan.to_json();
        let back = Plan::from_json_str(&text).unwrap();
        assert_eq!(back, plan);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 20);
        assert_eq!(v[19], serde_json::json!([0.0, 0.0, 24.0]));
        assert!(Plan::from_json_str("[[30, 0, 0]]").is_err());
        assert!(Plan::from_json_str("[]").is_err());
    }
}
