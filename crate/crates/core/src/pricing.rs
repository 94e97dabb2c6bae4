//! Randomised input prices.
//!
//! Each of the four price series follows a mean-reverting AR(1) process in
//! log space, pulled toward a deterministic reference trajectory:
//!
//! ```text
//! x[t+1] = (1 - kappa) * x[t] + kappa * ln(mu[t+1]) + sigma * eps
//! ```
//!
//! with one standard normal draw per series per step, drawn in the order
//! carbon price, CCS capex, wind capex, wind devex. Forecasts are
//! `exp` of the conditional mean of the log price, i.e. conditional medians.

use std::ops::{Index, IndexMut};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of yearly steps in a full episode (2031..=2050).
pub const HORIZON: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("invalid noise parameters: {0}")]
    InvalidParams(String),
    #[error("price path exhausted at step {0}")]
    EpisodeExhausted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceSeriesId {
    CarbonPrice,
    CcsCapex,
    WindCapex,
    WindDevex,
}

impl PriceSeriesId {
    /// Also the order in which noise is drawn.
    pub const ALL: [PriceSeriesId; 4] = [
        PriceSeriesId::CarbonPrice,
        PriceSeriesId::CcsCapex,
        PriceSeriesId::WindCapex,
        PriceSeriesId::WindDevex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PriceSeriesId::CarbonPrice => "carbon_price",
            PriceSeriesId::CcsCapex => "ccs_capex",
            PriceSeriesId::WindCapex => "wind_capex",
            PriceSeriesId::WindDevex => "wind_devex",
        }
    }
}

/// One value per randomised series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMap<T> {
    pub carbon_price: T,
    pub ccs_capex: T,
    pub wind_capex: T,
    pub wind_devex: T,
}

impl<T> SeriesMap<T> {
    pub fn from_fn(mut f: impl FnMut(PriceSeriesId) -> T) -> Self {
        Self {
            carbon_price: f(PriceSeriesId::CarbonPrice),
            ccs_capex: f(PriceSeriesId::CcsCapex),
            wind_capex: f(PriceSeriesId::WindCapex),
            wind_devex: f(PriceSeriesId::WindDevex),
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(PriceSeriesId, &T) -> U) -> SeriesMap<U> {
        SeriesMap::from_fn(|id| f(id, &self[id]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (PriceSeriesId, &T)> {
        PriceSeriesId::ALL.into_iter().map(move |id| (id, &self[id]))
    }
}

impl<T> Index<PriceSeriesId> for SeriesMap<T> {
    type Output = T;

    fn index(&self, id: PriceSeriesId) -> &T {
        match id {
            PriceSeriesId::CarbonPrice => &self.carbon_price,
            PriceSeriesId::CcsCapex => &self.ccs_capex,
            PriceSeriesId::WindCapex => &self.wind_capex,
            PriceSeriesId::WindDevex => &self.wind_devex,
        }
    }
}

impl<T> IndexMut<PriceSeriesId> for SeriesMap<T> {
    fn index_mut(&mut self, id: PriceSeriesId) -> &mut T {
        match id {
            PriceSeriesId::CarbonPrice => &mut self.carbon_price,
            PriceSeriesId::CcsCapex => &mut self.ccs_capex,
            PriceSeriesId::WindCapex => &mut self.wind_capex,
            PriceSeriesId::WindDevex => &mut self.wind_devex,
        }
    }
}

pub type Prices = SeriesMap<f64>;

/// Reference trajectory and noise law of one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    /// Reference price for each of the 20 steps; strictly positive.
    pub reference: Vec<f64>,
    /// Mean-reversion rate in `[0, 1]`.
    pub kappa: f64,
    /// Log-space volatility, `>= 0`.
    pub sigma: f64,
}

impl SeriesParams {
    /// Straight line from `first` to `last` over the full horizon.
    pub fn linear(first: f64, last: f64, kappa: f64, sigma: f64) -> Self {
        let reference = (0..HORIZON)
            .map(|t| first + (last - first) * t as f64 / (HORIZON - 1) as f64)
            .collect();
        Self {
            reference,
            kappa,
            sigma,
        }
    }

    fn validate(&self, id: PriceSeriesId) -> Result<(), PricingError> {
        let name = id.name();
        if self.reference.len() != HORIZON {
            return Err(PricingError::InvalidParams(format!(
                "{name}: reference has {} entries, expected {HORIZON}",
                self.reference.len()
            )));
        }
        if let Some(bad) = self.reference.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(PricingError::InvalidParams(format!(
                "{name}: reference values must be positive and finite, got {bad}"
            )));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(PricingError::InvalidParams(format!(
                "{name}: kappa must lie in [0, 1], got {}",
                self.kappa
            )));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(PricingError::InvalidParams(format!(
                "{name}: sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

pub type NoiseParams = SeriesMap<SeriesParams>;

impl NoiseParams {
    pub fn validate(&self) -> Result<(), PricingError> {
        self.iter().try_for_each(|(id, p)| p.validate(id))
    }

    /// Same references and reversion rates with all volatilities set to zero.
    pub fn deterministic(&self) -> Self {
        self.map(|_, p| SeriesParams {
            sigma: 0.0,
            ..p.clone()
        })
    }

    pub fn reference_prices(&self, t: usize) -> Prices {
        self.map(|_, p| p.reference[t])
    }

    /// Placeholder trajectories: carbon price rising, costs following a
    /// declining learning curve. Units: currency per tCO2 (carbon) and
    /// currency per GW (costs).
    pub fn placeholder() -> Self {
        SeriesMap {
            carbon_price: SeriesParams::linear(80.0, 250.0, 0.25, 0.08),
            ccs_capex: SeriesParams::linear(300.0, 200.0, 0.25, 0.05),
            wind_capex: SeriesParams::linear(2000.0, 1300.0, 0.25, 0.05),
            wind_devex: SeriesParams::linear(150.0, 100.0, 0.25, 0.05),
        }
    }
}

/// Current step, log prices and the embedded random generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceState {
    t: usize,
    log_prices: SeriesMap<f64>,
    rng: ChaCha8Rng,
}

impl PriceState {
    pub fn reset(params: &NoiseParams, seed: u64) -> Result<Self, PricingError> {
        params.validate()?;
        Ok(Self {
            t: 0,
            log_prices: params.map(|_, p| p.reference[0].ln()),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn step(&self) -> usize {
        self.t
    }

    pub fn log_prices(&self) -> &SeriesMap<f64> {
        &self.log_prices
    }

    pub fn prices(&self) -> Prices {
        self.log_prices.map(|_, x| x.exp())
    }

    /// Advances one step in place.
    pub fn advance(&mut self, params: &NoiseParams) -> Result<(), PricingError> {
        if self.t + 1 >= HORIZON {
            return Err(PricingError::EpisodeExhausted(self.t));
        }
        let next = self.t + 1;
        for id in PriceSeriesId::ALL {
            let p = &params[id];
            let eps: f64 = StandardNormal.sample(&mut self.rng);
            let x = self.log_prices[id];
            self.log_prices[id] = reversion(x, p.kappa, p.reference[next].ln()) + p.sigma * eps;
        }
        self.t = next;
        Ok(())
    }

    pub fn sample_next(&self, params: &NoiseParams) -> Result<Self, PricingError> {
        let mut next = self.clone();
        next.advance(params)?;
        Ok(next)
    }

    /// Conditional-median price path for steps `t+1 ..= 19`, per series.
    pub fn forecast(&self, params: &NoiseParams) -> SeriesMap<Vec<f64>> {
        params.map(|id, p| {
            let mut m = self.log_prices[id];
            (self.t + 1..HORIZON)
                .map(|s| {
                    m = reversion(m, p.kappa, p.reference[s].ln());
                    m.exp()
                })
                .collect()
        })
    }
}

// The noise-free part of one transition; shared by sampling and forecasting
// so that zero-volatility forecasts reproduce realised paths bit for bit.
fn reversion(x: f64, kappa: f64, log_target: f64) -> f64 {
    (1.0 - kappa) * x + kappa * log_target
}
