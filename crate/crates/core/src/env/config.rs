use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::pricing::{NoiseParams, HORIZON};

/// The three controllable technologies, in action order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tech {
    Wind,
    Blue,
    Green,
}

impl Tech {
    pub const ALL: [Tech; 3] = [Tech::Wind, Tech::Blue, Tech::Green];

    /// Maximum new capacity per year, GW.
    pub fn upper_bound(self) -> f64 {
        match self {
            Tech::Wind => 27.0,
            Tech::Blue => 25.0,
            Tech::Green => 24.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Tech::Wind => "wind",
            Tech::Blue => "blue",
            Tech::Green => "green",
        }
    }

    /// Single-letter tag used in sheet cell names (`a_w_3`).
    pub fn letter(self) -> char {
        match self {
            Tech::Wind => 'w',
            Tech::Blue => 'b',
            Tech::Green => 'g',
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TechMap<T> {
    pub wind: T,
    pub blue: T,
    pub green: T,
}

impl<T> TechMap<T> {
    pub fn from_fn(mut f: impl FnMut(Tech) -> T) -> Self {
        Self {
            wind: f(Tech::Wind),
            blue: f(Tech::Blue),
            green: f(Tech::Green),
        }
    }
}

impl<T> Index<Tech> for TechMap<T> {
    type Output = T;

    fn index(&self, tech: Tech) -> &T {
        match tech {
            Tech::Wind => &self.wind,
            Tech::Blue => &self.blue,
            Tech::Green => &self.green,
        }
    }
}

impl<T> IndexMut<Tech> for TechMap<T> {
    fn index_mut(&mut self, tech: Tech) -> &mut T {
        match tech {
            Tech::Wind => &mut self.wind,
            Tech::Blue => &mut self.blue,
            Tech::Green => &mut self.green,
        }
    }
}

/// Economic coefficients of one technology. Currency units are arbitrary
/// but shared with the price series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechParams {
    /// Dimensionless load factor applied to revenue.
    pub capacity_factor: f64,
    /// Revenue per GW-year at full load.
    pub revenue_rate: f64,
    /// Capital cost per GW built. Must be zero for wind, whose capex comes
    /// from the wind capex and devex price series.
    #[serde(default)]
    pub capex_rate: f64,
    /// Operating cost per GW-year of installed capacity.
    pub opex_rate: f64,
    /// Decommissioning provision per GW built.
    pub decom_rate: f64,
    /// tCO2 (in price units) per GW-year of installed capacity.
    pub emission_intensity: f64,
    /// Construction jobs per GW of change in the build rate.
    pub build_jobs: f64,
    /// Operations jobs per GW built.
    pub ops_jobs: f64,
}

impl TechParams {
    fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("capacity_factor", self.capacity_factor),
            ("revenue_rate", self.revenue_rate),
            ("capex_rate", self.capex_rate),
            ("opex_rate", self.opex_rate),
            ("decom_rate", self.decom_rate),
            ("emission_intensity", self.emission_intensity),
            ("build_jobs", self.build_jobs),
            ("ops_jobs", self.ops_jobs),
        ]
    }
}

/// Which step index multiplies the jobs increment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobsIndexing {
    /// Weight `t` for `t = 0..19`: the first year earns no jobs reward.
    #[default]
    FromZero,
    /// Weight `t + 1`.
    FromOne,
}

fn default_horizon() -> usize {
    HORIZON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    /// Number of yearly steps; 20 for the full problem, fewer for toy instances.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    pub wind: TechParams,
    pub blue: TechParams,
    pub green: TechParams,
    pub noise: NoiseParams,
    #[serde(default)]
    pub jobs_indexing: JobsIndexing,
}

impl EnvConfig {
    pub fn tech(&self, tech: Tech) -> &TechParams {
        match tech {
            Tech::Wind => &self.wind,
            Tech::Blue => &self.blue,
            Tech::Green => &self.green,
        }
    }

    pub fn tech_mut(&mut self, tech: Tech) -> &mut TechParams {
        match tech {
            Tech::Wind => &mut self.wind,
            Tech::Blue => &mut self.blue,
            Tech::Green => &mut self.green,
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if !(1..=HORIZON).contains(&self.horizon) {
            return Err(EnvError::InvalidConfig(format!(
                "horizon must be in 1..={HORIZON}, got {}",
                self.horizon
            )));
        }
        for tech in Tech::ALL {
            for (field, v) in self.tech(tech).fields() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(EnvError::InvalidConfig(format!(
                        "{}.{field} must be finite and >= 0, got {v}",
                        tech.name()
                    )));
                }
            }
        }
        for tech in [Tech::Wind, Tech::Green] {
            if self.tech(tech).emission_intensity != 0.0 {
                return Err(EnvError::InvalidConfig(format!(
                    "{}.emission_intensity must be 0 for a zero-carbon technology",
                    tech.name()
                )));
            }
        }
        if self.wind.capex_rate != 0.0 {
            return Err(EnvError::InvalidConfig(
                "wind.capex_rate must be 0: wind capex is driven by the price series".into(),
            ));
        }
        self.noise.validate()?;
        Ok(())
    }

    /// Fraction of gross emissions captured at step `t`; reaches 1 in the last step.
    pub fn ramp(&self, t: usize) -> f64 {
        if self.horizon <= 1 {
            1.0
        } else {
            t as f64 / (self.horizon - 1) as f64
        }
    }

    pub fn jobs_weight(&self, t: usize) -> f64 {
        match self.jobs_indexing {
            JobsIndexing::FromZero => t as f64,
            JobsIndexing::FromOne => (t + 1) as f64,
        }
    }

    /// Copy with every price volatility set to zero.
    pub fn deterministic(&self) -> Self {
        Self {
            noise: self.noise.deterministic(),
            ..self.clone()
        }
    }

    /// Illustrative coefficients only; they are not calibrated to any
    /// published energy model. Blue hydrogen is profitable for most of the
    /// horizon, wind and green hydrogen pay off mainly through jobs in the
    /// final year.
    pub fn placeholder() -> Self {
        Self {
            horizon: HORIZON,
            wind: TechParams {
                capacity_factor: 0.45,
                revenue_rate: 350.0,
                capex_rate: 0.0,
                opex_rate: 60.0,
                decom_rate: 150.0,
                emission_intensity: 0.0,
                build_jobs: 80.0,
                ops_jobs: 4.0,
            },
            blue: TechParams {
                capacity_factor: 0.9,
                revenue_rate: 400.0,
                capex_rate: 800.0,
                opex_rate: 100.0,
                decom_rate: 50.0,
                emission_intensity: 0.6,
                build_jobs: 40.0,
                ops_jobs: 3.0,
            },
            green: TechParams {
                capacity_factor: 0.5,
                revenue_rate: 450.0,
                capex_rate: 2500.0,
                opex_rate: 70.0,
                decom_rate: 80.0,
                emission_intensity: 0.0,
                build_jobs: 130.0,
                ops_jobs: 5.0,
            },
            noise: NoiseParams::placeholder(),
            jobs_indexing: JobsIndexing::FromZero,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, EnvError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| EnvError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self::placeholder()
    }
}
