//! Run configuration: environment coefficients plus per-solver settings,
//! read from JSON or (for `.toml` files) TOML.

use std::path::{Path, PathBuf};

use netzero_core::env::{EnvConfig, Tech};
use netzero_core::solvers::{GoldenSectionConfig, LocalSearchConfig, SurrogateConfig, TinyInstance};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EgSettings {
    #[serde(flatten)]
    pub golden: GoldenSectionConfig,
    pub passes: usize,
}

impl Default for EgSettings {
    fn default() -> Self {
        Self {
            golden: GoldenSectionConfig::default(),
            passes: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DdpgSettings {
    #[serde(flatten)]
    pub surrogate: SurrogateConfig,
    pub seed: u64,
}

impl Default for DdpgSettings {
    fn default() -> Self {
        Self {
            surrogate: SurrogateConfig::default(),
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomSettings {
    pub seed: u64,
}

impl Default for RandomSettings {
    fn default() -> Self {
        Self { seed: 7 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub eg: EgSettings,
    pub local: LocalSearchConfig,
    pub ddpg: DdpgSettings,
    pub random: RandomSettings,
}

/// Marks a config as a reduced instance: only `techs` are optimised and
/// `levels` (fractions of each bound) form the oracle grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinySettings {
    pub techs: Vec<Tech>,
    #[serde(default)]
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    #[serde(default)]
    pub env: EnvConfig,
    #[serde(default)]
    pub solvers: SolverSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiny: Option<TinySettings>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            env: EnvConfig::placeholder(),
            solvers: SolverSettings::default(),
            tiny: None,
        }
    }
}

impl HarnessConfig {
    pub fn from_json_str(text: &str) -> std::result::Result<Self, String> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.env.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.env.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// Technologies the solvers may move; all three unless the config is tiny.
    pub fn techs(&self) -> Vec<Tech> {
        match &self.tiny {
            Some(t) => t.techs.clone(),
            None => Tech::ALL.to_vec(),
        }
    }

    pub fn tiny_instance(&self) -> Option<TinyInstance> {
        self.tiny.as_ref().map(|t| TinyInstance {
            env: self.env.clone(),
            techs: t.techs.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// A resolved configuration and where it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: HarnessConfig,
    /// `None` for the built-in default.
    pub path: Option<PathBuf>,
    /// Hex SHA-256 of the file bytes, or of the default's JSON.
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_config(path: Option<&Path>) -> Result<LoadedConfig> {
    let Some(path) = path else {
        let config = HarnessConfig::default();
        let sha256 = sha256_hex(config.to_json().as_bytes());
        return Ok(LoadedConfig {
            config,
            path: None,
            sha256,
        });
    };
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| HarnessError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    let parsed = if is_toml {
        HarnessConfig::from_toml_str(&text)
    } else {
        HarnessConfig::from_json_str(&text)
    };
    let config = parsed.map_err(|message| HarnessError::Config {
        path: path.to_path_buf(),
        message,
    })?;
    Ok(LoadedConfig {
        config,
        path: Some(path.to_path_buf()),
        sha256: sha256_hex(&bytes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let cfg = HarnessConfig::from_json_str("{}").unwrap();
        assert_eq!(cfg, HarnessConfig::default());
        let cfg = HarnessConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, HarnessConfig::default());
    }

    #[test]
    fn json_toml_roundtrip() {
        let mut cfg = HarnessConfig::default();
        cfg.solvers.eg.passes = 2;
        cfg.solvers.ddpg.surrogate.iterations = 10;
        cfg.tiny = Some(TinySettings {
            techs: vec![Tech::Blue],
            levels: vec![0.0, 1.0],
        });
        assert_eq!(HarnessConfig::from_json_str(&cfg.to_json()).unwrap(), cfg);
        let t = toml::to_string(&cfg).unwrap();
        assert_eq!(HarnessConfig::from_toml_str(&t).unwrap(), cfg);
    }

    #[test]
    fn invalid_env_rejected() {
        let mut cfg = HarnessConfig::default();
        cfg.env.green.emission_intensity = 1.0;
        assert!(HarnessConfig::from_json_str(&cfg.to_json()).is_err());
    }
}
