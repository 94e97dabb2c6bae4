use serde::{Deserialize, Serialize};

use super::SolverError;

/// `1 / phi`: the bracket shrinks by this factor every iteration.
pub const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GoldenSectionConfig {
    /// Stop once the bracket is at most this wide.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for GoldenSectionConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_iterations: 200,
        }
    }
}

impl GoldenSectionConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "golden-section tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenSectionResult {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Final bracket `(a, b)`.
    pub bracket: (f64, f64),
}

/// Golden-section maximisation of `f` on `[lo, hi]`.
///
/// The interval endpoints are evaluated as well, and win over the best
/// interior probe when strictly better; monotone slices therefore return
/// the bound exactly.
pub fn golden_section_search(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    cfg: &GoldenSectionConfig,
) -> Result<GoldenSectionResult, SolverError> {
    try_golden_section_search(|x| Ok(f(x)), lo, hi, cfg)
}

/// As [`golden_section_search`] for fallible objectives.
pub fn try_golden_section_search(
    mut f: impl FnMut(f64) -> Result<f64, SolverError>,
    lo: f64,
    hi: f64,
    cfg: &GoldenSectionConfig,
) -> Result<GoldenSectionResult, SolverError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(SolverError::InvalidInterval { lo, hi });
    }
    cfg.validate()?;

    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 4;
    let mut iterations = 0;

    while b - a > cfg.tolerance && iterations < cfg.max_iterations {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        evaluations += 1;
        iterations += 1;
    }

    let (mut x, mut value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if f_lo > value {
        (x, value) = (lo, f_lo);
    }
    if f_hi > value {
        (x, value) = (hi, f_hi);
    }
    Ok(GoldenSectionResult {
        x,
        value,
        iterations,
        evaluations,
        bracket: (a, b),
    })
}
