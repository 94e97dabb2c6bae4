use netzero_core::solvers::SeedSet;

use crate::error::{HarnessError, Result};

pub const DEFAULT_SEED_BASE: u64 = 0;
pub const DEFAULT_SEED_COUNT: usize = 100;

/// The 100 consecutive seeds starting at [`DEFAULT_SEED_BASE`].
pub fn default_seed_set() -> SeedSet {
    SeedSet::range("default", DEFAULT_SEED_BASE, DEFAULT_SEED_COUNT).expect("default seed set is valid")
}

/// Parses `default`, `range:<base>:<count>` or a comma-separated list.
pub fn parse_seed_set(spec: &str) -> Result<SeedSet> {
    let spec = spec.trim();
    let usage = |m: String| HarnessError::Usage(format!("seed set `{spec}`: {m}"));
    if spec == "default" {
        return Ok(default_seed_set());
    }
    if let Some(rest) = spec.strip_prefix("range:") {
        let (base, count) = rest
            .split_once(':')
            .ok_or_else(|| usage("expected range:<base>:<count>".into()))?;
        let base: u64 = base.parse().map_err(|e| usage(format!("base: {e}")))?;
        let count: usize = count.parse().map_err(|e| usage(format!("count: {e}")))?;
        if base.checked_add(count as u64).is_none() {
            return Err(usage("range overflows".into()));
        }
        return SeedSet::range(spec, base, count).map_err(|e| usage(e.to_string()));
    }
    let seeds = spec
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|e| usage(format!("`{s}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    SeedSet::new(spec, seeds).map_err(|e| usage(e.to_string()))
}
