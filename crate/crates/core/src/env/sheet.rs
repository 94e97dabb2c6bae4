//! The reward model expressed as a formula sheet.
//!
//! Inputs are the action cells `a_w_t`, `a_b_t`, `a_g_t`, the price cells
//! `carbon_price_t`, `ccs_capex_t`, `wind_capex_t`, `wind_devex_t`, the
//! per-technology coefficients (`blue_opex_rate`, ...) and the capture ramp
//! `ramp_t`. Derived cells per step are `cap_{w,b,g}_t`, `revenue_t`,
//! `capex_t`, `opex_t`, `decom_t`, `gross_t`, `capture_t`, `ccus_new_t`,
//! `co2_t`, `jobs_t`, `jobs_term_t`, `reward_t` and `cumulative_t`; the
//! episode total is `score`.

use std::collections::BTreeMap;

use super::{Action, EnvConfig, EnvError, Plan, RewardBreakdown, Tech};
use crate::pricing::{PriceSeriesId, Prices};
use crate::sheetdag::SheetGraph;

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn action_cell(tech: Tech, t: usize) -> String {
    format!("a_{}_{t}", tech.letter())
}

fn price_cell(id: PriceSeriesId, t: usize) -> String {
    format!("{}_{t}", id.name())
}

/// Sheet definition (cell name to formula text) for `config`.
pub fn sheet_definition(config: &EnvConfig) -> BTreeMap<String, String> {
    let mut defs = BTreeMap::new();
    let mut put = |name: String, formula: String| {
        defs.insert(name, formula);
    };

    for k in Tech::ALL {
        let p = config.tech(k);
        let n = k.name();
        put(format!("{n}_capacity_factor"), num(p.capacity_factor));
        put(format!("{n}_revenue_rate"), num(p.revenue_rate));
        put(format!("{n}_capex_rate"), num(p.capex_rate));
        put(format!("{n}_opex_rate"), num(p.opex_rate));
        put(format!("{n}_decom_rate"), num(p.decom_rate));
        put(format!("{n}_emission_intensity"), num(p.emission_intensity));
        put(format!("{n}_build_jobs"), num(p.build_jobs));
        put(format!("{n}_ops_jobs"), num(p.ops_jobs));
    }

    let sum_over = |f: &dyn Fn(Tech) -> String| -> String {
        Tech::ALL.iter().map(|&k| f(k)).collect::<Vec<_>>().join(" + ")
    };

    for t in 0..config.horizon {
        let reference = config.noise.reference_prices(t);
        for id in PriceSeriesId::ALL {
            put(price_cell(id, t), num(reference[id]));
        }
        put(format!("ramp_{t}"), num(config.ramp(t)));
        for k in Tech::ALL {
            let a = action_cell(k, t);
            put(a.clone(), "0".into());
            let l = k.letter();
            let cap = if t == 0 {
                a
            } else {
                format!("cap_{l}_{} + {a}", t - 1)
            };
            put(format!("cap_{l}_{t}"), cap);
        }

        put(
            format!("revenue_{t}"),
            sum_over(&|k| {
                format!(
                    "{n}_revenue_rate * {n}_capacity_factor * cap_{l}_{t}",
                    n = k.name(),
                    l = k.letter()
                )
            }),
        );
        put(
            format!("capex_{t}"),
            format!(
                "(wind_capex_{t} + wind_devex_{t}) * a_w_{t} + blue_capex_rate * a_b_{t} + green_capex_rate * a_g_{t}"
            ),
        );
        put(
            format!("opex_{t}"),
            sum_over(&|k| format!("{}_opex_rate * cap_{}_{t}", k.name(), k.letter())),
        );
        put(
            format!("decom_{t}"),
            sum_over(&|k| format!("{}_decom_rate * a_{}_{t}", k.name(), k.letter())),
        );
        put(
            format!("gross_{t}"),
            sum_over(&|k| format!("{}_emission_intensity * cap_{}_{t}", k.name(), k.letter())),
        );
        put(format!("capture_{t}"), format!("ramp_{t} * gross_{t}"));
        let prev_capture = if t == 0 {
            "0".to_string()
        } else {
            format!("capture_{}", t - 1)
        };
        put(
            format!("ccus_new_{t}"),
            format!("MAX(0, capture_{t} - {prev_capture})"),
        );
        put(
            format!("co2_{t}"),
            format!("carbon_price_{t} * (gross_{t} - capture_{t}) + ccs_capex_{t} * ccus_new_{t}"),
        );
        put(
            format!("jobs_{t}"),
            sum_over(&|k| {
                let l = k.letter();
                let prev = if t == 0 {
                    "0".to_string()
                } else {
                    format!("a_{l}_{}", t - 1)
                };
                format!(
                    "{n}_build_jobs * (a_{l}_{t} - {prev}) + {n}_ops_jobs * a_{l}_{t}",
                    n = k.name()
                )
            }),
        );
        put(
            format!("jobs_term_{t}"),
            format!("{} * jobs_{t}", num(config.jobs_weight(t))),
        );
        put(
            format!("reward_{t}"),
            format!("revenue_{t} - (capex_{t} + opex_{t} + decom_{t} + co2_{t}) + jobs_term_{t}"),
        );
        let cumulative = if t == 0 {
            "reward_0".to_string()
        } else {
            format!("cumulative_{} + reward_{t}", t - 1)
        };
        put(format!("cumulative_{t}"), cumulative);
    }
    put("score".into(), format!("cumulative_{}", config.horizon - 1));
    defs
}

/// Builds the formula-sheet equivalent of the native reward model.
pub fn bind_sheet_backend(config: &EnvConfig) -> Result<SheetGraph, EnvError> {
    config.validate()?;
    Ok(SheetGraph::build(sheet_definition(config))?)
}

/// A sheet graph plus helpers to drive it with plans and realised prices.
#[derive(Debug, Clone)]
pub struct SheetBackend {
    graph: SheetGraph,
    horizon: usize,
}

impl SheetBackend {
    pub fn new(config: &EnvConfig) -> Result<Self, EnvError> {
        Ok(Self {
            graph: bind_sheet_backend(config)?,
            horizon: config.horizon,
        })
    }

    pub fn graph(&self) -> &SheetGraph {
        &self.graph
    }

    pub fn graph_mut(&mut self) -> &mut SheetGraph {
        &mut self.graph
    }

    pub fn set_action(&mut self, t: usize, action: Action) -> Result<(), EnvError> {
        for k in Tech::ALL {
            self.graph.set_input(&action_cell(k, t), action.get(k))?;
        }
        Ok(())
    }

    pub fn set_plan(&mut self, plan: &Plan) -> Result<(), EnvError> {
        if plan.horizon() != self.horizon {
            return Err(EnvError::PlanLength {
                expected: self.horizon,
                found: plan.horizon(),
            });
        }
        for (t, &a) in plan.actions().iter().enumerate() {
            self.set_action(t, a)?;
        }
        Ok(())
    }

    pub fn set_prices(&mut self, t: usize, prices: &Prices) -> Result<(), EnvError> {
        for (id, &v) in prices.iter() {
            self.graph.set_input(&price_cell(id, t), v)?;
        }
        Ok(())
    }

    /// Recomputes and returns the per-step breakdowns.
    pub fn breakdowns(&mut self) -> Result<Vec<RewardBreakdown>, EnvError> {
        self.graph.recompute()?;
        let g = &self.graph;
        (0..self.horizon)
            .map(|t| {
                Ok(RewardBreakdown {
                    revenue: g.value(&format!("revenue_{t}"))?,
                    capex: g.value(&format!("capex_{t}"))?,
                    opex: g.value(&format!("opex_{t}"))?,
                    decom: g.value(&format!("decom_{t}"))?,
                    co2: g.value(&format!("co2_{t}"))?,
                    jobs_term: g.value(&format!("jobs_term_{t}"))?,
                    total: g.value(&format!("reward_{t}"))?,
                })
            })
            .collect()
    }

    pub fn score(&mut self) -> Result<f64, EnvError> {
        self.graph.recompute()?;
        Ok(self.graph.value("score")?)
    }
}
