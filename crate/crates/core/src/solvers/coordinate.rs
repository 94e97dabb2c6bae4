//! Backward coordinate-wise golden-section maximisation.
//!
//! Starting from the all-zero plan, each sweep visits the years from last
//! to first and, within a year, wind, blue, green. Every coordinate is
//! maximised by golden-section search over its bounds with all other
//! coordinates fixed, and the result is kept only if it strictly improves
//! the incumbent.

use super::{try_golden_section_search, GoldenSectionConfig, Objective, SolverError};
use crate::env::Plan;

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateOutcome {
    pub plan: Plan,
    pub value: f64,
    /// Incumbent objective value: the start value, then one entry per
    /// coordinate visit.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

pub fn eg_coordinate_maximize(
    objective: &dyn Objective,
    cfg: &GoldenSectionConfig,
    passes: usize,
) -> Result<CoordinateOutcome, SolverError> {
    if passes == 0 {
        return Err(SolverError::InvalidConfig("passes must be >= 1".into()));
    }
    cfg.validate()?;

    let layout = objective.layout().clone();
    let mut plan = layout.zero_plan();
    let mut value = objective.evaluate(&plan)?;
    let mut evaluations = 1;
    let mut history = vec![value];

    let mut order = layout.coords();
    // years descending, techs ascending within a year
    order.sort_by(|a, b| b.t.cmp(&a.t).then(a.tech.cmp(&b.tech)));

    for _ in 0..passes {
        for c in &order {
            let mut probe = plan.clone();
            let result = try_golden_section_search(
                |x| {
                    probe.set(c.t, c.tech, x);
                    objective.evaluate(&probe)
                },
                0.0,
                c.upper_bound(),
                cfg,
            )?;
            evaluations += result.evaluations;
            if result.value > value {
                plan.set(c.t, c.tech, result.x);
                value = result.value;
            }
            history.push(value);
        }
    }

    Ok(CoordinateOutcome {
        plan,
        value,
        history,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Tech;
    use crate::solvers::{FnObjective, PlanLayout};

    fn targets(layout: &PlanLayout) -> Vec<f64> {
        layout
            .coords()
            .iter()
            .enumerate()
            .map(|(i, c)| c.upper_bound() * (0.1 + 0.8 * ((i * 7 % 13) as f64 / 12.0)))
            .collect()
    }

    #[test]
    fn separable_concave_recovers_targets() {
        let layout = PlanLayout::full(20);
        let c = targets(&layout);
        let l2 = layout.clone();
        let obj = FnObjective::new(layout.clone(), move |p: &Plan| {
            -l2.read(p).iter().zip(&c).map(|(x, c)| (x - c).powi(2)).sum::<f64>()
        });
        let cfg = GoldenSectionConfig {
            tolerance: 1e-6,
            max_iterations: 200,
        };
        let out = eg_coordinate_maximize(&obj, &cfg, 1).unwrap();
        for (x, c) in layout.read(&out.plan).iter().zip(targets(&layout)) {
            assert!((x - c).abs() <= 1e-6, "{x} vs {c}");
        }
        assert!(out.history.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(out.history.len(), 61);
    }

    #[test]
    fn linear_objective_goes_to_bounds() {
        let layout = PlanLayout::full(20);
        let lambda: Vec<f64> = (0..60).map(|i| if i % 3 == 1 { 2.0 } else { -1.0 + i as f64 * 0.01 }).collect();
        let (l2, lam) = (layout.clone(), lambda.clone());
        let obj = FnObjective::new(layout.clone(), move |p: &Plan| {
            l2.read(p).iter().zip(&lam).map(|(x, l)| x * l).sum()
        });
        let out = eg_coordinate_maximize(&obj, &GoldenSectionConfig::default(), 1).unwrap();
        for ((x, l), c) in layout.read(&out.plan).iter().zip(&lambda).zip(layout.coords()) {
            let expected = if *l > 0.0 { c.upper_bound() } else { 0.0 };
            assert_eq!(*x, expected);
        }
    }

    #[test]
    fn restricted_layout_leaves_other_techs_at_zero() {
        let layout = PlanLayout::with_techs(3, &[Tech::Blue]);
        let obj = FnObjective::new(layout, |p: &Plan| {
            p.actions().iter().map(|a| a.b + a.w + a.g).sum()
        });
        let out = eg_coordinate_maximize(&obj, &GoldenSectionConfig::default(), 2).unwrap();
        for a in out.plan.actions() {
            assert_eq!((a.w, a.b, a.g), (0.0, 25.0, 0.0));
        }
        assert_eq!(out.history.len(), 1 + 2 * 3);
    }

    #[test]
    fn zero_passes_rejected() {
        let obj = FnObjective::new(PlanLayout::full(1), |_: &Plan| 0.0);
        assert!(eg_coordinate_maximize(&obj, &GoldenSectionConfig::default(), 0).is_err());
    }
}
