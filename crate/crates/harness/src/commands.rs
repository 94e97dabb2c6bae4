use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use netzero_core::env::{run_plan_with_mode, EnvConfig, EpisodeTrace, ObservationMode, Plan, Tech, FIRST_YEAR};
use netzero_core::solvers::{
    brute_force_oracle, ddpg_lite_optimize, eg_coordinate_maximize, evaluate_plan_mean, is_delta_local_optimum,
    random_plan, vultures_local_search, EnvObjective, Objective, PlanEvaluation, PlanLayout, SeedSet,
};
use serde::Serialize;

use crate::config::{HarnessConfig, LoadedConfig};
use crate::error::{HarnessError, Result};
use crate::manifest::{RunSpec, RunWriter};

/// Inputs shared by every command.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: LoadedConfig,
    pub out_dir: PathBuf,
    pub seed_set: SeedSet,
    pub mode: ObservationMode,
    /// Forces zero price volatility.
    pub deterministic: bool,
}

impl RunOptions {
    pub fn harness(&self) -> &HarnessConfig {
        &self.config.config
    }

    /// Environment as used by the run.
    pub fn env(&self) -> EnvConfig {
        if self.deterministic {
            self.harness().env.deterministic()
        } else {
            self.harness().env.clone()
        }
    }

    pub fn layout(&self) -> PlanLayout {
        PlanLayout::with_techs(self.harness().env.horizon, &self.harness().techs())
    }

    fn begin(&self, command: &str, solvers: Vec<String>, solver_config: Option<serde_json::Value>) -> Result<RunWriter> {
        RunWriter::begin(
            &self.out_dir,
            RunSpec {
                command,
                config: &self.config,
                solvers,
                solver_config,
                seed_set: &self.seed_set,
                mode: self.mode,
                deterministic: self.deterministic,
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Eg,
    Local,
    Ddpg,
    Random,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::Eg, SolverKind::Local, SolverKind::Ddpg, SolverKind::Random];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Eg => "eg",
            SolverKind::Local => "local",
            SolverKind::Ddpg => "ddpg",
            SolverKind::Random => "random",
        }
    }

    pub fn parse_list(spec: &str) -> Result<Vec<SolverKind>> {
        let list = spec.split(',').map(|s| s.trim().parse()).collect::<Result<Vec<SolverKind>>>()?;
        if list.is_empty() {
            return Err(HarnessError::Usage("at least one solver is required".into()));
        }
        Ok(list)
    }
}

impl FromStr for SolverKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Usage(format!("unknown solver `{s}` (expected eg, local, ddpg or random)")))
    }
}

/// Where an episode's plan comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanSource {
    Zero,
    Random(u64),
    File(PathBuf),
}

impl FromStr for PlanSource {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "zero" {
            return Ok(PlanSource::Zero);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            let seed = seed
                .parse()
                .map_err(|e| HarnessError::Usage(format!("plan `{s}`: {e}")))?;
            return Ok(PlanSource::Random(seed));
        }
        if s.is_empty() {
            return Err(HarnessError::Usage("empty plan source".into()));
        }
        Ok(PlanSource::File(PathBuf::from(s)))
    }
}

pub fn read_plan_file(path: &Path) -> Result<Plan> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Plan::from_json_str(&text).map_err(|e| HarnessError::Plan {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn resolve_plan(opts: &RunOptions, source: &PlanSource) -> Result<Plan> {
    let plan = match source {
        PlanSource::Zero => Plan::zeros(opts.harness().env.horizon),
        PlanSource::Random(seed) => random_plan(&opts.layout(), *seed),
        PlanSource::File(path) => read_plan_file(path)?,
    };
    let horizon = opts.harness().env.horizon;
    if plan.horizon() != horizon {
        return Err(netzero_core::env::EnvError::PlanLength {
            expected: horizon,
            found: plan.horizon(),
        }
        .into());
    }
    Ok(plan)
}

/// `t,year,w,b,g` rows.
pub fn plan_csv(plan: &Plan) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "year", "w", "b", "g"])?;
    for (t, a) in plan.actions().iter().enumerate() {
        w.write_record([
            t.to_string(),
            (FIRST_YEAR + t as u32).to_string(),
            a.w.to_string(),
            a.b.to_string(),
            a.g.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialises") + "\n"
}

#[derive(Debug, Clone)]
pub struct EpisodeReport {
    pub trace: EpisodeTrace,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

pub fn cmd_episode(opts: &RunOptions, seed: u64, source: &PlanSource) -> Result<EpisodeReport> {
    let mut out = opts.begin("episode", Vec::new(), None)?;
    let plan = resolve_plan(opts, source)?;
    let trace = run_plan_with_mode(&opts.env(), seed, &plan, opts.mode)?;
    let csv_path = out.write("trace.csv", trace.to_csv())?;
    let json_path = out.write("trace.json", trace.to_json() + "\n")?;
    out.finish()?;
    Ok(EpisodeReport {
        trace,
        csv_path,
        json_path,
    })
}

/// A solver's plan plus what it reported along the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverRun {
    pub solver: SolverKind,
    #[serde(skip)]
    pub plan: Plan,
    /// Value of the solver's own objective at the returned plan.
    pub objective_value: f64,
    /// `seed_set_mean` or `deterministic`.
    pub objective: &'static str,
    pub evaluations: usize,
    pub incumbents: Vec<f64>,
    /// Local search only: no ±delta move improves the returned plan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_optimum: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

fn solver_settings_json(cfg: &HarnessConfig, kind: SolverKind) -> serde_json::Value {
    let s = &cfg.solvers;
    match kind {
        SolverKind::Eg => serde_json::to_value(&s.eg),
        SolverKind::Local => serde_json::to_value(s.local),
        SolverKind::Ddpg => serde_json::to_value(&s.ddpg),
        SolverKind::Random => serde_json::to_value(&s.random),
    }
    .expect("settings serialise")
}

/// Runs one solver. EG maximises the seed-set mean (unless the run is
/// deterministic); local search and DDPG-lite use the zero-volatility
/// objective.
pub fn run_solver(opts: &RunOptions, kind: SolverKind) -> Result<SolverRun> {
    let env = opts.env();
    let techs: Vec<Tech> = opts.harness().techs();
    let settings = &opts.harness().solvers;
    let deterministic = || -> Result<EnvObjective> { Ok(EnvObjective::deterministic(&env)?.restricted_to(&techs)) };

    let run = match kind {
        SolverKind::Eg => {
            let (objective, label) = if opts.deterministic {
                (deterministic()?, "deterministic")
            } else {
                (EnvObjective::mean_over(&env, &opts.seed_set)?.restricted_to(&techs), "seed_set_mean")
            };
            let out = eg_coordinate_maximize(&objective, &settings.eg.golden, settings.eg.passes)?;
            SolverRun {
                solver: kind,
                plan: out.plan,
                objective_value: out.value,
                objective: label,
                evaluations: out.evaluations,
                incumbents: out.history,
                local_optimum: None,
                converged: None,
            }
        }
        SolverKind::Local => {
            let objective = deterministic()?;
            let start = objective.layout().zero_plan();
            let out = vultures_local_search(&objective, &start, &settings.local)?;
            let certified = is_delta_local_optimum(&objective, &out.plan, settings.local.delta)?;
            SolverRun {
                solver: kind,
                plan: out.plan,
                objective_value: out.value,
                objective: "deterministic",
                evaluations: out.evaluations,
                incumbents: out.history,
                local_optimum: Some(certified),
                converged: Some(out.converged),
            }
        }
        SolverKind::Ddpg => {
            let objective = deterministic()?;
            let out = ddpg_lite_optimize(&objective, &settings.ddpg.surrogate, settings.ddpg.seed)?;
            SolverRun {
                solver: kind,
                plan: out.plan,
                objective_value: out.value,
                objective: "deterministic",
                evaluations: out.evaluations,
                incumbents: out.history,
                local_optimum: None,
                converged: None,
            }
        }
        SolverKind::Random => {
            let plan = random_plan(&opts.layout(), settings.random.seed);
            let ev = evaluate_plan_mean(&env, &plan, &opts.seed_set)?;
            SolverRun {
                solver: kind,
                plan,
                objective_value: ev.mean,
                objective: "seed_set_mean",
                evaluations: opts.seed_set.len(),
                incumbents: vec![ev.mean],
                local_optimum: None,
                converged: None,
            }
        }
    };
    Ok(run)
}

fn incumbents_csv(values: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "value"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

pub fn cmd_optimize(opts: &RunOptions, kind: SolverKind) -> Result<SolverRun> {
    let settings = solver_settings_json(opts.harness(), kind);
    let mut out = opts.begin("optimize", vec![kind.name().into()], Some(settings))?;
    let run = run_solver(opts, kind)?;
    out.write("plan.json", run.plan.to_json() + "\n")?;
    out.write("plan.csv", plan_csv(&run.plan)?)?;
    out.write("incumbents.csv", incumbents_csv(&run.incumbents)?)?;
    out.write("optimize.json", to_json(&run))?;
    out.finish()?;
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluateReport {
    pub seed_set: String,
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
}

fn scores_csv(seeds: &[u64], scores: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "score"])?;
    for (s, v) in seeds.iter().zip(scores) {
        w.write_record([s.to_string(), v.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

pub fn cmd_evaluate(opts: &RunOptions, source: &PlanSource) -> Result<(EvaluateReport, PlanEvaluation)> {
    let mut out = opts.begin("evaluate", Vec::new(), None)?;
    let plan = resolve_plan(opts, source)?;
    let ev = evaluate_plan_mean(&opts.env(), &plan, &opts.seed_set)?;
    let report = EvaluateReport {
        seed_set: opts.seed_set.name().to_string(),
        n: ev.scores.len(),
        mean: ev.mean,
        std_error: ev.std_error,
    };
    out.write("scores.csv", scores_csv(opts.seed_set.seeds(), &ev.scores)?)?;
    out.write("evaluation.json", to_json(&report))?;
    out.finish()?;
    Ok((report, ev))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardRow {
    pub solver: String,
    /// `None` marks a solver that did not finish.
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub wall_seconds: f64,
    pub plan_path: Option<String>,
    pub error: Option<String>,
}

/// Sorted rows: finished solvers by mean descending, then DNF rows in
/// input order.
pub fn sort_rows(rows: &mut [LeaderboardRow]) {
    rows.sort_by(|a, b| match (a.mean, b.mean) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Leaderboard CSV. Wall times are excluded so reruns are byte-identical.
pub fn leaderboard_csv(rows: &[LeaderboardRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "solver", "status", "mean", "std_error", "plan"])?;
    for (i, r) in rows.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            r.solver.clone(),
            if r.mean.is_some() { "ok".into() } else { "DNF".into() },
            opt_num(r.mean),
            opt_num(r.std_error),
            r.plan_path.clone().unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

fn timings_csv(rows: &[LeaderboardRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["solver", "wall_seconds"])?;
    for r in rows {
        w.write_record([r.solver.clone(), r.wall_seconds.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

pub fn cmd_leaderboard(opts: &RunOptions, solvers: &[SolverKind]) -> Result<Vec<LeaderboardRow>> {
    if solvers.is_empty() {
        return Err(HarnessError::Usage("at least one solver is required".into()));
    }
    let names = solvers.iter().map(|k| k.name().to_string()).collect();
    let settings = serde_json::to_value(&opts.harness().solvers).expect("settings serialise");
    let mut out = opts.begin("leaderboard", names, Some(settings))?;
    let env = opts.env();

    let mut rows = Vec::with_capacity(solvers.len());
    for &kind in solvers {
        let start = Instant::now();
        let result = run_solver(opts, kind)
            .and_then(|run| Ok((evaluate_plan_mean(&env, &run.plan, &opts.seed_set)?, run)));
        let wall_seconds = start.elapsed().as_secs_f64();
        let row = match result {
            Ok((ev, run)) => {
                let rel = format!("plans/{}.json", kind.name());
                out.write(&rel, run.plan.to_json() + "\n")?;
                LeaderboardRow {
                    solver: kind.name().into(),
                    mean: Some(ev.mean),
                    std_error: Some(ev.std_error),
                    wall_seconds,
                    plan_path: Some(rel),
                    error: None,
                }
            }
            Err(e) => LeaderboardRow {
                solver: kind.name().into(),
                mean: None,
                std_error: None,
                wall_seconds,
                plan_path: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    sort_rows(&mut rows);
    out.write("leaderboard.csv", leaderboard_csv(&rows)?)?;
    out.write("timings.csv", timings_csv(&rows)?)?;
    out.finish()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub techs: Vec<Tech>,
    pub levels: Vec<f64>,
    pub evaluated: usize,
    pub score: f64,
    pub plan: Plan,
}

/// Exhaustive grid search on a tiny config. `levels` overrides the
/// config's own grid.
pub fn cmd_oracle(opts: &RunOptions, levels: Option<&[f64]>) -> Result<OracleReport> {
    let Some(tiny) = &opts.harness().tiny else {
        return Err(HarnessError::Usage("oracle needs a config with a `tiny` section".into()));
    };
    let levels: Vec<f64> = levels.map(<[f64]>::to_vec).unwrap_or_else(|| tiny.levels.clone());
    if levels.is_empty() {
        return Err(HarnessError::Usage("levels list is empty".into()));
    }
    let mut out = opts.begin("oracle", vec!["oracle".into()], Some(serde_json::json!({ "levels": levels })))?;
    let mut instance = opts.harness().tiny_instance().expect("tiny section present");
    instance.env = opts.env();
    let result = brute_force_oracle(&instance, &levels)?;
    let report = OracleReport {
        techs: instance.layout().techs,
        levels,
        evaluated: result.evaluated,
        score: result.score,
        plan: result.plan,
    };
    out.write("oracle.json", to_json(&report))?;
    out.write("plan.json", report.plan.to_json() + "\n")?;
    out.finish()?;
    Ok(report)
}

pub fn parse_levels(spec: &str) -> Result<Vec<f64>> {
    if spec.trim().is_empty() {
        return Err(HarnessError::Usage("levels list is empty".into()));
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| HarnessError::Usage(format!("level `{s}`: {e}")))
        })
        .collect()
}
