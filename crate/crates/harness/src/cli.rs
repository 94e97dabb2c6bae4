use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use netzero_core::env::ObservationMode;

use crate::commands::{
    cmd_episode, cmd_evaluate, cmd_leaderboard, cmd_optimize, cmd_oracle, parse_levels, PlanSource, RunOptions,
    SolverKind,
};
use crate::config::load_config;
use crate::error::Result;
use crate::seeds::parse_seed_set;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Open,
    Closed,
}

impl From<ModeArg> for ObservationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Open => ObservationMode::OpenLoop,
            ModeArg::Closed => ObservationMode::ClosedLoop,
        }
    }
}

/// Net-zero investment pathway sandbox.
#[derive(Debug, Parser)]
#[command(name = "netzero", version, about)]
pub struct Cli {
    /// JSON config, or TOML when the file ends in `.toml`. Defaults to the built-in placeholder.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// `default`, `range:<base>:<count>` or a comma-separated list.
    #[arg(long, global = true, default_value = "default")]
    pub seed_set: String,
    #[arg(long, global = true, value_enum, default_value = "open")]
    pub mode: ModeArg,
    /// Remove price volatility.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode and write its trace.
    Episode {
        /// `zero`, `random:<seed>` or a plan JSON file.
        #[arg(long, default_value = "zero")]
        plan: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimise a plan with one solver.
    Optimize {
        /// eg, local, ddpg or random.
        #[arg(long)]
        solver: String,
    },
    /// Score a plan over the seed set.
    Evaluate {
        #[arg(long)]
        plan: String,
    },
    /// Run several solvers and rank their plans on the shared seed set.
    Leaderboard {
        #[arg(long, default_value = "eg,local,ddpg,random")]
        solvers: String,
    },
    /// Exhaustive grid search on a tiny config.
    Oracle {
        /// Comma-separated fractions of each bound; defaults to the config's levels.
        #[arg(long)]
        levels: Option<String>,
    },
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let opts = RunOptions {
        config: load_config(cli.config.as_deref())?,
        out_dir: cli.out,
        seed_set: parse_seed_set(&cli.seed_set)?,
        mode: cli.mode.into(),
        deterministic: cli.deterministic,
    };
    let _ = match cli.command {
        Command::Episode { plan, seed } => {
            let r = cmd_episode(&opts, seed, &plan.parse::<PlanSource>()?)?;
            writeln!(stdout, "score {}", r.trace.score)
        }
        Command::Optimize { solver } => {
            let run = cmd_optimize(&opts, solver.parse()?)?;
            let certificate = match run.local_optimum {
                Some(true) => "\nno improving move: local optimum certified",
                Some(false) => "\nstopped before reaching a local optimum",
                None => "",
            };
            writeln!(
                stdout,
                "{} objective {} ({} evaluations){certificate}",
                run.solver.name(),
                run.objective_value,
                run.evaluations
            )
        }
        Command::Evaluate { plan } => {
            let (r, _) = cmd_evaluate(&opts, &plan.parse::<PlanSource>()?)?;
            writeln!(stdout, "mean {} std_error {} n {}", r.mean, r.std_error, r.n)
        }
        Command::Leaderboard { solvers } => {
            let rows = cmd_leaderboard(&opts, &SolverKind::parse_list(&solvers)?)?;
            rows.iter()
                .map(|r| match (r.mean, &r.error) {
                    (Some(m), _) => writeln!(stdout, "{:<8} {} ± {}", r.solver, m, r.std_error.unwrap_or(0.0)),
                    (None, e) => writeln!(stdout, "{:<8} DNF {}", r.solver, e.as_deref().unwrap_or("")),
                })
                .collect()
        }
        Command::Oracle { levels } => {
            let levels = levels.as_deref().map(parse_levels).transpose()?;
            let r = cmd_oracle(&opts, levels.as_deref())?;
            writeln!(stdout, "oracle score {} over {} plans", r.score, r.evaluated)
        }
    };
    Ok(())
}

/// Parses `args` and runs the command. Returns the process exit code:
/// 0 on success, 1 for usage errors, 2 for runtime failures.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
