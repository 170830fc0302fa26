//! Command-line entry point.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mfplan_core::world::TaskKind;

use crate::bench::{self, BenchMethod};
use crate::config::Config;
use crate::error::CliError;
use crate::{logs, pipeline, verify, weights};

#[derive(Debug, Parser)]
#[command(name = "mfplan", version, about = "Multi-fidelity skill planning with learned model preconditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file (dotted keys); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Collect episode logs by planning and executing in the ground-truth world.
    Collect {
        #[command(flatten)]
        common: Common,
        /// Output episode log (JSON lines).
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one deviation estimator per (skill, model) pair.
    Train {
        #[command(flatten)]
        common: Common,
        /// Episode log written by `collect`.
        #[arg(long)]
        logs: PathBuf,
        /// Directory for the weight files and the MAE table.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare planners on seeded instances.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Directory for the reports.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated methods; defaults to `bench.methods`.
        #[arg(long)]
        methods: Option<String>,
        /// Instances per task; defaults to `bench.instances`.
        #[arg(long)]
        instances: Option<usize>,
        /// Restrict to one task (rod_in_box or rod_in_drawer).
        #[arg(long)]
        task: Option<String>,
        /// Directory of trained estimators, needed by ps_pe and ps_only.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Check plan costs against the suboptimality bounds using the oracle.
    VerifyBounds {
        #[command(flatten)]
        common: Common,
        /// Instances to check; defaults to `bench.verify_instances`.
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value = "rod_in_box")]
        task: String,
        /// Trained estimators; without them preconditions use the true deviation.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Optional per-instance CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_task(name: &str) -> Result<TaskKind, CliError> {
    TaskKind::from_name(name).ok_or_else(|| CliError::Usage(format!("unknown task {name:?}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Parses `args` (including the program name) and runs the command, writing
/// human-readable output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(out, "{e}").map_err(|e| CliError::Usage(e.to_string()))?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let io = |e: std::io::Error| CliError::Usage(format!("output: {e}"));
    match cli.command {
        Command::Collect { common, out: path } => {
            let cfg = Config::load_or_default(common.config.as_deref())?;
            let episodes = pipeline::collect(&cfg, common.seed)?;
            let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
            logs::write_episodes(BufWriter::new(file), &episodes).map_err(|e| CliError::io(&path, e))?;
            for kind in TaskKind::ALL {
                let of: Vec<_> = episodes.iter().filter(|l| l.task == kind).collect();
                let steps: usize = of.iter().map(|l| l.transitions.len()).sum();
                let reached = of.iter().filter(|l| l.reached_goal).count();
                writeln!(out, "{kind}: {} episodes, {steps} transitions, {reached} reached the goal", of.len()).map_err(io)?;
            }
        }
        Command::Train { common, logs: log_path, out: dir } => {
            let cfg = Config::load_or_default(common.config.as_deref())?;
            let file = File::open(&log_path).map_err(|e| CliError::io(&log_path, e))?;
            let episodes = logs::read_episodes(BufReader::new(file), &cfg.scene())?;
            let outcomes = pipeline::train_all(&cfg, &episodes, common.seed)?;
            create_dir(&dir)?;
            for m in outcomes.iter().filter_map(|o| o.mde.as_ref()) {
                weights::save(&dir, m)?;
            }
            write_file(&dir.join("mae.csv"), &pipeline::mae_csv(&outcomes))?;
            write!(out, "{}", pipeline::mae_table(&outcomes)).map_err(io)?;
            let trained = outcomes.iter().filter(|o| o.mde.is_some()).count();
            writeln!(out, "{trained} estimators written to {}", dir.display()).map_err(io)?;
        }
        Command::Bench { common, out: dir, methods, instances, task, weights: wdir } => {
            let cfg = Config::load_or_default(common.config.as_deref())?;
            let methods = match methods {
                Some(csv) => bench::parse_methods(&csv)?,
                None => bench::parse_methods(&cfg.bench.methods.join(","))?,
            };
            if methods.is_empty() {
                return Err(CliError::Usage("no methods selected".into()));
            }
            let tasks = match task {
                Some(name) => vec![parse_task(&name)?],
                None => TaskKind::ALL.to_vec(),
            };
            let mdes = if methods.iter().any(|m| m.uses_mdes()) {
                let dir = wdir.ok_or_else(|| CliError::Usage("--weights is required for ps_pe and ps_only".into()))?;
                Some(weights::load_dir(&dir)?)
            } else {
                None
            };
            let n = instances.unwrap_or(cfg.bench.instances);
            let rows = bench::run_bench(&cfg, mdes.as_ref(), &tasks, &methods, n, common.seed)?;
            let summary = bench::summarize(&rows);
            create_dir(&dir)?;
            write_file(&dir.join("bench_instances.csv"), &bench::instances_csv(&rows))?;
            write_file(&dir.join("bench_summary.csv"), &bench::summary_csv(&summary))?;
            let table = bench::summary_table(&summary, common.seed);
            write_file(&dir.join("bench_table.txt"), &table)?;
            write!(out, "{table}").map_err(io)?;
            if methods.iter().any(|m| *m == BenchMethod::PsPe || *m == BenchMethod::PsOnly) {
                let v: usize = summary.iter().map(|s| s.ps_violations).sum();
                if v > 0 {
                    return Err(CliError::Failed(format!("{v} evaluations broke the prioritized-selection rule")));
                }
            }
        }
        Command::VerifyBounds { common, instances, task, weights: wdir, out: csv } => {
            let cfg = Config::load_or_default(common.config.as_deref())?;
            let kind = parse_task(&task)?;
            let mdes = wdir.map(|d| weights::load_dir(&d)).transpose()?;
            let n = instances.unwrap_or(cfg.bench.verify_instances);
            let report = verify::verify_bounds(&cfg, kind, mdes.as_ref(), n, common.seed)?;
            if let Some(path) = csv {
                write_file(&path, &report.csv())?;
            }
            write!(out, "{}", report.summary()).map_err(io)?;
            let bad = report.violations();
            if !bad.is_empty() {
                let seeds: Vec<String> = bad.iter().map(u64::to_string).collect();
                return Err(CliError::Failed(format!("bound violated on instance seeds {}", seeds.join(", "))));
            }
            if report.rows.len() < n {
                return Err(CliError::Failed(format!(
                    "only {} of {n} instances were oracle-solvable",
                    report.rows.len()
                )));
            }
        }
    }
    Ok(())
}

/// Runs the process: logging to stderr, output to stdout, mapped exit code.
pub fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(std::env::args_os(), &mut lock) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            std::process::ExitCode::from(e.exit_code())
        }
    }
}
