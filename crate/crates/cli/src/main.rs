use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use fairbench::harness::dataset::{materialize, BenchInstance, Problem};
use fairbench::harness::{
    compute_oracle, emit_report, grid_search, read_oracles, read_records, write_oracles, ExperimentConfig,
    HarnessError, Runner,
};

#[derive(Parser)]
#[command(name = "fairbench", version, about = "Benchmark harness for QAOA and classical heuristics")]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the per-run budget in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the worker count.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Writes the benchmark (and tuning) instances to files.
    Generate,
    /// Solves every benchmark instance exactly and caches the optima.
    Oracle,
    /// Grid-searches the `[tune]` solver on the tuning set.
    Tune,
    /// Runs the configured scenario and writes the report.
    Run,
    /// Rebuilds summaries and plot data from a records file.
    Report {
        /// Records written by `run`.
        #[arg(long)]
        records: PathBuf,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let path = cli.config.as_ref().ok_or_else(|| HarnessError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.time_limit {
        cfg.time_limit = Some(t);
    }
    if let Some(o) = &cli.out {
        cfg.output = o.clone();
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_instances(dir: &Path, instances: &[BenchInstance]) -> Result<(), HarnessError> {
    create_dir(dir)?;
    for inst in instances {
        let (path, body) = match &inst.problem {
            Problem::MaxCut(g) => (dir.join(format!("{}.txt", inst.id)), g.to_edge_list()),
            Problem::Tsp(t) => (dir.join(format!("{}.json", inst.id)), serde_json::to_string_pretty(t)?),
        };
        std::fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
    }
    info!("wrote {} instances to {}", instances.len(), dir.display());
    Ok(())
}

fn tuning_set(cfg: &ExperimentConfig) -> Result<Vec<BenchInstance>, HarnessError> {
    match &cfg.tune {
        Some(t) => materialize(&t.instances, cfg.seed, "tune"),
        None => Ok(Vec::new()),
    }
}

fn execute(cli: &Cli) -> Result<(), HarnessError> {
    if let Command::Report { records } = &cli.command {
        let out = cli.out.clone().unwrap_or_else(|| records.parent().map_or_else(|| ".".into(), Path::to_path_buf));
        let recs = read_records(records)?;
        for p in emit_report(&recs, &out)? {
            println!("{}", p.display());
        }
        return Ok(());
    }
    let cfg = load_config(cli)?;
    let bench = materialize(&cfg.instances, cfg.seed, "bench")?;
    let oracle_path = cfg.output.join("oracles.jsonl");
    match cli.command {
        Command::Generate => {
            write_instances(&cfg.output.join("instances"), &bench)?;
            let tune = tuning_set(&cfg)?;
            if !tune.is_empty() {
                write_instances(&cfg.output.join("instances").join("tune"), &tune)?;
            }
        }
        Command::Oracle => {
            create_dir(&cfg.output)?;
            let mut oracles = Vec::new();
            for inst in &bench {
                match compute_oracle(inst, cfg.oracle_cap) {
                    Ok(o) => oracles.push(o),
                    Err(e) => log::warn!("no oracle for {}: {e}", inst.id),
                }
            }
            write_oracles(&oracle_path, &oracles)?;
            println!("{}", oracle_path.display());
        }
        Command::Tune => {
            let result = grid_search(&cfg, &tuning_set(&cfg)?, &bench)?;
            create_dir(&cfg.output)?;
            let grid = cfg.output.join("grid.tsv");
            result.write_tsv(&grid)?;
            result.write_best(&cfg.output.join("best.toml"))?;
            println!("selected {:?} with objective {}", result.best_cell().assignment, result.best_cell().objective);
        }
        Command::Run => {
            let mut runner = Runner::new(&cfg);
            if oracle_path.exists() {
                runner = runner.with_oracles(read_oracles(&oracle_path)?);
            }
            let records = runner.run(&bench)?;
            for p in emit_report(&records, &cfg.output)? {
                println!("{}", p.display());
            }
        }
        Command::Report { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
