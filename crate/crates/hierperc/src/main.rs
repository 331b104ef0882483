use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hierperc::config::{ExperimentConfig, KEYS_HELP};
use hierperc::experiment::{run_experiment, Stages};
use hierperc::{Error, Result};

/// Seeded experiments on hierarchical long-range percolation.
///
/// Exit codes: 0 success, 1 I/O or numerical failure, 2 config error,
/// 3 capacity error, 4 too many failed replicas.
#[derive(Parser)]
#[command(name = "hierperc", version, after_help = KEYS_HELP)]
struct Cli {
    /// Config file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Sample graphs and write them as `graph.hpg`.
    Sample,
    /// Largest-cluster densities of every ball level.
    Clusters,
    /// Cutsets between schedule annuli.
    Cutsets,
    /// Renormalization recursion diagnostics and certificate.
    Renorm,
    /// Effective resistance profiles and Nash-Williams sums.
    Resist,
    /// Return counts of random walks from the origin.
    Walk,
    /// Coupled alpha sweep.
    Sweep,
    /// Heuristic transient/recurrent labels from resistance growth.
    Classify {
        /// `k,resistance` CSV to classify instead of sampled replicas.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Every stage the configuration supports.
    Run,
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Command::Classify { series: Some(s) } = &cli.command {
        cfg.series_file = Some(s.clone());
    }
    cfg.validate()?;
    let none = Stages::default();
    let (name, stages) = match &cli.command {
        Command::Sample => ("sample", Stages { graph: true, ..none }),
        Command::Clusters => ("clusters", Stages { densities: true, ..none }),
        Command::Cutsets => ("cutsets", Stages { cutsets: true, ..none }),
        Command::Renorm => ("renorm", Stages { renorm: true, ..none }),
        Command::Resist => ("resist", Stages { resist: true, ..none }),
        Command::Walk => ("walk", Stages { walk: true, ..none }),
        Command::Sweep => ("sweep", Stages { sweep: true, ..none }),
        // A series file replaces sampling altogether.
        Command::Classify { .. } => match cfg.series_file {
            Some(_) => ("classify", Stages { classify_series: true, ..none }),
            None => ("classify", Stages { classify: true, ..none }),
        },
        Command::Run => {
            let stages = Stages::all(&cfg);
            if !stages.renorm {
                log::warn!("skipping the recursion: it needs delta = 1");
            }
            ("run", stages)
        }
    };
    let summary = run_experiment(&cfg, stages, name, &cli.out)?;
    log::info!(
        "{} files written to {}, {} replica failures",
        summary.outputs.len(),
        cli.out.display(),
        summary.failures.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
