use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use graphon_dynamics::runner::{exit_code, parse_config, preset, run, ExperimentConfig};
use graphon_dynamics::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Metropolis,
    Sde,
    Flow,
    Metrics,
    Sample,
    Oracle,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Metropolis => "metropolis",
            Mode::Sde => "sde",
            Mode::Flow => "flow",
            Mode::Metrics => "metrics",
            Mode::Sample => "sample",
            Mode::Oracle => "oracle",
        }
    }
}

/// Runs graphon dynamics experiments and metric computations.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// What to run.
    mode: Mode,
    /// Experiment config file (flat `key = value` sections).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use a built-in experiment instead of a config file (available: mantel).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
}

fn load(args: &Args) -> Result<ExperimentConfig, Error> {
    let mut cfg = if let Some(name) = &args.preset {
        preset(name)?
    } else if let Some(path) = &args.config {
        parse_config(&std::fs::read_to_string(path)?)?
    } else {
        parse_config(&format!("mode = {}\n", args.mode.name()))?
    };
    if cfg.mode.name() != args.mode.name() {
        return Err(Error::Parse(format!("config is for mode '{}', not '{}'", cfg.mode.name(), args.mode.name())));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error:\n{e}");
            return ExitCode::from(if matches!(e, Error::Io(_)) { 3 } else { 1 });
        }
    };
    println!("{}", cfg.to_text());
    let mut stdout = std::io::stdout();
    match run(&cfg, &mut stdout) {
        Ok(summary) => {
            println!("wrote {} files to {}", summary.files.len(), cfg.output_dir.display());
            if summary.failures > 0 {
                println!("{} oracle check(s) failed", summary.failures);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
