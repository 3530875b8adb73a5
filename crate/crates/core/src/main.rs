use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use onlinemv::experiment::{compare_strategies, run_experiment, ExperimentConfig};
use onlinemv::Result;

/// Sequential mean-variance portfolio experiments.
#[derive(Parser, Debug)]
#[command(name = "onlinemv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment and print its summary.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run several strategies on the same market path and compare them.
    Compare {
        #[arg(required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Debug, Clone)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Trace file; with `compare` the run index is appended to the stem.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report_every: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig, index: Option<usize>) {
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(horizon) = self.horizon {
            cfg.horizon = horizon;
        }
        if let Some(report_every) = self.report_every {
            cfg.report_every = report_every;
        }
        if let Some(output) = &self.output {
            cfg.output = Some(match index {
                None => output.clone(),
                Some(i) => {
                    let stem = output
                        .file_stem()
                        .map_or("trace".into(), |s| s.to_string_lossy().into_owned());
                    let name = match output.extension() {
                        Some(ext) => format!("{stem}.{i}.{}", ext.to_string_lossy()),
                        None => format!("{stem}.{i}"),
                    };
                    output.with_file_name(name)
                }
            });
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, overrides } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            overrides.apply(&mut cfg, None);
            println!("{}", run_experiment(&cfg)?);
        }
        Command::Compare { configs, overrides } => {
            let cfgs = configs
                .iter()
                .enumerate()
                .map(|(i, path)| {
                    let mut cfg = ExperimentConfig::from_file(path)?;
                    overrides.apply(&mut cfg, Some(i));
                    Ok(cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            print!("{}", compare_strategies(&cfgs)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
