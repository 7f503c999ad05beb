use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inc_sim::baselines::BaselineKind;
use inc_sim::config::seed_from_env;
use inc_sim::harness::{eval_run, train_run, EvalTarget, RunReport};
use inc_sim::marl::CriticVariant;
use inc_sim::{load_config, RunError, ScenarioConfig};

/// Offloading simulator: train operator policies, evaluate them and run baselines.
#[derive(Parser)]
#[command(name = "inc-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a learned operator and write its run directory and checkpoint.
    Train {
        #[command(flatten)]
        common: Common,
        /// Critic layout: ahmrl, masc or ac.
        #[arg(long, default_value = "ahmrl")]
        arch: CriticVariant,
    },
    /// Evaluate a trained checkpoint or a baseline with frozen decisions.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Checkpoint written by `train`.
        #[arg(long, conflicts_with = "baseline", required_unless_present = "baseline")]
        checkpoint: Option<PathBuf>,
        /// Baseline policy: gm-rn, equal or prop.
        #[arg(long)]
        baseline: Option<BaselineKind>,
        /// Run id under the output directory to compute performance gains against.
        #[arg(long)]
        reference: Option<String>,
    },
    /// Run a baseline operator.
    Baseline {
        #[command(flatten)]
        common: Common,
        /// Baseline policy: gm-rn, equal or prop.
        #[arg(long, default_value = "gm-rn")]
        baseline: BaselineKind,
        /// Run id under the output directory to compute performance gains against.
        #[arg(long)]
        reference: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; built-in defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed; overrides the environment variable and the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Episodes to run; defaults to `learning.episodes`.
    #[arg(long)]
    episodes: Option<usize>,
    /// Directory that receives one subdirectory per run.
    #[arg(long, default_value = "runs")]
    out_dir: PathBuf,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(e: &RunError) -> u8 {
    match e {
        RunError::Config(_) => EXIT_CONFIG,
        RunError::NonFinite { .. } => EXIT_NUMERIC,
        _ => EXIT_FAILURE,
    }
}

impl Common {
    /// Seed precedence: config file, then environment, then flag.
    fn config(&self) -> Result<ScenarioConfig, RunError> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => {
                let mut c = ScenarioConfig::default();
                c.fill_defaults();
                c
            }
        };
        if let Some(s) = seed_from_env() {
            cfg.seed = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = self.episodes {
            cfg.learning.episodes = e;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<RunReport, RunError> {
    match cli.command {
        Command::Train { common, arch } => {
            let cfg = common.config()?;
            train_run(&cfg, arch, cfg.learning.episodes, &common.out_dir)
        }
        Command::Eval {
            common,
            checkpoint,
            baseline,
            reference,
        } => {
            let cfg = common.config()?;
            let target = match (checkpoint, baseline) {
                (Some(p), _) => EvalTarget::Checkpoint(p),
                (None, Some(b)) => EvalTarget::Baseline(b),
                (None, None) => unreachable!("clap requires one of --checkpoint or --baseline"),
            };
            eval_run(&cfg, &target, cfg.learning.episodes, &common.out_dir, reference.as_deref())
        }
        Command::Baseline {
            common,
            baseline,
            reference,
        } => {
            let cfg = common.config()?;
            eval_run(
                &cfg,
                &EvalTarget::Baseline(baseline),
                cfg.learning.episodes,
                &common.out_dir,
                reference.as_deref(),
            )
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            let s = &report.summary;
            println!("run {} ({} {}, seed {}, {} episodes)", s.run_id, s.mode, s.policy, s.seed, s.episodes);
            println!("outputs in {}", report.dir.display());
            if let Some(gl) = s.metrics.get("gl_reward") {
                println!("global reward: mean {:.6e}, final {:.6e}", gl.mean, gl.final_mean);
            }
            if let Some(pg) = &s.pg {
                if let Some(m) = pg.user.median {
                    println!("median user PG vs {}: {m:.4}", pg.reference);
                }
            }
            match report.failure {
                Some(e) => {
                    eprintln!("error: {e}; last finite checkpoint kept");
                    ExitCode::from(EXIT_NUMERIC)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
