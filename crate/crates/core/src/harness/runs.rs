//! Whole runs written to `<out_dir>/<run_id>/`.

use std::path::{Path, PathBuf};

use super::episode::Environment;
use super::metrics::{performance_gains, CostTable, EpisodeSummary};
use super::output::{
    metric_summaries, read_costs, run_id, write_cdf, write_episodes, write_summary, PgStats, PgSummary,
    RunSummary, SlotWriter, CDF_FILE, CHECKPOINT_FILE, CONFIG_FILE, EPISODES_FILE, SLOTS_FILE, SUMMARY_FILE,
};
use super::train::{evaluate, train, Evaluated};
use crate::baselines::BaselineKind;
use crate::error::RunError;
use crate::marl::checkpoint;
use crate::marl::policy::Policy;
use crate::marl::CriticVariant;
use crate::rng::{RngStreams, Stream};
use crate::ScenarioConfig;

#[derive(Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub summary: RunSummary,
    /// A numeric failure that stopped training after the outputs were written.
    pub failure: Option<RunError>,
}

fn prepare(cfg: &ScenarioConfig, out_dir: &Path, mode: &str, label: &str, episodes: usize) -> Result<(Environment, String, PathBuf), RunError> {
    let env = Environment::new(cfg)?;
    let hash = env.cfg.config_hash();
    let id = run_id(&hash, mode, label, episodes);
    let dir = out_dir.join(&id);
    std::fs::create_dir_all(&dir).map_err(|e| RunError::io(&dir, e))?;
    let cfg_path = dir.join(CONFIG_FILE);
    std::fs::write(&cfg_path, env.cfg.to_toml()?).map_err(|e| RunError::io(&cfg_path, e))?;
    Ok((env, id, dir))
}

fn summary(env: &Environment, id: String, mode: &str, label: &str, episodes: &[EpisodeSummary]) -> RunSummary {
    RunSummary {
        run_id: id,
        mode: mode.to_string(),
        policy: label.to_string(),
        seed: env.cfg.seed,
        episodes: episodes.len(),
        config_hash: env.cfg.config_hash(),
        metrics: metric_summaries(episodes),
        pg: None,
        failure: None,
    }
}

/// Train `variant`, writing slots, episodes, summary and checkpoint.
pub fn train_run(cfg: &ScenarioConfig, variant: CriticVariant, episodes: usize, out_dir: &Path) -> Result<RunReport, RunError> {
    let label = variant.to_string();
    let (env, id, dir) = prepare(cfg, out_dir, "train", &label, episodes)?;
    let mut slots = SlotWriter::create(&dir)?;
    let run = train(&env, variant, episodes, |s| slots.write(s))?;
    slots.finish()?;
    write_episodes(&dir.join(EPISODES_FILE), &run.episodes)?;
    checkpoint::save(&dir.join(CHECKPOINT_FILE), &run.policy, &env.cfg.config_hash())?;
    let mut s = summary(&env, id, "train", &label, &run.episodes);
    s.failure = run.failure.as_ref().map(|e| e.to_string());
    write_summary(&dir.join(SUMMARY_FILE), &s)?;
    Ok(RunReport {
        dir,
        summary: s,
        failure: run.failure,
    })
}

/// What an evaluation run plays.
#[derive(Debug, Clone)]
pub enum EvalTarget {
    Checkpoint(PathBuf),
    Baseline(BaselineKind),
}

/// Frozen rollouts; with `reference`, performance gains against the run
/// of that id under `out_dir`, which must cover the same slots.
pub fn eval_run(
    cfg: &ScenarioConfig,
    target: &EvalTarget,
    episodes: usize,
    out_dir: &Path,
    reference: Option<&str>,
) -> Result<RunReport, RunError> {
    let (mode, policy, label) = match target {
        EvalTarget::Checkpoint(path) => {
            let ck = checkpoint::load(path)?;
            let mut rng = RngStreams::fresh(cfg.seed, Stream::PolicyInit);
            let mut policy = Policy::new(&cfg.learning, ck.variant, &mut rng);
            ck.restore_into(&mut policy)?;
            ("eval", Some(policy), ck.variant.to_string())
        }
        EvalTarget::Baseline(k) => ("baseline", None, k.to_string()),
    };
    let ref_costs = match reference {
        Some(r) => {
            let path = out_dir.join(r).join(SLOTS_FILE);
            if !path.exists() {
                return Err(RunError::MissingReference(r.to_string()));
            }
            Some(read_costs(&path)?)
        }
        None => None,
    };
    let (env, id, dir) = prepare(cfg, out_dir, mode, &label, episodes)?;
    let who = match (&policy, target) {
        (Some(p), _) => Evaluated::Policy(p),
        (None, EvalTarget::Baseline(k)) => Evaluated::Baseline(*k),
        (None, EvalTarget::Checkpoint(_)) => unreachable!("checkpoint targets load a policy"),
    };
    let mut slots = SlotWriter::create(&dir)?;
    let mut costs = CostTable::default();
    let eps = evaluate(&env, who, episodes, |s| {
        costs.record(s);
        slots.write(s)
    })?;
    slots.finish()?;
    write_episodes(&dir.join(EPISODES_FILE), &eps)?;
    let mut s = summary(&env, id, mode, &label, &eps);
    if let (Some(r), Some(ref_costs)) = (reference, ref_costs) {
        let pg = performance_gains(&costs, &ref_costs, r)?;
        write_cdf(&dir.join(CDF_FILE), &pg)?;
        s.pg = Some(PgSummary {
            reference: r.to_string(),
            user: PgStats::of(&pg.user),
            operator: PgStats::of(&pg.operator),
        });
    }
    write_summary(&dir.join(SUMMARY_FILE), &s)?;
    Ok(RunReport {
        dir,
        summary: s,
        failure: None,
    })
}
