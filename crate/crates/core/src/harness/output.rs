//! Run directories: per-slot and per-episode CSVs, a JSON summary, the
//! performance-gain CDF and the run id.
//!
//! `slots.csv` has one row per (episode, slot, user) with the columns of
//! [`SlotRow`] in declaration order. Breakdown columns are empty for idle
//! users; infinite latencies are written as `inf`. `episodes.csv` holds the
//! fields of [`EpisodeSummary`]. `cdf.csv` has columns `level,value,fraction`
//! where `level` is `user` or `operator`.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::episode::SlotSnapshot;
use super::metrics::{compute_cdf, median, normalized_aucs, CostTable, EpisodeSummary, PgSamples, METRICS};
use crate::error::RunError;

pub const SLOTS_FILE: &str = "slots.csv";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CDF_FILE: &str = "cdf.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const CONFIG_FILE: &str = "config.toml";

/// Episodes averaged for the tail mean of each metric.
pub const FINAL_WINDOW: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRow {
    pub episode: usize,
    pub slot: usize,
    pub realization: u64,
    pub user: usize,
    pub request: usize,
    pub active: bool,
    pub bits: Option<f64>,
    pub cycles: Option<f64>,
    pub latency_bound: Option<f64>,
    pub offload: bool,
    pub dl_power: f64,
    pub channel: usize,
    pub lambda: f64,
    pub beta: f64,
    pub ul_rate: f64,
    pub ul_tx: Option<f64>,
    pub cn_exec: Option<f64>,
    pub cn_queue: Option<f64>,
    pub forward: Option<f64>,
    pub mec_exec: Option<f64>,
    pub mec_queue: Option<f64>,
    pub dl_tx: Option<f64>,
    pub latency: Option<f64>,
    pub violation: bool,
    pub utility: f64,
    pub energy: f64,
    pub cost: Option<f64>,
    pub ne_rounds: usize,
    pub ne_converged: bool,
    pub ne_verified: bool,
    pub r_u: f64,
    pub r_d: f64,
    pub r_g: f64,
}

pub fn slot_rows(s: &SlotSnapshot) -> Vec<SlotRow> {
    s.users
        .iter()
        .enumerate()
        .map(|(m, u)| {
            let b = u.breakdown;
            let active = u.task.is_some();
            SlotRow {
                episode: s.episode,
                slot: s.slot,
                realization: s.realization,
                user: m,
                request: u.request,
                active,
                bits: u.task.map(|t| t.bits),
                cycles: u.task.map(|t| t.cycles),
                latency_bound: u.task.map(|t| t.latency_bound),
                offload: s.decision.offload[m],
                dl_power: s.decision.dl_power[m],
                channel: s.profile.channel[m],
                lambda: s.profile.split[m].lambda,
                beta: s.profile.split[m].beta,
                ul_rate: u.ul_rate,
                ul_tx: b.map(|b| b.ul_tx),
                cn_exec: b.map(|b| b.cn_exec),
                cn_queue: b.map(|b| b.cn_queue),
                forward: b.map(|b| b.forward),
                mec_exec: b.map(|b| b.mec_exec),
                mec_queue: b.map(|b| b.mec_queue),
                dl_tx: b.map(|b| b.dl_tx),
                latency: active.then_some(u.latency),
                violation: u.violation,
                utility: u.utility,
                energy: u.energy,
                cost: active.then_some(u.cost),
                ne_rounds: s.ne_rounds,
                ne_converged: s.ne_converged,
                ne_verified: s.ne_verified,
                r_u: s.rewards.ul,
                r_d: s.rewards.dl,
                r_g: s.rewards.gl,
            }
        })
        .collect()
}

/// Streams slot rows to `slots.csv` while a run progresses.
pub struct SlotWriter {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl SlotWriter {
    pub fn create(dir: &Path) -> Result<Self, RunError> {
        let path = dir.join(SLOTS_FILE);
        let file = File::create(&path).map_err(|e| RunError::io(&path, e))?;
        Ok(Self {
            path,
            writer: csv::Writer::from_writer(file),
        })
    }

    pub fn write(&mut self, slots: &[SlotSnapshot]) -> Result<(), RunError> {
        for s in slots {
            for row in slot_rows(s) {
                self.writer.serialize(row)?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf, RunError> {
        self.writer.flush().map_err(|e| RunError::io(&self.path, e))?;
        Ok(self.path)
    }
}

pub fn write_episodes(path: &Path, episodes: &[EpisodeSummary]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path)?;
    for e in episodes {
        w.serialize(e)?;
    }
    w.flush().map_err(|e| RunError::io(path, e))?;
    Ok(())
}

pub fn read_episodes(path: &Path) -> Result<Vec<EpisodeSummary>, RunError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Per-user costs from a run's `slots.csv`.
pub fn read_costs(path: &Path) -> Result<CostTable, RunError> {
    let mut r = csv::Reader::from_path(path)?;
    let mut table = CostTable::default();
    for row in r.deserialize::<SlotRow>() {
        let row = row?;
        let entry = table.slots.entry((row.episode, row.slot)).or_default();
        if entry.len() <= row.user {
            entry.resize(row.user + 1, None);
        }
        entry[row.user] = match (row.active, row.bits, row.cost) {
            (true, Some(b), Some(c)) => Some((b, c)),
            _ => None,
        };
    }
    Ok(table)
}

pub fn write_cdf(path: &Path, pg: &PgSamples) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["level", "value", "fraction"])?;
    for (level, samples) in [("user", &pg.user), ("operator", &pg.operator)] {
        if samples.is_empty() {
            continue;
        }
        for (v, f) in compute_cdf(samples)? {
            w.write_record([level.to_string(), v.to_string(), f.to_string()])?;
        }
    }
    w.flush().map_err(|e| RunError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub final_mean: f64,
    /// Trapezoidal AUC of the min-max normalized episode series.
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgStats {
    pub count: usize,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub frac_at_least_1: Option<f64>,
    pub frac_at_least_2: Option<f64>,
}

impl PgStats {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        let frac = |t: f64| (n > 0).then(|| samples.iter().filter(|&&x| x >= t).count() as f64 / n as f64);
        Self {
            count: n,
            median: median(samples),
            mean: (n > 0).then(|| samples.iter().sum::<f64>() / n as f64),
            frac_at_least_1: frac(1.0),
            frac_at_least_2: frac(2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgSummary {
    pub reference: String,
    pub user: PgStats,
    pub operator: PgStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub mode: String,
    pub policy: String,
    pub seed: u64,
    pub episodes: usize,
    pub config_hash: String,
    pub metrics: BTreeMap<String, MetricSummary>,
    pub pg: Option<PgSummary>,
    pub failure: Option<String>,
}

/// Mean, tail mean and normalized AUC of every tracked series.
pub fn metric_summaries(episodes: &[EpisodeSummary]) -> BTreeMap<String, MetricSummary> {
    let n = episodes.len();
    METRICS
        .iter()
        .map(|&name| {
            let ys: Vec<f64> = episodes.iter().map(|e| e.metric(name).expect("known metric")).collect();
            let tail = &ys[n.saturating_sub(FINAL_WINDOW)..];
            let avg = |s: &[f64]| if s.is_empty() { 0.0 } else { s.iter().sum::<f64>() / s.len() as f64 };
            let summary = MetricSummary {
                mean: avg(&ys),
                final_mean: avg(tail),
                auc: normalized_aucs(&[&ys])[0],
            };
            (name.to_string(), summary)
        })
        .collect()
}

/// Short hex id over what identifies a run.
pub fn run_id(config_hash: &str, mode: &str, policy: &str, episodes: usize) -> String {
    let mut h = Sha256::new();
    for part in [config_hash, mode, policy, &episodes.to_string()] {
        h.update(part.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())[..12].to_string()
}

pub fn write_summary(path: &Path, summary: &RunSummary) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(path, text + "\n").map_err(|e| RunError::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<RunSummary, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
