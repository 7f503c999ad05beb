//! Episode aggregates, performance gains, empirical CDFs and normalized AUCs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::episode::SlotSnapshot;
use crate::error::{ModelError, RunError};
use crate::marl::ppo::UpdateStats;

/// Per-episode means of the tracked series. Latencies are capped at
/// `latency_cap` so failed links stay on a finite scale.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub gl_reward: f64,
    pub ul_reward: f64,
    pub dl_reward: f64,
    /// Mean per-slot total utility.
    pub utility: f64,
    /// Mean per-slot maximum uplink rate.
    pub max_ul_rate: f64,
    /// Mean per-slot total downlink energy.
    pub energy: f64,
    /// Mean end-to-end latency over active users.
    pub latency: f64,
    pub violations: usize,
    pub active_tasks: usize,
    pub ne_unconverged: usize,
    pub ul_loss: f64,
    pub dl_loss: f64,
    pub critic_loss: f64,
}

/// Names of the series that get a mean, a tail mean and an AUC.
pub const METRICS: [&str; 7] = [
    "gl_reward",
    "ul_reward",
    "dl_reward",
    "utility",
    "max_ul_rate",
    "energy",
    "latency",
];

impl EpisodeSummary {
    pub fn from_slots(episode: usize, slots: &[SlotSnapshot], latency_cap: f64, stats: Option<UpdateStats>) -> Self {
        let n = slots.len().max(1) as f64;
        let mean = |f: &dyn Fn(&SlotSnapshot) -> f64| slots.iter().map(f).sum::<f64>() / n;
        let mut lat_sum = 0.0;
        let mut active = 0;
        let mut violations = 0;
        for u in slots.iter().flat_map(|s| &s.users) {
            if u.task.is_some() {
                active += 1;
                lat_sum += u.latency.min(latency_cap);
                if u.violation {
                    violations += 1;
                }
            }
        }
        let stats = stats.unwrap_or_default();
        Self {
            episode,
            gl_reward: mean(&|s| s.rewards.gl),
            ul_reward: mean(&|s| s.rewards.ul),
            dl_reward: mean(&|s| s.rewards.dl),
            utility: mean(&|s| s.users.iter().map(|u| u.utility).sum()),
            max_ul_rate: mean(&|s| s.max_ul_rate()),
            energy: mean(&|s| s.users.iter().map(|u| u.energy).sum()),
            latency: if active > 0 { lat_sum / active as f64 } else { 0.0 },
            violations,
            active_tasks: active,
            ne_unconverged: slots.iter().filter(|s| !s.ne_converged).count(),
            ul_loss: stats.ul_loss,
            dl_loss: stats.dl_loss,
            critic_loss: stats.critic_loss,
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "gl_reward" => self.gl_reward,
            "ul_reward" => self.ul_reward,
            "dl_reward" => self.dl_reward,
            "utility" => self.utility,
            "max_ul_rate" => self.max_ul_rate,
            "energy" => self.energy,
            "latency" => self.latency,
            _ => return None,
        })
    }
}

/// Per-user costs keyed by (episode, slot); `None` marks an idle user.
/// Task sizes ride along so paired runs can be checked for identical slots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostTable {
    pub slots: BTreeMap<(usize, usize), Vec<Option<(f64, f64)>>>,
}

impl CostTable {
    pub fn record(&mut self, slots: &[SlotSnapshot]) {
        for s in slots {
            let row = s
                .users
                .iter()
                .map(|u| u.task.map(|t| (t.bits, u.cost)))
                .collect();
            self.slots.insert((s.episode, s.slot), row);
        }
    }
}

/// User-level ratios C_ref / C_alg for every active user-slot and
/// operator-level ratios of the per-slot sums.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PgSamples {
    pub user: Vec<f64>,
    pub operator: Vec<f64>,
}

pub fn performance_gains(alg: &CostTable, reference: &CostTable, reference_name: &str) -> Result<PgSamples, RunError> {
    let mismatch = |what: String| RunError::MissingReference(format!("{reference_name}: {what}"));
    let mut out = PgSamples::default();
    for (key, row) in &alg.slots {
        let other = reference
            .slots
            .get(key)
            .ok_or_else(|| mismatch(format!("no slot {key:?}")))?;
        if other.len() != row.len() {
            return Err(mismatch(format!("slot {key:?} has {} users, expected {}", other.len(), row.len())));
        }
        let (mut sum_ref, mut sum_alg) = (0.0, 0.0);
        for (u, (a, r)) in row.iter().zip(other).enumerate() {
            match (a, r) {
                (None, None) => {}
                (Some((bits_a, c_alg)), Some((bits_r, c_ref))) if bits_a == bits_r => {
                    out.user.push(crate::compute::performance_gain(*c_ref, *c_alg)?);
                    sum_ref += c_ref;
                    sum_alg += c_alg;
                }
                _ => return Err(mismatch(format!("slot {key:?} user {u} differs"))),
            }
        }
        if sum_alg > 0.0 {
            out.operator.push(sum_ref / sum_alg);
        }
    }
    Ok(out)
}

/// Sorted (value, fraction ≤ value) pairs, one per distinct sample.
pub fn compute_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>, ModelError> {
    if samples.is_empty() {
        return Err(ModelError::EmptySamples);
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in s.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = frac,
            _ => out.push((x, frac)),
        }
    }
    Ok(out)
}

pub fn median(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    })
}

/// Trapezoidal area under `ys` over episodes rescaled to [0, 1].
pub fn trapezoid_auc(ys: &[f64]) -> f64 {
    match ys.len() {
        0 => 0.0,
        1 => ys[0],
        n => {
            let h = 1.0 / (n - 1) as f64;
            ys.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum()
        }
    }
}

/// Min-max normalize all series jointly, then take each one's AUC. A
/// constant pool maps to zero.
pub fn normalized_aucs(series: &[&[f64]]) -> Vec<f64> {
    let all = series.iter().flat_map(|s| s.iter().copied());
    let lo = all.clone().fold(f64::INFINITY, f64::min);
    let hi = all.fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    series
        .iter()
        .map(|s| {
            let norm: Vec<f64> = s
                .iter()
                .map(|&y| if span > 0.0 { (y - lo) / span } else { 0.0 })
                .collect();
            trapezoid_auc(&norm)
        })
        .collect()
}
