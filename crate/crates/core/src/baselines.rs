//! Non-learning operator policies used as comparison points.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::config::ScenarioConfig;
use crate::game::OperatorDecision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    GmRn,
    Equal,
    Proportional,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 3] = [BaselineKind::GmRn, BaselineKind::Equal, BaselineKind::Proportional];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::GmRn => "gm-rn",
            BaselineKind::Equal => "equal",
            BaselineKind::Proportional => "prop",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gm-rn" | "gmrn" => Ok(BaselineKind::GmRn),
            "equal" => Ok(BaselineKind::Equal),
            "prop" | "proportional" => Ok(BaselineKind::Proportional),
            other => Err(format!("unknown baseline `{other}` (expected gm-rn, equal or prop)")),
        }
    }
}

/// Random OFMO bits truncated to the knapsack capacity by a random
/// subset, and uniform downlink powers.
pub fn gm_rn<R: Rng + ?Sized>(rng: &mut R, cfg: &ScenarioConfig) -> OperatorDecision {
    let m = cfg.num_users();
    let (lo, hi) = cfg.dl_power_range();
    let mut offload: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
    let mut chosen: Vec<usize> = (0..m).filter(|&i| offload[i]).collect();
    let cap = cfg.ofmo_capacity();
    if chosen.len() > cap {
        chosen.shuffle(rng);
        for &i in &chosen[cap..] {
            offload[i] = false;
        }
    }
    let dl_power = (0..m).map(|_| lo + rng.random::<f64>() * (hi - lo)).collect();
    OperatorDecision { offload, dl_power }
}

/// The lowest-index half of the users (rounded up, capped) collaborate;
/// every user gets the midpoint power.
pub fn equal_policy(cfg: &ScenarioConfig) -> OperatorDecision {
    let m = cfg.num_users();
    let (lo, hi) = cfg.dl_power_range();
    let n = m.div_ceil(2).min(cfg.ofmo_capacity());
    OperatorDecision {
        offload: (0..m).map(|i| i < n).collect(),
        dl_power: vec![0.5 * (lo + hi); m],
    }
}

/// Spare INC processing rate, in cycles/s, given each node's association count.
pub fn inc_headroom(cfg: &ScenarioConfig, inc_loads: &[usize]) -> f64 {
    let cap = cfg.compute.inc_assoc_capacity.max(1) as f64;
    (0..cfg.num_inc())
        .map(|k| {
            let load = inc_loads.get(k).copied().unwrap_or(0) as f64;
            cfg.inc_rate(k) * (1.0 - (load / cap).min(1.0))
        })
        .sum()
}

/// The C_max users with the largest g_m times INC headroom collaborate
/// (ties to the lower index, none when no headroom is left); powers grow
/// linearly with the normalized large-scale gain.
pub fn proportional_policy(cfg: &ScenarioConfig, ch: &ChannelRealization, inc_loads: &[usize]) -> OperatorDecision {
    let m = cfg.num_users();
    let (lo, hi) = cfg.dl_power_range();
    let headroom = inc_headroom(cfg, inc_loads);
    let score: Vec<f64> = ch.gains.iter().map(|g| g * headroom).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    let mut offload = vec![false; m];
    for &i in order.iter().take(cfg.ofmo_capacity()) {
        if score[i] > 0.0 {
            offload[i] = true;
        }
    }
    let g_max = ch.gains.iter().copied().fold(0.0, f64::max);
    let dl_power = ch
        .gains
        .iter()
        .map(|g| if g_max > 0.0 { lo + g / g_max * (hi - lo) } else { lo })
        .collect();
    OperatorDecision { offload, dl_power }
}
