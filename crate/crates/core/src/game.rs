//! The users' channel-selection game: utilities under a fixed operator
//! decision, feasible sets, split refinement, best replies, the potential
//! and round-robin best-response dynamics.
//!
//! Channel 0 is MEC-only upload; channel k ≥ 1 uploads to INC k-1. Users
//! sharing a channel interfere; earlier users (lower index) are queued
//! ahead of later ones at every node.

use crate::channel::{
    downlink_latency, downlink_snr, render_size, user_dl_energy, ChannelRealization,
    UplinkTable, UrllcLink,
};
use crate::compute::{ComputeModel, LatencyBreakdown, TaskPath, UserQueues};
use crate::config::{GameConfig, ScenarioConfig};
use crate::error::ModelError;
use crate::requests::TaskSpec;

/// The leader's per-slot action: OFMO bits and downlink powers.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDecision {
    pub offload: Vec<bool>,
    pub dl_power: Vec<f64>,
}

/// INC fraction λ and requested INC share β for the selected channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub lambda: f64,
    pub beta: f64,
}

impl Default for Split {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub channel: Vec<usize>,
    pub split: Vec<Split>,
}

impl StrategyProfile {
    pub fn all_mec(num_users: usize) -> Self {
        Self {
            channel: vec![0; num_users],
            split: vec![Split::default(); num_users],
        }
    }

    /// ℵ_m: the share the MEC executes.
    pub fn aleph(&self, m: usize) -> f64 {
        if self.channel[m] == 0 {
            1.0
        } else {
            1.0 - self.split[m].lambda
        }
    }

    pub fn with_choice(&self, m: usize, channel: usize, split: Split) -> Self {
        let mut p = self.clone();
        p.channel[m] = channel;
        p.split[m] = split;
        p
    }
}

/// Smallest β the refinement may request; keeps the INC term finite.
const BETA_FLOOR: f64 = 1e-3;

/// One slot's game: tasks, channel, announced decision and constants.
#[derive(Debug, Clone)]
pub struct GameInstance {
    pub tasks: Vec<Option<TaskSpec>>,
    pub offload: Vec<bool>,
    pub table: UplinkTable,
    pub ul_power: Vec<f64>,
    pub n0: f64,
    pub link: UrllcLink,
    pub compute: ComputeModel,
    /// Downlink latency per user under the announced powers.
    pub dl_tx: Vec<f64>,
    pub dl_rate: Vec<f64>,
    pub energy: Vec<f64>,
    pub latency_gain: f64,
    pub energy_weight: f64,
    pub latency_cap: f64,
    pub assoc_capacity: usize,
    pub params: GameConfig,
}

/// Result of refining (λ, β) on one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOutcome {
    pub split: Split,
    pub utility: f64,
    pub latency: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Outcome of the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    /// Full round-robin passes performed, including the final quiet pass.
    pub rounds: usize,
    /// Strategy switches made.
    pub switches: usize,
    pub converged: bool,
    /// The final sweep found no strictly profitable unilateral deviation.
    pub verified: bool,
}

/// Latency of a collaborative task as a function of (λ, β):
/// fixed + λ·cn_work/β + (1-λ)·(fwd_per + mec_work).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollabLatency {
    pub fixed: f64,
    pub cn_work: f64,
    pub fwd_per: f64,
    pub mec_work: f64,
}

impl CollabLatency {
    pub fn eval(&self, s: Split) -> f64 {
        let inc = if s.lambda > 0.0 {
            s.lambda * self.cn_work / s.beta
        } else {
            0.0
        };
        self.fixed + inc + (1.0 - s.lambda) * (self.fwd_per + self.mec_work)
    }

    /// ∂T/∂λ and ∂T/∂β.
    pub fn grad(&self, s: Split) -> (f64, f64) {
        (
            self.cn_work / s.beta - self.fwd_per - self.mec_work,
            -s.lambda * self.cn_work / (s.beta * s.beta),
        )
    }
}

impl GameInstance {
    /// Assemble a slot's game from its tasks, channel and the announced decision.
    pub fn new(
        cfg: &ScenarioConfig,
        compute: &ComputeModel,
        tasks: &[Option<TaskSpec>],
        ch: &ChannelRealization,
        decision: &OperatorDecision,
    ) -> Self {
        let m = tasks.len();
        let n0 = cfg.noise_power_w();
        let link = UrllcLink::from_config(cfg);
        let mut dl_tx = vec![0.0; m];
        let mut dl_rate = vec![0.0; m];
        let mut energy = vec![0.0; m];
        for i in 0..m {
            if let Some(t) = &tasks[i] {
                let p = decision.dl_power[i];
                let rate = link.rate(downlink_snr(i, p, ch, n0));
                let bits = render_size(t.bits, t.render_slope);
                dl_tx[i] = downlink_latency(bits, rate).unwrap_or(f64::INFINITY);
                dl_rate[i] = rate;
                energy[i] = user_dl_energy(cfg.channel.energy_model, p, rate, dl_tx[i]);
            }
        }
        Self {
            tasks: tasks.to_vec(),
            offload: decision.offload.clone(),
            table: UplinkTable::new(ch),
            ul_power: vec![cfg.channel.ul_power_w; m],
            n0,
            link,
            compute: compute.clone(),
            dl_tx,
            dl_rate,
            energy,
            latency_gain: cfg.utility.latency_gain,
            energy_weight: cfg.utility.energy_weight,
            latency_cap: cfg.utility.latency_cap_s,
            assoc_capacity: cfg.compute.inc_assoc_capacity,
            params: cfg.game.clone(),
        }
    }

    pub fn num_users(&self) -> usize {
        self.tasks.len()
    }

    pub fn num_channels(&self) -> usize {
        self.compute.inc.len() + 1
    }

    pub fn is_active(&self, m: usize) -> bool {
        self.tasks[m].is_some()
    }

    /// Channel per active user; idle users transmit nothing.
    fn assignment(&self, profile: &StrategyProfile) -> Vec<Option<usize>> {
        (0..self.num_users())
            .map(|n| self.is_active(n).then_some(profile.channel[n]))
            .collect()
    }

    pub fn ul_rate(&self, m: usize, channel: usize, profile: &StrategyProfile) -> f64 {
        let assign = self.assignment(profile);
        let gamma = self
            .table
            .sinr_on(m, channel, &assign, &self.ul_power, self.n0);
        self.link.rate(gamma)
    }

    /// FIFO waits for user m on `channel`: work of earlier active users.
    pub fn queues(&self, m: usize, channel: usize, profile: &StrategyProfile) -> UserQueues {
        let mut cn = 0.0;
        let mut mec = 0.0;
        for n in 0..m {
            let Some(t) = &self.tasks[n] else { continue };
            mec += profile.aleph(n) * t.cycles;
            if channel != 0 && profile.channel[n] == channel {
                cn += profile.split[n].lambda * t.cycles;
            }
        }
        UserQueues {
            cn: if channel == 0 {
                0.0
            } else {
                cn / self.compute.inc[channel - 1].est_rate
            },
            mec: mec / self.compute.mec.est_rate,
        }
    }

    /// User m's latency breakdown if it plays (channel, split) against `profile`.
    pub fn breakdown_with(
        &self,
        m: usize,
        channel: usize,
        split: Split,
        profile: &StrategyProfile,
    ) -> Result<LatencyBreakdown, ModelError> {
        let t = self.tasks[m].as_ref().ok_or(ModelError::Unassigned(m))?;
        let path = TaskPath {
            channel,
            lambda: split.lambda,
            beta: split.beta,
            bits: t.bits,
            cycles: t.cycles,
            ul_rate: self.ul_rate(m, channel, profile),
            dl_tx: self.dl_tx[m],
        };
        self.compute
            .e2e_latency(&path, &self.queues(m, channel, profile))
    }

    pub fn breakdown(&self, m: usize, profile: &StrategyProfile) -> Result<LatencyBreakdown, ModelError> {
        self.breakdown_with(m, profile.channel[m], profile.split[m], profile)
    }

    /// Pre-downlink latency, infinite when the uplink carries no rate.
    fn pre_dl(&self, m: usize, channel: usize, split: Split, profile: &StrategyProfile) -> f64 {
        match self.breakdown_with(m, channel, split, profile) {
            Ok(b) => b.pre_downlink(channel),
            Err(_) => f64::INFINITY,
        }
    }

    /// User m's pre-downlink latency on `channel` ≥ 1 as a function of
    /// (λ, β), everything else fixed.
    pub fn collab_latency(&self, m: usize, channel: usize, profile: &StrategyProfile) -> CollabLatency {
        let t = self.tasks[m].as_ref().expect("active user");
        let rate = self.ul_rate(m, channel, profile);
        let ul = if rate > 0.0 { t.bits / rate } else { f64::INFINITY };
        let mut lat = self.collab_latency_without_uplink(m, channel, profile);
        lat.fixed += ul;
        lat
    }

    fn collab_latency_without_uplink(&self, m: usize, channel: usize, profile: &StrategyProfile) -> CollabLatency {
        let t = self.tasks[m].as_ref().expect("active user");
        let q = self.queues(m, channel, profile);
        CollabLatency {
            fixed: q.cn + q.mec + self.compute.wired_base,
            cn_work: t.cycles / self.compute.inc[channel - 1].actual_rate(),
            fwd_per: t.bits / self.compute.backhaul,
            mec_work: t.cycles / self.compute.mec.actual_rate(),
        }
    }

    /// MEC-only pre-downlink latency of user m against the same co-players.
    pub fn reference_latency(&self, m: usize, profile: &StrategyProfile) -> f64 {
        self.pre_dl(m, 0, profile.split[m], profile)
    }

    /// U_m = g_t (T~^O - T^e2e) - w E', with T~^O the user's own MEC-only
    /// latency against the same co-players. Latencies above the cap are
    /// charged at the cap.
    pub fn utility_with(&self, m: usize, channel: usize, split: Split, profile: &StrategyProfile) -> f64 {
        if !self.is_active(m) {
            return 0.0;
        }
        self.latency_term_with(m, channel, split, profile) - self.energy_weight * self.energy[m]
    }

    fn bracket(&self, reference: f64, own: f64) -> f64 {
        self.latency_gain * (reference.min(self.latency_cap) - own.min(self.latency_cap))
    }

    pub fn utility(&self, m: usize, profile: &StrategyProfile) -> f64 {
        self.utility_with(m, profile.channel[m], profile.split[m], profile)
    }

    pub fn utilities(&self, profile: &StrategyProfile) -> Vec<f64> {
        (0..self.num_users()).map(|m| self.utility(m, profile)).collect()
    }

    /// Channels user m may pick besides 0: offloading granted, the INC below
    /// its association cap without m, and some split meeting T_max.
    pub fn feasible_channels(&self, m: usize, profile: &StrategyProfile) -> Vec<usize> {
        let Some(t) = &self.tasks[m] else {
            return Vec::new();
        };
        if !self.offload[m] {
            return Vec::new();
        }
        (1..self.num_channels())
            .filter(|&k| {
                let load = (0..self.num_users())
                    .filter(|&n| n != m && self.is_active(n) && profile.channel[n] == k)
                    .count();
                if load >= self.assoc_capacity {
                    return false;
                }
                let lat = self.collab_latency(m, k, profile);
                let best = lat
                    .eval(Split { lambda: 0.0, beta: 1.0 })
                    .min(lat.eval(Split { lambda: 1.0, beta: 1.0 }));
                best + self.dl_tx[m] <= t.latency_bound
            })
            .collect()
    }

    /// Projected primal ascent on (λ, β) with dual ascent on (θ, ν) for
    /// max U s.t. T ≤ T_max, 0 ≤ λ, β ≤ 1. The Lagrangian
    /// U - θ(T - T_max) - ν(β - 1) is scaled so the λ-slope of U at β = 1
    /// has unit size, and the constraint is measured in units of T_max.
    /// The best feasible iterate is kept, so the result never falls below
    /// the starting split when that split is feasible.
    pub fn refine_split(&self, m: usize, k: usize, profile: &StrategyProfile, init: Split) -> SplitOutcome {
        let t_max = self.tasks[m].as_ref().expect("active user").latency_bound;
        let lat = self.collab_latency(m, k, profile);
        let [k1, k2, k3, k4] = self.params.step_sizes;
        let g = self.latency_gain;
        let slope = g * lat.grad(Split { lambda: 1.0, beta: 1.0 }).0.abs();
        let scale = if slope > 0.0 && slope.is_finite() { 1.0 / slope } else { 1.0 };

        let mut s = Split {
            lambda: init.lambda.clamp(0.0, 1.0),
            beta: init.beta.clamp(BETA_FLOOR, 1.0),
        };
        let (mut theta, mut nu) = (0.0f64, 0.0f64);
        let reference = self.reference_latency(m, profile);
        let energy = self.energy_weight * self.energy[m];
        let dl = self.dl_tx[m];
        let eval = |s: Split| {
            let pre = lat.eval(s);
            (self.bracket(reference, pre) - energy, pre + dl)
        };
        let (u0, t0) = eval(s);
        let mut best = (s, u0, t0, t0 <= t_max);
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        while iterations < self.params.split_max_iters {
            iterations += 1;
            let (dt_dl, dt_db) = lat.grad(s);
            let t_now = lat.eval(s) + dl;
            // ∂L/∂λ = -g ∂T/∂λ - θ ∂T/∂λ / T_max, and likewise for β.
            let d_lambda = -(g * scale + theta / t_max) * dt_dl;
            let d_beta = -(g * scale + theta / t_max) * dt_db - nu;
            let next = Split {
                lambda: (s.lambda + k1 * d_lambda).clamp(0.0, 1.0),
                beta: (s.beta + k2 * d_beta).clamp(BETA_FLOOR, 1.0),
            };
            let next_theta = (theta + k3 * (t_now - t_max) / t_max).max(0.0);
            let next_nu = (nu + k4 * (next.beta - 1.0)).max(0.0);
            residual = ((next.lambda - s.lambda).powi(2)
                + (next.beta - s.beta).powi(2)
                + (next_theta - theta).powi(2)
                + (next_nu - nu).powi(2))
            .sqrt();
            s = next;
            theta = next_theta;
            nu = next_nu;
            let (u, t) = eval(s);
            let feasible = t <= t_max;
            if (feasible && !best.3) || (feasible == best.3 && u > best.1) {
                best = (s, u, t, feasible);
            }
            if residual < self.params.split_tolerance {
                break;
            }
        }
        SplitOutcome {
            split: best.0,
            utility: best.1,
            latency: best.2,
            iterations,
            residual,
            converged: residual < self.params.split_tolerance,
        }
    }

    /// [`Self::refine_split`], failing when the iteration budget runs out.
    pub fn best_split(&self, m: usize, k: usize, profile: &StrategyProfile, init: Split) -> Result<SplitOutcome, ModelError> {
        let out = self.refine_split(m, k, profile, init);
        if out.converged {
            Ok(out)
        } else {
            Err(ModelError::SplitNonConvergence {
                iterations: out.iterations,
                residual: out.residual,
            })
        }
    }

    /// Candidate replies for user m with their refined splits and latency
    /// terms. Energy does not depend on the reply, so replies are ranked by
    /// the latency term alone.
    fn candidates(&self, m: usize, profile: &StrategyProfile) -> Vec<(usize, Split, f64)> {
        let mut out = vec![(0, profile.split[m], 0.0)];
        for k in self.feasible_channels(m, profile) {
            let init = if profile.channel[m] == k {
                profile.split[m]
            } else {
                Split::default()
            };
            let r = self.refine_split(m, k, profile, init);
            if r.latency <= self.tasks[m].as_ref().unwrap().latency_bound {
                out.push((k, r.split, self.latency_term_with(m, k, r.split, profile)));
            }
        }
        out
    }

    /// Argmax over {0} ∪ S_m with refined splits; ties go to the lowest channel.
    pub fn best_response(&self, m: usize, profile: &StrategyProfile) -> (usize, Split, f64) {
        let mut best = (0, profile.split[m], f64::NEG_INFINITY);
        for c in self.candidates(m, profile) {
            if c.2 > best.2 {
                best = c;
            }
        }
        let energy = if self.is_active(m) {
            self.energy_weight * self.energy[m]
        } else {
            0.0
        };
        (best.0, best.1, best.2 - energy)
    }

    /// One user's reply step. Returns true when the channel changes.
    fn reply(&self, m: usize, profile: &mut StrategyProfile) -> bool {
        if !self.is_active(m) || !self.offload[m] {
            let changed = profile.channel[m] != 0;
            profile.channel[m] = 0;
            return changed;
        }
        let cands = self.candidates(m, profile);
        let current = cands.iter().find(|c| c.0 == profile.channel[m]).copied();
        let best = cands
            .iter()
            .copied()
            .fold(None::<(usize, Split, f64)>, |acc, c| match acc {
                Some(a) if a.2 >= c.2 => Some(a),
                _ => Some(c),
            })
            .expect("channel 0 is always a candidate");
        match current {
            Some(cur) if !improves(best.2, cur.2) => {
                profile.split[m] = cur.1;
                false
            }
            _ => {
                let changed = profile.channel[m] != best.0;
                profile.channel[m] = best.0;
                profile.split[m] = best.1;
                changed
            }
        }
    }

    /// Round-robin replies by user index until a pass changes nothing,
    /// then a deviation sweep confirms the profile.
    pub fn run_best_response_dynamics(&self, init: StrategyProfile, max_rounds: usize) -> Equilibrium {
        let mut profile = init;
        for m in 0..self.num_users() {
            if !self.is_active(m) || !self.offload[m] {
                profile.channel[m] = 0;
            }
        }
        let mut rounds = 0;
        let mut switches = 0;
        let mut converged = false;
        while rounds < max_rounds {
            rounds += 1;
            let mut changed = false;
            for m in 0..self.num_users() {
                if self.reply(m, &mut profile) {
                    changed = true;
                    switches += 1;
                }
            }
            if !changed {
                converged = true;
                break;
            }
        }
        let verified = self.is_equilibrium(&profile);
        Equilibrium {
            profile,
            rounds,
            switches,
            converged,
            verified,
        }
    }

    /// No user gains strictly by switching channel (with a refined split).
    pub fn is_equilibrium(&self, profile: &StrategyProfile) -> bool {
        (0..self.num_users()).all(|m| {
            if !self.is_active(m) {
                return true;
            }
            let now = self.latency_term(m, profile);
            self.candidates(m, profile)
                .iter()
                .all(|c| c.0 == profile.channel[m] || !improves(c.2, now))
        })
    }

    /// Path-integral potential from the all-MEC profile: Σ_m R_m0 plus the
    /// utility changes along the path that switches users on one at a time
    /// in index order. With no coupling between users this equals the
    /// printed potential up to a constant. Energy terms do not depend on
    /// channels and are summed once, away from the latency differences.
    pub fn potential(&self, profile: &StrategyProfile) -> f64 {
        let n = self.num_users();
        let mut z = StrategyProfile {
            channel: vec![0; n],
            split: profile.split.clone(),
        };
        let energy: f64 = (0..n)
            .filter(|&m| self.is_active(m))
            .map(|m| self.energy_weight * self.energy[m])
            .sum();
        let mut path = 0.0;
        for i in 0..n {
            if !self.is_active(i) {
                continue;
            }
            let before = self.latency_term(i, &z);
            z.channel[i] = profile.channel[i];
            path += self.latency_term(i, &z) - before;
        }
        path - energy
    }

    /// The bracket g_t (T~^O - T^e2e) of user m's utility.
    fn latency_term(&self, m: usize, profile: &StrategyProfile) -> f64 {
        self.latency_term_with(m, profile.channel[m], profile.split[m], profile)
    }

    /// The bracket for user m playing (channel, split) against `profile`.
    pub fn latency_term_with(&self, m: usize, channel: usize, split: Split, profile: &StrategyProfile) -> f64 {
        if channel == 0 {
            return 0.0;
        }
        self.bracket(self.pre_dl(m, 0, split, profile), self.pre_dl(m, channel, split, profile))
    }

    /// The largest co-channel interference, in watts, under which user m on
    /// channel k still meets `target` seconds with the given split, or
    /// `None` when even an interference-free channel misses it.
    pub fn interference_threshold(
        &self,
        m: usize,
        k: usize,
        split: Split,
        profile: &StrategyProfile,
        target: f64,
    ) -> Option<f64> {
        let t = self.tasks[m].as_ref()?;
        let rest = self.collab_latency_without_uplink(m, k, profile).eval(split) + self.dl_tx[m];
        let signal = self.ul_power[m] * self.table.norm_sq[m];
        let latency_at = |interf: f64| {
            let rate = self.link.rate(signal / (interf + self.n0));
            let ul = if rate > 0.0 { t.bits / rate } else { f64::INFINITY };
            ul + rest
        };
        if latency_at(0.0) > target {
            return None;
        }
        let mut hi = signal;
        while latency_at(hi) <= target {
            hi *= 2.0;
            if !hi.is_finite() {
                return Some(f64::INFINITY);
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if latency_at(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

/// Strict improvement with a relative guard against rounding noise.
fn improves(candidate: f64, current: f64) -> bool {
    candidate > current + 1e-12 * (1.0 + current.abs())
}
