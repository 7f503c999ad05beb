//! One episode of the leader-follower loop: requests, tasks and channel,
//! then the operator's UL and DL decisions, then the users' equilibrium.

use crate::baselines::{equal_policy, gm_rn, proportional_policy, BaselineKind};
use crate::channel::{
    downlink_latency, downlink_snr, draw_realization, render_size, user_dl_energy, UrllcLink,
};
use crate::compute::{accounted_latency, pg_cost, ComputeModel, LatencyBreakdown};
use crate::config::{validate_config, ScenarioConfig};
use crate::error::{ConfigError, RunError};
use crate::game::{GameInstance, OperatorDecision, StrategyProfile};
use crate::marl::buffer::{DlRecord, TrajectoryBuffer, UlRecord};
use crate::marl::policy::Policy;
use crate::marl::reward::{dl_reward, gl_reward, ul_reward};
use crate::marl::{dl_state, ul_state};
use crate::requests::{sample_task, step_requests, RequestChain, RequestState, TaskSpec};
use crate::rng::{RngStreams, Stream};

/// Who plays the leader.
#[derive(Debug, Clone, Copy)]
pub enum Operator<'a> {
    /// A learned policy; `explore` samples DL powers, otherwise the means are used.
    Learned { policy: &'a Policy, explore: bool },
    Baseline(BaselineKind),
}

impl Operator<'_> {
    pub fn label(&self) -> String {
        match self {
            Operator::Learned { policy, .. } => policy.variant.to_string(),
            Operator::Baseline(k) => k.to_string(),
        }
    }
}

/// Per-user outcome of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct UserOutcome {
    pub request: usize,
    pub task: Option<TaskSpec>,
    /// `None` for idle users and for tasks whose latency could not be formed.
    pub breakdown: Option<LatencyBreakdown>,
    /// End-to-end latency; infinite when a link carries no rate.
    pub latency: f64,
    pub violation: bool,
    pub utility: f64,
    pub energy: f64,
    pub ul_rate: f64,
    /// Weighted latency-energy cost used for performance gains.
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rewards {
    pub ul: f64,
    pub dl: f64,
    pub gl: f64,
}

/// Everything observed in one slot, in decision order.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotSnapshot {
    pub episode: usize,
    pub slot: usize,
    /// Running index of the channel draw within the run.
    pub realization: u64,
    pub decision: OperatorDecision,
    pub profile: StrategyProfile,
    pub ne_rounds: usize,
    pub ne_converged: bool,
    pub ne_verified: bool,
    pub users: Vec<UserOutcome>,
    pub inc_loads: Vec<usize>,
    pub rewards: Rewards,
}

impl SlotSnapshot {
    pub fn max_ul_rate(&self) -> f64 {
        self.users.iter().map(|u| u.ul_rate).fold(0.0, f64::max)
    }

    /// Users on an INC channel all hold an offloading grant.
    pub fn coupling_holds(&self) -> bool {
        self.profile
            .channel
            .iter()
            .zip(&self.decision.offload)
            .all(|(&c, &o)| c == 0 || o)
    }
}

/// Static pieces shared by every slot of a run.
#[derive(Debug, Clone)]
pub struct Environment {
    pub cfg: ScenarioConfig,
    pub compute: ComputeModel,
    pub chain: RequestChain,
    pub link: UrllcLink,
}

impl Environment {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self, RunError> {
        let mut cfg = cfg.clone();
        cfg.fill_defaults();
        let violations = validate_config(&cfg);
        if !violations.is_empty() {
            return Err(ConfigError::Invalid(violations).into());
        }
        Ok(Self {
            compute: ComputeModel::from_config(&cfg)?,
            chain: RequestChain::from_config(&cfg),
            link: UrllcLink::from_config(&cfg),
            cfg,
        })
    }
}

/// Users per INC under `profile`, counting active users only.
pub fn inc_loads(game: &GameInstance, profile: &StrategyProfile) -> Vec<usize> {
    let mut loads = vec![0; game.num_channels() - 1];
    for m in 0..game.num_users() {
        let c = profile.channel[m];
        if game.is_active(m) && c > 0 {
            loads[c - 1] += 1;
        }
    }
    loads
}

/// Run one episode. Environment draws come from the channel, request and
/// task streams only, so every operator sees the same slots for a seed.
/// With a buffer, learned decisions and rewards are recorded in UL, DL,
/// global order.
pub fn run_episode(
    env: &Environment,
    operator: Operator<'_>,
    streams: &mut RngStreams,
    episode: usize,
    mut buffer: Option<&mut TrajectoryBuffer>,
) -> Result<Vec<SlotSnapshot>, RunError> {
    let cfg = &env.cfg;
    let m = cfg.num_users();
    let len = cfg.learning.episode_len;
    let (p_lo, p_hi) = cfg.dl_power_range();
    let n0 = cfg.noise_power_w();
    let mut requests = RequestState::idle(m);
    let mut prev_loads = vec![0; cfg.num_inc()];
    let mut out = Vec::with_capacity(len);

    for slot in 0..len {
        requests = step_requests(&requests, &env.chain, streams.get(Stream::Requests));
        let tasks: Vec<Option<TaskSpec>> = requests
            .0
            .iter()
            .map(|&r| (r > 0).then(|| sample_task(r, cfg, streams.get(Stream::Tasks))))
            .collect();
        let ch = draw_realization(cfg, streams.get(Stream::Channel));

        let (decision, ul_rec, dl_rec) = match operator {
            Operator::Learned { policy, explore } => {
                let xu = ul_state(cfg, &requests.0, &tasks);
                let ul = policy.ul_act(&xu, cfg.ofmo_capacity());
                let xd = dl_state(cfg, &ul.offload, &tasks);
                let rng = explore.then(|| streams.get(Stream::PolicySample));
                let dl = policy.dl_act(&xd, (p_lo, p_hi), rng);
                let decision = OperatorDecision {
                    offload: ul.offload.clone(),
                    dl_power: dl.powers.clone(),
                };
                let ul_rec = UlRecord {
                    state: xu,
                    offload: ul.offload,
                    log_prob: ul.log_prob,
                    reward: 0.0,
                };
                let dl_rec = DlRecord {
                    state: xd,
                    sample: dl.samples,
                    log_prob: dl.log_prob,
                    reward: 0.0,
                };
                (decision, Some(ul_rec), Some(dl_rec))
            }
            Operator::Baseline(BaselineKind::GmRn) => (gm_rn(streams.get(Stream::Baseline), cfg), None, None),
            Operator::Baseline(BaselineKind::Equal) => (equal_policy(cfg), None, None),
            Operator::Baseline(BaselineKind::Proportional) => {
                (proportional_policy(cfg, &ch, &prev_loads), None, None)
            }
        };

        let game = GameInstance::new(cfg, &env.compute, &tasks, &ch, &decision);
        let eq = game.run_best_response_dynamics(StrategyProfile::all_mec(m), cfg.game.max_rounds);
        let profile = eq.profile;
        let utilities = game.utilities(&profile);

        let users: Vec<UserOutcome> = (0..m)
            .map(|i| {
                let Some(t) = tasks[i] else {
                    return UserOutcome {
                        request: requests.0[i],
                        task: None,
                        breakdown: None,
                        latency: 0.0,
                        violation: false,
                        utility: utilities[i],
                        energy: 0.0,
                        ul_rate: 0.0,
                        cost: 0.0,
                    };
                };
                let breakdown = game.breakdown(i, &profile).ok();
                let latency = breakdown.map_or(f64::INFINITY, |b| b.total);
                let violation = !(latency <= t.latency_bound);
                let e_non = max_power_energy(env, i, &t, &ch, n0, p_hi);
                UserOutcome {
                    request: requests.0[i],
                    task: Some(t),
                    breakdown,
                    latency,
                    violation,
                    utility: utilities[i],
                    energy: game.energy[i],
                    ul_rate: game.ul_rate(i, profile.channel[i], &profile),
                    cost: pg_cost(
                        accounted_latency(latency, t.latency_bound),
                        t.latency_bound,
                        game.energy[i],
                        e_non,
                        cfg.utility.cost_weights,
                    ),
                }
            })
            .collect();

        let loads = inc_loads(&game, &profile);
        let rewards = Rewards {
            ul: ul_reward(&loads, cfg.compute.inc_assoc_capacity),
            dl: dl_reward(&decision.dl_power, p_lo, p_hi),
            gl: gl_reward(&utilities, cfg.utility.utility_scale),
        };

        if let (Some(buf), Some(mut ul), Some(mut dl)) = (buffer.as_deref_mut(), ul_rec, dl_rec) {
            ul.reward = rewards.ul;
            dl.reward = rewards.dl;
            buf.push_ul(ul)?;
            buf.push_dl(dl)?;
            buf.push_global(rewards.gl)?;
        }

        out.push(SlotSnapshot {
            episode,
            slot,
            realization: (episode * len + slot) as u64,
            decision,
            profile,
            ne_rounds: eq.rounds,
            ne_converged: eq.converged,
            ne_verified: eq.verified,
            users,
            inc_loads: loads.clone(),
            rewards,
        });
        prev_loads = loads;
    }
    Ok(out)
}

/// Downlink energy user m would spend at the maximum power; the energy
/// normalizer of the performance-gain cost.
fn max_power_energy(
    env: &Environment,
    m: usize,
    t: &TaskSpec,
    ch: &crate::channel::ChannelRealization,
    n0: f64,
    p_max: f64,
) -> f64 {
    let rate = env.link.rate(downlink_snr(m, p_max, ch, n0));
    let lat = downlink_latency(render_size(t.bits, t.render_slope), rate).unwrap_or(f64::INFINITY);
    user_dl_energy(env.cfg.channel.energy_model, p_max, rate, lat)
}
