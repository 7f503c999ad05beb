#![allow(dead_code)]

use inc_sim::channel::draw_realization;
use inc_sim::compute::ComputeModel;
use inc_sim::config::LearningConfig;
use inc_sim::game::{GameInstance, OperatorDecision};
use inc_sim::marl::policy::{HeadValues, Policy, Sample, SampleTargets};
use inc_sim::marl::{CriticVariant, Features};
use inc_sim::requests::{sample_task, TaskSpec};
use inc_sim::ScenarioConfig;
use rand::Rng;

/// Default scenario with `m` users and `k` INC nodes.
pub fn scenario_cfg(m: usize, k: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.topology.num_users = m;
    cfg.topology.num_inc = k;
    cfg.compute.inc_rates_ghz.clear();
    cfg.compute.ofmo_capacity = None;
    cfg.fill_defaults();
    cfg
}

/// Every user active with a task drawn from the configured ranges. With
/// `bound_s`, latency bounds are drawn from that range instead.
pub fn random_tasks<R: Rng>(cfg: &ScenarioConfig, rng: &mut R, bound_s: Option<(f64, f64)>) -> Vec<Option<TaskSpec>> {
    (0..cfg.num_users())
        .map(|_| {
            let mut t = sample_task(1, cfg, rng);
            if let Some((lo, hi)) = bound_s {
                t.latency_bound = rng.random_range(lo..hi);
            }
            Some(t)
        })
        .collect()
}

/// A random slot: channel draw, tasks, all users granted offloading and
/// uniform downlink powers.
pub fn random_instance<R: Rng>(cfg: &ScenarioConfig, rng: &mut R, bound_s: Option<(f64, f64)>) -> GameInstance {
    let compute = ComputeModel::from_config(cfg).unwrap();
    let tasks = random_tasks(cfg, rng, bound_s);
    let ch = draw_realization(cfg, rng);
    let (lo, hi) = cfg.dl_power_range();
    let decision = OperatorDecision {
        offload: vec![true; cfg.num_users()],
        dl_power: (0..cfg.num_users()).map(|_| rng.random_range(lo.max(1.0)..hi)).collect(),
    };
    GameInstance::new(cfg, &compute, &tasks, &ch, &decision)
}

/// Relative error with an absolute floor for tiny values.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / (a.abs().max(b.abs())).max(floor)
}

/// Small nets for gradient checks.
pub fn small_learning() -> LearningConfig {
    LearningConfig {
        hidden_width: 5,
        hidden_layers: 2,
        ..LearningConfig::default()
    }
}

fn features<R: Rng>(rng: &mut R, m: usize) -> Vec<Features> {
    (0..m).map(|_| [rng.random(), rng.random(), rng.random()]).collect()
}

/// A batch sampled from `behaviour` with random advantages and value
/// targets for the heads `variant` has.
pub fn random_batch<R: Rng>(behaviour: &Policy, rng: &mut R, m: usize, n: usize) -> Vec<(Sample, SampleTargets)> {
    let heads = behaviour.variant.heads();
    (0..n)
        .map(|_| {
            let xu = features(rng, m);
            let xd = features(rng, m);
            let ul = behaviour.ul_act(&xu, m.div_ceil(2));
            let dl = behaviour.dl_act(&xd, (0.0, 20.0), Some(&mut *rng));
            let mut target = || rng.random_range(-2.0..2.0);
            let value = HeadValues {
                u: heads[0].then(&mut target),
                d: heads[1].then(&mut target),
                g: heads[2].then(&mut target),
            };
            let targets = SampleTargets {
                adv_u: rng.random_range(-1.5..1.5),
                adv_d: rng.random_range(-1.5..1.5),
                value,
            };
            let sample = Sample {
                xu,
                xd,
                offload: ul.offload,
                ul_log_prob: ul.log_prob,
                dl_sample: dl.samples,
                dl_log_prob: dl.log_prob,
            };
            (sample, targets)
        })
        .collect()
}

/// Largest relative error between analytic and central-difference
/// gradients over every actor and critic parameter.
pub fn max_gradient_error(policy: &Policy, batch: &[(Sample, SampleTargets)], h: f64) -> f64 {
    let refs: Vec<(&Sample, SampleTargets)> = batch.iter().map(|(s, t)| (s, *t)).collect();
    let (_, ga, gc) = policy.loss_and_grad(&refs);
    let loss = |p: &Policy| p.loss_and_grad(&refs).0.total();
    let mut worst: f64 = 0.0;
    let mut q = policy.clone();
    for group in 0..2 {
        let n_tensors = 5;
        for ti in 0..n_tensors {
            let analytic = if group == 0 { ga.tensors()[ti].clone() } else { gc.tensors()[ti].clone() };
            for j in 0..analytic.len() {
                let base = if group == 0 { q.actor.tensors()[ti][j] } else { q.critic.tensors()[ti][j] };
                let set = |q: &mut Policy, v: f64| {
                    if group == 0 {
                        q.actor.tensors_mut()[ti][j] = v;
                    } else {
                        q.critic.tensors_mut()[ti][j] = v;
                    }
                };
                set(&mut q, base + h);
                let up = loss(&q);
                set(&mut q, base - h);
                let down = loss(&q);
                set(&mut q, base);
                let numeric = (up - down) / (2.0 * h);
                worst = worst.max(rel_err(analytic[j], numeric, 1e-6));
            }
        }
    }
    worst
}

/// Displace every actor parameter so PPO ratios move away from one.
pub fn perturb_actor<R: Rng>(p: &Policy, rng: &mut R, scale: f64) -> Policy {
    let mut q = p.clone();
    for t in q.actor.tensors_mut() {
        t.iter_mut().for_each(|x| *x += scale * rng.random_range(-1.0..1.0));
    }
    q
}

/// Direct double-sum GAE oracle.
pub fn gae_oracle(r: &[f64], v: &[f64], last: f64, gamma: f64, lambda: f64) -> Vec<f64> {
    let n = r.len();
    let val = |t: usize| if t < n { v[t] } else { last };
    (0..n)
        .map(|t| {
            (t..n)
                .map(|i| (gamma * lambda).powi((i - t) as i32) * (r[i] + gamma * val(i + 1) - v[i]))
                .sum()
        })
        .collect()
}

pub const VARIANTS: [CriticVariant; 3] = CriticVariant::ALL;

use inc_sim::game::{Split, StrategyProfile};

/// Split grid used by the deviation sweep.
pub fn split_grid(step: f64) -> Vec<Split> {
    let n = (1.0 / step).round() as usize;
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 1..=n {
            out.push(Split {
                lambda: i as f64 / n as f64,
                beta: j as f64 / n as f64,
            });
        }
    }
    out
}

/// Largest utility gain, measured on the channel-dependent latency term,
/// any active user gets from switching channel with
/// any grid split that meets its latency bound.
pub fn best_deviation_gain(game: &GameInstance, profile: &StrategyProfile, grid: &[Split]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for m in 0..game.num_users() {
        let Some(t) = game.tasks[m] else { continue };
        let current = profile.channel[m];
        let now = game.latency_term_with(m, current, profile.split[m], profile);
        if current != 0 {
            worst = worst.max(-now);
        }
        for k in game.feasible_channels(m, profile) {
            if k == current {
                continue;
            }
            for &s in grid {
                let ok = game
                    .breakdown_with(m, k, s, profile)
                    .is_ok_and(|b| b.total <= t.latency_bound);
                if ok {
                    worst = worst.max(game.latency_term_with(m, k, s, profile) - now);
                }
            }
        }
    }
    worst
}

/// Largest |ΔU_m - Δφ| over all unilateral channel switches from `profile`
/// with splits held fixed.
pub fn potential_residual(game: &GameInstance, profile: &StrategyProfile) -> f64 {
    let phi = game.potential(profile);
    let mut worst: f64 = 0.0;
    for m in 0..game.num_users() {
        let u = game.utility(m, profile);
        for c in 0..game.num_channels() {
            if c == profile.channel[m] {
                continue;
            }
            let q = profile.with_choice(m, c, profile.split[m]);
            let du = game.utility(m, &q) - u;
            let dphi = game.potential(&q) - phi;
            worst = worst.max((du - dphi).abs());
        }
    }
    worst
}
