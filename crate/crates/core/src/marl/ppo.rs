//! Clipped policy-gradient updates over one window of slots.

use rand::seq::SliceRandom;
use rand::Rng;

use super::buffer::TrajectoryBuffer;
use super::gae::gae;
use super::policy::{ActorParams, CriticParams, HeadValues, Policy, SampleTargets};
use super::effective_advantages;
use crate::config::LearningConfig;
use crate::error::RunError;

/// Momentum SGD state for every parameter tensor.
#[derive(Debug, Clone)]
pub struct PpoTrainer {
    pub cfg: LearningConfig,
    actor_velocity: ActorParams,
    critic_velocity: CriticParams,
    windows: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UpdateStats {
    pub ul_loss: f64,
    pub dl_loss: f64,
    pub critic_loss: f64,
    pub minibatches: usize,
}

fn norm(tensors: &[&Vec<f64>]) -> f64 {
    tensors.iter().flat_map(|t| t.iter()).map(|g| g * g).sum::<f64>().sqrt()
}

fn scale(tensors: &mut [&mut Vec<f64>], s: f64) {
    for t in tensors {
        t.iter_mut().for_each(|g| *g *= s);
    }
}

fn clip_group(tensors: &mut [&mut Vec<f64>], max_norm: f64) {
    let n = norm(&tensors.iter().map(|t| &**t).collect::<Vec<_>>());
    if n > max_norm {
        scale(tensors, max_norm / n);
    }
}

fn sgd(params: &mut [&mut Vec<f64>], velocity: &mut [&mut Vec<f64>], grads: &[&Vec<f64>], lr: f64, momentum: f64) {
    for ((p, v), g) in params.iter_mut().zip(velocity.iter_mut()).zip(grads) {
        for ((p, v), g) in p.iter_mut().zip(v.iter_mut()).zip(g.iter()) {
            *v = momentum * *v + g;
            *p -= lr * *v;
        }
    }
}

fn standardize(xs: &mut [f64]) {
    let n = xs.len() as f64;
    if n < 2.0 {
        return;
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    xs.iter_mut().for_each(|x| {
        *x -= mean;
        if sd > 1e-12 {
            *x /= sd;
        }
    });
}

/// GAE advantages per head against the target critic, plus λ-return
/// targets A + V'.
pub struct WindowTargets {
    pub advantages: [Option<Vec<f64>>; 3],
    pub returns: [Option<Vec<f64>>; 3],
}

pub fn window_targets(
    policy: &Policy,
    rewards: [&[f64]; 3],
    values: &[HeadValues],
    gamma: f64,
    lambda: f64,
) -> Result<WindowTargets, RunError> {
    let mut advantages: [Option<Vec<f64>>; 3] = [None, None, None];
    let mut returns: [Option<Vec<f64>>; 3] = [None, None, None];
    for h in 0..3 {
        if !policy.variant.heads()[h] {
            continue;
        }
        let v: Vec<f64> = values.iter().map(|x| x.get(h).expect("head present")).collect();
        let a = gae(rewards[h], &v, 0.0, gamma, lambda)?;
        returns[h] = Some(a.iter().zip(&v).map(|(a, v)| a + v).collect());
        advantages[h] = Some(a);
    }
    Ok(WindowTargets { advantages, returns })
}

impl PpoTrainer {
    pub fn new(cfg: &LearningConfig, policy: &Policy) -> Self {
        Self {
            cfg: cfg.clone(),
            actor_velocity: policy.actor.zeros_like(),
            critic_velocity: policy.critic.zeros_like(),
            windows: 0,
        }
    }

    pub fn windows(&self) -> usize {
        self.windows
    }

    /// One update over the buffer's current window. Diagnostics number
    /// updates by the windows processed so far.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        policy: &mut Policy,
        buffer: &TrajectoryBuffer,
        rng: &mut R,
    ) -> Result<UpdateStats, RunError> {
        let window = buffer.window()?;
        let samples: Vec<_> = window.iter().map(|r| r.sample().expect("complete record")).collect();
        let values: Vec<HeadValues> = samples
            .iter()
            .map(|s| policy.values(&policy.target, &s.xu, &s.xd))
            .collect();
        let r_u: Vec<f64> = window.iter().map(|r| r.ul.reward).collect();
        let r_d: Vec<f64> = window.iter().map(|r| r.dl.as_ref().unwrap().reward).collect();
        let r_g: Vec<f64> = window.iter().map(|r| r.global_reward.unwrap()).collect();
        let wt = window_targets(policy, [&r_u, &r_d, &r_g], &values, self.cfg.discount, self.cfg.gae_lambda)?;

        let n = samples.len();
        let mut adv_u = Vec::with_capacity(n);
        let mut adv_d = Vec::with_capacity(n);
        for t in 0..n {
            let get = |h: usize| wt.advantages[h].as_ref().map(|a| a[t]);
            let (u, d) = effective_advantages(policy.variant, get(0), get(1), get(2))?;
            adv_u.push(u);
            adv_d.push(d);
        }
        if self.cfg.normalize_advantages {
            standardize(&mut adv_u);
            standardize(&mut adv_d);
        }
        let targets: Vec<SampleTargets> = (0..n)
            .map(|t| {
                let get = |h: usize| wt.returns[h].as_ref().map(|r| r[t]);
                SampleTargets {
                    adv_u: adv_u[t],
                    adv_d: adv_d[t],
                    value: HeadValues {
                        u: get(0),
                        d: get(1),
                        g: get(2),
                    },
                }
            })
            .collect();
        let update = self.windows;
        check_finite("advantage", update, adv_u.iter().chain(&adv_d))?;

        let mut stats = UpdateStats::default();
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..self.cfg.epochs {
            order.shuffle(rng);
            for chunk in order.chunks(self.cfg.minibatch) {
                let batch: Vec<_> = chunk.iter().map(|&i| (&samples[i], targets[i])).collect();
                let (loss, mut ga, mut gc) = policy.loss_and_grad(&batch);
                if !loss.total().is_finite() {
                    return Err(RunError::NonFinite {
                        what: "loss",
                        update,
                        detail: format!("{loss:?}"),
                    });
                }
                check_finite("actor gradient", update, ga.tensors().iter().flat_map(|t| t.iter()))?;
                check_finite("critic gradient", update, gc.tensors().iter().flat_map(|t| t.iter()))?;
                self.apply(policy, &mut ga, &mut gc);
                stats.ul_loss += loss.ul;
                stats.dl_loss += loss.dl;
                stats.critic_loss += loss.critic;
                stats.minibatches += 1;
            }
        }
        if stats.minibatches > 0 {
            let k = stats.minibatches as f64;
            stats.ul_loss /= k;
            stats.dl_loss /= k;
            stats.critic_loss /= k;
        }
        self.windows += 1;
        if self.windows % self.cfg.target_sync == 0 {
            policy.sync_target();
        }
        Ok(stats)
    }

    /// Clip the UL actor, DL actor and critic gradients separately, then
    /// take one momentum step on each.
    fn apply(&mut self, policy: &mut Policy, ga: &mut ActorParams, gc: &mut CriticParams) {
        let max = self.cfg.max_grad_norm;
        let (lr, mom) = (self.cfg.learning_rate, self.cfg.momentum);
        {
            let [ue, uh, de, dh, ls] = ga.tensors_mut();
            clip_group(&mut [ue, uh], max);
            clip_group(&mut [de, dh, ls], max);
        }
        clip_group(&mut gc.tensors_mut(), max);
        sgd(
            &mut policy.actor.tensors_mut(),
            &mut self.actor_velocity.tensors_mut(),
            &ga.tensors(),
            lr,
            mom,
        );
        sgd(
            &mut policy.critic.tensors_mut(),
            &mut self.critic_velocity.tensors_mut(),
            &gc.tensors(),
            lr,
            mom,
        );
        policy.clamp_log_std();
    }
}

fn check_finite<'a>(what: &'static str, update: usize, mut xs: impl Iterator<Item = &'a f64>) -> Result<(), RunError> {
    match xs.position(|x| !x.is_finite()) {
        Some(i) => Err(RunError::NonFinite {
            what,
            update,
            detail: format!("entry {i} is not finite"),
        }),
        None => Ok(()),
    }
}
