//! Actor and critic networks, their forward passes, action sampling and
//! the exact gradients of the clipped surrogate and critic losses.
//!
//! Every per-user head sees `[e_m; c]`: the user's own encoding and the
//! mean-pooled encoding of all users, so outputs are permutation
//! equivariant and value heads permutation invariant.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::nn::{Mlp, Trace};
use super::{critic_head_weights, CriticVariant, Features};
use crate::config::{LearningConfig, LOG_STD_MAX, LOG_STD_MIN};
use crate::ofmo::{knapsack_ofmo, OfmoProblem};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq)]
pub struct Shapes {
    pub encoder: Mlp,
    pub head: Mlp,
    pub value_single: Mlp,
    pub value_joint: Mlp,
}

impl Shapes {
    pub fn from_config(l: &LearningConfig) -> Self {
        let w = l.hidden_width;
        let hidden = vec![w; l.hidden_layers];
        let with = |first: usize, out: Option<usize>| {
            let mut s = vec![first];
            s.extend(&hidden);
            if let Some(o) = out {
                s.push(o);
            }
            s
        };
        Self {
            encoder: Mlp::new(with(3, None), true),
            head: Mlp::new(with(2 * w, Some(1)), false),
            value_single: Mlp::new(with(w, Some(1)), false),
            value_joint: Mlp::new(with(2 * w, Some(1)), false),
        }
    }

    pub fn width(&self) -> usize {
        self.encoder.output_size()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActorParams {
    pub ul_enc: Vec<f64>,
    pub ul_head: Vec<f64>,
    pub dl_enc: Vec<f64>,
    pub dl_head: Vec<f64>,
    /// One entry: the shared log standard deviation of the DL Gaussian.
    pub log_std: Vec<f64>,
}

/// Absent heads are empty vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticParams {
    pub u_enc: Vec<f64>,
    pub d_enc: Vec<f64>,
    pub vu: Vec<f64>,
    pub vd: Vec<f64>,
    pub vg: Vec<f64>,
}

impl ActorParams {
    pub fn tensors(&self) -> [&Vec<f64>; 5] {
        [&self.ul_enc, &self.ul_head, &self.dl_enc, &self.dl_head, &self.log_std]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [&mut self.ul_enc, &mut self.ul_head, &mut self.dl_enc, &mut self.dl_head, &mut self.log_std]
    }

    pub fn zeros_like(&self) -> Self {
        let z = |v: &Vec<f64>| vec![0.0; v.len()];
        Self {
            ul_enc: z(&self.ul_enc),
            ul_head: z(&self.ul_head),
            dl_enc: z(&self.dl_enc),
            dl_head: z(&self.dl_head),
            log_std: z(&self.log_std),
        }
    }
}

impl CriticParams {
    pub fn tensors(&self) -> [&Vec<f64>; 5] {
        [&self.u_enc, &self.d_enc, &self.vu, &self.vd, &self.vg]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [&mut self.u_enc, &mut self.d_enc, &mut self.vu, &mut self.vd, &mut self.vg]
    }

    pub fn zeros_like(&self) -> Self {
        let z = |v: &Vec<f64>| vec![0.0; v.len()];
        Self {
            u_enc: z(&self.u_enc),
            d_enc: z(&self.d_enc),
            vu: z(&self.vu),
            vd: z(&self.vd),
            vg: z(&self.vg),
        }
    }
}

/// Mean-pooled encodings of all users.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub traces: Vec<Trace>,
    pub pooled: Vec<f64>,
}

/// Value-head outputs; `None` for heads the variant lacks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HeadValues {
    pub u: Option<f64>,
    pub d: Option<f64>,
    pub g: Option<f64>,
}

impl HeadValues {
    pub fn get(&self, head: usize) -> Option<f64> {
        [self.u, self.d, self.g][head]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UlAction {
    pub scores: Vec<f64>,
    pub offload: Vec<bool>,
    /// Per-user Bernoulli log-likelihood of `offload`.
    pub log_prob: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlAction {
    pub means: Vec<f64>,
    /// Pre-clip Gaussian samples.
    pub samples: Vec<f64>,
    pub powers: Vec<f64>,
    pub log_prob: Vec<f64>,
}

/// One slot's data as the surrogate sees it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub xu: Vec<Features>,
    pub xd: Vec<Features>,
    pub offload: Vec<bool>,
    pub ul_log_prob: Vec<f64>,
    pub dl_sample: Vec<f64>,
    pub dl_log_prob: Vec<f64>,
}

/// Per-sample targets for the surrogate and critic losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleTargets {
    pub adv_u: f64,
    pub adv_d: f64,
    pub value: HeadValues,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossParts {
    pub ul: f64,
    pub dl: f64,
    pub critic: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.ul + self.dl + self.critic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub shapes: Shapes,
    pub variant: CriticVariant,
    pub actor: ActorParams,
    pub critic: CriticParams,
    pub target: CriticParams,
    pub ul_temperature: f64,
    pub clip: f64,
    pub critic_weights: [f64; 3],
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln σ(x) and ln(1 - σ(x)) without overflow.
fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

/// (loss, dloss/dlogp) of -min(r A, clip(r) A) for one action.
fn clipped_term(log_new: f64, log_old: f64, adv: f64, eps: f64) -> (f64, f64) {
    let r = (log_new - log_old).exp();
    let unclipped = r * adv;
    let clipped = r.clamp(1.0 - eps, 1.0 + eps) * adv;
    if unclipped <= clipped {
        (-unclipped, -unclipped)
    } else {
        (-clipped, 0.0)
    }
}

impl Policy {
    pub fn new<R: Rng + ?Sized>(l: &LearningConfig, variant: CriticVariant, rng: &mut R) -> Self {
        let shapes = Shapes::from_config(l);
        let actor = ActorParams {
            ul_enc: shapes.encoder.init(rng),
            ul_head: shapes.head.init(rng),
            dl_enc: shapes.encoder.init(rng),
            dl_head: shapes.head.init(rng),
            log_std: vec![l.init_log_std],
        };
        let [hu, hd, hg] = variant.heads();
        let critic = CriticParams {
            u_enc: shapes.encoder.init(rng),
            d_enc: shapes.encoder.init(rng),
            vu: if hu { shapes.value_single.init(rng) } else { Vec::new() },
            vd: if hd { shapes.value_single.init(rng) } else { Vec::new() },
            vg: if hg { shapes.value_joint.init(rng) } else { Vec::new() },
        };
        Self {
            shapes,
            variant,
            target: critic.clone(),
            actor,
            critic,
            ul_temperature: l.ul_temperature,
            clip: l.clip,
            critic_weights: l.critic_weights,
        }
    }

    pub fn sync_target(&mut self) {
        self.target = self.critic.clone();
    }

    pub fn std(&self) -> f64 {
        self.actor.log_std[0].exp()
    }

    pub fn clamp_log_std(&mut self) {
        let v = &mut self.actor.log_std[0];
        *v = v.clamp(LOG_STD_MIN, LOG_STD_MAX);
    }

    pub fn encode(&self, enc: &[f64], xs: &[Features]) -> Encoded {
        let net = &self.shapes.encoder;
        let traces: Vec<Trace> = xs
            .iter()
            .map(|x| net.forward(enc, x).expect("encoder shape"))
            .collect();
        let w = net.output_size();
        let mut pooled = vec![0.0; w];
        for t in &traces {
            pooled.iter_mut().zip(t.output()).for_each(|(p, v)| *p += v);
        }
        let n = traces.len().max(1) as f64;
        pooled.iter_mut().for_each(|p| *p /= n);
        Encoded { traces, pooled }
    }

    fn heads_forward(&self, head: &[f64], e: &Encoded) -> Vec<Trace> {
        e.traces
            .iter()
            .map(|t| {
                self.shapes
                    .head
                    .forward(head, &concat(t.output(), &e.pooled))
                    .expect("head shape")
            })
            .collect()
    }

    /// Backpropagate per-user head output gradients into encoder and head.
    fn heads_backward(
        &self,
        enc: &[f64],
        head: &[f64],
        e: &Encoded,
        heads: &[Trace],
        d_out: &[f64],
        g_enc: &mut [f64],
        g_head: &mut [f64],
    ) {
        let w = self.shapes.width();
        let mut d_each: Vec<Vec<f64>> = Vec::with_capacity(heads.len());
        let mut d_pooled = vec![0.0; w];
        for (t, &d) in heads.iter().zip(d_out) {
            let din = self
                .shapes
                .head
                .backward(head, t, &[d], g_head)
                .expect("head shape");
            d_pooled.iter_mut().zip(&din[w..]).for_each(|(a, b)| *a += b);
            d_each.push(din[..w].to_vec());
        }
        self.encoder_backward(enc, e, d_each, &d_pooled, g_enc);
    }

    fn encoder_backward(&self, enc: &[f64], e: &Encoded, mut d_each: Vec<Vec<f64>>, d_pooled: &[f64], g_enc: &mut [f64]) {
        let n = e.traces.len().max(1) as f64;
        for (t, d) in e.traces.iter().zip(d_each.iter_mut()) {
            d.iter_mut().zip(d_pooled).for_each(|(a, b)| *a += b / n);
            self.shapes
                .encoder
                .backward(enc, t, d, g_enc)
                .expect("encoder shape");
        }
    }

    /// tanh-bounded OFMO preference scores, one per user.
    pub fn ul_scores(&self, xu: &[Features]) -> Vec<f64> {
        let e = self.encode(&self.actor.ul_enc, xu);
        self.heads_forward(&self.actor.ul_head, &e)
            .iter()
            .map(|t| t.output()[0].tanh())
            .collect()
    }

    /// Pick OFMO by knapsack over the scores.
    pub fn ul_act(&self, xu: &[Features], capacity: usize) -> UlAction {
        let scores = self.ul_scores(xu);
        let offload = knapsack_ofmo(&OfmoProblem {
            scores: scores.clone(),
            capacity,
        });
        let log_prob = scores
            .iter()
            .zip(&offload)
            .map(|(&s, &b)| self.bernoulli_log_prob(s, b))
            .collect();
        UlAction {
            scores,
            offload,
            log_prob,
        }
    }

    fn bernoulli_log_prob(&self, score: f64, b: bool) -> f64 {
        let z = score / self.ul_temperature;
        if b {
            log_sigmoid(z)
        } else {
            log_sigmoid(-z)
        }
    }

    /// Gaussian means in [0, 1], one per user.
    pub fn dl_means(&self, xd: &[Features]) -> Vec<f64> {
        let e = self.encode(&self.actor.dl_enc, xd);
        self.heads_forward(&self.actor.dl_head, &e)
            .iter()
            .map(|t| sigmoid(t.output()[0]))
            .collect()
    }

    fn gaussian_log_prob(&self, x: f64, mean: f64) -> f64 {
        let ls = self.actor.log_std[0];
        let z = (x - mean) / ls.exp();
        -0.5 * z * z - ls - LN_SQRT_2PI
    }

    /// Sample a ~ N(μ, σ²), clip to [0, 1] and map to [p_min, p_max].
    /// With `rng` absent the mean is used.
    pub fn dl_act<R: Rng + ?Sized>(&self, xd: &[Features], range: (f64, f64), rng: Option<&mut R>) -> DlAction {
        let means = self.dl_means(xd);
        let sigma = self.std();
        let samples: Vec<f64> = match rng {
            Some(rng) => means
                .iter()
                .map(|&mu| {
                    let n: f64 = StandardNormal.sample(rng);
                    mu + sigma * n
                })
                .collect(),
            None => means.clone(),
        };
        let powers = samples.iter().map(|&a| action_to_power(a, range)).collect();
        let log_prob = samples
            .iter()
            .zip(&means)
            .map(|(&x, &mu)| self.gaussian_log_prob(x, mu))
            .collect();
        DlAction {
            means,
            samples,
            powers,
            log_prob,
        }
    }

    /// Value heads evaluated with `critic` (the live or the target net).
    pub fn values(&self, critic: &CriticParams, xu: &[Features], xd: &[Features]) -> HeadValues {
        let cu = self.encode(&critic.u_enc, xu).pooled;
        let cd = self.encode(&critic.d_enc, xd).pooled;
        let single = |p: &[f64], c: &[f64]| {
            (!p.is_empty()).then(|| self.shapes.value_single.forward(p, c).expect("value shape").output()[0])
        };
        HeadValues {
            u: single(&critic.vu, &cu),
            d: single(&critic.vd, &cd),
            g: (!critic.vg.is_empty()).then(|| {
                self.shapes
                    .value_joint
                    .forward(&critic.vg, &concat(&cu, &cd))
                    .expect("value shape")
                    .output()[0]
            }),
        }
    }

    /// Mean clipped surrogate over users and samples for both actors plus
    /// the variant's weighted squared value error, with gradients.
    pub fn loss_and_grad(&self, batch: &[(&Sample, SampleTargets)]) -> (LossParts, ActorParams, CriticParams) {
        let mut ga = self.actor.zeros_like();
        let mut gc = self.critic.zeros_like();
        let mut loss = LossParts::default();
        let b = batch.len().max(1) as f64;
        let eps = self.clip;
        let tau = self.ul_temperature;
        let hw = critic_head_weights(self.variant, self.critic_weights);

        for (s, tg) in batch {
            let m = s.xu.len().max(1) as f64;

            // UL actor: Bernoulli(σ(O/τ)) on the knapsack outcome.
            let e = self.encode(&self.actor.ul_enc, &s.xu);
            let heads = self.heads_forward(&self.actor.ul_head, &e);
            let mut d_out = Vec::with_capacity(heads.len());
            for (i, t) in heads.iter().enumerate() {
                let score = t.output()[0].tanh();
                let bi = s.offload[i];
                let lp = self.bernoulli_log_prob(score, bi);
                let (l, dl_dlp) = clipped_term(lp, s.ul_log_prob[i], tg.adv_u, eps);
                loss.ul += l / (b * m);
                let p = sigmoid(score / tau);
                let dlp_dscore = ((bi as u8 as f64) - p) / tau;
                let dscore_dz = 1.0 - score * score;
                d_out.push(dl_dlp * dlp_dscore * dscore_dz / (b * m));
            }
            self.heads_backward(&self.actor.ul_enc, &self.actor.ul_head, &e, &heads, &d_out, &mut ga.ul_enc, &mut ga.ul_head);

            // DL actor: Gaussian on the pre-clip sample.
            let e = self.encode(&self.actor.dl_enc, &s.xd);
            let heads = self.heads_forward(&self.actor.dl_head, &e);
            let sigma = self.std();
            let mut d_out = Vec::with_capacity(heads.len());
            for (i, t) in heads.iter().enumerate() {
                let mu = sigmoid(t.output()[0]);
                let x = s.dl_sample[i];
                let lp = self.gaussian_log_prob(x, mu);
                let (l, dl_dlp) = clipped_term(lp, s.dl_log_prob[i], tg.adv_d, eps);
                loss.dl += l / (b * m);
                let z = (x - mu) / sigma;
                let dlp_dmu = z / sigma;
                ga.log_std[0] += dl_dlp * (z * z - 1.0) / (b * m);
                d_out.push(dl_dlp * dlp_dmu * mu * (1.0 - mu) / (b * m));
            }
            self.heads_backward(&self.actor.dl_enc, &self.actor.dl_head, &e, &heads, &d_out, &mut ga.dl_enc, &mut ga.dl_head);

            // Critic heads.
            let c = &self.critic;
            let eu = self.encode(&c.u_enc, &s.xu);
            let ed = self.encode(&c.d_enc, &s.xd);
            let w = self.shapes.width();
            let mut d_cu = vec![0.0; w];
            let mut d_cd = vec![0.0; w];
            if let (false, Some(t)) = (c.vu.is_empty(), tg.value.u) {
                let tr = self.shapes.value_single.forward(&c.vu, &eu.pooled).expect("value shape");
                let err = tr.output()[0] - t;
                loss.critic += hw[0] * err * err / b;
                let din = self.shapes.value_single.backward(&c.vu, &tr, &[2.0 * hw[0] * err / b], &mut gc.vu).expect("value shape");
                d_cu.iter_mut().zip(&din).for_each(|(a, b)| *a += b);
            }
            if let (false, Some(t)) = (c.vd.is_empty(), tg.value.d) {
                let tr = self.shapes.value_single.forward(&c.vd, &ed.pooled).expect("value shape");
                let err = tr.output()[0] - t;
                loss.critic += hw[1] * err * err / b;
                let din = self.shapes.value_single.backward(&c.vd, &tr, &[2.0 * hw[1] * err / b], &mut gc.vd).expect("value shape");
                d_cd.iter_mut().zip(&din).for_each(|(a, b)| *a += b);
            }
            if let (false, Some(t)) = (c.vg.is_empty(), tg.value.g) {
                let tr = self.shapes.value_joint.forward(&c.vg, &concat(&eu.pooled, &ed.pooled)).expect("value shape");
                let err = tr.output()[0] - t;
                loss.critic += hw[2] * err * err / b;
                let din = self.shapes.value_joint.backward(&c.vg, &tr, &[2.0 * hw[2] * err / b], &mut gc.vg).expect("value shape");
                d_cu.iter_mut().zip(&din[..w]).for_each(|(a, b)| *a += b);
                d_cd.iter_mut().zip(&din[w..]).for_each(|(a, b)| *a += b);
            }
            let zeros = vec![vec![0.0; w]; eu.traces.len()];
            self.encoder_backward(&c.u_enc, &eu, zeros.clone(), &d_cu, &mut gc.u_enc);
            self.encoder_backward(&c.d_enc, &ed, zeros, &d_cd, &mut gc.d_enc);
        }
        (loss, ga, gc)
    }
}

/// p' = p_min + clip(a, 0, 1) (p_max - p_min).
pub fn action_to_power(a: f64, (lo, hi): (f64, f64)) -> f64 {
    lo + a.clamp(0.0, 1.0) * (hi - lo)
}
