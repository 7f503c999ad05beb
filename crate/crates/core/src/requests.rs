//! Markov request chain with Zipf popularity and per-request task sampling.
//!
//! State 0 means no request; states 1..=F are task ids.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{RequestConfig, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionParams {
    /// Probability R of no request.
    pub no_request: f64,
    pub zipf: f64,
    pub neighborhood: usize,
    pub num_tasks: usize,
}

impl From<&RequestConfig> for TransitionParams {
    fn from(r: &RequestConfig) -> Self {
        Self {
            no_request: r.no_request_prob,
            zipf: r.zipf,
            neighborhood: r.neighborhood,
            num_tasks: r.num_tasks,
        }
    }
}

/// Row-stochastic (F+1)×(F+1) transition matrix.
///
/// From a task f the chain goes idle with probability R and otherwise moves
/// uniformly to one of the N successors (f+q) mod (F+1). A successor that
/// wraps onto 0 gives its share to the other successors. From idle it stays
/// idle with probability R and otherwise draws a Zipf-distributed task.
pub fn transition_matrix(p: &TransitionParams) -> Vec<Vec<f64>> {
    let f = p.num_tasks;
    let n = f + 1;
    let r = p.no_request;
    let mut t = vec![vec![0.0; n]; n];

    let weights: Vec<f64> = (1..=f).map(|j| (j as f64).powf(-p.zipf)).collect();
    let norm: f64 = weights.iter().sum();
    t[0][0] = r;
    for j in 1..=f {
        t[0][j] = (1.0 - r) * weights[j - 1] / norm;
    }

    for i in 1..=f {
        t[i][0] = r;
        let targets: Vec<usize> = (1..=p.neighborhood)
            .map(|q| (i + q) % n)
            .filter(|&j| j != 0)
            .collect();
        if targets.is_empty() {
            t[i][0] += 1.0 - r;
        } else {
            let share = (1.0 - r) / targets.len() as f64;
            for j in targets {
                t[i][j] += share;
            }
        }
    }
    t
}

/// Per-user request states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestState(pub Vec<usize>);

impl RequestState {
    pub fn idle(num_users: usize) -> Self {
        Self(vec![0; num_users])
    }

    pub fn is_active(&self, m: usize) -> bool {
        self.0[m] != 0
    }
}

/// Transition matrix with cumulative rows for sampling.
#[derive(Debug, Clone)]
pub struct RequestChain {
    pub matrix: Vec<Vec<f64>>,
    cumulative: Vec<Vec<f64>>,
}

impl RequestChain {
    pub fn new(matrix: Vec<Vec<f64>>) -> Self {
        let cumulative = matrix
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { matrix, cumulative }
    }

    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self::new(transition_matrix(&TransitionParams::from(&cfg.requests)))
    }

    pub fn next<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let row = &self.cumulative[from];
        row.iter()
            .position(|&c| u < c)
            .unwrap_or_else(|| {
                // Rounding left the last partial sum below 1; take the last
                // state with positive mass.
                self.matrix[from].iter().rposition(|&p| p > 0.0).unwrap_or(from)
            })
    }
}

/// Every user moves independently along its row.
pub fn step_requests<R: Rng + ?Sized>(
    state: &RequestState,
    chain: &RequestChain,
    rng: &mut R,
) -> RequestState {
    RequestState(state.0.iter().map(|&s| chain.next(s, rng)).collect())
}

/// One offloadable task: input bits, CPU cycles, latency bound, render slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub bits: f64,
    pub cycles: f64,
    pub latency_bound: f64,
    pub render_slope: f64,
}

impl TaskSpec {
    pub fn rendered_bits(&self) -> f64 {
        crate::channel::render_size(self.bits, self.render_slope)
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Uniform draws from the configured ranges. The task id does not change
/// the distribution; it only has to be a real request.
pub fn sample_task<R: Rng + ?Sized>(task: usize, cfg: &ScenarioConfig, rng: &mut R) -> TaskSpec {
    debug_assert!(task != 0, "idle users have no task");
    let [q_lo, q_hi] = cfg.tasks.render_slope_range;
    TaskSpec {
        bits: uniform(rng, cfg.task_size_range_bits()),
        cycles: uniform(rng, cfg.task_cycles_range()),
        latency_bound: uniform(rng, cfg.latency_bound_range_s()),
        render_slope: uniform(rng, (q_lo, q_hi)),
    }
}
