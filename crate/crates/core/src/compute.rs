//! Execution latencies under digital-twin rate discrepancy, FIFO queueing,
//! INC-to-MEC forwarding, end-to-end latency, utility and cost metrics.

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{LinkDirection, ModelError};

/// A node's twin-estimated rate f and its deviation f~ from the true rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtEstimate {
    pub est_rate: f64,
    pub discrepancy: f64,
}

impl DtEstimate {
    pub fn new(est_rate: f64, discrepancy: f64) -> Result<Self, ModelError> {
        if !(discrepancy >= 0.0 && discrepancy < est_rate) {
            return Err(ModelError::InvalidDtEstimate {
                rate: est_rate,
                discrepancy,
            });
        }
        Ok(Self {
            est_rate,
            discrepancy,
        })
    }

    /// f~ = δ f.
    pub fn from_fraction(est_rate: f64, delta: f64) -> Result<Self, ModelError> {
        Self::new(est_rate, delta * est_rate)
    }

    pub fn actual_rate(&self) -> f64 {
        self.est_rate - self.discrepancy
    }

    fn check(&self) -> Result<(), ModelError> {
        Self::new(self.est_rate, self.discrepancy).map(|_| ())
    }
}

/// Twin estimate ℵC/f plus the gap ℵC f~ / (f (f - f~)), i.e. ℵC / (f - f~).
pub fn mec_exec_latency(aleph: f64, cycles: f64, dt: DtEstimate) -> Result<f64, ModelError> {
    dt.check()?;
    Ok(aleph * cycles / dt.actual_rate())
}

/// λC / (β (f - f~)): the share β scales the INC's rate.
pub fn cn_exec_latency(
    lambda: f64,
    cycles: f64,
    dt: DtEstimate,
    beta: f64,
) -> Result<f64, ModelError> {
    dt.check()?;
    if lambda <= 0.0 {
        return Ok(0.0);
    }
    if !(beta > 0.0) {
        return Err(ModelError::StarvedShare { lambda });
    }
    Ok(lambda * cycles / (beta * dt.actual_rate()))
}

/// Work already enqueued at each node when a task arrives, in cycles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeLoads {
    pub cn_cycles: Vec<f64>,
    pub mec_cycles: f64,
}

/// Waiting times at the INC nodes and the MEC, in seconds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueueDelays {
    pub cn: Vec<f64>,
    pub mec: f64,
}

/// T^fw = wired_base + forwarded_bits / backhaul.
pub fn forward_delay(forwarded_bits: f64, wired_base: f64, backhaul: f64) -> f64 {
    wired_base + forwarded_bits / backhaul
}

/// Static compute-side parameters of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeModel {
    pub mec: DtEstimate,
    pub inc: Vec<DtEstimate>,
    pub wired_base: f64,
    pub backhaul: f64,
}

impl ComputeModel {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, ModelError> {
        let delta = cfg.compute.dt_discrepancy;
        Ok(Self {
            mec: DtEstimate::from_fraction(cfg.mec_rate(), delta)?,
            inc: (0..cfg.num_inc())
                .map(|k| DtEstimate::from_fraction(cfg.inc_rate(k), delta))
                .collect::<Result<_, _>>()?,
            wired_base: cfg.compute.wired_base_s,
            backhaul: cfg.compute.backhaul_bps,
        })
    }

    /// Queue delays implied by `loads`, served at the nominal node rates.
    /// Forwarding delays for `forwarded_bits[k]` bits leaving INC k are
    /// returned alongside.
    pub fn queueing_and_forwarding(
        &self,
        loads: &NodeLoads,
        forwarded_bits: &[f64],
    ) -> (Vec<f64>, Vec<f64>, f64) {
        let cn = loads
            .cn_cycles
            .iter()
            .zip(&self.inc)
            .map(|(c, dt)| c / dt.est_rate)
            .collect();
        let fw = forwarded_bits
            .iter()
            .map(|&b| forward_delay(b, self.wired_base, self.backhaul))
            .collect();
        (cn, fw, loads.mec_cycles / self.mec.est_rate)
    }

    /// Latency components for one task. `channel` 0 is MEC-only; k ≥ 1
    /// uploads the whole task to INC k-1, which runs the λ fraction and
    /// forwards the rest to the MEC. `dl_tx` is supplied by the caller.
    pub fn e2e_latency(&self, path: &TaskPath, queues: &UserQueues) -> Result<LatencyBreakdown, ModelError> {
        if path.bits > 0.0 && !(path.ul_rate > 0.0) {
            return Err(ModelError::InfeasibleLink {
                direction: LinkDirection::Uplink,
                bits: path.bits,
            });
        }
        let ul_tx = if path.bits > 0.0 { path.bits / path.ul_rate } else { 0.0 };
        let mut b = LatencyBreakdown {
            ul_tx,
            dl_tx: path.dl_tx,
            mec_queue: queues.mec,
            ..LatencyBreakdown::default()
        };
        if path.channel == 0 {
            b.mec_exec = mec_exec_latency(1.0, path.cycles, self.mec)?;
        } else {
            let inc = self.inc[path.channel - 1];
            let aleph = 1.0 - path.lambda;
            b.cn_exec = cn_exec_latency(path.lambda, path.cycles, inc, path.beta)?;
            b.cn_queue = queues.cn;
            b.forward = forward_delay(aleph * path.bits, self.wired_base, self.backhaul);
            b.mec_exec = mec_exec_latency(aleph, path.cycles, self.mec)?;
        }
        b.total = b.mode_total(path.channel);
        Ok(b)
    }
}

/// Everything about one user's task that the latency law needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskPath {
    pub channel: usize,
    pub lambda: f64,
    pub beta: f64,
    pub bits: f64,
    pub cycles: f64,
    pub ul_rate: f64,
    pub dl_tx: f64,
}

/// Queue delays seen by one user at its INC (if any) and at the MEC.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UserQueues {
    pub cn: f64,
    pub mec: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    pub ul_tx: f64,
    pub cn_exec: f64,
    pub cn_queue: f64,
    pub forward: f64,
    pub mec_exec: f64,
    pub mec_queue: f64,
    pub dl_tx: f64,
    pub total: f64,
}

impl LatencyBreakdown {
    /// MEC-only: T^O + Q^mec. Collaborative: T^C + Q^cn + T^fw + Q^mec.
    pub fn mode_total(&self, channel: usize) -> f64 {
        self.pre_downlink(channel) + self.dl_tx
    }

    /// The total without the downlink term, which every mode shares.
    pub fn pre_downlink(&self, channel: usize) -> f64 {
        if channel == 0 {
            self.ul_tx + self.mec_exec + self.mec_queue
        } else {
            self.ul_tx + self.cn_exec + self.cn_queue + self.forward + self.mec_exec + self.mec_queue
        }
    }

    pub fn components(&self) -> [f64; 7] {
        [
            self.ul_tx,
            self.cn_exec,
            self.cn_queue,
            self.forward,
            self.mec_exec,
            self.mec_queue,
            self.dl_tx,
        ]
    }
}

/// U = g_t (T~^O - T^e2e) - w E'.
pub fn user_utility(reference: f64, latency: f64, energy: f64, gain: f64, energy_weight: f64) -> f64 {
    gain * (reference - latency) - energy_weight * energy
}

/// C = Σ_m (T^e2e_m + E'_m).
pub fn operator_cost(latencies: &[f64], energies: &[f64]) -> f64 {
    latencies.iter().zip(energies).map(|(t, e)| t + e).sum()
}

/// PG = C_ref / C_alg for lower-is-better costs, so PG > 1 favors the policy.
pub fn performance_gain(cost_ref: f64, cost_alg: f64) -> Result<f64, ModelError> {
    if cost_alg == 0.0 {
        return Err(ModelError::ZeroCost);
    }
    Ok(cost_ref / cost_alg)
}

/// Latency charged in PG costs: a task past its bound counts at the bound.
pub fn accounted_latency(total: f64, bound: f64) -> f64 {
    if total.is_finite() && total <= bound {
        total
    } else {
        bound
    }
}

/// Per-user cost w_l T/T_non + w_e E/E_non against the MEC-only normalizers.
pub fn pg_cost(latency: f64, t_non: f64, energy: f64, e_non: f64, weights: [f64; 2]) -> f64 {
    let lat = if t_non > 0.0 { latency / t_non } else { 0.0 };
    let en = if e_non > 0.0 { energy / e_non } else { 0.0 };
    weights[0] * lat + weights[1] * en
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> ComputeModel {
        ComputeModel::from_config(&ScenarioConfig::default()).unwrap()
    }

    #[test]
    fn mec_closed_form() {
        let dt = DtEstimate::from_fraction(30e9, 0.3).unwrap();
        let t = mec_exec_latency(1.0, 1.5e9, dt).unwrap();
        assert!((t - 1.5e9 / 21e9).abs() < 1e-15);
        let ideal = DtEstimate::new(30e9, 0.0).unwrap();
        assert_eq!(mec_exec_latency(0.5, 1.5e9, ideal).unwrap(), 0.5 * 1.5e9 / 30e9);
        assert_eq!(mec_exec_latency(0.0, 1.5e9, dt).unwrap(), 0.0);
        let twin = 1.5e9 / 30e9;
        let gap = 1.5e9 * 9e9 / (30e9 * 21e9);
        assert!((t - (twin + gap)).abs() < 1e-15);
    }

    #[test]
    fn invalid_twin_estimates() {
        assert!(DtEstimate::from_fraction(30e9, 1.0).is_err());
        assert!(DtEstimate::new(1.0, -0.1).is_err());
        let bad = DtEstimate {
            est_rate: 1.0,
            discrepancy: 2.0,
        };
        assert!(mec_exec_latency(1.0, 1.0, bad).is_err());
    }

    #[test]
    fn cn_latency() {
        let dt = DtEstimate::from_fraction(5e9, 0.3).unwrap();
        let t = cn_exec_latency(0.4, 1e9, dt, 1.0).unwrap();
        assert!((t - 0.4e9 / 3.5e9).abs() < 1e-15);
        assert_eq!(cn_exec_latency(0.0, 1e9, dt, 0.0).unwrap(), 0.0);
        let half = cn_exec_latency(0.4, 1e9, dt, 0.5).unwrap();
        assert!((half - 2.0 * t).abs() < 1e-15);
        assert_eq!(
            cn_exec_latency(0.4, 1e9, dt, 0.0),
            Err(ModelError::StarvedShare { lambda: 0.4 })
        );
    }

    #[test]
    fn queues_and_forwarding() {
        let m = model();
        let (cn, fw, mec) = m.queueing_and_forwarding(
            &NodeLoads {
                cn_cycles: vec![0.0; 4],
                mec_cycles: 2e9,
            },
            &[0.0, 1e6],
        );
        assert_eq!(cn, vec![0.0; 4]);
        assert!((mec - 2.0 / 30.0).abs() < 1e-15);
        assert_eq!(fw[0], 1e-3);
        assert!((fw[1] - 2e-3).abs() < 1e-15);
    }

    fn path(channel: usize, lambda: f64) -> TaskPath {
        TaskPath {
            channel,
            lambda,
            beta: 1.0,
            bits: 2e6,
            cycles: 3e9,
            ul_rate: 4e7,
            dl_tx: 0.02,
        }
    }

    #[test]
    fn mec_only_path_with_empty_queues() {
        let b = model().e2e_latency(&path(0, 0.7), &UserQueues::default()).unwrap();
        assert_eq!(b.cn_exec + b.cn_queue + b.forward, 0.0);
        assert_eq!(b.total, b.ul_tx + b.mec_exec + b.dl_tx);
    }

    #[test]
    fn collaborative_without_inc_work() {
        let q = UserQueues { cn: 0.01, mec: 0.02 };
        let b = model().e2e_latency(&path(2, 0.0), &q).unwrap();
        assert_eq!(b.cn_exec, 0.0);
        let want = b.ul_tx + b.forward + b.mec_exec + b.dl_tx + b.cn_queue + b.mec_queue;
        assert!((b.total - want).abs() < 1e-15);
        assert!((b.forward - (1e-3 + 2e6 / 1e9)).abs() < 1e-15);
    }

    #[test]
    fn zero_uplink_rate_is_infeasible() {
        let mut p = path(1, 0.5);
        p.ul_rate = 0.0;
        assert!(matches!(
            model().e2e_latency(&p, &UserQueues::default()),
            Err(ModelError::InfeasibleLink { .. })
        ));
    }

    #[test]
    fn utility_and_costs() {
        assert!((user_utility(0.10, 0.06, 0.02, 1.0, 0.5) - 0.03).abs() < 1e-15);
        assert_eq!(user_utility(0.1, 0.1, 0.02, 1.0, 0.5), -0.01);
        assert!((operator_cost(&[0.1, 0.2], &[1.0, 2.0]) - 3.3).abs() < 1e-15);
        assert_eq!(operator_cost(&[], &[]), 0.0);
        assert_eq!(performance_gain(2.5, 2.5).unwrap(), 1.0);
        assert_eq!(performance_gain(1.0, 0.0), Err(ModelError::ZeroCost));
        assert_eq!(accounted_latency(f64::INFINITY, 0.01), 0.01);
        assert_eq!(accounted_latency(0.004, 0.01), 0.004);
    }
}
