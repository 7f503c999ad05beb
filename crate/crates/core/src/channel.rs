//! Large-scale path loss, Rayleigh fading, uplink SINR, finite-blocklength
//! rates and the transmission latency and energy terms built on them.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use statrs::function::erf::erfc_inv;

use crate::config::{EnergyModel, ScenarioConfig};
use crate::error::{LinkDirection, ModelError};

/// PL(d) = -35.3 - 37.6 log10(d), in dB.
pub fn path_loss_db(d: f64) -> Result<f64, ModelError> {
    if !(d > 0.0) {
        return Err(ModelError::NonPositiveDistance(d));
    }
    Ok(-35.3 - 37.6 * d.log10())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Thermal noise power in watts over `bandwidth_hz` for a PSD in dBm/Hz.
pub fn noise_power_w(psd_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    db_to_linear(psd_dbm_hz - 30.0) * bandwidth_hz
}

/// Inverse of the Gaussian tail function Q.
pub fn q_inv(eps: f64) -> f64 {
    std::f64::consts::SQRT_2 * erfc_inv(2.0 * eps)
}

/// Per-slot channel state. Effective vectors are `sqrt(g) * small_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub positions: Vec<[f64; 2]>,
    pub gains: Vec<f64>,
    /// Uplink small-scale fading, one length-L column per user.
    pub ul_fading: Vec<Vec<Complex64>>,
    /// Downlink small-scale fading, drawn independently of the uplink.
    pub dl_fading: Vec<Vec<Complex64>>,
}

impl ChannelRealization {
    /// Build from explicit positions and fading; gains follow the path-loss law.
    pub fn from_parts(
        positions: Vec<[f64; 2]>,
        ap: [f64; 2],
        min_distance: f64,
        ul_fading: Vec<Vec<Complex64>>,
        dl_fading: Vec<Vec<Complex64>>,
    ) -> Self {
        let gains = positions
            .iter()
            .map(|p| {
                let d = ((p[0] - ap[0]).powi(2) + (p[1] - ap[1]).powi(2))
                    .sqrt()
                    .max(min_distance);
                db_to_linear(path_loss_db(d).expect("clamped distance is positive"))
            })
            .collect();
        Self {
            positions,
            gains,
            ul_fading,
            dl_fading,
        }
    }

    pub fn num_users(&self) -> usize {
        self.gains.len()
    }

    pub fn ul_vector(&self, m: usize) -> Vec<Complex64> {
        let a = self.gains[m].sqrt();
        self.ul_fading[m].iter().map(|h| h * a).collect()
    }

    pub fn ul_norm_sq(&self, m: usize) -> f64 {
        self.gains[m] * norm_sq(&self.ul_fading[m])
    }

    pub fn dl_norm_sq(&self, m: usize) -> f64 {
        self.gains[m] * norm_sq(&self.dl_fading[m])
    }
}

pub fn norm_sq(h: &[Complex64]) -> f64 {
    h.iter().map(|x| x.norm_sqr()).sum()
}

/// h_a^H h_b.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn draw_cn_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid std");
    (0..len)
        .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect()
}

/// Users uniform in the square, CN(0, I) fading on both links.
pub fn draw_realization<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> ChannelRealization {
    let m = cfg.num_users();
    let l = cfg.topology.num_antennas;
    let side = cfg.topology.area_side_m;
    let positions: Vec<[f64; 2]> = (0..m)
        .map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side])
        .collect();
    let ul = (0..m).map(|_| draw_cn_vector(rng, l)).collect();
    let dl = (0..m).map(|_| draw_cn_vector(rng, l)).collect();
    ChannelRealization::from_parts(
        positions,
        cfg.ap_position(),
        cfg.topology.min_distance_m,
        ul,
        dl,
    )
}

/// γ_m = p_m ||h_m||² / (Σ_{n≠m, same channel} p_n |h_m^H h_n|² / ||h_m||² + n0).
///
/// `assignment[n]` is the channel user n transmits on, or `None` when idle.
pub fn uplink_sinr(
    m: usize,
    assignment: &[Option<usize>],
    powers: &[f64],
    ch: &ChannelRealization,
    n0: f64,
) -> Result<f64, ModelError> {
    let k = assignment[m].ok_or(ModelError::Unassigned(m))?;
    let hm = ch.ul_vector(m);
    let nm = norm_sq(&hm);
    let interference: f64 = (0..assignment.len())
        .filter(|&n| n != m && assignment[n] == Some(k))
        .map(|n| powers[n] * inner(&hm, &ch.ul_vector(n)).norm_sqr() / nm)
        .sum();
    Ok(powers[m] * nm / (interference + n0))
}

/// Precomputed ||h_m||² and matched-filter leakage |h_m^H h_n|² / ||h_m||².
#[derive(Debug, Clone)]
pub struct UplinkTable {
    pub norm_sq: Vec<f64>,
    pub leakage: Vec<Vec<f64>>,
}

impl UplinkTable {
    pub fn new(ch: &ChannelRealization) -> Self {
        let m = ch.num_users();
        let vecs: Vec<_> = (0..m).map(|i| ch.ul_vector(i)).collect();
        let norm: Vec<f64> = vecs.iter().map(|h| norm_sq(h)).collect();
        let leakage = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| inner(&vecs[a], &vecs[b]).norm_sqr() / norm[a])
                    .collect()
            })
            .collect();
        Self {
            norm_sq: norm,
            leakage,
        }
    }

    /// Same as [`uplink_sinr`] with user m placed on `channel`.
    pub fn sinr_on(
        &self,
        m: usize,
        channel: usize,
        assignment: &[Option<usize>],
        powers: &[f64],
        n0: f64,
    ) -> f64 {
        let interference: f64 = (0..assignment.len())
            .filter(|&n| n != m && assignment[n] == Some(channel))
            .map(|n| powers[n] * self.leakage[m][n])
            .sum();
        powers[m] * self.norm_sq[m] / (interference + n0)
    }
}

/// Finite-blocklength link constants: bandwidth, blocklength and Q⁻¹(ε).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrllcLink {
    pub bandwidth: f64,
    pub blocklength: f64,
    pub q_inv_eps: f64,
}

impl UrllcLink {
    pub fn new(bandwidth: f64, blocklength: u32, eps: f64) -> Self {
        Self {
            bandwidth,
            blocklength: blocklength as f64,
            q_inv_eps: q_inv(eps),
        }
    }

    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self::new(
            cfg.channel.bandwidth_hz,
            cfg.channel.blocklength,
            cfg.channel.decoding_error,
        )
    }

    /// ω = B log2(1+γ) - B sqrt(V/N) Q⁻¹(ε) / ln 2, clamped at zero.
    pub fn rate(&self, gamma: f64) -> f64 {
        if !(gamma > 0.0) {
            return 0.0;
        }
        let v = dispersion(gamma);
        let shannon = self.bandwidth * gamma.ln_1p() / std::f64::consts::LN_2;
        let penalty = self.bandwidth * (v / self.blocklength).sqrt() * self.q_inv_eps
            / std::f64::consts::LN_2;
        (shannon - penalty).max(0.0)
    }
}

/// Channel dispersion V = 1 - (1+γ)⁻².
pub fn dispersion(gamma: f64) -> f64 {
    1.0 - (1.0 + gamma).powi(-2)
}

pub fn urllc_rate(gamma: f64, bandwidth: f64, blocklength: u32, eps: f64) -> f64 {
    UrllcLink::new(bandwidth, blocklength, eps).rate(gamma)
}

pub fn shannon_rate(gamma: f64, bandwidth: f64) -> f64 {
    bandwidth * gamma.ln_1p() / std::f64::consts::LN_2
}

/// Parallel upload: the slowest used destination sets the latency.
pub fn uplink_latency(fractions: &[f64], bits: f64, rates: &[f64]) -> Result<f64, ModelError> {
    let mut worst: f64 = 0.0;
    for (&phi, &w) in fractions.iter().zip(rates) {
        if phi <= 0.0 {
            continue;
        }
        let payload = phi * bits;
        if !(w > 0.0) {
            return Err(ModelError::InfeasibleLink {
                direction: LinkDirection::Uplink,
                bits: payload,
            });
        }
        worst = worst.max(payload / w);
    }
    Ok(worst)
}

/// I' = q I.
pub fn render_size(bits: f64, slope: f64) -> f64 {
    slope * bits
}

/// Interference-free downlink SNR p' ||h_dl||² / n0.
pub fn downlink_snr(m: usize, power: f64, ch: &ChannelRealization, n0: f64) -> f64 {
    power * ch.dl_norm_sq(m) / n0
}

pub fn downlink_latency(bits: f64, rate: f64) -> Result<f64, ModelError> {
    if bits <= 0.0 {
        return Ok(0.0);
    }
    if !(rate > 0.0) {
        return Err(ModelError::InfeasibleLink {
            direction: LinkDirection::Downlink,
            bits,
        });
    }
    Ok(bits / rate)
}

/// Σ_m p'_m ω'_m.
pub fn downlink_energy(powers: &[f64], rates: &[f64]) -> f64 {
    powers.iter().zip(rates).map(|(p, w)| p * w).sum()
}

/// One user's downlink energy under the configured model.
pub fn user_dl_energy(model: EnergyModel, power: f64, rate: f64, latency: f64) -> f64 {
    match model {
        EnergyModel::PowerRate => power * rate,
        EnergyModel::PowerLatency => {
            if power == 0.0 {
                0.0
            } else {
                power * latency
            }
        }
    }
}
