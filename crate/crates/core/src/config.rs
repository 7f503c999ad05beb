//! Scenario parameters, defaults and validation.
//!
//! The config file is TOML. Every key is optional; omitted keys take the
//! defaults below. Quantities carry their unit in the key name
//! (`_mbit`, `_gcycles`, `_ghz`, `_ms`, `_w`, `_hz`, `_bps`, `_s`), and the
//! accessor methods on [`ScenarioConfig`] convert to SI.
//!
//! ```toml
//! seed = 7
//!
//! [topology]
//! num_users = 6
//! num_inc = 4
//!
//! [tasks]
//! class = "compute-intensive"
//! latency_bound_ms = [5.0, 15.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ConfigError, Violation};

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "INC_SIM_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub topology: TopologyConfig,
    pub channel: ChannelConfig,
    pub compute: ComputeConfig,
    pub tasks: TaskConfig,
    pub requests: RequestConfig,
    pub utility: UtilityConfig,
    pub game: GameConfig,
    pub learning: LearningConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    /// Number of XR user devices (M).
    pub num_users: usize,
    /// Number of in-network computing nodes (K); channel k maps to INC k.
    pub num_inc: usize,
    /// AP antenna count (L).
    pub num_antennas: usize,
    /// Side of the square deployment area.
    pub area_side_m: f64,
    /// AP position; the area center when omitted.
    pub ap_position_m: Option<[f64; 2]>,
    /// Distances below this are clamped before the path-loss law.
    pub min_distance_m: f64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            num_users: 6,
            num_inc: 4,
            num_antennas: 4,
            area_side_m: 200.0,
            ap_position_m: None,
            min_distance_m: 1.0,
        }
    }
}

/// How downlink energy is evaluated per user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyModel {
    /// Transmit power times downlink rate.
    PowerRate,
    /// Transmit power times downlink latency (joules).
    PowerLatency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
    /// Finite blocklength N in channel uses.
    pub blocklength: u32,
    /// Decoding error probability ε.
    pub decoding_error: f64,
    /// Fixed uplink transmit power per user.
    pub ul_power_w: f64,
    /// Downlink power interval [p'_min, p'_max].
    pub dl_power_range_w: [f64; 2],
    pub energy_model: EnergyModel,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 10e6,
            noise_psd_dbm_hz: -174.0,
            blocklength: 256,
            decoding_error: 1e-9,
            ul_power_w: 0.2,
            dl_power_range_w: [0.0, 20.0],
            energy_model: EnergyModel::PowerRate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeConfig {
    pub mec_rate_ghz: f64,
    /// Per-INC estimated rates. Filled evenly over `inc_rate_range_ghz` when empty.
    pub inc_rates_ghz: Vec<f64>,
    pub inc_rate_range_ghz: [f64; 2],
    /// Users one INC node can associate per slot.
    pub inc_assoc_capacity: usize,
    /// Knapsack capacity C_max. Defaults to min(K * inc_assoc_capacity, M).
    pub ofmo_capacity: Option<usize>,
    /// DT discrepancy as a fraction of the estimated rate (f~ = δ f).
    pub dt_discrepancy: f64,
    pub wired_base_s: f64,
    pub backhaul_bps: f64,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        Self {
            mec_rate_ghz: 30.0,
            inc_rates_ghz: Vec::new(),
            inc_rate_range_ghz: [1.0, 9.0],
            inc_assoc_capacity: 5,
            ofmo_capacity: None,
            dt_discrepancy: 0.3,
            wired_base_s: 1e-3,
            backhaul_bps: 1e9,
        }
    }
}

/// Task-size presets. `Table` uses the configured ranges directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskClass {
    Table,
    /// I in [50, 150] Mbit, C in [0.1, 0.5] Mcycles.
    DataIntensive,
    /// I in [1, 4] MB, C in [1, 2] Gcycles.
    ComputeIntensive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskConfig {
    pub class: TaskClass,
    pub size_range_mbit: [f64; 2],
    pub cycles_range_gcycles: [f64; 2],
    pub latency_bound_ms: [f64; 2],
    /// Rendered-size slope q with I' = q I.
    pub render_slope_range: [f64; 2],
}

impl Default for TaskConfig {
    fn default() -> Self {
        Self {
            class: TaskClass::Table,
            size_range_mbit: [1.0, 5.0],
            cycles_range_gcycles: [1.0, 5.0],
            latency_bound_ms: [5.0, 15.0],
            render_slope_range: [1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RequestConfig {
    /// No-request probability R.
    pub no_request_prob: f64,
    /// Zipf exponent δ.
    pub zipf: f64,
    /// Neighborhood size N.
    pub neighborhood: usize,
    /// Number of distinct tasks F.
    pub num_tasks: usize,
}

impl Default for RequestConfig {
    fn default() -> Self {
        Self {
            no_request_prob: 0.1,
            zipf: 0.7,
            neighborhood: 3,
            num_tasks: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UtilityConfig {
    /// Latency-saving gain g_t.
    pub latency_gain: f64,
    /// Energy weight w_m.
    pub energy_weight: f64,
    /// Performance-gain cost weights (w_l, w_e).
    pub cost_weights: [f64; 2],
    /// Normalizer U_scale in the global reward.
    pub utility_scale: f64,
    /// Latencies above this are charged at this value inside utilities,
    /// which keeps utilities finite when a link carries no rate.
    pub latency_cap_s: f64,
}

impl Default for UtilityConfig {
    fn default() -> Self {
        Self {
            latency_gain: 1.0,
            energy_weight: 0.5,
            cost_weights: [0.5, 0.5],
            utility_scale: 1.0,
            latency_cap_s: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    /// Step sizes (κ1, κ2, κ3, κ4) for λ, β, θ, ν.
    pub step_sizes: [f64; 4],
    pub split_tolerance: f64,
    pub split_max_iters: usize,
    /// Best-response passes before the dynamics give up.
    pub max_rounds: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            step_sizes: [0.01; 4],
            split_tolerance: 1e-6,
            split_max_iters: 500,
            max_rounds: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningConfig {
    pub discount: f64,
    pub gae_lambda: f64,
    /// AHMRL critic loss weights (w_u, w_d, w_g).
    pub critic_weights: [f64; 3],
    pub clip: f64,
    pub epochs: usize,
    pub minibatch: usize,
    pub replay_capacity: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_grad_norm: f64,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    /// Hard-copy the critic into its target every this many update windows.
    pub target_sync: usize,
    pub normalize_advantages: bool,
    /// Temperature τ of the Bernoulli surrogate over OFMO scores.
    pub ul_temperature: f64,
    pub init_log_std: f64,
    pub episode_len: usize,
    pub episodes: usize,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            discount: 0.9,
            gae_lambda: 0.95,
            critic_weights: [0.25, 0.25, 0.5],
            clip: 0.2,
            epochs: 4,
            minibatch: 32,
            replay_capacity: 10_000,
            learning_rate: 3e-4,
            momentum: 0.9,
            max_grad_norm: 0.5,
            hidden_width: 64,
            hidden_layers: 2,
            target_sync: 10,
            normalize_advantages: true,
            ul_temperature: 1.0,
            init_log_std: (0.3f64).ln(),
            episode_len: 200,
            episodes: 100,
        }
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let mut cfg = Self {
            seed: 0,
            topology: TopologyConfig::default(),
            channel: ChannelConfig::default(),
            compute: ComputeConfig::default(),
            tasks: TaskConfig::default(),
            requests: RequestConfig::default(),
            utility: UtilityConfig::default(),
            game: GameConfig::default(),
            learning: LearningConfig::default(),
        };
        cfg.fill_defaults();
        cfg
    }
}

/// Load a config file, fill dependent defaults and validate.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg: ScenarioConfig = toml::from_str(text)?;
    cfg.fill_defaults();
    let violations = validate_config(&cfg);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(violations))
    }
}

/// Read [`SEED_ENV`] if set and parseable.
pub fn seed_from_env() -> Option<u64> {
    std::env::var(SEED_ENV).ok()?.trim().parse().ok()
}

/// Return every invariant violation; empty iff the config is usable.
pub fn validate_config(cfg: &ScenarioConfig) -> Vec<Violation> {
    let mut v = Checker(Vec::new());

    let t = &cfg.topology;
    v.check(t.num_users >= 1, "topology.num_users", "must be at least 1".into());
    v.check(t.num_inc >= 1, "topology.num_inc", "must be at least 1".into());
    v.check(t.num_antennas >= 1, "topology.num_antennas", "must be at least 1".into());
    v.check(t.area_side_m > 0.0, "topology.area_side_m", "must be positive".into());
    v.check(t.min_distance_m > 0.0, "topology.min_distance_m", "must be positive".into());

    let c = &cfg.channel;
    v.check(c.bandwidth_hz > 0.0, "channel.bandwidth_hz", "must be positive".into());
    v.check(c.blocklength >= 1, "channel.blocklength", "must be at least 1".into());
    v.check(
        c.decoding_error > 0.0 && c.decoding_error < 1.0,
        "channel.decoding_error",
        format!("must lie in (0, 1), got {}", c.decoding_error),
    );
    v.check(c.ul_power_w > 0.0, "channel.ul_power_w", "must be positive".into());
    let [pmin, pmax] = c.dl_power_range_w;
    v.check(
        pmin >= 0.0 && pmin < pmax,
        "channel.dl_power_range_w",
        format!("need 0 <= min < max, got [{pmin}, {pmax}]"),
    );

    let k = &cfg.compute;
    v.check(k.mec_rate_ghz > 0.0, "compute.mec_rate_ghz", "must be positive".into());
    v.check(
        k.inc_rates_ghz.len() == t.num_inc,
        "compute.inc_rates_ghz",
        format!("expected {} rates, got {}", t.num_inc, k.inc_rates_ghz.len()),
    );
    v.check(
        k.inc_rates_ghz.iter().all(|&r| r > 0.0),
        "compute.inc_rates_ghz",
        "rates must be positive".into(),
    );
    v.range("compute.inc_rate_range_ghz", k.inc_rate_range_ghz);
    v.check(
        k.inc_assoc_capacity >= 1,
        "compute.inc_assoc_capacity",
        "must be at least 1".into(),
    );
    if let Some(cap) = k.ofmo_capacity {
        v.check(
            cap <= t.num_users,
            "compute.ofmo_capacity",
            format!("C_max = {cap} exceeds M = {}", t.num_users),
        );
    }
    v.check(
        (0.0..1.0).contains(&k.dt_discrepancy),
        "compute.dt_discrepancy",
        format!("must lie in [0, 1), got {}", k.dt_discrepancy),
    );
    v.check(k.wired_base_s >= 0.0, "compute.wired_base_s", "must be nonnegative".into());
    v.check(k.backhaul_bps > 0.0, "compute.backhaul_bps", "must be positive".into());

    let tk = &cfg.tasks;
    v.range("tasks.size_range_mbit", tk.size_range_mbit);
    v.range("tasks.cycles_range_gcycles", tk.cycles_range_gcycles);
    v.range("tasks.latency_bound_ms", tk.latency_bound_ms);
    v.range("tasks.render_slope_range", tk.render_slope_range);
    v.check(
        tk.render_slope_range[0] >= 1.0,
        "tasks.render_slope_range",
        "slopes must be at least 1".into(),
    );

    let r = &cfg.requests;
    v.check(
        (0.0..1.0).contains(&r.no_request_prob),
        "requests.no_request_prob",
        format!("must lie in [0, 1), got {}", r.no_request_prob),
    );
    v.check(r.zipf > 0.0, "requests.zipf", "must be positive".into());
    v.check(r.num_tasks >= 1, "requests.num_tasks", "must be at least 1".into());
    v.check(
        r.neighborhood >= 1 && r.neighborhood <= r.num_tasks,
        "requests.neighborhood",
        format!("need 1 <= N <= F = {}, got {}", r.num_tasks, r.neighborhood),
    );

    let u = &cfg.utility;
    v.check(u.latency_gain >= 0.0, "utility.latency_gain", "must be nonnegative".into());
    v.check(u.energy_weight >= 0.0, "utility.energy_weight", "must be nonnegative".into());
    v.check(
        u.cost_weights.iter().all(|&w| w >= 0.0),
        "utility.cost_weights",
        "must be nonnegative".into(),
    );
    v.check(u.utility_scale > 0.0, "utility.utility_scale", "must be positive".into());
    v.check(u.latency_cap_s > 0.0, "utility.latency_cap_s", "must be positive".into());

    let g = &cfg.game;
    v.check(
        g.step_sizes.iter().all(|&s| s > 0.0),
        "game.step_sizes",
        "must be positive".into(),
    );
    v.check(g.split_tolerance > 0.0, "game.split_tolerance", "must be positive".into());
    v.check(g.split_max_iters >= 1, "game.split_max_iters", "must be at least 1".into());
    v.check(g.max_rounds >= 1, "game.max_rounds", "must be at least 1".into());

    let l = &cfg.learning;
    v.check(
        l.discount > 0.0 && l.discount < 1.0,
        "learning.discount",
        format!("must lie in (0, 1), got {}", l.discount),
    );
    v.check(
        l.gae_lambda > 0.0 && l.gae_lambda <= 1.0,
        "learning.gae_lambda",
        format!("must lie in (0, 1], got {}", l.gae_lambda),
    );
    v.check(
        l.critic_weights.iter().all(|&w| w >= 0.0),
        "learning.critic_weights",
        "must be nonnegative".into(),
    );
    v.check(l.clip > 0.0, "learning.clip", "must be positive".into());
    v.check(l.epochs >= 1, "learning.epochs", "must be at least 1".into());
    v.check(l.minibatch >= 1, "learning.minibatch", "must be at least 1".into());
    v.check(l.learning_rate > 0.0, "learning.learning_rate", "must be positive".into());
    v.check(
        (0.0..1.0).contains(&l.momentum),
        "learning.momentum",
        "must lie in [0, 1)".into(),
    );
    v.check(l.max_grad_norm > 0.0, "learning.max_grad_norm", "must be positive".into());
    v.check(l.hidden_width >= 1, "learning.hidden_width", "must be at least 1".into());
    v.check(l.hidden_layers >= 1, "learning.hidden_layers", "must be at least 1".into());
    v.check(l.target_sync >= 1, "learning.target_sync", "must be at least 1".into());
    v.check(l.ul_temperature > 0.0, "learning.ul_temperature", "must be positive".into());
    v.check(
        (LOG_STD_MIN..=LOG_STD_MAX).contains(&l.init_log_std),
        "learning.init_log_std",
        format!("must lie in [{LOG_STD_MIN:.4}, {LOG_STD_MAX}]"),
    );
    v.check(l.episode_len >= 1, "learning.episode_len", "must be at least 1".into());
    v.check(
        l.episode_len <= l.replay_capacity,
        "learning.episode_len",
        format!("exceeds replay capacity {}", l.replay_capacity),
    );
    v.0
}

/// Bounds on the DL actor's log standard deviation.
pub const LOG_STD_MIN: f64 = -6.907_755_278_982_137; // ln(1e-3)
pub const LOG_STD_MAX: f64 = 0.0;

struct Checker(Vec<Violation>);

impl Checker {
    fn check(&mut self, ok: bool, field: &str, message: String) {
        if !ok {
            self.0.push(Violation {
                field: field.to_string(),
                message,
            });
        }
    }

    fn range(&mut self, field: &str, [lo, hi]: [f64; 2]) {
        self.check(
            lo > 0.0 && lo <= hi,
            field,
            format!("need 0 < lo <= hi, got [{lo}, {hi}]"),
        );
    }
}

impl ScenarioConfig {
    /// Fill defaults that depend on other fields.
    pub fn fill_defaults(&mut self) {
        let k = self.topology.num_inc;
        if self.compute.inc_rates_ghz.is_empty() && k > 0 {
            let [lo, hi] = self.compute.inc_rate_range_ghz;
            self.compute.inc_rates_ghz = if k == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..k)
                    .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
                    .collect()
            };
        }
        if self.compute.ofmo_capacity.is_none() {
            self.compute.ofmo_capacity =
                Some((k * self.compute.inc_assoc_capacity).min(self.topology.num_users));
        }
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    /// Hex SHA-256 over the canonical TOML serialization.
    pub fn config_hash(&self) -> String {
        let text = toml::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn num_users(&self) -> usize {
        self.topology.num_users
    }

    pub fn num_inc(&self) -> usize {
        self.topology.num_inc
    }

    pub fn ofmo_capacity(&self) -> usize {
        self.compute
            .ofmo_capacity
            .unwrap_or((self.num_inc() * self.compute.inc_assoc_capacity).min(self.num_users()))
    }

    pub fn ap_position(&self) -> [f64; 2] {
        self.topology.ap_position_m.unwrap_or([
            0.5 * self.topology.area_side_m,
            0.5 * self.topology.area_side_m,
        ])
    }

    /// Noise power over the system bandwidth, in watts.
    pub fn noise_power_w(&self) -> f64 {
        crate::channel::noise_power_w(self.channel.noise_psd_dbm_hz, self.channel.bandwidth_hz)
    }

    pub fn mec_rate(&self) -> f64 {
        self.compute.mec_rate_ghz * 1e9
    }

    pub fn inc_rate(&self, k: usize) -> f64 {
        self.compute.inc_rates_ghz[k] * 1e9
    }

    pub fn dl_power_range(&self) -> (f64, f64) {
        let [lo, hi] = self.channel.dl_power_range_w;
        (lo, hi)
    }

    /// Task input-size range in bits for the active task class.
    pub fn task_size_range_bits(&self) -> (f64, f64) {
        match self.tasks.class {
            TaskClass::Table => {
                let [lo, hi] = self.tasks.size_range_mbit;
                (lo * 1e6, hi * 1e6)
            }
            TaskClass::DataIntensive => (50e6, 150e6),
            TaskClass::ComputeIntensive => (8e6, 32e6),
        }
    }

    /// Task CPU-cycle range for the active task class.
    pub fn task_cycles_range(&self) -> (f64, f64) {
        match self.tasks.class {
            TaskClass::Table => {
                let [lo, hi] = self.tasks.cycles_range_gcycles;
                (lo * 1e9, hi * 1e9)
            }
            TaskClass::DataIntensive => (0.1e6, 0.5e6),
            TaskClass::ComputeIntensive => (1e9, 2e9),
        }
    }

    pub fn latency_bound_range_s(&self) -> (f64, f64) {
        let [lo, hi] = self.tasks.latency_bound_ms;
        (lo * 1e-3, hi * 1e-3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_table_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.mec_rate(), 30e9);
        assert_eq!(cfg.compute.dt_discrepancy, 0.3);
        assert_eq!(cfg.learning.discount, 0.9);
        assert_eq!(cfg.requests.no_request_prob, 0.1);
        assert_eq!(cfg.requests.zipf, 0.7);
        assert_eq!(cfg.requests.neighborhood, 3);
        assert_eq!(cfg.compute.inc_assoc_capacity, 5);
        assert_eq!(cfg.learning.minibatch, 32);
        assert_eq!(cfg.learning.replay_capacity, 10_000);
        assert_eq!(cfg.compute.inc_rates_ghz, vec![1.0, 1.0 + 8.0 / 3.0, 1.0 + 16.0 / 3.0, 9.0]);
        assert_eq!(cfg.ofmo_capacity(), 6);
        assert_eq!(cfg.latency_bound_range_s(), (5e-3, 15e-3));
    }

    #[test]
    fn defaults_validate_clean() {
        assert!(validate_config(&ScenarioConfig::default()).is_empty());
    }

    #[test]
    fn dl_power_zero_to_twenty_is_accepted() {
        let cfg = parse_config("[channel]\ndl_power_range_w = [0.0, 20.0]\n").unwrap();
        assert_eq!(cfg.dl_power_range(), (0.0, 20.0));
    }

    #[test]
    fn ofmo_capacity_above_users_is_rejected() {
        let err = parse_config("[compute]\nofmo_capacity = 7\n").unwrap_err();
        match err {
            ConfigError::Invalid(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].field, "compute.ofmo_capacity");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn open_interval_bounds_report_one_violation() {
        let mut cfg = ScenarioConfig::default();
        cfg.channel.decoding_error = 0.0;
        let v = validate_config(&cfg);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "channel.decoding_error");

        let mut cfg = ScenarioConfig::default();
        cfg.compute.dt_discrepancy = 1.0;
        let v = validate_config(&cfg);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "compute.dt_discrepancy");
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        assert!(matches!(
            parse_config("[topology]\nnum_userz = 3\n"),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn round_trip_through_toml() {
        let cfg = parse_config("seed = 11\n[tasks]\nclass = \"data-intensive\"\n").unwrap();
        let again = parse_config(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.config_hash(), again.config_hash());
    }

    #[test]
    fn presets_override_ranges() {
        let mut cfg = ScenarioConfig::default();
        cfg.tasks.class = TaskClass::ComputeIntensive;
        assert_eq!(cfg.task_cycles_range(), (1e9, 2e9));
        cfg.tasks.class = TaskClass::DataIntensive;
        assert_eq!(cfg.task_size_range_bits(), (50e6, 150e6));
    }
}
