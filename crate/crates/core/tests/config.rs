use inc_sim::config::{parse_config, EnergyModel, TaskClass, SEED_ENV};
use inc_sim::{validate_config, ConfigError, ScenarioConfig};
use proptest::prelude::*;

#[test]
fn defaults_match_table_values() {
    let cfg = parse_config("").unwrap();
    assert_eq!(cfg.num_users(), 6);
    assert_eq!(cfg.num_inc(), 4);
    assert_eq!(cfg.topology.num_antennas, 4);
    assert_eq!(cfg.channel.bandwidth_hz, 1e7);
    assert_eq!(cfg.channel.blocklength, 256);
    assert_eq!(cfg.channel.decoding_error, 1e-9);
    assert_eq!(cfg.channel.dl_power_range_w, [0.0, 20.0]);
    assert_eq!(cfg.compute.inc_assoc_capacity, 5);
    assert_eq!(cfg.requests.num_tasks, 30);
    assert_eq!(cfg.requests.zipf, 0.7);
    assert_eq!(cfg.learning.minibatch, 32);
    assert_eq!(cfg.learning.replay_capacity, 10_000);
    assert_eq!(cfg.compute.inc_rates_ghz.len(), 4);
    assert_eq!(cfg.channel.energy_model, EnergyModel::PowerRate);
    assert_eq!(cfg.tasks.class, TaskClass::Table);
}

#[test]
fn invalid_values_are_reported_by_field() {
    let err = parse_config("[channel]\ndecoding_error = 1.5\n").unwrap_err();
    match err {
        ConfigError::Invalid(v) => assert!(v.iter().any(|x| x.field == "channel.decoding_error")),
        other => panic!("unexpected {other}"),
    }
    assert!(matches!(parse_config("[channel]\nbogus = 1\n"), Err(ConfigError::Parse(_))));
}

#[test]
fn seed_env_name_is_stable() {
    assert_eq!(SEED_ENV, "INC_SIM_SEED");
}

#[test]
fn file_round_trip_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    let mut cfg = ScenarioConfig::default();
    cfg.seed = 99;
    cfg.fill_defaults();
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let back = inc_sim::load_config(&path).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.config_hash(), cfg.config_hash());
    let mut other = cfg.clone();
    other.seed = 100;
    assert_ne!(other.config_hash(), cfg.config_hash());
}

proptest! {
    #[test]
    fn valid_configs_round_trip(
        seed in any::<u64>(),
        m in 1usize..12,
        k in 1usize..6,
        eps in 1e-12f64..0.1,
        p_hi in 1.0f64..40.0,
        r in 0.0f64..0.99,
    ) {
        let mut cfg = ScenarioConfig::default();
        cfg.seed = seed;
        cfg.topology.num_users = m;
        cfg.topology.num_inc = k;
        cfg.compute.inc_rates_ghz.clear();
        cfg.compute.ofmo_capacity = None;
        cfg.channel.decoding_error = eps;
        cfg.channel.dl_power_range_w = [0.0, p_hi];
        cfg.requests.no_request_prob = r;
        cfg.fill_defaults();
        prop_assert!(validate_config(&cfg).is_empty());
        let back = parse_config(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
