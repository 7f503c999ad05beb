mod common;

use common::scenario_cfg;
use inc_sim::baselines::{equal_policy, gm_rn, inc_headroom, proportional_policy, BaselineKind};
use inc_sim::channel::draw_realization;
use inc_sim::rng::{RngStreams, Stream};
use proptest::prelude::*;

/// Expected offload frequency per user: E[min(N, cap)] / M with N ~ Bin(M, 1/2).
fn gm_rn_frequency(m: usize, cap: usize) -> f64 {
    let mut binom = 1.0;
    let mut mean = 0.0;
    for n in 0..=m {
        if n > 0 {
            binom *= (m - n + 1) as f64 / n as f64;
        }
        mean += binom * 0.5f64.powi(m as i32) * n.min(cap) as f64;
    }
    mean / m as f64
}

#[test]
fn gm_rn_offload_frequency() {
    for cap in [None, Some(2)] {
        let mut cfg = scenario_cfg(6, 4);
        cfg.compute.ofmo_capacity = cap;
        let want = gm_rn_frequency(6, cfg.ofmo_capacity());
        let mut rng = RngStreams::fresh(11, Stream::Baseline);
        let n = 100_000;
        let mut hits = vec![0usize; 6];
        for _ in 0..n {
            let d = gm_rn(&mut rng, &cfg);
            assert!(d.offload.iter().filter(|&&o| o).count() <= cfg.ofmo_capacity());
            for (h, &o) in hits.iter_mut().zip(&d.offload) {
                *h += o as usize;
            }
        }
        for h in hits {
            assert!((h as f64 / n as f64 - want).abs() < 0.01, "cap {cap:?}: {h} vs {want}");
        }
    }
}

#[test]
fn proportional_matches_sort_oracle() {
    let cfg = scenario_cfg(6, 4);
    let mut rng = RngStreams::fresh(12, Stream::Channel);
    for loads in [vec![0, 0, 0, 0], vec![5, 1, 2, 0], vec![5, 5, 5, 5]] {
        let ch = draw_realization(&cfg, &mut rng);
        let d = proportional_policy(&cfg, &ch, &loads);
        let h = inc_headroom(&cfg, &loads);
        let mut idx: Vec<usize> = (0..6).collect();
        idx.sort_by(|&a, &b| ch.gains[b].partial_cmp(&ch.gains[a]).unwrap());
        let mut want = vec![false; 6];
        if h > 0.0 {
            for &i in idx.iter().take(cfg.ofmo_capacity()) {
                want[i] = true;
            }
        }
        assert_eq!(d.offload, want, "loads {loads:?}");
        let strongest = idx[0];
        assert_eq!(d.dl_power[strongest], cfg.dl_power_range().1);
    }
}

#[test]
fn equal_is_stateless() {
    let cfg = scenario_cfg(5, 2);
    assert_eq!(equal_policy(&cfg), equal_policy(&cfg));
    assert_eq!(equal_policy(&cfg).offload, vec![true, true, true, false, false]);
}

#[test]
fn names_round_trip() {
    for k in BaselineKind::ALL {
        assert_eq!(k.name().parse::<BaselineKind>().unwrap(), k);
    }
    assert!("random".parse::<BaselineKind>().is_err());
}

proptest! {
    #[test]
    fn decisions_respect_capacity_and_power_range(m in 1usize..12, k in 1usize..4, cap in 0usize..12, seed in any::<u64>()) {
        let mut cfg = scenario_cfg(m, k);
        cfg.compute.ofmo_capacity = Some(cap.min(m));
        let mut rng = RngStreams::fresh(seed, Stream::Baseline);
        let ch = draw_realization(&cfg, &mut rng);
        let loads = vec![1; k];
        let (lo, hi) = cfg.dl_power_range();
        for d in [gm_rn(&mut rng, &cfg), equal_policy(&cfg), proportional_policy(&cfg, &ch, &loads)] {
            prop_assert_eq!(d.offload.len(), m);
            prop_assert!(d.offload.iter().filter(|&&o| o).count() <= cfg.ofmo_capacity());
            prop_assert!(d.dl_power.iter().all(|p| (lo..=hi).contains(p)));
        }
    }
}
