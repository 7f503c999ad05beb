mod common;

use common::*;
use inc_sim::compute::{mec_exec_latency, DtEstimate};
use inc_sim::game::{Split, StrategyProfile};
use inc_sim::rng::{RngStreams, Stream};
use rand::Rng;

#[test]
fn default_scale_equilibria_are_reached_and_verified() {
    let cfg = scenario_cfg(6, 4);
    let mut rng = RngStreams::fresh(21, Stream::Channel);
    let grid = split_grid(0.1);
    for bounds in [None, Some((0.5, 3.0))] {
        for _ in 0..10 {
            let g = random_instance(&cfg, &mut rng, bounds);
            let eq = g.run_best_response_dynamics(StrategyProfile::all_mec(6), cfg.game.max_rounds);
            assert!(eq.converged && eq.verified, "bounds {bounds:?}: {eq:?}");
            assert!(best_deviation_gain(&g, &eq.profile, &grid) <= 1e-6);
            for m in 0..6 {
                assert!(eq.profile.channel[m] == 0 || g.offload[m]);
            }
        }
    }
}

#[test]
fn default_bounds_leave_only_mec() {
    let cfg = scenario_cfg(6, 4);
    let mut rng = RngStreams::fresh(22, Stream::Channel);
    let g = random_instance(&cfg, &mut rng, None);
    let p = StrategyProfile::all_mec(6);
    assert!((0..6).all(|m| g.feasible_channels(m, &p).is_empty()));
}

#[test]
fn refined_split_matches_fine_grid() {
    let mut rng = RngStreams::fresh(23, Stream::Channel);
    for _ in 0..10 {
        let mut cfg = scenario_cfg(1, 1);
        cfg.compute.inc_rates_ghz = vec![rng.random_range(1.0..60.0)];
        let g = random_instance(&cfg, &mut rng, Some((0.2, 3.0)));
        let p = StrategyProfile::all_mec(1);
        let t = g.tasks[0].unwrap();
        let lat = g.collab_latency(0, 1, &p);
        let mut best = f64::NEG_INFINITY;
        for s in split_grid(1e-2) {
            if lat.eval(s) + g.dl_tx[0] <= t.latency_bound {
                best = best.max(g.utility_with(0, 1, s, &p));
            }
        }
        let out = g.refine_split(0, 1, &p, Split::default());
        if best.is_finite() {
            assert!(out.latency <= t.latency_bound);
            assert!(out.utility >= best - 1e-3, "{} vs grid {best}", out.utility);
        }
        let start = g.utility_with(0, 1, Split::default(), &p);
        if lat.eval(Split::default()) + g.dl_tx[0] <= t.latency_bound {
            assert!(out.utility >= start);
        }
    }
}

#[test]
fn decoupled_users_have_an_exact_potential() {
    // One user per instance: no co-channel or queue coupling remains.
    let mut rng = RngStreams::fresh(24, Stream::Channel);
    for _ in 0..20 {
        let cfg = scenario_cfg(1, 3);
        let g = random_instance(&cfg, &mut rng, None);
        let p = StrategyProfile {
            channel: vec![rng.random_range(0..4)],
            split: vec![Split { lambda: rng.random(), beta: rng.random_range(0.1..1.0) }],
        };
        assert!(potential_residual(&g, &p) < 1e-9);
    }
}

#[test]
fn dt_latency_closed_form() {
    let mut rng = RngStreams::fresh(25, Stream::Tasks);
    for _ in 0..10_000 {
        let f = rng.random_range(1e9..1e11);
        let gap = rng.random_range(0.0..0.99) * f;
        let aleph = rng.random();
        let c = rng.random_range(1e6..1e10);
        let dt = DtEstimate::new(f, gap).unwrap();
        let got = mec_exec_latency(aleph, c, dt).unwrap();
        let want = aleph * c / (f - gap);
        assert!(rel_err(got, want, 1e-300) < 1e-12);
        let ideal = mec_exec_latency(aleph, c, DtEstimate::new(f, 0.0).unwrap()).unwrap();
        assert_eq!(ideal, aleph * c / f);
    }
    assert!(DtEstimate::new(1e9, 1e9).is_err());
}
