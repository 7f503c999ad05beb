use inc_sim::channel::{
    db_to_linear, noise_power_w, path_loss_db, q_inv, shannon_rate, uplink_latency, urllc_rate, UrllcLink,
};
use proptest::prelude::*;

#[test]
fn frozen_rate_values() {
    let cases = [
        (15.0, 1e7, 256, 1e-9, 34602444.06440628),
        (1.0, 1e7, 256, 1e-9, 5316422.879159395),
        (1000.0, 1e7, 256, 1e-5, 95826679.00835993),
        (0.5, 1e6, 100, 1e-3, 252663.2095722888),
    ];
    for (g, b, n, e, want) in cases {
        let got = urllc_rate(g, b, n, e);
        assert!((got - want).abs() / want < 1e-12, "rate({g}) = {got}, want {want}");
    }
}

#[test]
fn headline_rate_is_near_table_value() {
    let r = urllc_rate(15.0, 1e7, 256, 1e-9);
    assert!((r - 3.46e7).abs() / 3.46e7 < 5e-3);
}

#[test]
fn q_inverse_values() {
    assert!((q_inv(1e-9) - 5.997807015007687).abs() < 1e-12);
    assert!((q_inv(1e-5) - 4.264890793922825).abs() < 1e-12);
    assert!(q_inv(0.5).abs() < 1e-12);
}

#[test]
fn path_loss_and_noise() {
    assert!((path_loss_db(50.0).unwrap() - (-99.18127216303431)).abs() < 1e-9);
    assert!(path_loss_db(0.0).is_err());
    assert!((noise_power_w(-174.0, 1e7) - 3.981071705534969e-14).abs() < 1e-26);
    assert!((db_to_linear(-30.0) - 1e-3).abs() < 1e-18);
}

#[test]
fn zero_sinr_gives_zero_rate() {
    assert_eq!(urllc_rate(0.0, 1e7, 256, 1e-9), 0.0);
    assert!(uplink_latency(&[1.0], 1e6, &[0.0]).is_err());
}

#[test]
fn dense_grid_is_monotone_and_below_shannon() {
    let link = UrllcLink::new(1e7, 256, 1e-9);
    let mut prev = 0.0;
    for i in 0..10_000 {
        let g = 1e3 * i as f64 / 9_999.0;
        let r = link.rate(g);
        assert!(r >= prev, "rate drops at γ = {g}");
        if g > 0.0 {
            assert!(r < shannon_rate(g, 1e7));
        }
        prev = r;
    }
}

proptest! {
    #[test]
    fn rate_nondecreasing_in_blocklength(g in 0.0f64..1e3, n in 1u32..2048) {
        prop_assert!(urllc_rate(g, 1e7, n + 1, 1e-9) >= urllc_rate(g, 1e7, n, 1e-9));
    }

    #[test]
    fn rate_nonnegative_and_below_shannon(g in 1e-6f64..1e4, n in 1u32..4096, e in 1e-12f64..0.5) {
        let r = urllc_rate(g, 1e7, n, e);
        prop_assert!(r >= 0.0);
        prop_assert!(r < shannon_rate(g, 1e7));
    }

    #[test]
    fn uplink_latency_is_max_over_destinations(bits in 1.0f64..1e8, r1 in 1.0f64..1e9, r2 in 1.0f64..1e9, f in 0.01f64..0.99) {
        let t = uplink_latency(&[f, 1.0 - f], bits, &[r1, r2]).unwrap();
        prop_assert!((t - (f * bits / r1).max((1.0 - f) * bits / r2)).abs() <= 1e-12 * t.max(1.0));
    }
}
