//! Properties of the guessing bounds and the rate model.

use hmqct_core::bounds::{
    gamma_inequalities_hold, pguess_bound_optimistic, pguess_bound_theorem4, verify_gamma_inequalities, GAMMA,
};
use hmqct_core::channel::{qber, ChannelParams};
use hmqct_core::keyrate::{generate_curve, guessing_bound, hmqct_rate, BoundKind, CurveConfig};
use hmqct_core::{binary_entropy, Beta};
use proptest::prelude::*;

fn betas() -> impl Strategy<Value = Beta> {
    prop_oneof![Just(Beta::QUARTER), Just(Beta::new(1, 8).unwrap()), Just(Beta::new(1, 16).unwrap())]
}

proptest! {
    #[test]
    fn cubic_signs_and_dominance(log_n in 2u32..24, m in 1u32..=100, beta in betas()) {
        let n = 1usize << log_n;
        let b = pguess_bound_theorem4(n, m, beta, 0.0).unwrap();
        let c = b.cardan.unwrap();
        prop_assert!(c.q < 0.0 && c.p > 0.0);
        let f = c.z0.powi(3) + c.p * c.z0 + c.q;
        prop_assert!(f >= -1e-9 * c.q.abs(), "f(z0) = {f}");
        prop_assert!(c.root <= c.z0 * (1.0 + 1e-9));
    }

    #[test]
    fn delta_is_additive(log_n in 2u32..24, m in 1u32..50, delta in 0.0f64..0.1) {
        let n = 1usize << log_n;
        for kind in [BoundKind::Theorem4, BoundKind::Optimistic] {
            let a = guessing_bound(kind, n, m, Beta::QUARTER, 0.0).unwrap();
            let b = guessing_bound(kind, n, m, Beta::QUARTER, delta).unwrap();
            prop_assert!((b.raw - a.raw - delta).abs() <= 4.0 * f64::EPSILON * b.raw.abs().max(1.0));
        }
    }

    #[test]
    fn min_entropy_roundtrip(log_n in 2u32..24, m in 1u32..50) {
        let b = pguess_bound_optimistic(1 << log_n, m, Beta::QUARTER, 1e-4).unwrap();
        prop_assert!((2f64.powf(-b.h_min) - b.p_guess).abs() < 1e-12);
    }

    #[test]
    fn optimistic_dominates(l in 0.0f64..300.0, m in 1u32..60, log_n in 4u32..21, pd in prop_oneof![Just(0.0), Just(1e-8), Just(1e-3)]) {
        let p = ChannelParams { distance_km: l, eta_det: 0.65, p_dark: pd, n: 1 << log_n, beta: Beta::QUARTER, copies: m, delta: 1e-4 };
        let opt = hmqct_rate(&p, BoundKind::Optimistic).unwrap();
        let low = hmqct_rate(&p, BoundKind::Theorem4).unwrap();
        prop_assert!(opt >= low);
        let h2 = binary_entropy(qber(&p).unwrap()).unwrap();
        for kind in [BoundKind::Theorem4, BoundKind::Optimistic] {
            let h = guessing_bound(kind, p.n, m, p.beta, p.delta).unwrap().h_min;
            if h2 >= h {
                prop_assert_eq!(hmqct_rate(&p, kind).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn bounds_nonincreasing_in_n() {
    for m in [1, 2, 5, 10, 50] {
        for kind in [BoundKind::Theorem4, BoundKind::Optimistic] {
            let mut prev = f64::INFINITY;
            // only where the budget m⌈log2 n⌉ stays below n; at saturation the
            // formula keeps a residual error that shrinks with n
            for log_n in [4, 6, 8, 10, 12, 14, 16, 18, 20].into_iter().filter(|&k| m * k < 1 << k) {
                let b = guessing_bound(kind, 1 << log_n, m, Beta::QUARTER, 1e-4).unwrap();
                assert!(b.p_guess <= prev + 1e-15, "{kind:?} m={m} n=2^{log_n}");
                prev = b.p_guess;
            }
        }
    }
}

#[test]
fn gamma_inequalities_on_grid() {
    for log_n in 2..=20 {
        for c in [1, 2, 5, 10, 100] {
            for eps1 in [0.01, 0.1, 0.25, 0.4, 0.49] {
                for beta in [Beta::QUARTER, Beta::new(1, 8).unwrap()] {
                    assert!(verify_gamma_inequalities(eps1, c, beta, 1 << log_n).unwrap());
                }
            }
        }
    }
    assert!(gamma_inequalities_hold(0.1, 1, Beta::QUARTER, 1024, GAMMA).unwrap());
}

#[test]
fn reference_curve_properties() {
    let cfg = CurveConfig { distances: (0..=300).step_by(10).map(f64::from).collect(), ..CurveConfig::reference(1024) };
    let a = generate_curve(&cfg).unwrap();
    assert_eq!(a, generate_curve(&cfg).unwrap());
    for w in a.windows(2) {
        assert!(w[1].rate_optimistic <= w[0].rate_optimistic + 1e-15);
        assert!(w[1].rate_bb84 <= w[0].rate_bb84 + 1e-15);
        assert!(w[1].skc <= w[0].skc);
    }
    for p in &a {
        assert!(p.m_opt >= 1);
        assert!(p.rate_optimistic >= p.rate_lower);
    }
}
