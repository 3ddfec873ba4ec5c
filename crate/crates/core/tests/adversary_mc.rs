//! Subset-guessing adversary: Monte Carlo, exact enumeration and formula.

use hmqct_core::adversary::{bkp_error_mc, bkp_exact_error, eps_bkp, matched_vertex_distribution};
use hmqct_core::Beta;

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[test]
fn monte_carlo_converges_to_exact() {
    const TRIALS: u64 = 200_000;
    for (n, beta) in [(4, Beta::QUARTER), (4, Beta::HALF), (6, Beta::HALF), (6, Beta::new(1, 3).unwrap())] {
        for d in 0..=n {
            let exact = bkp_exact_error(n, beta, d).unwrap();
            let (errors, trials) = bkp_error_mc(n, beta, d, TRIALS, 90 + d as u64).unwrap();
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            let rate = errors as f64 / trials as f64;
            assert!((rate - exact).abs() <= 4.0 * sigma + 0.5 / trials as f64, "n={n} β={beta} d={d}: {rate} vs {exact}");
        }
    }
}

#[test]
fn monte_carlo_respects_formula_at_larger_n() {
    const TRIALS: u64 = 20_000;
    for d in [0, 8, 32, 64, 128] {
        let bound = eps_bkp(128, Beta::QUARTER, d).unwrap();
        let (errors, trials) = bkp_error_mc(128, Beta::QUARTER, d, TRIALS, 3).unwrap();
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(errors as f64 / trials as f64 <= bound + 4.0 * sigma, "d={d}");
    }
}

/// Compares against exact integer binomials, which also checks Vandermonde's
/// identity Σ_k C(K,k)C(N−K,d−k) = C(N,d).
#[test]
fn hypergeometric_against_exact_binomials() {
    for (n, beta) in [(8, Beta::QUARTER), (40, Beta::QUARTER), (60, Beta::HALF), (60, Beta::new(1, 6).unwrap())] {
        let marked = 2 * beta.edges_for(n).unwrap() as u64;
        for d in 0..=n as u64 {
            let total = binom(n as u64, d);
            let terms: Vec<u128> = (0..=d).map(|k| binom(marked, k) * binom(n as u64 - marked, d - k)).collect();
            assert_eq!(terms.iter().sum::<u128>(), total);
            let pmf = matched_vertex_distribution(n, beta, d as usize).unwrap();
            for (k, (&p, &t)) in pmf.iter().zip(&terms).enumerate() {
                assert!((p - t as f64 / total as f64).abs() < 1e-12, "n={n} d={d} k={k}");
            }
        }
    }
}

#[test]
fn formula_against_exact_sum() {
    for (n, beta) in [(16, Beta::QUARTER), (60, Beta::HALF)] {
        let marked = 2 * beta.edges_for(n).unwrap() as u64;
        let scale = 4.0 * beta.as_f64() * n as f64;
        for d in 0..=n as u64 {
            let total = binom(n as u64, d) as f64;
            let direct: f64 = (0..=d)
                .map(|k| {
                    let w = (binom(marked, k) * binom(n as u64 - marked, d - k)) as f64 / total;
                    let k = k as f64;
                    w * (-k * (k - 1.0) / scale).exp()
                })
                .sum::<f64>()
                / 2.0;
            assert!((eps_bkp(n, beta, d as usize).unwrap() - direct.min(0.5)).abs() < 1e-12, "n={n} d={d}");
        }
    }
}
