//! Upper bounds on the adversary's probability of guessing the key bit.
//!
//! The chain runs from a classical lower bound on the one-way distributional
//! complexity of βPM, through an information-complexity lower bound and the
//! Holevo limit on `m` copies, to a bound on any attack that measures the
//! copies. A δ-noisy quantum memory adds exactly `δ` to any such bound.
//!
//! Logarithms are base 2 except where a formula explicitly uses `ln`.

use std::f64::consts::{E, LN_2};

use crate::adversary::eps_bkp;
use crate::error::{domain, Result};
use crate::problem::{ceil_log2, Beta};

/// The constant γ for which the distributional lower bound is proved.
pub const GAMMA: f64 = 1.0 / (8.0 * E);

/// The terms of the cubic `z³ + p·z + q = 0` behind the finite-`n` bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CardanTerms {
    pub q: f64,
    pub p: f64,
    /// `∛(−q) + √(p/3)`, the closed-form upper estimate of the root.
    pub z0: f64,
    /// The exact real root of the cubic.
    pub root: f64,
}

/// Upper bound on Eve's guessing probability and the min-entropy it implies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuessingBound {
    /// The bound clamped to `[1/2, 1]`.
    pub p_guess: f64,
    /// `−log2(p_guess)`, in `[0, 1]`.
    pub h_min: f64,
    /// The bound before clamping, including `δ`.
    pub raw: f64,
    pub delta: f64,
    /// Present for the finite-`n` bound only.
    pub cardan: Option<CardanTerms>,
}

impl GuessingBound {
    fn from_raw(raw: f64, delta: f64, cardan: Option<CardanTerms>) -> Self {
        let p_guess = raw.clamp(0.5, 1.0);
        // 0 − x keeps h_min at +0 when p_guess = 1
        Self { p_guess, h_min: 0.0 - p_guess.log2(), raw, delta, cardan }
    }
}

/// `(k(ε), d(ε))` such that `D¹_μ(βPM, ε) ≥ k(ε)·√n + d(ε)`.
pub fn theorem2_constants(eps: f64, beta: Beta) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(domain(format!("error {eps} outside (0, 1/2)")));
    }
    if beta.as_f64() > 0.25 {
        return Err(domain(format!("beta = {beta} outside (0, 1/4]")));
    }
    let gap = 0.5 - eps;
    let k = 4.0 * GAMMA / (25.0 * beta.as_f64().sqrt()) * gap * gap;
    let d = 2.0 * gap.log2() + 2.0 * (1.0 - 5f64.log2());
    Ok((k, d))
}

/// Checks the two conditions on γ that the distributional lower bound needs,
/// at `γ = 1/(8e)`.
pub fn verify_gamma_inequalities(eps1: f64, c: u32, beta: Beta, n: usize) -> Result<bool> {
    gamma_inequalities_hold(eps1, c, beta, n, GAMMA)
}

/// [`verify_gamma_inequalities`] at an arbitrary γ:
///
/// - `ε1²/2 ≥ Σ_{even k=2}^{4c−2} (64eγ²ε1²/k)^{k/2}`
/// - `ε1²/2 ≥ (8√2·e·γ·ε1·√(β/n))^{2c}`
pub fn gamma_inequalities_hold(eps1: f64, c: u32, beta: Beta, n: usize, gamma: f64) -> Result<bool> {
    if !(eps1 > 0.0 && eps1 < 0.5) {
        return Err(domain(format!("eps1 = {eps1} outside (0, 1/2)")));
    }
    if c < 1 {
        return Err(domain("c must be at least 1"));
    }
    let ratio = beta.as_f64() / n as f64;
    if !(ratio <= 0.25) {
        return Err(domain(format!("beta / n = {ratio} exceeds 1/4")));
    }
    let lhs = eps1 * eps1 / 2.0;
    let sum: f64 = (1..=2 * c - 1)
        .map(|h| {
            let k = 2.0 * h as f64;
            (64.0 * E * gamma * gamma * eps1 * eps1 / k).powf(k / 2.0)
        })
        .sum();
    let second = (8.0 * 2f64.sqrt() * E * gamma * eps1 * ratio.sqrt()).powi(2 * c as i32);
    Ok(lhs >= sum && lhs >= second)
}

/// Minimum number of copies an immediate-measurement attack needs to reach an
/// information cost of `ic` bits: `ic / ⌈log2 n⌉`.
pub fn min_copies_lemma8(ic: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("n = {n} must be at least 2")));
    }
    if !(ic >= 0.0) {
        return Err(domain(format!("information cost {ic} must be non-negative")));
    }
    Ok(ic / ceil_log2(n as u64) as f64)
}

/// `IC¹_μ(βPM, ε) ≥ (δ2/2)·D¹_μ(βPM, ε + δ2) − 6`, with the distributional
/// complexity replaced by its lower bound and the result floored at 0.
pub fn ic_lower_bound(eps: f64, delta2: f64, n: usize, beta: Beta) -> Result<f64> {
    if !(eps > 0.0 && delta2 > 0.0) {
        return Err(domain("eps and delta2 must be positive"));
    }
    if !(eps + delta2 < 0.5) {
        return Err(domain(format!("eps + delta2 = {} must be below 1/2", eps + delta2)));
    }
    let (k, d) = theorem2_constants(eps + delta2, beta)?;
    Ok((delta2 / 2.0 * (k * (n as f64).sqrt() + d) - 6.0).max(0.0))
}

/// Finite-`n` bound for an adversary holding `m` copies:
/// `1/2 + 2(∛(−q) + √(p/3)) + δ`, clamped to at most 1.
pub fn pguess_bound_theorem4(n: usize, m: u32, beta: Beta, delta: f64) -> Result<GuessingBound> {
    if n < 4 {
        return Err(domain(format!("n = {n} must be at least 4")));
    }
    check_delta(delta)?;
    let (q, p) = cubic_coefficients(n, m, beta);
    let z0 = (-q).cbrt() + (p / 3.0).sqrt();
    let cardan = CardanTerms { q, p, z0, root: real_cubic_root(p, q) };
    Ok(GuessingBound::from_raw(0.5 + 2.0 * z0 + delta, delta, Some(cardan)))
}

/// `(q, p)` with
/// `q = −50e√β/√n · ((m+1)⌈log2 n⌉ + ln 4 + 6)` and
/// `p = −50e√β/√n · (log2(5/2) − ln 4)`.
pub fn cubic_coefficients(n: usize, m: u32, beta: Beta) -> (f64, f64) {
    let scale = -50.0 / (n as f64).sqrt() * E * beta.as_f64().sqrt();
    let ln4 = 2.0 * LN_2;
    let logn = ceil_log2(n as u64) as f64;
    let q = scale * ((m as f64 + 1.0) * logn + ln4 + 6.0);
    let p = scale * (2.5f64.log2() - ln4);
    (q, p)
}

/// The single real root of `z³ + p·z + q` for `p > 0`.
pub fn real_cubic_root(p: f64, q: f64) -> f64 {
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    (-q / 2.0 + disc).cbrt() + (-q / 2.0 - disc).cbrt()
}

/// Bound assuming the best known classical protocol is optimal: an adversary
/// with `m` copies learns at most `m⌈log2 n⌉` bits, so
/// `P_guess ≤ 1 − ε_BKP(m⌈log2 n⌉) + δ`. Budgets beyond `n` are capped at `n`.
pub fn pguess_bound_optimistic(n: usize, m: u32, beta: Beta, delta: f64) -> Result<GuessingBound> {
    if n < 2 {
        return Err(domain(format!("n = {n} must be at least 2")));
    }
    if m < 1 {
        return Err(domain("m must be at least 1"));
    }
    check_delta(delta)?;
    let eps = eps_bkp(n, beta, optimistic_budget(n, m))?;
    Ok(GuessingBound::from_raw(1.0 - eps + delta, delta, None))
}

/// Classical bits an `m`-copy adversary may extract, capped at `n`.
pub fn optimistic_budget(n: usize, m: u32) -> usize {
    (m as u64 * ceil_log2(n as u64) as u64).min(n as u64) as usize
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(domain(format!("delta = {delta} outside [0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_example() {
        let (k, d) = theorem2_constants(0.25, Beta::QUARTER).unwrap();
        // 4/(8e·25·0.5)·(1/4)² and 2·log2(1/4) + 2(1 − log2 5)
        assert!((k - 9.196986e-4).abs() < 1e-9, "{k}");
        assert!((d - (-6.643856)).abs() < 1e-6, "{d}");
        let (k2, _) = theorem2_constants(0.25, Beta::new(1, 16).unwrap()).unwrap();
        assert!((k2 / k - 2.0).abs() < 1e-12);
        let (k3, d3) = theorem2_constants(0.5 - 1e-9, Beta::QUARTER).unwrap();
        assert!(k3 < 1e-18 && d3 < -50.0);
        assert!(theorem2_constants(0.5, Beta::QUARTER).is_err());
        assert!(theorem2_constants(0.1, Beta::HALF).is_err());
    }

    #[test]
    fn gamma_inequalities() {
        assert!(verify_gamma_inequalities(0.25, 1, Beta::QUARTER, 16).unwrap());
        assert!(verify_gamma_inequalities(0.0, 1, Beta::QUARTER, 16).is_err());
        assert!(verify_gamma_inequalities(0.2, 0, Beta::QUARTER, 16).is_err());
    }

    #[test]
    fn lemma8_values() {
        assert_eq!(min_copies_lemma8(0.0, 16).unwrap(), 0.0);
        assert_eq!(min_copies_lemma8(100.0, 1024).unwrap(), 10.0);
        assert_eq!(min_copies_lemma8(100.0, 1000).unwrap(), 10.0);
        assert!(min_copies_lemma8(-1.0, 16).is_err());
    }

    #[test]
    fn ic_bound() {
        let (k, d) = theorem2_constants(0.2, Beta::QUARTER).unwrap();
        let want = 0.05 * (k * 1000.0 + d) - 6.0;
        let got = ic_lower_bound(0.1, 0.1, 1_000_000, Beta::QUARTER).unwrap();
        assert!((got - want.max(0.0)).abs() < 1e-12);
        assert_eq!(ic_lower_bound(0.25, 0.25 - 1e-12, 1 << 20, Beta::QUARTER).unwrap(), 0.0);
        assert!(ic_lower_bound(0.3, 0.2, 1024, Beta::QUARTER).is_err());
        let mut prev = 0.0;
        for e in 4..40 {
            let v = ic_lower_bound(0.05, 0.05, 1usize << e, Beta::QUARTER).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn finite_n_bound_is_vacuous_at_four() {
        let b = pguess_bound_theorem4(4, 1, Beta::QUARTER, 0.0).unwrap();
        let c = b.cardan.unwrap();
        assert!((c.q - -386.9).abs() < 0.1, "{}", c.q);
        assert!((c.p - 2.187).abs() < 1e-3, "{}", c.p);
        assert!((b.raw - 16.8).abs() < 0.05, "{}", b.raw);
        assert_eq!(b.p_guess, 1.0);
        assert_eq!(b.h_min, 0.0);
        assert!(pguess_bound_theorem4(3, 1, Beta::QUARTER, 0.0).is_err());
    }

    #[test]
    fn cubic_root_is_a_root() {
        for (p, q) in [(2.187, -386.9), (1e-3, -0.5), (0.4, -1e-6)] {
            let r = real_cubic_root(p, q);
            assert!((r * r * r + p * r + q).abs() < 1e-9 * q.abs().max(1.0));
        }
    }

    #[test]
    fn optimistic_examples() {
        let b = pguess_bound_optimistic(4, 1, Beta::QUARTER, 0.0).unwrap();
        let want = 1.0 - (5.0 + (-0.5f64).exp()) / 12.0;
        assert!((b.p_guess - want).abs() < 1e-12);
        let b = pguess_bound_optimistic(4, 1, Beta::QUARTER, 0.01).unwrap();
        assert!((b.p_guess - want - 0.01).abs() < 1e-12);
        // budget covers all of x: the bound approaches 1
        let b = pguess_bound_optimistic(64, 20, Beta::QUARTER, 0.0).unwrap();
        assert!(b.p_guess > 1.0 - 1e-6);
        assert!(pguess_bound_optimistic(16, 0, Beta::QUARTER, 0.0).is_err());
    }

    #[test]
    fn bounds_monotone_in_m() {
        for n in [16usize, 1024, 1 << 16] {
            let mut prev = (0.0, 0.0);
            for m in 1..60 {
                let t4 = pguess_bound_theorem4(n, m, Beta::QUARTER, 1e-4).unwrap().p_guess;
                let opt = pguess_bound_optimistic(n, m, Beta::QUARTER, 1e-4).unwrap().p_guess;
                assert!(t4 >= prev.0 && opt >= prev.1);
                prev = (t4, opt);
            }
        }
    }

    #[test]
    fn h_min_round_trips() {
        for n in [4usize, 64, 4096, 1 << 20] {
            for m in [1, 5, 50] {
                for b in [
                    pguess_bound_theorem4(n, m, Beta::QUARTER, 1e-4).unwrap(),
                    pguess_bound_optimistic(n, m, Beta::QUARTER, 1e-4).unwrap(),
                ] {
                    assert!((2f64.powf(-b.h_min) - b.p_guess).abs() < 1e-12);
                    assert!((0.0..=1.0).contains(&b.h_min));
                    assert!(b.p_guess >= 0.5);
                }
            }
        }
    }
}
