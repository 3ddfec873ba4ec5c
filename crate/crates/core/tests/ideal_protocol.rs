//! Exhaustive and statistical checks of the noiseless quantum protocol.

use hmqct_core::quantum::{encode_state, measure_ideal, outcome_probabilities};
use hmqct_core::{apply_matching, sample_input, Beta, BetaMatching, ProblemInput, SimRng};

/// All matchings with `k` edges over `1..=n`, built independently of the
/// library's own enumeration.
fn matchings(n: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &[usize], k: usize, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if k == 0 {
            out.push(acc.clone());
            return;
        }
        if free.len() < 2 * k {
            return;
        }
        let (first, rest) = (free[0], &free[1..]);
        // first vertex left unmatched
        rec(rest, k, acc, out);
        for (idx, &v) in rest.iter().enumerate() {
            let remaining: Vec<usize> = rest.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, &u)| u).collect();
            acc.push((first, v));
            rec(&remaining, k - 1, acc, out);
            acc.pop();
        }
    }
    let vertices: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    rec(&vertices, k, &mut Vec::new(), &mut out);
    out
}

fn bits(v: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| v >> i & 1 == 1).collect()
}

#[test]
fn matching_counts() {
    assert_eq!(matchings(4, 2).len(), 3);
    assert_eq!(matchings(6, 3).len(), 15);
    assert_eq!(matchings(6, 2).len(), 45);
    assert_eq!(matchings(6, 1).len(), 15);
}

#[test]
fn conclusive_rounds_never_err_exhaustively() {
    let mut rng = SimRng::new(11);
    for (n, beta) in [(4, Beta::QUARTER), (4, Beta::HALF), (6, Beta::new(1, 6).unwrap()), (6, Beta::new(1, 3).unwrap()), (6, Beta::HALF)] {
        let k = beta.edges_for(n).unwrap();
        let mut cases = 0;
        for edges in matchings(n, k) {
            let m = BetaMatching::new(n, edges).unwrap();
            for xv in 0..1u32 << n {
                let x = bits(xv, n);
                let mx = apply_matching(&m, &x).unwrap();
                for a in [false, true] {
                    let omega: Vec<bool> = mx.iter().map(|&b| b ^ a).collect();
                    let input = ProblemInput::new(x.clone(), m.clone(), omega.clone()).unwrap();
                    let state = encode_state(&x).unwrap();
                    let probs = outcome_probabilities(&state, &m).unwrap();

                    let total: f64 = probs.iter().map(|p| p.plus + p.minus).sum();
                    assert!((total - 1.0).abs() < 1e-12);
                    let conclusive: f64 = probs.iter().filter(|p| p.in_matching).map(|p| p.plus + p.minus).sum();
                    assert!((conclusive - 2.0 * beta.as_f64()).abs() < 1e-12);

                    // On edge l Bob answers parity ⊕ ω_l; `+` means even parity.
                    for (l, p) in probs.iter().enumerate().filter(|(_, p)| p.in_matching) {
                        let wrong = if omega[l] == a { p.minus } else { p.plus };
                        assert!(wrong.abs() < 1e-15, "n={n} x={xv:b} edge {:?}", p.edge);
                    }
                    for _ in 0..4 {
                        if let Some(bit) = measure_ideal(&state, &input, &mut rng).unwrap().bit() {
                            assert_eq!(bit, a);
                        }
                    }
                    cases += 1;
                }
            }
        }
        assert!(cases > 0);
    }
}

#[test]
fn conclusive_rate_is_two_beta() {
    const SAMPLES: u64 = 100_000;
    for (n, beta) in [(4, Beta::QUARTER), (6, Beta::new(1, 3).unwrap()), (64, Beta::QUARTER)] {
        let mut rng = SimRng::new(2024);
        let mut hits = 0u64;
        for _ in 0..SAMPLES {
            let input = sample_input(n, beta, &mut rng).unwrap();
            let state = encode_state(input.x()).unwrap();
            let out = measure_ideal(&state, &input, &mut rng).unwrap();
            if let Some(bit) = out.bit() {
                assert_eq!(bit, input.answer());
                hits += 1;
            }
        }
        let p = 2.0 * beta.as_f64();
        let sigma = (p * (1.0 - p) / SAMPLES as f64).sqrt();
        let rate = hits as f64 / SAMPLES as f64;
        assert!((rate - p).abs() <= 4.0 * sigma, "n={n}: {rate} vs {p}");
    }
}

/// The photon lands on each completed edge with probability 2/n.
#[test]
fn completed_edges_uniform_chi_squared() {
    const SAMPLES: usize = 100_000;
    // n = 6 has 3 completed edges: χ² with 2 degrees of freedom, whose
    // upper tail is exp(−t/2); reject below p = 1e-6.
    let (n, beta) = (6, Beta::new(1, 3).unwrap());
    let threshold = -2.0 * 1e-6f64.ln();
    let mut rng = SimRng::new(77);
    let mut counts = [0usize; 3];
    for _ in 0..SAMPLES {
        let input = sample_input(n, beta, &mut rng).unwrap();
        let state = encode_state(input.x()).unwrap();
        counts[measure_ideal(&state, &input, &mut rng).unwrap().completed_edge()] += 1;
    }
    let expected = SAMPLES as f64 / 3.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < threshold, "χ² = {chi2}, counts {counts:?}");
}
