//! The best known classical protocol for βPM.
//!
//! Alice and Bob use public randomness to pick `d` of Alice's positions and
//! Alice sends those bits. If two of the revealed positions form an edge of
//! Bob's matching, Bob learns the answer from that edge's parity and `ω`;
//! otherwise he guesses. The protocol costs `d` bits, and its error is what
//! the optimistic key-rate bound charges an adversary holding `d` bits.

use std::sync::OnceLock;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::problem::{Beta, BetaMatching, ProblemInput};
use crate::rng::SimRng;

/// Largest `n` accepted by [`bkp_exact_error`].
pub const MAX_EXACT_N: usize = 8;

/// The public-coin subset of positions Alice reveals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetStrategy {
    n: usize,
    indices: Vec<usize>,
}

impl SubsetStrategy {
    /// A uniformly random `d`-subset of `[n]`.
    pub fn sample<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Self> {
        if d > n {
            return Err(domain(format!("budget d = {d} exceeds n = {n}")));
        }
        let mut indices: Vec<usize> = index::sample(rng, n, d).into_iter().map(|i| i + 1).collect();
        indices.sort_unstable();
        Ok(Self { n, indices })
    }

    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.iter().any(|&i| i == 0 || i > n) {
            return Err(domain("subset index outside [1, n]"));
        }
        Ok(Self { n, indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn budget(&self) -> usize {
        self.indices.len()
    }

    /// Alice's message: her bits at the chosen positions.
    pub fn transcript(&self, x: &[bool]) -> Vec<bool> {
        self.indices.iter().map(|&i| x[i - 1]).collect()
    }

    /// First edge of `matching` with both endpoints revealed, if any.
    pub fn covered_edge(&self, matching: &BetaMatching) -> Option<usize> {
        let mut revealed = vec![false; self.n + 1];
        for &i in &self.indices {
            revealed[i] = true;
        }
        matching.edges().iter().position(|&(i, j)| revealed[i] && revealed[j])
    }
}

/// One execution of the protocol; returns Bob's guess of the answer bit.
pub fn run_bkp<R: Rng + ?Sized>(input: &ProblemInput, d: usize, rng: &mut R) -> Result<bool> {
    let subset = SubsetStrategy::sample(input.n(), d, rng)?;
    let message = subset.transcript(input.x());
    // Bob's view: the subset, the message, and his own (M, ω).
    let bit_at = |v: usize| message[subset.indices().binary_search(&v).expect("revealed vertex")];
    Ok(match subset.covered_edge(input.matching()) {
        Some(l) => {
            let (i, j) = input.matching().edges()[l];
            bit_at(i) ^ bit_at(j) ^ input.omega()[l]
        }
        None => rng.random(),
    })
}

/// Monte Carlo error of [`run_bkp`] under the hard distribution.
///
/// Returns `(errors, trials)`. Chunked like
/// [`simulate_batch`](crate::channel::simulate_batch), so it is reproducible
/// for a fixed seed.
pub fn bkp_error_mc(n: usize, beta: Beta, d: usize, trials: u64, seed: u64) -> Result<(u64, u64)> {
    const CHUNK: u64 = 1 << 14;
    if d > n {
        return Err(domain(format!("budget d = {d} exceeds n = {n}")));
    }
    beta.edges_for(n)?;
    let root = SimRng::new(seed);
    let chunks = trials.div_ceil(CHUNK);
    let errors = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<u64> {
            let mut rng = root.fork(c);
            let len = CHUNK.min(trials - c * CHUNK);
            let mut errs = 0;
            for _ in 0..len {
                let input = crate::problem::sample_input(n, beta, &mut rng)?;
                if run_bkp(&input, d, &mut rng)? != input.answer() {
                    errs += 1;
                }
            }
            Ok(errs)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok((errors, trials))
}

/// Upper bound on the protocol's error with budget `d`:
///
/// `Σ_k C(2βn, k)·C(n − 2βn, d − k) / (2·C(n, d)) · exp(−k(k−1)/(4βn))`,
///
/// clamped to `[0, 1/2]`. `k` is the number of revealed matched vertices,
/// which is hypergeometric.
pub fn eps_bkp(n: usize, beta: Beta, d: usize) -> Result<f64> {
    let matched = 2 * beta.edges_for(n)?;
    if d > n {
        return Err(domain(format!("budget d = {d} exceeds n = {n}")));
    }
    let scale = 2.0 * matched as f64; // 4βn
    let sum = sum_hypergeometric(n as u64, matched as u64, d as u64, |k| {
        let k = k as f64;
        (-k * (k - 1.0) / scale).exp()
    });
    Ok((sum / 2.0).clamp(0.0, 0.5))
}

/// Probability mass of the number of matched vertices among `d` revealed ones,
/// indexed by `k = 0..=d`.
pub fn matched_vertex_distribution(n: usize, beta: Beta, d: usize) -> Result<Vec<f64>> {
    let matched = 2 * beta.edges_for(n)? as u64;
    if d > n {
        return Err(domain(format!("budget d = {d} exceeds n = {n}")));
    }
    let mut pmf: Vec<f64> = (0..=d as u64).map(|k| hypergeometric_ln_pmf(n as u64, matched, d as u64, k).exp()).collect();
    // ln-factorial rounding leaves ~1e-12 of mass error at large n
    let total: f64 = pmf.iter().sum();
    pmf.iter_mut().for_each(|p| *p /= total);
    Ok(pmf)
}

/// Exact average error of the protocol by enumerating every subset and every
/// β-matching. The bits `x` integrate out: an uncovered pair `(s, M)` errs
/// with probability 1/2, a covered one never does.
pub fn bkp_exact_error(n: usize, beta: Beta, d: usize) -> Result<f64> {
    if n > MAX_EXACT_N {
        return Err(Error::Resource(format!("exhaustive enumeration limited to n <= {MAX_EXACT_N}, got {n}")));
    }
    let edges = beta.edges_for(n)?;
    if d > n {
        return Err(domain(format!("budget d = {d} exceeds n = {n}")));
    }
    let matchings = enumerate_matchings(n, edges);
    let mut uncovered = 0u64;
    let mut pairs = 0u64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != d {
            continue;
        }
        for m in &matchings {
            pairs += 1;
            if !m.iter().any(|&(i, j)| mask >> i & 1 == 1 && mask >> j & 1 == 1) {
                uncovered += 1;
            }
        }
    }
    Ok(uncovered as f64 / (2 * pairs) as f64)
}

/// All sets of `edges` disjoint pairs over `0..n`, each listed once.
fn enumerate_matchings(n: usize, edges: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(used: u32, n: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        let Some(i) = (0..n).find(|&v| used >> v & 1 == 0) else { return };
        // i stays unmatched, if enough vertices remain for the other edges
        let free = n - used.count_ones() as usize;
        if free > 2 * left {
            go(used | 1 << i, n, left, cur, out);
        }
        for j in i + 1..n {
            if used >> j & 1 == 0 {
                cur.push((i, j));
                go(used | 1 << i | 1 << j, n, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(0, n, edges, &mut Vec::new(), &mut out);
    out
}

/// `Σ_k pmf(k)·weight(k)` for a hypergeometric law (population `pop`,
/// `marked` successes, `draws` draws), walking outward from the mode and
/// stopping once the remaining tail cannot contribute 1e-17.
pub(crate) fn sum_hypergeometric(pop: u64, marked: u64, draws: u64, weight: impl Fn(u64) -> f64) -> f64 {
    let lo = draws.saturating_sub(pop - marked);
    let hi = draws.min(marked);
    let mode = (((draws + 1) as f64 * (marked + 1) as f64 / (pop + 2) as f64).floor() as u64).clamp(lo, hi);
    let p_mode = hypergeometric_ln_pmf(pop, marked, draws, mode).exp();
    let mut sum = p_mode * weight(mode);
    let mut mass = p_mode;

    // pmf(k+1)/pmf(k) = (K−k)(d−k) / ((k+1)(N−K−d+k+1))
    let mut p = p_mode;
    for k in mode..hi {
        let num = (marked - k) as f64 * (draws - k) as f64;
        let den = (k + 1) as f64 * (pop - marked + k + 1 - draws) as f64;
        p *= num / den;
        sum += p * weight(k + 1);
        mass += p;
        if p * (hi - k) as f64 <= 1e-17 {
            break;
        }
    }
    let mut p = p_mode;
    for k in (lo + 1..=mode).rev() {
        let num = k as f64 * (pop - marked + k - draws) as f64;
        let den = (marked - k + 1) as f64 * (draws - k + 1) as f64;
        p *= num / den;
        sum += p * weight(k - 1);
        mass += p;
        if p * (k - lo) as f64 <= 1e-17 {
            break;
        }
    }
    sum / mass
}

fn hypergeometric_ln_pmf(pop: u64, marked: u64, draws: u64, k: u64) -> f64 {
    if k > marked || k > draws || draws - k > pop - marked {
        return f64::NEG_INFINITY;
    }
    ln_binomial(marked, k) + ln_binomial(pop - marked, draws - k) - ln_binomial(pop, draws)
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln(k!)`: exact table below 256, Stirling series above.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; 256];
        for i in 1..256 {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    });
    if let Some(&v) = table.get(k as usize) {
        return v;
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (std::f64::consts::TAU * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_matches_table() {
        let mut exact = 0.0f64;
        for i in 1..=2000u64 {
            exact += (i as f64).ln();
            if i >= 256 {
                assert!((ln_factorial(i) - exact).abs() < 1e-9 * exact, "k = {i}");
            }
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(eps_bkp(16, Beta::QUARTER, 0).unwrap(), 0.5);
        assert!((eps_bkp(4, Beta::QUARTER, 1).unwrap() - 0.5).abs() < 1e-15);
        let want = (5.0 + (-0.5f64).exp()) / 12.0;
        assert!((eps_bkp(4, Beta::QUARTER, 2).unwrap() - want).abs() < 1e-12);
        assert!(eps_bkp(4, Beta::QUARTER, 5).is_err());
    }

    #[test]
    fn exact_examples() {
        assert!((bkp_exact_error(4, Beta::QUARTER, 2).unwrap() - 5.0 / 12.0).abs() < 1e-15);
        assert_eq!(bkp_exact_error(4, Beta::QUARTER, 1).unwrap(), 0.5);
        assert_eq!(bkp_exact_error(6, Beta::HALF, 0).unwrap(), 0.5);
        assert_eq!(bkp_exact_error(8, Beta::QUARTER, 8).unwrap(), 0.0);
        assert!(matches!(bkp_exact_error(10, Beta::HALF, 2), Err(Error::Resource(_))));
    }

    #[test]
    fn matching_enumeration_counts() {
        // k-edge matchings of K_n: n! / (2^k k! (n-2k)!)
        assert_eq!(enumerate_matchings(4, 2).len(), 3);
        assert_eq!(enumerate_matchings(4, 1).len(), 6);
        assert_eq!(enumerate_matchings(6, 3).len(), 15);
        assert_eq!(enumerate_matchings(8, 2).len(), 210);
        assert_eq!(enumerate_matchings(8, 4).len(), 105);
    }

    #[test]
    fn exact_never_exceeds_formula() {
        for (n, beta) in [(4, Beta::QUARTER), (4, Beta::HALF), (6, Beta::HALF), (8, Beta::QUARTER), (8, Beta::HALF)] {
            for d in 0..=n {
                let exact = bkp_exact_error(n, beta, d).unwrap();
                let bound = eps_bkp(n, beta, d).unwrap();
                assert!(exact <= bound + 1e-12, "n={n} beta={beta} d={d}: {exact} > {bound}");
            }
        }
    }

    #[test]
    fn hypergeometric_normalizes() {
        for (n, beta) in [(4, Beta::QUARTER), (16, Beta::QUARTER), (1024, Beta::QUARTER), (4096, Beta::HALF)] {
            for d in [0, 1, 3, n / 3, n / 2, n] {
                let total: f64 = matched_vertex_distribution(n, beta, d).unwrap().iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} d={d}: {total}");
                let walked = sum_hypergeometric(n as u64, 2 * beta.edges_for(n).unwrap() as u64, d as u64, |_| 1.0);
                assert!((walked - 1.0).abs() < 1e-12, "n={n} d={d}: {walked}");
            }
        }
    }

    #[test]
    fn outward_walk_matches_direct_sum() {
        for (n, d) in [(64, 20), (1024, 100), (1024, 1000), (1 << 16, 512)] {
            let beta = Beta::QUARTER;
            let scale = 4.0 * beta.as_f64() * n as f64;
            let direct: f64 = matched_vertex_distribution(n, beta, d)
                .unwrap()
                .iter()
                .enumerate()
                .map(|(k, p)| p * (-(k as f64) * (k as f64 - 1.0) / scale).exp())
                .sum::<f64>()
                / 2.0;
            assert!((eps_bkp(n, beta, d).unwrap() - direct.min(0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn formula_nonincreasing_in_budget() {
        for (n, beta) in [(16, Beta::QUARTER), (256, Beta::QUARTER), (1024, Beta::HALF)] {
            let mut prev = 0.5;
            for d in 0..=n {
                let e = eps_bkp(n, beta, d).unwrap();
                assert!(e <= prev + 1e-15, "n={n} d={d}");
                prev = e;
            }
        }
    }

    #[test]
    fn full_budget_never_errs() {
        let mut rng = SimRng::new(4);
        for _ in 0..500 {
            let input = crate::problem::sample_input(12, Beta::QUARTER, &mut rng).unwrap();
            assert_eq!(run_bkp(&input, 12, &mut rng).unwrap(), input.answer());
        }
    }

    #[test]
    fn subset_transcript() {
        let s = SubsetStrategy::new(4, vec![3, 1]).unwrap();
        assert_eq!(s.transcript(&[true, false, false, true]), vec![true, false]);
        let m = BetaMatching::new(4, [(1, 3)]).unwrap();
        assert_eq!(s.covered_edge(&m), Some(0));
        assert!(SubsetStrategy::new(4, vec![5]).is_err());
    }
}
