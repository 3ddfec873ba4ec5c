//! Exact simulation of the ideal single-photon protocol.
//!
//! Alice's photon is spread over `n` modes with amplitude `(-1)^{x_i}/√n` on
//! mode `i`. Bob routes mode pairs of a perfect matching that extends his
//! β-matching to two-mode interferometers: the photon lands on one pair, and
//! the `±` outcome on that pair reveals the parity of the two bits. All
//! amplitudes are real, so the state is a plain `Vec<f64>`.

use rand::Rng;

use crate::error::{parameter, Error, Result};
use crate::problem::{BetaMatching, ProblemInput};

/// Real amplitudes over `n` optical modes. Index `i` is mode `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeState {
    amplitudes: Vec<f64>,
}

impl ModeState {
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        let s = Self { amplitudes };
        if s.amplitudes.is_empty() || (s.norm_squared() - 1.0).abs() > 1e-12 {
            return Err(parameter("amplitudes must be non-empty with unit norm"));
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }
}

/// `|ψ_x⟩ = n^{-1/2} Σ_i (-1)^{x_i} |i⟩`.
pub fn encode_state(x: &[bool]) -> Result<ModeState> {
    if x.len() < 2 {
        return Err(Error::Shape { expected: 2, actual: x.len() });
    }
    let amp = 1.0 / (x.len() as f64).sqrt();
    Ok(ModeState { amplitudes: x.iter().map(|&b| if b { -amp } else { amp }).collect() })
}

/// A perfect matching that extends a β-matching.
///
/// The first [`given`](Self::given) edges are the original matching's edges
/// in its canonical order, so edge index `l < given` refers to the same edge
/// as in the original. The remaining vertices are paired greedily in
/// ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectCompletion {
    n: usize,
    edges: Vec<(usize, usize)>,
    given: usize,
}

impl PerfectCompletion {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn given(&self) -> usize {
        self.given
    }

    pub fn added_edges(&self) -> &[(usize, usize)] {
        &self.edges[self.given..]
    }

    /// The completion as a (canonically ordered) perfect matching.
    pub fn to_matching(&self) -> BetaMatching {
        BetaMatching::new(self.n, self.edges.iter().copied()).expect("completion is a valid matching")
    }
}

pub fn complete_matching(matching: &BetaMatching) -> PerfectCompletion {
    let partners = matching.partners();
    let free: Vec<usize> = (1..=matching.n()).filter(|&v| partners[v].is_none()).collect();
    let mut edges = matching.edges().to_vec();
    edges.extend(free.chunks_exact(2).map(|p| (p[0], p[1])));
    PerfectCompletion { n: matching.n(), edges, given: matching.len() }
}

/// Result of one ideal measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealOutcome {
    /// The photon hit edge `edge_index` of Bob's matching; `bit` is his answer.
    Conclusive { edge_index: usize, bit: bool },
    /// The photon hit edge `completed_edge` of the completion, which is not
    /// in Bob's matching; Bob outputs ⊥.
    Inconclusive { completed_edge: usize },
}

impl IdealOutcome {
    pub fn is_conclusive(&self) -> bool {
        matches!(self, IdealOutcome::Conclusive { .. })
    }

    pub fn bit(&self) -> Option<bool> {
        match *self {
            IdealOutcome::Conclusive { bit, .. } => Some(bit),
            IdealOutcome::Inconclusive { .. } => None,
        }
    }

    pub fn edge_index(&self) -> Option<usize> {
        match *self {
            IdealOutcome::Conclusive { edge_index, .. } => Some(edge_index),
            IdealOutcome::Inconclusive { .. } => None,
        }
    }

    /// Index of the completed-matching edge the photon was found on.
    pub fn completed_edge(&self) -> usize {
        match *self {
            IdealOutcome::Conclusive { edge_index, .. } => edge_index,
            IdealOutcome::Inconclusive { completed_edge } => completed_edge,
        }
    }
}

/// Born-rule probabilities for one edge of the completed matching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeProbabilities {
    pub edge: (usize, usize),
    /// Whether the edge belongs to Bob's original matching.
    pub in_matching: bool,
    /// Probability of landing on this edge and seeing `+` (equal bits).
    pub plus: f64,
    /// Probability of landing on this edge and seeing `-` (different bits).
    pub minus: f64,
}

/// Full outcome distribution of the ideal measurement, computed from the
/// statevector. `|α_i ± α_j|² / 2` for each completed edge `(i, j)`.
pub fn outcome_probabilities(state: &ModeState, matching: &BetaMatching) -> Result<Vec<EdgeProbabilities>> {
    if state.dim() != matching.n() {
        return Err(Error::Shape { expected: matching.n(), actual: state.dim() });
    }
    let completion = complete_matching(matching);
    let amp = state.amplitudes();
    Ok(completion
        .edges()
        .iter()
        .enumerate()
        .map(|(l, &(i, j))| {
            let (ai, aj) = (amp[i - 1], amp[j - 1]);
            EdgeProbabilities {
                edge: (i, j),
                in_matching: l < completion.given(),
                plus: (ai + aj).powi(2) / 2.0,
                minus: (ai - aj).powi(2) / 2.0,
            }
        })
        .collect())
}

/// Samples Bob's ideal measurement on `state` given his half of `input`.
pub fn measure_ideal<R: Rng + ?Sized>(state: &ModeState, input: &ProblemInput, rng: &mut R) -> Result<IdealOutcome> {
    let matching = input.matching();
    if state.dim() != matching.n() {
        return Err(Error::Shape { expected: matching.n(), actual: state.dim() });
    }
    let completion = complete_matching(matching);
    let amp = state.amplitudes();

    // Which pair of modes the photon is found in.
    let weights: Vec<f64> = completion.edges().iter().map(|&(i, j)| amp[i - 1].powi(2) + amp[j - 1].powi(2)).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut hit = weights.len() - 1;
    for (l, w) in weights.iter().enumerate() {
        if u < *w {
            hit = l;
            break;
        }
        u -= w;
    }
    if hit >= completion.given() {
        return Ok(IdealOutcome::Inconclusive { completed_edge: hit });
    }

    // ± measurement on the collapsed two-mode state.
    let (i, j) = completion.edges()[hit];
    let (ai, aj) = (amp[i - 1], amp[j - 1]);
    let p_plus = (ai + aj).powi(2) / (2.0 * weights[hit]);
    let parity = rng.random::<f64>() >= p_plus;
    Ok(IdealOutcome::Conclusive { edge_index: hit, bit: parity ^ input.omega()[hit] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{sample_input, Beta};
    use crate::rng::SimRng;

    #[test]
    fn encodes_amplitudes() {
        let s = encode_state(&[false, false]).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert_eq!(s.amplitudes(), &[h, h]);
        let s = encode_state(&[true, false, false, true]).unwrap();
        assert_eq!(s.amplitudes(), &[-0.5, 0.5, 0.5, -0.5]);
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
        assert!(encode_state(&[]).is_err());
    }

    #[test]
    fn completion_examples() {
        let m = BetaMatching::new(4, [(2, 3)]).unwrap();
        let c = complete_matching(&m);
        assert_eq!(c.edges(), &[(2, 3), (1, 4)]);
        assert_eq!(c.given(), 1);
        assert!(c.to_matching().is_perfect());

        let perfect = BetaMatching::new(4, [(1, 3), (2, 4)]).unwrap();
        let c = complete_matching(&perfect);
        assert_eq!(c.edges(), perfect.edges());
        assert!(c.added_edges().is_empty());
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = SimRng::new(5);
        for _ in 0..200 {
            let input = sample_input(16, Beta::QUARTER, &mut rng).unwrap();
            let state = encode_state(input.x()).unwrap();
            let probs = outcome_probabilities(&state, input.matching()).unwrap();
            let total: f64 = probs.iter().map(|p| p.plus + p.minus).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for p in &probs {
                // each completed edge carries 2/n, and one of ± is impossible
                assert!((p.plus + p.minus - 2.0 / 16.0).abs() < 1e-15);
                assert!(p.plus.min(p.minus) < 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let mut rng = SimRng::new(1);
        let input = sample_input(8, Beta::QUARTER, &mut rng).unwrap();
        let state = encode_state(&[false; 4]).unwrap();
        assert!(measure_ideal(&state, &input, &mut rng).is_err());
    }

    #[test]
    fn perfect_matching_always_conclusive() {
        let mut rng = SimRng::new(11);
        for _ in 0..1000 {
            let input = sample_input(8, Beta::HALF, &mut rng).unwrap();
            let state = encode_state(input.x()).unwrap();
            let out = measure_ideal(&state, &input, &mut rng).unwrap();
            assert_eq!(out.bit(), Some(input.answer()));
        }
    }

    #[test]
    fn conclusive_rate_is_two_beta() {
        let mut rng = SimRng::new(77);
        let trials = 100_000;
        let mut conclusive = 0usize;
        let mut edge_hits = [0usize; 8];
        for _ in 0..trials {
            let input = sample_input(16, Beta::QUARTER, &mut rng).unwrap();
            let state = encode_state(input.x()).unwrap();
            match measure_ideal(&state, &input, &mut rng).unwrap() {
                IdealOutcome::Conclusive { edge_index, bit } => {
                    assert_eq!(bit, input.answer());
                    conclusive += 1;
                    edge_hits[edge_index] += 1;
                }
                IdealOutcome::Inconclusive { completed_edge } => assert!(completed_edge >= 4),
            }
        }
        let p = 0.5;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((conclusive as f64 / trials as f64 - p).abs() <= 4.0 * sigma);
        // only the first βn = 4 indices can be conclusive
        assert!(edge_hits[4..].iter().all(|&c| c == 0));
    }
}
