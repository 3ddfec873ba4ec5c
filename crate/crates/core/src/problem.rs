//! The β-partial-matching problem: matchings, instances drawn from the
//! hard input distribution, and shared numeric helpers.
//!
//! Vertices are 1-based throughout, matching the usual `[n] = {1, …, n}`
//! convention. Bit strings are `&[bool]`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{domain, parameter, Error, Result};

/// Fraction of vertices covered by a matching, kept as an exact rational in
/// `(0, 1/2]` so that `β·n` integrality is checked without rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Beta(Ratio<u64>);

impl Beta {
    pub const HALF: Beta = Beta(Ratio::new_raw(1, 2));
    pub const QUARTER: Beta = Beta(Ratio::new_raw(1, 4));

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(parameter("beta denominator is zero"));
        }
        let r = Ratio::new(numer, denom);
        if r.numer() == &0 || r > Ratio::new(1, 2) {
            return Err(parameter(format!("beta = {r} outside (0, 1/2]")));
        }
        Ok(Beta(r))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Number of edges `β·n`, or an error if it is not a positive integer.
    pub fn edges_for(&self, n: usize) -> Result<usize> {
        let scaled = self.0 * Ratio::from_integer(n as u64);
        if !scaled.is_integer() || scaled.numer() == &0 {
            return Err(parameter(format!("beta * n = {self} * {n} is not a positive integer")));
        }
        Ok(scaled.to_integer() as usize)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Accepts `p/q`, an integer, or a terminating decimal such as `0.25`.
impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || parameter(format!("cannot parse beta from {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse::<u64>().map_err(|_| bad())?;
            let q = q.trim().parse::<u64>().map_err(|_| bad())?;
            return Beta::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int = if int.is_empty() { 0 } else { int.parse::<u64>().map_err(|_| bad())? };
            if int > 0 {
                return Err(parameter(format!("beta = {s} outside (0, 1/2]")));
            }
            let denom = 10u64.pow(frac.len() as u32);
            let numer = frac.parse::<u64>().map_err(|_| bad())?;
            return Beta::new(numer, denom);
        }
        let v = s.parse::<u64>().map_err(|_| bad())?;
        Beta::new(v, 1)
    }
}

/// A set of vertex-disjoint edges over `[n]`.
///
/// Stored canonically: each edge as `(i, j)` with `i < j`, edges sorted by
/// `i`. Two matchings with the same edge set therefore compare equal, and the
/// `l`-th edge of a matching always means the `l`-th edge in this order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BetaMatching {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl BetaMatching {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(parameter(format!("n = {n} must be an even integer >= 2")));
        }
        let mut seen = vec![false; n + 1];
        let mut out = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(parameter(format!("vertex {v} outside [1, {n}]")));
                }
                if seen[v] {
                    return Err(parameter(format!("vertex {v} appears in two edges")));
                }
                seen[v] = true;
            }
            out.push((a.min(b), a.max(b)));
        }
        if out.is_empty() {
            return Err(parameter("matching has no edges"));
        }
        out.sort_unstable();
        Ok(Self { n, edges: out })
    }

    /// Like [`BetaMatching::new`], additionally requiring exactly `β·n` edges.
    pub fn with_beta(n: usize, beta: Beta, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let m = Self::new(n, edges)?;
        let want = beta.edges_for(n)?;
        if m.edges.len() != want {
            return Err(parameter(format!("expected {want} edges for beta = {beta}, got {}", m.edges.len())));
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn beta(&self) -> Beta {
        Beta(Ratio::new(self.edges.len() as u64, self.n as u64))
    }

    pub fn is_perfect(&self) -> bool {
        2 * self.edges.len() == self.n
    }

    /// Position of the edge `{i, j}` in canonical order.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let e = (i.min(j), i.max(j));
        self.edges.binary_search(&e).ok()
    }

    /// For every vertex, its partner in the matching (index 0 unused).
    pub fn partners(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.n + 1];
        for &(i, j) in &self.edges {
            p[i] = Some(j);
            p[j] = Some(i);
        }
        p
    }
}

/// Parity of each matched pair: `v_l = x_{i_l} ⊕ x_{j_l}`.
pub fn apply_matching(matching: &BetaMatching, x: &[bool]) -> Result<Vec<bool>> {
    if x.len() != matching.n {
        return Err(Error::Shape { expected: matching.n, actual: x.len() });
    }
    Ok(matching.edges.iter().map(|&(i, j)| x[i - 1] ^ x[j - 1]).collect())
}

/// One βPM instance. Alice holds `x`; Bob holds `(matching, omega)`; the
/// promise `omega = Mx ⊕ a^{βn}` fixes the answer bit `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInput {
    x: Vec<bool>,
    matching: BetaMatching,
    omega: Vec<bool>,
    a: bool,
}

impl ProblemInput {
    /// Builds an instance, deriving `a` from the promise. Inputs where
    /// `Mx ⊕ omega` is not constant are rejected. `omega` is indexed by the
    /// matching's canonical edge order.
    pub fn new(x: Vec<bool>, matching: BetaMatching, omega: Vec<bool>) -> Result<Self> {
        let v = apply_matching(&matching, &x)?;
        if omega.len() != v.len() {
            return Err(Error::Shape { expected: v.len(), actual: omega.len() });
        }
        let a = v[0] ^ omega[0];
        if v.iter().zip(&omega).any(|(&vl, &wl)| vl ^ wl != a) {
            return Err(parameter("input violates the promise: Mx xor omega is not constant"));
        }
        Ok(Self { x, matching, omega, a })
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    pub fn matching(&self) -> &BetaMatching {
        &self.matching
    }

    pub fn omega(&self) -> &[bool] {
        &self.omega
    }

    /// The βPM answer. Every coordinate of `Mx ⊕ omega` equals it.
    pub fn answer(&self) -> bool {
        self.a
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

/// Draws an instance from the hard distribution: uniform `x`, uniform
/// β-matching, uniform answer bit.
///
/// The matching pairs up the first `2βn` entries of a uniformly shuffled
/// `[n]` (partial Fisher–Yates), which is uniform over edge sets.
pub fn sample_input<R: Rng + ?Sized>(n: usize, beta: Beta, rng: &mut R) -> Result<ProblemInput> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(parameter(format!("n = {n} must be an even integer >= 2")));
    }
    let k = beta.edges_for(n)?;
    let x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let mut perm: Vec<usize> = (1..=n).collect();
    let (head, _) = perm.partial_shuffle(rng, 2 * k);
    let matching = BetaMatching::new(n, head.chunks_exact(2).map(|p| (p[0], p[1])))?;
    let a: bool = rng.random();
    let omega = apply_matching(&matching, &x)?.into_iter().map(|v| v ^ a).collect();
    Ok(ProblemInput { x, matching, omega, a })
}

/// Binary Shannon entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("binary entropy argument {p} outside [0, 1]")));
    }
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// `⌈log2 n⌉` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1, "ceil_log2 of zero");
    64 - (n - 1).leading_zeros()
}
