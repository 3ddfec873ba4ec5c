//! Achievable key rates and rate-versus-distance curves.
//!
//! Per channel use the protocol keeps a round with probability
//! `1 − P(abort)`, and each kept round yields `H_min(A|E) − H2(QBER)` bits
//! after error correction and privacy amplification:
//!
//! `R = (1 − P(abort)) · max(0, H_min(A|E) − H2(QBER))`.
//!
//! The curves compare this rate (under both guessing bounds, optimized over
//! the copy count) with decoy-state BB84 and the two-mode secret-key capacity.

use rayon::prelude::*;

use crate::bounds::{pguess_bound_optimistic, pguess_bound_theorem4, GuessingBound};
use crate::channel::{p_abort, qber, transmittance, ChannelParams};
use crate::error::{domain, Result};
use crate::problem::{binary_entropy, Beta};

/// Which guessing-probability bound supplies the min-entropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// The proven finite-`n` bound.
    Theorem4,
    /// The bound assuming the best known classical protocol is optimal.
    Optimistic,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Theorem4 => "theorem4",
            BoundKind::Optimistic => "optimistic",
        }
    }
}

impl std::str::FromStr for BoundKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem4" | "lower" => Ok(BoundKind::Theorem4),
            "optimistic" => Ok(BoundKind::Optimistic),
            _ => Err(crate::Error::Parameter(format!("unknown bound kind {s:?}"))),
        }
    }
}

pub fn guessing_bound(kind: BoundKind, n: usize, m: u32, beta: Beta, delta: f64) -> Result<GuessingBound> {
    match kind {
        BoundKind::Theorem4 => pguess_bound_theorem4(n, m, beta, delta),
        BoundKind::Optimistic => pguess_bound_optimistic(n, m, beta, delta),
    }
}

/// Key rate in bits per channel use for one parameter set.
pub fn hmqct_rate(params: &ChannelParams, kind: BoundKind) -> Result<f64> {
    let h_min = guessing_bound(kind, params.n, params.copies, params.beta, params.delta)?.h_min;
    rate_for_min_entropy(params, h_min)
}

fn rate_for_min_entropy(params: &ChannelParams, h_min: f64) -> Result<f64> {
    let keep = 1.0 - p_abort(params)?;
    let leak = binary_entropy(qber(params)?)?;
    Ok(keep * (h_min - leak).max(0.0))
}

/// Min-entropy per copy count `m = 1..=m_max`, which does not depend on the
/// distance and can be shared by every point of a curve.
#[derive(Clone, Debug)]
pub struct MinEntropyTable {
    h_min: Vec<f64>,
}

impl MinEntropyTable {
    pub fn new(kind: BoundKind, n: usize, beta: Beta, delta: f64, m_max: u32) -> Result<Self> {
        if m_max < 1 {
            return Err(domain("m_max must be at least 1"));
        }
        let h_min = (1..=m_max)
            .into_par_iter()
            .map(|m| guessing_bound(kind, n, m, beta, delta).map(|b| b.h_min))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { h_min })
    }

    pub fn get(&self, m: u32) -> Option<f64> {
        self.h_min.get((m as usize).checked_sub(1)?).copied()
    }

    pub fn m_max(&self) -> u32 {
        self.h_min.len() as u32
    }

    /// Smallest `m` attaining the maximal rate, and that rate.
    pub fn optimize(&self, params: &ChannelParams) -> Result<(u32, f64)> {
        let mut best = (1, f64::NEG_INFINITY);
        for (i, &h) in self.h_min.iter().enumerate() {
            let m = i as u32 + 1;
            let r = rate_for_min_entropy(&params.with_copies(m), h)?;
            if r > best.1 {
                best = (m, r);
            }
        }
        Ok(best)
    }
}

/// Exhaustive scan over `m ∈ [1, m_max]`; ties go to the smallest `m`.
/// `params.copies` is ignored.
pub fn optimize_m(params: &ChannelParams, kind: BoundKind, m_max: u32) -> Result<(u32, f64)> {
    params.validate()?;
    MinEntropyTable::new(kind, params.n, params.beta, params.delta, m_max)?.optimize(params)
}

/// Default copy-count ceiling `⌈4√n⌉`.
pub fn default_m_max(n: usize) -> u32 {
    (4.0 * (n as f64).sqrt()).ceil() as u32
}

/// Repeaterless two-mode secret-key capacity `−log2(1 − T)`. Infinite at `T = 1`.
pub fn skc_two_mode(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("transmittance {t} outside [0, 1]")));
    }
    if t == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(-t).ln_1p() / std::f64::consts::LN_2)
}

/// Asymptotic decoy-state BB84 with infinitely many decoys (GLLP rate),
/// optimized over the signal intensity on a logarithmic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Bb84Model {
    /// Optical misalignment error `e_mis`.
    pub misalignment: f64,
    /// Error-correction inefficiency `f` (1 is the Shannon limit).
    pub ec_efficiency: f64,
    pub sifting: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_points: usize,
}

impl Default for Bb84Model {
    fn default() -> Self {
        Self { misalignment: 0.0, ec_efficiency: 1.0, sifting: 0.5, mu_min: 0.01, mu_max: 1.5, mu_points: 200 }
    }
}

impl Bb84Model {
    pub fn rate(&self, distance_km: f64, eta_det: f64, p_dark: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&eta_det) || !(0.0..=1.0).contains(&p_dark) {
            return Err(domain("eta_det and p_dark must lie in [0, 1]"));
        }
        if self.mu_points < 2 || !(self.mu_min > 0.0 && self.mu_max > self.mu_min) {
            return Err(domain("intensity grid needs two or more points on 0 < mu_min < mu_max"));
        }
        let eta = eta_det * transmittance(distance_km)?;
        let y0 = 2.0 * p_dark;
        let step = (self.mu_max / self.mu_min).ln() / (self.mu_points - 1) as f64;
        let mut best = 0.0f64;
        for i in 0..self.mu_points {
            let mu = self.mu_min * (step * i as f64).exp();
            best = best.max(self.rate_at(eta, y0, mu)?);
        }
        Ok(best)
    }

    /// Rate at signal intensity `mu` for total transmittance `eta` and
    /// background yield `y0`.
    pub fn rate_at(&self, eta: f64, y0: f64, mu: f64) -> Result<f64> {
        let e_mis = self.misalignment;
        let clicked = -(-eta * mu).exp_m1(); // 1 − e^{−ημ}
        let q_mu = y0 + clicked;
        let y1 = y0 + eta - y0 * eta;
        let q1 = mu * (-mu).exp() * y1;
        let eq_mu = y0 / 2.0 + e_mis * clicked;
        let e1 = if y1 > 0.0 { (y0 / 2.0 + e_mis * eta) / y1 } else { 0.5 };
        let e_mu = if q_mu > 0.0 { eq_mu / q_mu } else { 0.5 };
        let r = q1 * (1.0 - binary_entropy(e1.min(1.0))?) - self.ec_efficiency * q_mu * binary_entropy(e_mu.min(1.0))?;
        Ok(self.sifting * r.max(0.0))
    }
}

pub fn bb84_decoy_rate(distance_km: f64, eta_det: f64, p_dark: f64) -> Result<f64> {
    Bb84Model::default().rate(distance_km, eta_det, p_dark)
}

/// One distance sample of the comparison curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateCurvePoint {
    pub distance_km: f64,
    /// Rate under the finite-`n` bound, optimized over `m`.
    pub rate_lower: f64,
    /// Rate under the optimistic bound, optimized over `m`.
    pub rate_optimistic: f64,
    pub rate_bb84: f64,
    pub skc: f64,
    /// Copy count maximizing the optimistic rate.
    pub m_opt: u32,
    /// Copy count maximizing the finite-`n` rate.
    pub m_opt_lower: u32,
    /// QBER at `m_opt`.
    pub qber: f64,
    /// Abort probability at `m_opt`.
    pub p_abort: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveConfig {
    pub n: usize,
    pub beta: Beta,
    pub delta: f64,
    pub eta_det: f64,
    pub p_dark: f64,
    pub distances: Vec<f64>,
    /// Copy-count ceiling; [`default_m_max`] when `None`.
    pub m_max: Option<u32>,
    pub bb84: Bb84Model,
}

impl CurveConfig {
    /// Detector and protocol parameters of the reference comparison:
    /// δ = 1e-4, β = 1/4, P_dark = 1e-8, η_det = 0.65, L = 0..=300 km.
    pub fn reference(n: usize) -> Self {
        Self {
            n,
            beta: Beta::QUARTER,
            delta: 1e-4,
            eta_det: 0.65,
            p_dark: 1e-8,
            distances: (0..=300).map(f64::from).collect(),
            m_max: None,
            bb84: Bb84Model::default(),
        }
    }

    fn channel(&self, distance_km: f64) -> ChannelParams {
        ChannelParams {
            distance_km,
            eta_det: self.eta_det,
            p_dark: self.p_dark,
            n: self.n,
            beta: self.beta,
            copies: 1,
            delta: self.delta,
        }
    }
}

pub fn generate_curve(config: &CurveConfig) -> Result<Vec<RateCurvePoint>> {
    if config.distances.is_empty() {
        return Err(domain("distance grid is empty"));
    }
    config.channel(0.0).validate()?;
    let m_max = config.m_max.unwrap_or_else(|| default_m_max(config.n));
    let optimistic = MinEntropyTable::new(BoundKind::Optimistic, config.n, config.beta, config.delta, m_max)?;
    let lower = MinEntropyTable::new(BoundKind::Theorem4, config.n, config.beta, config.delta, m_max)?;
    config
        .distances
        .par_iter()
        .map(|&l| {
            let params = config.channel(l);
            params.validate()?;
            let (m_opt, rate_optimistic) = optimistic.optimize(&params)?;
            let (m_opt_lower, rate_lower) = lower.optimize(&params)?;
            let at_opt = params.with_copies(m_opt);
            Ok(RateCurvePoint {
                distance_km: l,
                rate_lower,
                rate_optimistic,
                rate_bb84: config.bb84.rate(l, config.eta_det, config.p_dark)?,
                skc: skc_two_mode(params.transmittance())?,
                m_opt,
                m_opt_lower,
                qber: qber(&at_opt)?,
                p_abort: p_abort(&at_opt)?,
            })
        })
        .collect()
}
