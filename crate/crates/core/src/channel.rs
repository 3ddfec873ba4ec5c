//! Lossy multi-copy photonic channel with threshold detectors.
//!
//! Alice sends `m` copies of her state. Each photon independently reaches a
//! detector with probability `T̃ = 2β·η_det·T`, where `T = 10^{-0.02 L}` is
//! the fiber transmittance. Bob has two threshold detectors, one per answer
//! bit; each also fires spuriously with probability `P_dark` per round. Bob
//! aborts on no click or on a double click.
//!
//! Signal photons that reach a detector always hit the correct one: an ideal
//! conclusive measurement never errs (see [`crate::quantum`]), so every error
//! comes from dark counts.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::problem::{Beta, ProblemInput};
use crate::rng::SimRng;

/// Fiber transmittance `10^{-0.02 L}` for a length in km.
pub fn transmittance(distance_km: f64) -> Result<f64> {
    if !(distance_km >= 0.0) {
        return Err(domain(format!("distance {distance_km} km must be non-negative")));
    }
    Ok(10f64.powf(-0.02 * distance_km))
}

/// Physical-layer and protocol parameters of one link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    /// Fiber length `L` in km.
    pub distance_km: f64,
    pub eta_det: f64,
    /// Dark-count probability per detector per round.
    pub p_dark: f64,
    /// Number of modes.
    pub n: usize,
    pub beta: Beta,
    /// Copies `m` of the state sent per round.
    pub copies: u32,
    /// Noise parameter of the adversary's quantum memory.
    pub delta: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        transmittance(self.distance_km)?;
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(domain(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("eta_det", self.eta_det)?;
        unit("p_dark", self.p_dark)?;
        unit("delta", self.delta)?;
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(Error::Parameter(format!("n = {} must be an even integer >= 2", self.n)));
        }
        self.beta.edges_for(self.n)?;
        Ok(())
    }

    pub fn transmittance(&self) -> f64 {
        10f64.powf(-0.02 * self.distance_km)
    }

    /// Per-photon detection probability `T̃ = 2β·η_det·T`.
    pub fn detection_probability(&self) -> f64 {
        2.0 * self.beta.as_f64() * self.eta_det * self.transmittance()
    }

    /// `(1 - T̃)^m`: probability that no signal photon is detected.
    fn no_signal(&self) -> f64 {
        (1.0 - self.detection_probability()).powi(self.copies as i32)
    }

    pub fn with_copies(mut self, copies: u32) -> Self {
        self.copies = copies;
        self
    }

    pub fn with_distance(mut self, distance_km: f64) -> Self {
        self.distance_km = distance_km;
        self
    }
}

/// `P(abort) = P_dark + (1 - 3P_dark + 2P_dark²)(1 - T̃)^m`.
pub fn p_abort(params: &ChannelParams) -> Result<f64> {
    params.validate()?;
    let pd = params.p_dark;
    Ok(pd + (1.0 - 3.0 * pd + 2.0 * pd * pd) * params.no_signal())
}

/// Error rate among conclusive rounds:
/// `(P_dark - P_dark²)(1 - T̃)^m / (1 - P(abort))`.
pub fn qber(params: &ChannelParams) -> Result<f64> {
    params.validate()?;
    let pd = params.p_dark;
    let none = params.no_signal();
    let denom = 1.0 - pd - (1.0 - 3.0 * pd + 2.0 * pd * pd) * none;
    if !(denom > 0.0) {
        return Err(Error::DegenerateChannel);
    }
    Ok((pd - pd * pd) * none / denom)
}

/// Sifted outcome of one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoundOutcome {
    Bit0,
    Bit1,
    Abort,
}

impl RoundOutcome {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            RoundOutcome::Bit1
        } else {
            RoundOutcome::Bit0
        }
    }

    pub fn bit(&self) -> Option<bool> {
        match self {
            RoundOutcome::Bit0 => Some(false),
            RoundOutcome::Bit1 => Some(true),
            RoundOutcome::Abort => None,
        }
    }

    pub fn is_abort(&self) -> bool {
        matches!(self, RoundOutcome::Abort)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RoundOutcome::Bit0 => "0",
            RoundOutcome::Bit1 => "1",
            RoundOutcome::Abort => "abort",
        }
    }
}

/// Simulates the detector response for a round whose answer bit is `answer`.
///
/// The response depends on the instance only through its answer bit; this is
/// the primitive behind [`simulate_round_mc`] and the batch estimators.
pub fn detect<R: Rng + ?Sized>(answer: bool, params: &ChannelParams, rng: &mut R) -> RoundOutcome {
    let t = params.detection_probability();
    // Threshold detectors: one surviving photon is as good as many.
    let signal = (0..params.copies).any(|_| rng.random::<f64>() < t);
    let mut clicks = [false; 2];
    clicks[answer as usize] = signal;
    for c in &mut clicks {
        *c |= rng.random::<f64>() < params.p_dark;
    }
    match clicks {
        [true, false] => RoundOutcome::Bit0,
        [false, true] => RoundOutcome::Bit1,
        _ => RoundOutcome::Abort,
    }
}

pub fn simulate_round_mc<R: Rng + ?Sized>(input: &ProblemInput, params: &ChannelParams, rng: &mut R) -> RoundOutcome {
    detect(input.answer(), params, rng)
}

/// Outcome counts of a batch of rounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub rounds: u64,
    pub aborts: u64,
    /// Conclusive rounds whose bit differs from Alice's.
    pub errors: u64,
}

impl Tally {
    pub fn conclusive(&self) -> u64 {
        self.rounds - self.aborts
    }

    pub fn abort_rate(&self) -> f64 {
        self.aborts as f64 / self.rounds as f64
    }

    /// Observed error rate among conclusive rounds, `None` if there were none.
    pub fn error_rate(&self) -> Option<f64> {
        (self.conclusive() > 0).then(|| self.errors as f64 / self.conclusive() as f64)
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            rounds: self.rounds + other.rounds,
            aborts: self.aborts + other.aborts,
            errors: self.errors + other.errors,
        }
    }
}

/// Rounds per independent random stream in batch simulations.
pub const CHUNK_ROUNDS: u64 = 1 << 16;

/// Runs `rounds` channel rounds with uniformly random answer bits.
///
/// Work is split into chunks of [`CHUNK_ROUNDS`], chunk `c` drawing from
/// `SimRng::with_stream(seed, 0).fork(c)`; the tally is bit-identical for a
/// given seed regardless of thread count.
pub fn simulate_batch(params: &ChannelParams, rounds: u64, seed: u64) -> Result<Tally> {
    params.validate()?;
    let root = SimRng::new(seed);
    let chunks = rounds.div_ceil(CHUNK_ROUNDS);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = root.fork(c);
            let len = CHUNK_ROUNDS.min(rounds - c * CHUNK_ROUNDS);
            let mut t = Tally { rounds: len, ..Tally::default() };
            for _ in 0..len {
                let answer: bool = rng.random();
                match detect(answer, params, &mut rng).bit() {
                    None => t.aborts += 1,
                    Some(b) if b != answer => t.errors += 1,
                    Some(_) => {}
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally)
}
