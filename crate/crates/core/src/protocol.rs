//! End-to-end key-distribution sessions.
//!
//! A session follows the protocol steps in order:
//!
//! 1. data generation: Alice draws `(x_i, y_i)` and the answers `a_i`;
//! 2. classical exchange: `y⃗` is sent to Bob under a short-lived cipher
//!    (mocked here; only its key consumption is accounted);
//! 3. quantum rounds through the channel model;
//! 4. sifting of aborted rounds;
//! 5. parameter estimation on a random fraction of the conclusive rounds, and
//!    the key length after error correction and privacy amplification.
//!
//! Error correction and privacy amplification are not executed: they cost
//! `H2(QBER)` and leave `H_min(A|E)` bits per sifted round respectively.

use std::fmt::Write as _;
use std::io;

use rand::Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::channel::{detect, simulate_round_mc, ChannelParams, RoundOutcome};
use crate::error::{domain, Result};
use crate::keyrate::{guessing_bound, BoundKind};
use crate::problem::{binary_entropy, sample_input, BetaMatching};
use crate::rng::SimRng;

/// Rounds per random stream. Part of the reproducibility contract: changing
/// it changes every session transcript.
pub const SESSION_CHUNK: u64 = 1 << 14;

/// Default block-cipher key size charged per session.
pub const DEFAULT_KEY_BITS: u64 = 256;

/// How much of each instance is materialized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InputSampling {
    /// Draw full instances `(x, M, ω)` and send `y⃗` through the cipher.
    #[default]
    Full,
    /// Draw only the answer bits. The channel response depends on the
    /// instance only through its answer, so tallies have the same law at a
    /// fraction of the cost; use this for large `n·l`.
    AnswerOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    /// Channel and protocol parameters (`n`, `β`, `m`, `δ` live here).
    pub channel: ChannelParams,
    /// Number of rounds `l`.
    pub rounds: u64,
    pub seed: u64,
    /// Probability that a conclusive round is revealed for QBER estimation.
    pub pe_fraction: f64,
    pub bound: BoundKind,
    pub key_bits: u64,
    pub sampling: InputSampling,
}

impl SessionConfig {
    pub fn new(channel: ChannelParams, rounds: u64, seed: u64) -> Self {
        Self {
            channel,
            rounds,
            seed,
            pe_fraction: 0.1,
            bound: BoundKind::Optimistic,
            key_bits: DEFAULT_KEY_BITS,
            sampling: InputSampling::Full,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.rounds < 1 {
            return Err(domain("a session needs at least one round"));
        }
        if !(self.pe_fraction > 0.0 && self.pe_fraction < 1.0) {
            return Err(domain(format!("pe_fraction = {} outside (0, 1)", self.pe_fraction)));
        }
        Ok(())
    }
}

/// Counts pre-shared key bits spent on the classical exchange.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyCounter {
    key_bits: u64,
    consumed: u64,
}

impl KeyCounter {
    pub fn new(key_bits: u64) -> Self {
        Self { key_bits, consumed: 0 }
    }

    /// Starts a cipher session, spending one key. Any number of blocks may
    /// then be sealed under it.
    pub fn open_session(&mut self) -> CipherSession {
        self.consumed += self.key_bits;
        CipherSession { _private: () }
    }

    pub fn consumed_bits(&self) -> u64 {
        self.consumed
    }
}

/// A live cipher key. Only obtainable through [`KeyCounter::open_session`].
#[derive(Debug)]
pub struct CipherSession {
    _private: (),
}

/// Opaque ciphertext. The mock is lossless: decryption returns the payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sealed<T>(T);

impl<T> Sealed<T> {
    pub fn decrypt(self, _session: &CipherSession) -> T {
        self.0
    }
}

/// Bob's half of one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BobInput {
    pub matching: BetaMatching,
    pub omega: Vec<bool>,
}

/// Sends a block of Bob's inputs under the session key.
pub fn mock_qct_exchange<T>(y_batch: T, _session: &CipherSession) -> Sealed<T> {
    Sealed(y_batch)
}

/// One round as seen in the transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub outcome: RoundOutcome,
    /// Whether the round was disclosed for parameter estimation.
    pub revealed: bool,
}

impl RoundRecord {
    fn to_byte(self) -> u8 {
        let code = match self.outcome {
            RoundOutcome::Bit0 => 0,
            RoundOutcome::Bit1 => 1,
            RoundOutcome::Abort => 2,
        };
        code << 1 | self.revealed as u8
    }

    fn from_byte(b: u8) -> Self {
        let outcome = match b >> 1 {
            0 => RoundOutcome::Bit0,
            1 => RoundOutcome::Bit1,
            _ => RoundOutcome::Abort,
        };
        Self { outcome, revealed: b & 1 == 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionReport {
    pub rounds: u64,
    pub conclusive_count: u64,
    pub revealed_count: u64,
    pub revealed_errors: u64,
    /// Errors among all conclusive rounds. Alice can count these in the
    /// simulation; the protocol itself only sees the revealed ones.
    pub sifted_errors: u64,
    /// Plug-in QBER estimate from the revealed rounds (0 if none).
    pub observed_qber: f64,
    pub h_min: f64,
    /// Final key length in bits.
    pub estimated_rate_bits: f64,
    pub consumed_key_bits: u64,
    /// Set when no round was revealed, so the QBER is not estimated and no
    /// key is produced.
    pub no_estimate: bool,
    /// SHA-256 over the per-round transcript, hex encoded.
    pub digest: String,
    transcript: Vec<u8>,
}

impl SessionReport {
    pub fn records(&self) -> impl Iterator<Item = RoundRecord> + '_ {
        self.transcript.iter().map(|&b| RoundRecord::from_byte(b))
    }

    /// Key bits gained per round.
    pub fn rate_per_round(&self) -> f64 {
        self.estimated_rate_bits / self.rounds as f64
    }

    /// `key = value` lines, stable across runs and platforms.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("rounds", self.rounds.to_string());
        line("conclusive", self.conclusive_count.to_string());
        line("revealed", self.revealed_count.to_string());
        line("revealed_errors", self.revealed_errors.to_string());
        line("sifted_errors", self.sifted_errors.to_string());
        line("observed_qber", self.observed_qber.to_string());
        line("h_min", self.h_min.to_string());
        line("key_bits", self.estimated_rate_bits.to_string());
        line("key_rate_per_round", self.rate_per_round().to_string());
        line("consumed_key_bits", self.consumed_key_bits.to_string());
        line("net_key_bits", (self.estimated_rate_bits - self.consumed_key_bits as f64).to_string());
        line("no_estimate", self.no_estimate.to_string());
        line("digest", self.digest.clone());
        s
    }

    /// Per-round CSV: `round_index,outcome,revealed_flag`.
    pub fn write_rounds_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "round_index,outcome,revealed_flag")?;
        for (i, r) in self.records().enumerate() {
            writeln!(w, "{i},{},{}", r.outcome.as_str(), r.revealed as u8)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct ChunkResult {
    transcript: Vec<u8>,
    conclusive: u64,
    revealed: u64,
    revealed_errors: u64,
    sifted_errors: u64,
}

pub fn run_session(config: &SessionConfig) -> Result<SessionReport> {
    config.validate()?;
    let h_min = guessing_bound(config.bound, config.channel.n, config.channel.copies, config.channel.beta, config.channel.delta)?.h_min;

    let mut keys = KeyCounter::new(config.key_bits);
    let session = keys.open_session();
    let root = SimRng::new(config.seed);
    let chunks = config.rounds.div_ceil(SESSION_CHUNK);

    let results = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<ChunkResult> {
            let mut rng = root.fork(c);
            let len = SESSION_CHUNK.min(config.rounds - c * SESSION_CHUNK) as usize;
            let mut out = ChunkResult { transcript: Vec::with_capacity(len), ..Default::default() };
            let mut record = |answer: bool, outcome: RoundOutcome, rng: &mut SimRng| {
                let mut revealed = false;
                if let Some(bit) = outcome.bit() {
                    out.conclusive += 1;
                    let wrong = bit != answer;
                    out.sifted_errors += wrong as u64;
                    revealed = rng.random::<f64>() < config.pe_fraction;
                    if revealed {
                        out.revealed += 1;
                        out.revealed_errors += wrong as u64;
                    }
                }
                out.transcript.push(RoundRecord { outcome, revealed }.to_byte());
            };
            match config.sampling {
                InputSampling::Full => {
                    let inputs = (0..len)
                        .map(|_| sample_input(config.channel.n, config.channel.beta, &mut rng))
                        .collect::<Result<Vec<_>>>()?;
                    let y_block: Vec<BobInput> = inputs
                        .iter()
                        .map(|i| BobInput { matching: i.matching().clone(), omega: i.omega().to_vec() })
                        .collect();
                    let bob_view = mock_qct_exchange(y_block, &session).decrypt(&session);
                    debug_assert_eq!(bob_view.len(), inputs.len());
                    for input in &inputs {
                        let outcome = simulate_round_mc(input, &config.channel, &mut rng);
                        record(input.answer(), outcome, &mut rng);
                    }
                }
                InputSampling::AnswerOnly => {
                    for _ in 0..len {
                        let answer: bool = rng.random();
                        let outcome = detect(answer, &config.channel, &mut rng);
                        record(answer, outcome, &mut rng);
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = ChunkResult::default();
    let mut hasher = Sha256::new();
    for r in results {
        hasher.update(&r.transcript);
        total.transcript.extend_from_slice(&r.transcript);
        total.conclusive += r.conclusive;
        total.revealed += r.revealed;
        total.revealed_errors += r.revealed_errors;
        total.sifted_errors += r.sifted_errors;
    }
    let digest = hasher.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });

    let no_estimate = total.revealed == 0;
    let observed_qber = if no_estimate { 0.0 } else { total.revealed_errors as f64 / total.revealed as f64 };
    let estimated_rate_bits = if no_estimate {
        0.0
    } else {
        let per_round = (h_min - binary_entropy(observed_qber)?).max(0.0);
        total.conclusive as f64 * (1.0 - config.pe_fraction) * per_round
    };

    Ok(SessionReport {
        rounds: config.rounds,
        conclusive_count: total.conclusive,
        revealed_count: total.revealed,
        revealed_errors: total.revealed_errors,
        sifted_errors: total.sifted_errors,
        observed_qber,
        h_min,
        estimated_rate_bits,
        consumed_key_bits: keys.consumed_bits(),
        no_estimate,
        digest,
        transcript: total.transcript,
    })
}
