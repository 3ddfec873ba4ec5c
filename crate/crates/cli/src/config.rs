//! Optional `key = value` settings file.
//!
//! Keys are the long flag names with `-` or `_` separators (`p-dark` and
//! `p_dark` are the same key). `#` starts a comment. Every value is parsed
//! and validated when the file is read; unknown or repeated keys are errors.

use std::path::{Path, PathBuf};

use hmqct_core::keyrate::BoundKind;
use hmqct_core::Beta;

use crate::error::{CliError, Result};
use crate::grid::{parse_count, parse_int_grid, parse_real, parse_real_grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Full,
    AnswerOnly,
}

impl std::str::FromStr for Sampling {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('_', "-").to_ascii_lowercase().as_str() {
            "full" => Ok(Sampling::Full),
            "answer-only" => Ok(Sampling::AnswerOnly),
            other => Err(CliError::usage(format!("unknown sampling mode {other:?} (full, answer-only)"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub n: Option<u64>,
    pub beta: Option<Beta>,
    pub delta: Option<f64>,
    pub p_dark: Option<f64>,
    pub eta_det: Option<f64>,
    /// Distance grid in km (`L`).
    pub l: Option<Vec<f64>>,
    pub m: Option<Vec<u64>>,
    pub m_max: Option<u64>,
    pub d: Option<Vec<u64>>,
    pub rounds: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub pe_fraction: Option<f64>,
    pub bound: Option<BoundKind>,
    pub key_bits: Option<u64>,
    pub sampling: Option<Sampling>,
    pub output: Option<PathBuf>,
    pub rounds_csv: Option<PathBuf>,
}

pub const KEYS: &[&str] = &[
    "n", "beta", "delta", "p_dark", "eta_det", "l", "m", "m_max", "d", "rounds", "trials", "seed", "pe_fraction",
    "bound", "key_bits", "sampling", "output", "rounds_csv",
];

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::Usage(format!("line {}: {msg}", no + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| at(format!("expected key = value, got {line:?}")))?;
            let key = key.trim().replace('-', "_").to_ascii_lowercase();
            let value = value.trim();
            c.set(&key, value).map_err(|e| match e {
                CliError::Usage(msg) => at(msg),
                other => other,
            })?;
        }
        Ok(c)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        fn put<T>(slot: &mut Option<T>, key: &str, value: T) -> Result<()> {
            if slot.is_some() {
                return Err(CliError::usage(format!("key {key:?} given twice")));
            }
            *slot = Some(value);
            Ok(())
        }
        let beta = |v: &str| v.parse::<Beta>().map_err(CliError::usage);
        let bound = |v: &str| v.parse::<BoundKind>().map_err(CliError::usage);
        match key {
            "n" => put(&mut self.n, key, parse_count(v)?),
            "beta" => put(&mut self.beta, key, beta(v)?),
            "delta" => put(&mut self.delta, key, parse_real(v)?),
            "p_dark" => put(&mut self.p_dark, key, parse_real(v)?),
            "eta_det" => put(&mut self.eta_det, key, parse_real(v)?),
            "l" => put(&mut self.l, key, parse_real_grid(v)?),
            "m" => put(&mut self.m, key, parse_int_grid(v)?),
            "m_max" => put(&mut self.m_max, key, parse_count(v)?),
            "d" => put(&mut self.d, key, parse_int_grid(v)?),
            "rounds" => put(&mut self.rounds, key, parse_count(v)?),
            "trials" => put(&mut self.trials, key, parse_count(v)?),
            "seed" => put(&mut self.seed, key, parse_count(v)?),
            "pe_fraction" => put(&mut self.pe_fraction, key, parse_real(v)?),
            "bound" => put(&mut self.bound, key, bound(v)?),
            "key_bits" => put(&mut self.key_bits, key, parse_count(v)?),
            "sampling" => put(&mut self.sampling, key, v.parse()?),
            "output" => put(&mut self.output, key, PathBuf::from(v)),
            "rounds_csv" => put(&mut self.rounds_csv, key, PathBuf::from(v)),
            _ => Err(CliError::usage(format!("unknown key {key:?}; known keys: {}", KEYS.join(", ")))),
        }
    }
}
