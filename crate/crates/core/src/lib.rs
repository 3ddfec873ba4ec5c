//! Simulation and security analysis of hidden-matching quantum key
//! distribution with computational timelock assumptions.
//!
//! The crate covers the full pipeline at desk scale:
//!
//! - [`problem`]: the β-partial-matching problem and its input distribution;
//! - [`quantum`]: the ideal single-photon protocol as an exact statevector;
//! - [`channel`]: loss and dark-count model, closed form and Monte Carlo;
//! - [`adversary`]: the best known classical protocol and its error bound;
//! - [`bounds`]: guessing-probability bounds on the adversary;
//! - [`keyrate`]: achievable key rates and rate-versus-distance curves;
//! - [`codec`]: the self-delimiting integer code;
//! - [`protocol`]: end-to-end sessions with sifting and parameter estimation.

// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod bounds;
pub mod channel;
pub mod codec;
pub mod error;
pub mod keyrate;
pub mod problem;
pub mod protocol;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};
pub use problem::{apply_matching, binary_entropy, sample_input, Beta, BetaMatching, ProblemInput};
pub use rng::SimRng;
