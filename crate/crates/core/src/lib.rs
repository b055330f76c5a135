//! Diversity-multiplexing tradeoff (DMT) of rateless codes over MIMO block
//! fading channels.
//!
//! - [`dmt`]: exact rational evaluation of the tradeoff curves of rateless,
//!   conventional and parallel-channel schemes.
//! - [`channel`]: Monte Carlo of the rateless protocol with Gaussian-input
//!   mutual information, plus the closed-form SISO outage probability.
//! - [`slope`]: diversity-order estimation from probabilities across SNR.
//! - [`permutation`]: QAM permutation codes used as SISO rateless codes, with
//!   permutation search, ML prefix decoding and error decomposition.

pub mod channel;
pub mod dmt;
pub mod error;
pub mod numfmt;
pub mod permutation;
pub mod rng;
pub mod slope;

pub use error::{Error, Result};
