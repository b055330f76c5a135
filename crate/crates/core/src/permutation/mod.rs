//! SISO permutation codes for `L` parallel subchannels, operated as rateless
//! codes: the first `l` blocks of a codeword form the prefix the receiver
//! decodes once it holds enough mutual information.

mod code;
mod codebook;
mod decode;
mod qam;
mod search;
mod trials;

pub use code::{PermutationCode, UniversalityEvidence};
pub use codebook::{read_codebook, write_codebook};
pub use decode::{ml_decode_prefix, Decoded, ReceivedPrefix};
pub use qam::{build_qam, Constellation, MAX_BITS};
pub use search::{search_permutation_code, SearchOptions, SearchOutcome, EXHAUSTIVE_MAX_BLOCKS, EXHAUSTIVE_MAX_POINTS};
pub use trials::{
    run_paired_code_trials, run_rateless_code_trials, universality_margin, write_trials_csv, CodeTrialRecord,
    ErrorDecomposition, MarginCell, PairedRecord, RateTarget, UniversalityReport, MIN_CELL_SAMPLES,
};
