//! Experiment driver behind the `rateless-dmt` binary: configuration,
//! the `dmt`/`simulate`/`codes` commands, and the verification suite.

pub mod commands;
pub mod config;
pub mod verify;
