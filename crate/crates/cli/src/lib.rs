//! Batch experiment runner for `wigner-lab`.
//!
//! Each invocation runs one experiment described by an [`ExperimentConfig`]
//! and writes CSV tables and JSON summaries, each tagged with the config
//! hash, next to a [`RunManifest`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod compare;
pub mod config;
pub mod error;
pub mod manifest;
pub mod table;

pub use config::{Command, ExperimentConfig};
pub use error::{CliError, Result};
pub use manifest::RunManifest;
