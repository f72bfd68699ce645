//! Command-line front end for `normsq-core`: reads a JSON action spec and
//! runs `analyze`, `poincare`, `verify`, `flow` or `plot`.
//!
//! Exit codes: 0 success, 1 input error, 2 failed check.

pub mod commands;
pub mod document;
pub mod plot;

pub use commands::{run, run_document, Command, CommandOutput, Options};
pub use document::{InputError, LoadedSpec, SpecDocument};
