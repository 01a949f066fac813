//! Standard-library companion to `ocf-core`: CSV ingestion, LP files,
//! external MILP solvers, forest files, DOT export, the benchmark harness
//! and the `ocf` command-line tool.

pub mod cli;
pub mod data;
pub mod dot;
pub mod error;
pub mod forest_format;
pub mod harness;
mod kv;
pub mod lp;
pub mod solver;
pub mod trace;
pub mod train;

pub use error::{Error, Result};
pub use ocf_core as core;
