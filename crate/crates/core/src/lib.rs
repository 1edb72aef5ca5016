//! Basis path generation for control-flow graphs.
//!
//! Path selection is posed as a mixed-integer program: either one holistic
//! model that chooses all `k` paths at once, or a sequence of single-path
//! models that each add one independent path. A breadth-first procedural
//! baseline, a small branch-and-bound solver, a synthetic graph generator and
//! a batch benchmark runner round out the toolkit.

#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod bridge;
pub mod cfg;
pub mod extract;
pub mod fixtures;
pub mod milp;
pub mod models;
pub mod strategies;
pub mod synth;

pub use cfg::{Cfg, CfgError, PathWalk, RawGraph};
pub use milp::{Limits, MilpModel, Solution, SolveStatus};
pub use strategies::{GenerationReport, Strategy};

use thiserror::Error;

/// Top-level error for I/O-facing entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Cfg(#[from] CfgError),
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Solve(#[from] milp::SolveError),
    #[error(transparent)]
    Import(#[from] milp::ImportError),
    #[error(transparent)]
    Synth(#[from] synth::SynthError),
    #[error("layout file does not match the graph: {0}")]
    LayoutMismatch(String),
    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })
}
