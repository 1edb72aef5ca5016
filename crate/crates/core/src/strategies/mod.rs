//! End-to-end path generation and the reports they produce.

mod bfs;
mod holistic;
mod incremental;

pub use bfs::run_bfs_baseline;
pub use holistic::run_holistic;
pub use incremental::{run_incremental, run_incremental_from};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cfg::{coverage_fraction, independence_rank, Cfg, Coverage, EdgeId, PathWalk};
use crate::milp::{Limits, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Holistic,
    HolisticNoSubtour,
    IncrGreedy,
    IncrNovelty,
    Bfs,
}

impl Strategy {
    pub const ALL: [Strategy; 5] =
        [Strategy::Holistic, Strategy::HolisticNoSubtour, Strategy::IncrGreedy, Strategy::IncrNovelty, Strategy::Bfs];

    pub fn id(self) -> &'static str {
        match self {
            Strategy::Holistic => "holistic",
            Strategy::HolisticNoSubtour => "holistic-nosubtour",
            Strategy::IncrGreedy => "incr-greedy",
            Strategy::IncrNovelty => "incr-novelty",
            Strategy::Bfs => "bfs",
        }
    }

    pub fn is_holistic(self) -> bool {
        matches!(self, Strategy::Holistic | Strategy::HolisticNoSubtour)
    }

    pub fn run(self, cfg: &Cfg, limits: Limits) -> GenerationReport {
        match self {
            Strategy::Holistic => run_holistic(cfg, true, limits),
            Strategy::HolisticNoSubtour => run_holistic(cfg, false, limits),
            Strategy::IncrGreedy => run_incremental(cfg, false, limits),
            Strategy::IncrNovelty => run_incremental(cfg, true, limits),
            Strategy::Bfs => run_bfs_baseline(cfg, limits),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL.into_iter().find(|st| st.id() == s).ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

/// Diagnostics of one solve (incremental) or one decoded path (holistic).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<SolveStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub new_edges: Vec<EdgeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IterationRecord {
    pub fn new(iteration: usize) -> Self {
        IterationRecord { iteration, status: None, objective: None, new_edges: Vec::new(), error: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub strategy: Strategy,
    pub k: usize,
    pub success: bool,
    pub paths: Vec<PathWalk>,
    /// Recomputed by the rank oracle.
    pub rank: usize,
    pub edge_coverage: Coverage,
    pub iterations: Vec<IterationRecord>,
    /// Why the run stopped short, if it did.
    pub failure: Option<String>,
    pub solver_nodes: u64,
    pub wall_time_s: f64,
}

impl GenerationReport {
    /// Builds a report, deriving rank, coverage and success from `paths`.
    pub(crate) fn assemble(
        cfg: &Cfg,
        strategy: Strategy,
        paths: Vec<PathWalk>,
        iterations: Vec<IterationRecord>,
        failure: Option<String>,
        solver_nodes: u64,
        start: Instant,
    ) -> Self {
        let k = cfg.cyclomatic_complexity();
        let rank = independence_rank(&paths, cfg);
        let edge_coverage = coverage_fraction(&paths, cfg);
        let success = failure.is_none() && paths.len() == k && rank == k && edge_coverage.is_complete();
        GenerationReport {
            strategy,
            k,
            success,
            paths,
            rank,
            edge_coverage,
            iterations,
            failure,
            solver_nodes,
            wall_time_s: start.elapsed().as_secs_f64(),
        }
    }

    pub fn total_length(&self) -> usize {
        self.paths.iter().map(PathWalk::len).sum()
    }

    /// Path set document. Contains no timing, so equal runs serialise to
    /// identical bytes.
    pub fn path_set_json(&self) -> String {
        let doc = json!({
            "k": self.k,
            "paths": self.paths.iter().map(path_json).collect::<Vec<_>>(),
            "strategy": self.strategy.id(),
            "success": self.success,
        });
        serde_json::to_string_pretty(&doc).expect("serialisable") + "\n"
    }

    /// Path set plus per-iteration diagnostics and wall time.
    pub fn report_json(&self) -> Value {
        json!({
            "strategy": self.strategy.id(),
            "k": self.k,
            "success": self.success,
            "rank": self.rank,
            "edge_coverage": {
                "covered": self.edge_coverage.covered,
                "total": self.edge_coverage.total,
            },
            "total_length": self.total_length(),
            "paths": self.paths.iter().map(path_json).collect::<Vec<_>>(),
            "iterations": self.iterations,
            "failure": self.failure,
            "solver_nodes": self.solver_nodes,
            "wall_time_s": self.wall_time_s,
        })
    }
}

fn path_json(p: &PathWalk) -> Value {
    json!({ "nodes": p.nodes(), "edges": p.edges() })
}
