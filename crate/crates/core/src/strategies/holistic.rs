use std::time::Instant;

use crate::cfg::{BasisCandidateSet, Cfg};
use crate::extract::extract_walk;
use crate::milp::{self, Limits};
use crate::models::{build_holistic, encode_assignment};

use super::incremental::run_incremental;
use super::{GenerationReport, IterationRecord, Strategy};

/// Solves the holistic model once and decodes one walk per path block.
///
/// With connectivity on, the search is seeded with the incremental novelty
/// path set when that run succeeds within the same budget.
///
/// A path whose flow does not decode is recorded on its iteration entry
/// and left out of the path set, so the run fails.
pub fn run_holistic(cfg: &Cfg, enforce_connectivity: bool, limits: Limits) -> GenerationReport {
    let start = Instant::now();
    let strategy = if enforce_connectivity { Strategy::Holistic } else { Strategy::HolisticNoSubtour };
    let (model, layout) = build_holistic(cfg, enforce_connectivity);
    let seed = enforce_connectivity.then(|| run_incremental(cfg, true, limits));
    let warm = seed.filter(|r| r.success).map(|seed| {
        let flows: Vec<Vec<u32>> = seed.paths.iter().map(|p| p.incidence_vector().to_vec()).collect();
        encode_assignment(cfg, &model, &layout, &flows)
    });
    let limits = Limits { time: limits.time.map(|t| t.saturating_sub(start.elapsed())), nodes: limits.nodes };
    let solution = match milp::solve_with_start(&model, limits, warm.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            return GenerationReport::assemble(cfg, strategy, Vec::new(), Vec::new(), Some(e.to_string()), 0, start)
        }
    };
    let nodes = solution.stats.nodes;
    if !solution.status.has_solution() {
        let mut record = IterationRecord::new(1);
        record.status = Some(solution.status);
        let failure = format!("solver status {:?}", solution.status);
        return GenerationReport::assemble(cfg, strategy, Vec::new(), vec![record], Some(failure), nodes, start);
    }
    let mut accepted = BasisCandidateSet::new();
    let mut records = Vec::new();
    let mut failure = None;
    for (i, flow) in layout.flows(&solution.values).iter().enumerate() {
        let mut record = IterationRecord::new(i + 1);
        record.status = Some(solution.status);
        record.objective = Some(flow.iter().map(|&c| c as f64).sum());
        match extract_walk(cfg, flow) {
            Ok(walk) => record.new_edges = accepted.push(walk),
            Err(e) => {
                failure.get_or_insert_with(|| format!("path {}: {e}", i + 1));
                record.error = Some(e.to_string());
            }
        }
        records.push(record);
    }
    GenerationReport::assemble(cfg, strategy, accepted.into_paths(), records, failure, nodes, start)
}
