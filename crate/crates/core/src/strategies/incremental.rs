use std::time::Instant;

use crate::cfg::Cfg;
use crate::extract::extract_walk;
use crate::milp::{self, Limits};
use crate::models::{build_incremental, IncrementalState};

use super::{GenerationReport, IterationRecord, Strategy};

/// One single-path solve per basis element, starting from an empty state.
pub fn run_incremental(cfg: &Cfg, novelty: bool, limits: Limits) -> GenerationReport {
    run_incremental_from(cfg, IncrementalState::new(), novelty, limits)
}

/// Continues the incremental loop from `state` up to `k` paths.
///
/// The time budget covers the whole run; the node budget applies to each
/// solve. The loop stops at the first iteration without a decodable path.
pub fn run_incremental_from(cfg: &Cfg, mut state: IncrementalState, novelty: bool, limits: Limits) -> GenerationReport {
    let start = Instant::now();
    let strategy = if novelty { Strategy::IncrNovelty } else { Strategy::IncrGreedy };
    let k = cfg.cyclomatic_complexity();
    let mut records = Vec::new();
    let mut failure = None;
    let mut nodes = 0;
    while state.iteration() <= k {
        let mut record = IterationRecord::new(state.iteration());
        let (model, layout) = match build_incremental(cfg, &state, novelty) {
            Ok(built) => built,
            Err(e) => {
                record.error = Some(e.to_string());
                failure = Some(e.to_string());
                records.push(record);
                break;
            }
        };
        let remaining = Limits { time: limits.time.map(|t| t.saturating_sub(start.elapsed())), nodes: limits.nodes };
        let solution = match milp::solve(&model, remaining) {
            Ok(s) => s,
            Err(e) => {
                record.error = Some(e.to_string());
                failure = Some(e.to_string());
                records.push(record);
                break;
            }
        };
        nodes += solution.stats.nodes;
        record.status = Some(solution.status);
        if !solution.status.has_solution() {
            failure = Some(format!("iteration {}: solver status {:?}", record.iteration, solution.status));
            records.push(record);
            break;
        }
        record.objective = Some(solution.objective);
        let flow = &layout.flows(&solution.values)[0];
        match extract_walk(cfg, flow) {
            Ok(walk) => record.new_edges = state.push(walk),
            Err(e) => {
                record.error = Some(e.to_string());
                failure = Some(format!("iteration {}: {e}", record.iteration));
                records.push(record);
                break;
            }
        }
        records.push(record);
    }
    GenerationReport::assemble(cfg, strategy, state.into_paths(), records, failure, nodes, start)
}
