//! Procedural breadth-first baseline.
//!
//! Path 1 is a shortest source-to-sink path. Each later path targets the
//! uncovered edges in id order: for `(u, v)` the candidate is a shortest
//! `s -> u` prefix, the edge itself, and a shortest `v -> t` suffix. The
//! first candidate that raises the rank is accepted. The run ends when no
//! candidate raises the rank or `k` paths are accepted. Shortest paths are
//! breadth-first with ties broken by edge id.

use std::time::Instant;

use crate::cfg::{independence_rank, BasisCandidateSet, Cfg, EdgeId, NodeId, PathWalk};
use crate::milp::Limits;

use super::{GenerationReport, IterationRecord, Strategy};

/// Most traversals of a single edge allowed within one candidate.
const LOOP_CAP: u32 = 2;

pub fn run_bfs_baseline(cfg: &Cfg, limits: Limits) -> GenerationReport {
    let start = Instant::now();
    let k = cfg.cyclomatic_complexity();
    let mut accepted = BasisCandidateSet::new();
    let mut records = Vec::new();
    let mut failure = None;

    let first = shortest_path(cfg, cfg.source(), cfg.sink()).expect("validated graphs connect source to sink");
    let mut record = IterationRecord::new(1);
    let walk = PathWalk::from_edges(cfg, first).expect("shortest path is a walk");
    record.objective = Some(walk.len() as f64);
    record.new_edges = accepted.push(walk);
    records.push(record);
    let mut rank = 1;

    while accepted.paths().len() < k {
        if limits.time.is_some_and(|t| start.elapsed() >= t) {
            failure = Some("time limit reached".to_string());
            break;
        }
        let iteration = accepted.paths().len() + 1;
        let uncovered: Vec<EdgeId> = (0..cfg.edge_count()).filter(|e| !accepted.covered_edges().contains(e)).collect();
        let found = uncovered.into_iter().find_map(|e| {
            let candidate = candidate_through(cfg, e)?;
            let mut trial = accepted.paths().to_vec();
            trial.push(candidate.clone());
            let r = independence_rank(&trial, cfg);
            (r > rank).then_some((candidate, r))
        });
        let Some((walk, r)) = found else {
            failure = Some(format!("iteration {iteration}: no candidate raises the rank"));
            let mut record = IterationRecord::new(iteration);
            record.error = failure.clone();
            records.push(record);
            break;
        };
        rank = r;
        let mut record = IterationRecord::new(iteration);
        record.objective = Some(walk.len() as f64);
        record.new_edges = accepted.push(walk);
        records.push(record);
    }
    GenerationReport::assemble(cfg, Strategy::Bfs, accepted.into_paths(), records, failure, 0, start)
}

fn candidate_through(cfg: &Cfg, e: EdgeId) -> Option<PathWalk> {
    let (u, v) = cfg.edge(e);
    let mut edges = shortest_path(cfg, cfg.source(), u)?;
    edges.push(e);
    edges.extend(shortest_path(cfg, v, cfg.sink())?);
    let walk = PathWalk::from_edges(cfg, edges).ok()?;
    walk.incidence_vector().iter().all(|&c| c <= LOOP_CAP).then_some(walk)
}

/// Edge ids of a shortest `from -> to` path; empty when `from == to`.
fn shortest_path(cfg: &Cfg, from: NodeId, to: NodeId) -> Option<Vec<EdgeId>> {
    let mut parent: Vec<Option<EdgeId>> = vec![None; cfg.node_count()];
    let mut seen = vec![false; cfg.node_count()];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &e in cfg.out_edges(x) {
            let y = cfg.edge(e).1;
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(e);
                queue.push_back(y);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut path = Vec::new();
    let mut at = to;
    while at != from {
        let e = parent[at]?;
        path.push(e);
        at = cfg.edge(e).0;
    }
    path.reverse();
    Some(path)
}
