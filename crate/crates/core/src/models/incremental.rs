use std::collections::BTreeSet;

use crate::cfg::{BasisCandidateSet, Cfg, EdgeId, PathWalk};
use crate::milp::{MilpModel, Relation};

use super::{add_block, add_path_rows, big_m_values, ModelError, VariableLayout};

/// Paths accepted so far and the edges they cover.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IncrementalState {
    accepted: BasisCandidateSet,
}

impl IncrementalState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_paths(paths: impl IntoIterator<Item = PathWalk>) -> Self {
        let mut state = Self::new();
        for p in paths {
            state.push(p);
        }
        state
    }

    /// Records an accepted path; returns the edges it covered first.
    pub fn push(&mut self, path: PathWalk) -> Vec<EdgeId> {
        self.accepted.push(path)
    }

    /// 1-based index of the next path to generate.
    pub fn iteration(&self) -> usize {
        self.accepted.paths().len() + 1
    }

    pub fn covered(&self) -> &BTreeSet<EdgeId> {
        self.accepted.covered_edges()
    }

    pub fn paths(&self) -> &[PathWalk] {
        self.accepted.paths()
    }

    pub fn into_paths(self) -> Vec<PathWalk> {
        self.accepted.into_paths()
    }
}

/// Single-path model for the next iteration of `state`.
///
/// Fails with [`ModelError::AlreadyComplete`] when every edge is covered
/// before the basis is complete: the `independence` row would be empty.
pub fn build_incremental(
    cfg: &Cfg,
    state: &IncrementalState,
    novelty: bool,
) -> Result<(MilpModel, VariableLayout), ModelError> {
    let k = cfg.cyclomatic_complexity();
    if state.covered().len() == cfg.edge_count() && state.iteration() <= k {
        return Err(ModelError::AlreadyComplete { covered: state.covered().len(), iteration: state.iteration() });
    }
    Ok(incremental_model(cfg, state.covered(), novelty))
}

/// Single-path model without the completeness guard. With every edge
/// covered the `independence` row reads `0 >= 1`.
pub fn incremental_model(cfg: &Cfg, covered: &BTreeSet<EdgeId>, novelty: bool) -> (MilpModel, VariableLayout) {
    let mut model = MilpModel::new();
    let big_m = big_m_values(cfg);
    let block = add_block(&mut model, cfg, 1, &big_m, true, false);
    let uncovered: Vec<EdgeId> = (0..cfg.edge_count()).filter(|e| !covered.contains(e)).collect();
    let mut objective: Vec<(usize, f64)> = block.x.iter().map(|&j| (j, 1.0)).collect();
    if novelty {
        objective.extend(uncovered.iter().map(|&e| (block.y[e], 1.0)));
    }
    model.set_objective(objective);
    add_path_rows(&mut model, cfg, 1, &block, &big_m);
    model.add_constraint(
        "independence",
        "independence",
        uncovered.iter().map(|&e| (block.y[e], 1.0)).collect(),
        Relation::Ge,
        1.0,
    );
    (model, VariableLayout { blocks: vec![block] })
}
