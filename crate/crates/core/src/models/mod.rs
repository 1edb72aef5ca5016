//! MILP formulations of basis path selection.
//!
//! Each path block owns five variable families indexed by edge or node:
//! traversal counts `x`, edge usage `y`, node visitation `w`, auxiliary
//! connectivity flow `f`, and private-edge markers `z` (holistic only).
//! Constraint rows carry a group name (`flow`, `aux_flow`, `aux_cap`,
//! `link_xy_lo`, `link_xy_hi`, `w_source`, `link_wy_lo`, `link_wy_hi`,
//! `coverage`, `private_sum`, `private_link`, `private_def`,
//! `independence`) so callers can audit which families a model contains.

mod holistic;
mod incremental;

pub use holistic::{build_holistic, build_holistic_with, HolisticOptions};
pub use incremental::{build_incremental, incremental_model, IncrementalState};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfg::{Cfg, EdgeId, NodeId};
use crate::milp::{MilpModel, Relation, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    /// Every edge is already covered, so no further path can add a new one.
    #[error("all {covered} edges are covered before iteration {iteration}; no independent path can exist")]
    AlreadyComplete { covered: usize, iteration: usize },
}

/// Variable indices of one path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathBlock {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub w: Vec<usize>,
    pub f: Option<Vec<usize>>,
    pub z: Option<Vec<usize>>,
}

/// Mapping from (family, path, edge or node) to model variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VariableLayout {
    pub blocks: Vec<PathBlock>,
}

impl VariableLayout {
    pub fn path_count(&self) -> usize {
        self.blocks.len()
    }

    /// Rounded traversal counts of each path.
    pub fn flows(&self, values: &[f64]) -> Vec<Vec<u32>> {
        self.blocks.iter().map(|b| b.x.iter().map(|&j| values[j].round().max(0.0) as u32).collect()).collect()
    }

    /// Edge-usage indicators of each path.
    pub fn usage(&self, values: &[f64]) -> Vec<Vec<bool>> {
        self.blocks.iter().map(|b| b.y.iter().map(|&j| values[j] > 0.5).collect()).collect()
    }
}

pub(crate) fn var_name(family: char, path: usize, id: usize) -> String {
    format!("{family}_{path}_{id}")
}

/// Declares one path block. `path` is the 1-based label used in names.
pub(crate) fn add_block(
    model: &mut MilpModel,
    cfg: &Cfg,
    path: usize,
    big_m: &BigM,
    with_flow: bool,
    with_private: bool,
) -> PathBlock {
    let m = cfg.edge_count();
    let n = cfg.node_count();
    let x = (0..m).map(|e| model.add_variable(var_name('x', path, e), VarKind::Integer, 0.0, big_m.u_x)).collect();
    let y = (0..m).map(|e| model.add_variable(var_name('y', path, e), VarKind::Binary, 0.0, 1.0)).collect();
    let w = (0..n).map(|v| model.add_variable(var_name('w', path, v), VarKind::Binary, 0.0, 1.0)).collect();
    let f = with_flow.then(|| {
        (0..m).map(|e| model.add_variable(var_name('f', path, e), VarKind::Continuous, 0.0, (n - 1) as f64)).collect()
    });
    let z = with_private
        .then(|| (0..m).map(|e| model.add_variable(var_name('z', path, e), VarKind::Binary, 0.0, 1.0)).collect());
    PathBlock { x, y, w, f, z }
}

/// Single-path structure: flow conservation, connectivity (when the block
/// has `f`), and the x/y/w linking rows.
pub(crate) fn add_path_rows(model: &mut MilpModel, cfg: &Cfg, path: usize, block: &PathBlock, big_m: &BigM) {
    let s = cfg.source();
    let t = cfg.sink();
    for v in 0..cfg.node_count() {
        let mut terms: Vec<(usize, f64)> = cfg.out_edges(v).iter().map(|&e| (block.x[e], 1.0)).collect();
        terms.extend(cfg.in_edges(v).iter().map(|&e| (block.x[e], -1.0)));
        let rhs = if v == s {
            1.0
        } else if v == t {
            -1.0
        } else {
            0.0
        };
        model.add_constraint(format!("flow_{path}_{v}"), "flow", terms, Relation::Eq, rhs);
    }
    if let Some(f) = &block.f {
        for v in 0..cfg.node_count() {
            let mut terms: Vec<(usize, f64)> = cfg.out_edges(v).iter().map(|&e| (f[e], 1.0)).collect();
            terms.extend(cfg.in_edges(v).iter().map(|&e| (f[e], -1.0)));
            if v == s {
                terms.extend((0..cfg.node_count()).filter(|&u| u != s).map(|u| (block.w[u], -1.0)));
            } else {
                terms.push((block.w[v], 1.0));
            }
            model.add_constraint(format!("aux_flow_{path}_{v}"), "aux_flow", terms, Relation::Eq, 0.0);
        }
        let cap = (cfg.node_count() - 1) as f64;
        for e in 0..cfg.edge_count() {
            model.add_constraint(
                format!("aux_cap_{path}_{e}"),
                "aux_cap",
                vec![(f[e], 1.0), (block.y[e], -cap)],
                Relation::Le,
                0.0,
            );
        }
    }
    for e in 0..cfg.edge_count() {
        model.add_constraint(
            format!("link_xy_hi_{path}_{e}"),
            "link_xy_hi",
            vec![(block.x[e], 1.0), (block.y[e], -big_m.m_xy)],
            Relation::Le,
            0.0,
        );
        model.add_constraint(
            format!("link_xy_lo_{path}_{e}"),
            "link_xy_lo",
            vec![(block.x[e], 1.0), (block.y[e], -1.0)],
            Relation::Ge,
            0.0,
        );
    }
    model.add_constraint(format!("w_source_{path}"), "w_source", vec![(block.w[s], 1.0)], Relation::Eq, 1.0);
    for v in (0..cfg.node_count()).filter(|&v| v != s) {
        let incident: Vec<EdgeId> = cfg.out_edges(v).iter().chain(cfg.in_edges(v)).copied().collect();
        let mut hi: Vec<(usize, f64)> = incident.iter().map(|&e| (block.y[e], 1.0)).collect();
        hi.push((block.w[v], -big_m.m_wy[v]));
        model.add_constraint(format!("link_wy_hi_{path}_{v}"), "link_wy_hi", hi, Relation::Le, 0.0);
        let mut lo: Vec<(usize, f64)> = incident.iter().map(|&e| (block.y[e], -1.0)).collect();
        lo.push((block.w[v], 1.0));
        model.add_constraint(format!("link_wy_lo_{path}_{v}"), "link_wy_lo", lo, Relation::Le, 0.0);
    }
}

/// Finite constants for the conditional rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigM {
    /// Upper bound on any single traversal count.
    pub u_x: f64,
    /// Coefficient in `x <= M y`.
    pub m_xy: f64,
    /// Per-node coefficient in `sum of incident y <= M w`; the node degree.
    pub m_wy: Vec<f64>,
    /// Coefficient in the private-edge definition; the basis size.
    pub m_z: f64,
}

pub fn big_m_values(cfg: &Cfg) -> BigM {
    let u_x = cfg.edge_count() as f64;
    BigM {
        u_x,
        m_xy: u_x,
        m_wy: (0..cfg.node_count()).map(|v| cfg.degree(v) as f64).collect(),
        m_z: cfg.cyclomatic_complexity() as f64,
    }
}

/// Variable and row counts of a model, for golden tests and documentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelAudit {
    pub paths: usize,
    pub variables: BTreeMap<String, usize>,
    pub groups: BTreeMap<String, usize>,
    pub total_variables: usize,
    pub total_constraints: usize,
}

impl ModelAudit {
    pub fn of(model: &MilpModel, layout: &VariableLayout) -> ModelAudit {
        let mut variables = BTreeMap::new();
        for v in model.variables() {
            let family = v.name.split('_').next().unwrap_or_default().to_string();
            *variables.entry(family).or_insert(0) += 1;
        }
        ModelAudit {
            paths: layout.path_count(),
            variables,
            groups: model.group_counts(),
            total_variables: model.variables().len(),
            total_constraints: model.constraints().len(),
        }
    }

    /// Closed-form counts for a holistic model on `cfg`.
    pub fn expected_holistic(cfg: &Cfg, enforce_connectivity: bool) -> ModelAudit {
        let k = cfg.cyclomatic_complexity();
        let m = cfg.edge_count();
        let n = cfg.node_count();
        let mut variables = BTreeMap::from([
            ("x".to_string(), k * m),
            ("y".to_string(), k * m),
            ("w".to_string(), k * n),
            ("z".to_string(), k * m),
        ]);
        let mut groups = BTreeMap::from([
            ("flow".to_string(), k * n),
            ("link_xy_hi".to_string(), k * m),
            ("link_xy_lo".to_string(), k * m),
            ("w_source".to_string(), k),
            ("link_wy_hi".to_string(), k * (n - 1)),
            ("link_wy_lo".to_string(), k * (n - 1)),
            ("coverage".to_string(), m),
            ("private_sum".to_string(), k),
            ("private_link".to_string(), k * m),
        ]);
        if k > 1 {
            groups.insert("private_def".to_string(), (k - 1) * m);
        }
        if enforce_connectivity {
            variables.insert("f".to_string(), k * m);
            groups.insert("aux_flow".to_string(), k * n);
            groups.insert("aux_cap".to_string(), k * m);
        }
        Self::with_totals(k, variables, groups)
    }

    /// Closed-form counts for a single-path incremental model.
    pub fn expected_incremental(cfg: &Cfg) -> ModelAudit {
        let m = cfg.edge_count();
        let n = cfg.node_count();
        let variables =
            BTreeMap::from([("x".to_string(), m), ("y".to_string(), m), ("w".to_string(), n), ("f".to_string(), m)]);
        let groups = BTreeMap::from([
            ("flow".to_string(), n),
            ("aux_flow".to_string(), n),
            ("aux_cap".to_string(), m),
            ("link_xy_hi".to_string(), m),
            ("link_xy_lo".to_string(), m),
            ("w_source".to_string(), 1),
            ("link_wy_hi".to_string(), n - 1),
            ("link_wy_lo".to_string(), n - 1),
            ("independence".to_string(), 1),
        ]);
        Self::with_totals(1, variables, groups)
    }

    fn with_totals(paths: usize, variables: BTreeMap<String, usize>, groups: BTreeMap<String, usize>) -> ModelAudit {
        ModelAudit {
            paths,
            total_variables: variables.values().sum(),
            total_constraints: groups.values().sum(),
            variables,
            groups,
        }
    }
}

/// Builds a full assignment for `layout` from per-path traversal counts.
///
/// `y`, `w` follow from the support; `z` marks, for each path, every used
/// edge that no earlier path uses; `f` routes one unit from the source to
/// each visited node along a breadth-first tree of used edges. Nodes that
/// are visited but cut off from the source receive no auxiliary flow, so
/// the encoding of a detached cycle violates the `aux_flow` rows.
pub fn encode_assignment(cfg: &Cfg, model: &MilpModel, layout: &VariableLayout, flows: &[Vec<u32>]) -> Vec<f64> {
    assert_eq!(flows.len(), layout.path_count(), "one flow per path block");
    let mut values = vec![0.0; model.variables().len()];
    let mut used_before = vec![false; cfg.edge_count()];
    for (block, flow) in layout.blocks.iter().zip(flows) {
        let used: Vec<bool> = flow.iter().map(|&c| c > 0).collect();
        for e in 0..cfg.edge_count() {
            values[block.x[e]] = flow[e] as f64;
            values[block.y[e]] = if used[e] { 1.0 } else { 0.0 };
        }
        let mut visited = vec![false; cfg.node_count()];
        visited[cfg.source()] = true;
        for (e, &(u, v)) in cfg.edges().iter().enumerate() {
            if used[e] {
                visited[u] = true;
                visited[v] = true;
            }
        }
        for (v, &on) in visited.iter().enumerate() {
            values[block.w[v]] = if on { 1.0 } else { 0.0 };
        }
        if let Some(z) = &block.z {
            for e in 0..cfg.edge_count() {
                values[z[e]] = if used[e] && !used_before[e] { 1.0 } else { 0.0 };
            }
        }
        if let Some(f) = &block.f {
            for (e, amount) in tree_flow(cfg, &used).into_iter().enumerate() {
                values[f[e]] = amount;
            }
        }
        for e in 0..cfg.edge_count() {
            used_before[e] |= used[e];
        }
    }
    values
}

/// One unit per reachable non-source node, routed along BFS tree edges.
fn tree_flow(cfg: &Cfg, used: &[bool]) -> Vec<f64> {
    let n = cfg.node_count();
    let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order: Vec<NodeId> = vec![cfg.source()];
    seen[cfg.source()] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &e in cfg.out_edges(v) {
            let w = cfg.edge(e).1;
            if used[e] && !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some(e);
                order.push(w);
            }
        }
    }
    let mut flow = vec![0.0; cfg.edge_count()];
    let mut demand = vec![1.0; n];
    for &v in order.iter().rev() {
        if let Some(e) = parent_edge[v] {
            flow[e] = demand[v];
            demand[cfg.edge(e).0] += demand[v];
        }
    }
    flow
}
