use std::collections::BTreeSet;

use thiserror::Error;

use super::{Cfg, EdgeId, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("walk is empty")]
    Empty,
    #[error("edge id {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("no edge {0} -> {1}")]
    MissingEdge(NodeId, NodeId),
    #[error("edges {0} and {1} are not adjacent")]
    NotAdjacent(EdgeId, EdgeId),
    #[error("walk does not start at the source")]
    WrongStart,
    #[error("walk does not end at the sink")]
    WrongEnd,
}

/// A source-to-sink walk, possibly revisiting nodes and edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathWalk {
    edges: Vec<EdgeId>,
    nodes: Vec<NodeId>,
    incidence: Vec<u32>,
}

impl PathWalk {
    pub fn from_edges(cfg: &Cfg, edges: Vec<EdgeId>) -> Result<PathWalk, WalkError> {
        let (&first, &last) = match (edges.first(), edges.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(WalkError::Empty),
        };
        if let Some(&bad) = edges.iter().find(|&&e| e >= cfg.edge_count()) {
            return Err(WalkError::UnknownEdge(bad));
        }
        if cfg.edge(first).0 != cfg.source() {
            return Err(WalkError::WrongStart);
        }
        if cfg.edge(last).1 != cfg.sink() {
            return Err(WalkError::WrongEnd);
        }
        for pair in edges.windows(2) {
            if cfg.edge(pair[0]).1 != cfg.edge(pair[1]).0 {
                return Err(WalkError::NotAdjacent(pair[0], pair[1]));
            }
        }
        let mut incidence = vec![0u32; cfg.edge_count()];
        let mut nodes = Vec::with_capacity(edges.len() + 1);
        nodes.push(cfg.source());
        for &e in &edges {
            incidence[e] += 1;
            nodes.push(cfg.edge(e).1);
        }
        Ok(PathWalk { edges, nodes, incidence })
    }

    pub fn from_nodes(cfg: &Cfg, nodes: &[NodeId]) -> Result<PathWalk, WalkError> {
        let edges = nodes
            .windows(2)
            .map(|w| cfg.edge_id(w[0], w[1]).ok_or(WalkError::MissingEdge(w[0], w[1])))
            .collect::<Result<Vec<_>, _>>()?;
        PathWalk::from_edges(cfg, edges)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Traversal count per edge id.
    pub fn incidence_vector(&self) -> &[u32] {
        &self.incidence
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edge ids traversed at least once.
    pub fn support(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.incidence.iter().enumerate().filter(|(_, &c)| c > 0).map(|(e, _)| e)
    }

    /// `0 -> 1 -> 3` style rendering.
    pub fn trace(&self) -> String {
        self.nodes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" -> ")
    }
}

/// Accumulated paths together with the union of their supports.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BasisCandidateSet {
    paths: Vec<PathWalk>,
    covered: BTreeSet<EdgeId>,
}

impl BasisCandidateSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `path` and returns the edges it covered for the first time.
    pub fn push(&mut self, path: PathWalk) -> Vec<EdgeId> {
        let fresh: Vec<EdgeId> = path.support().filter(|e| self.covered.insert(*e)).collect();
        self.paths.push(path);
        fresh
    }

    pub fn paths(&self) -> &[PathWalk] {
        &self.paths
    }

    pub fn covered_edges(&self) -> &BTreeSet<EdgeId> {
        &self.covered
    }

    pub fn into_paths(self) -> Vec<PathWalk> {
        self.paths
    }
}
