//! Control-flow graphs with a designated entry and exit.
//!
//! A [`Cfg`] is only obtainable through [`Cfg::validate`], so every value of
//! the type satisfies the structural invariants the optimisation models rely
//! on: dense node ids, no self-loops or parallel edges, a source without
//! incoming edges, a unique sink without outgoing edges, and every node lying
//! on some source-to-sink path.

mod io;
mod rank;
mod walk;

pub use io::{to_dot, CfgDocument};
pub use rank::{coverage_fraction, independence_rank, independent_fraction, Coverage};
pub use walk::{BasisCandidateSet, PathWalk, WalkError};

use std::collections::{BTreeSet, VecDeque};

use serde_json::Value;
use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfgError {
    #[error("graph has no nodes or no edges")]
    Empty,
    #[error("node ids must be exactly 0..{expected}, found {found}")]
    NonDenseNodes { expected: usize, found: usize },
    #[error("edge {edge} references unknown node {node}")]
    UnknownNode { edge: EdgeId, node: NodeId },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("parallel edge {0} -> {1}")]
    ParallelEdge(NodeId, NodeId),
    #[error("no usable source or sink: {0}")]
    NoSourceOrSink(String),
    #[error("node {0} is unreachable from the source")]
    UnreachableNode(NodeId),
    #[error("node {0} cannot reach the sink")]
    DeadEndNode(NodeId),
}

/// Unvalidated node and edge lists, as read from disk or built by hand.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawGraph {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub source: NodeId,
    pub sink: NodeId,
    pub meta: Value,
}

impl RawGraph {
    /// Nodes `0..=max endpoint`, edges in the given order.
    pub fn from_edges(edges: &[(NodeId, NodeId)], source: NodeId, sink: NodeId) -> Self {
        let n = edges.iter().flat_map(|&(u, v)| [u, v]).chain([source, sink]).max().map_or(0, |m| m + 1);
        RawGraph { nodes: (0..n).collect(), edges: edges.to_vec(), source, sink, meta: Value::Null }
    }
}

/// Nodes that were added while normalising the entry or exit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Normalization {
    pub virtual_source: Option<NodeId>,
    pub virtual_sink: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cfg {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    source: NodeId,
    sink: NodeId,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    normalization: Normalization,
    meta: Value,
}

impl Cfg {
    /// Validates `raw` and normalises its entry and exit.
    ///
    /// A source with incoming edges gets a fresh entry node in front of it.
    /// When several nodes have no outgoing edges, a virtual sink is appended
    /// with one edge from every natural exit, in node order. Added nodes and
    /// edges take the next free ids, so ids of the input are preserved.
    pub fn validate(raw: RawGraph) -> Result<Cfg, CfgError> {
        let RawGraph { nodes, mut edges, mut source, mut sink, meta } = raw;
        if nodes.is_empty() || edges.is_empty() {
            return Err(CfgError::Empty);
        }
        let mut n = nodes.len();
        if nodes.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(CfgError::NonDenseNodes { expected: n, found: nodes.iter().copied().max().unwrap_or(0) + 1 });
        }
        for (id, &(u, v)) in edges.iter().enumerate() {
            for node in [u, v] {
                if node >= n {
                    return Err(CfgError::UnknownNode { edge: id, node });
                }
            }
        }
        for &(u, v) in &edges {
            if u == v {
                return Err(CfgError::SelfLoop(u));
            }
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if !seen.insert((u, v)) {
                return Err(CfgError::ParallelEdge(u, v));
            }
        }
        if source >= n || sink >= n {
            return Err(CfgError::NoSourceOrSink(format!("source {source} or sink {sink} is not a node")));
        }
        if source == sink {
            return Err(CfgError::NoSourceOrSink(format!("source and sink are both node {source}")));
        }

        let mut normalization = Normalization::default();
        let mut out_degree = vec![0usize; n];
        for &(u, _) in &edges {
            out_degree[u] += 1;
        }
        if out_degree[sink] > 0 {
            return Err(CfgError::NoSourceOrSink(format!("sink {sink} has outgoing edges")));
        }
        let exits: Vec<NodeId> = (0..n).filter(|&v| out_degree[v] == 0 && v != source).collect();
        if edges.iter().any(|&(_, v)| v == source) {
            let entry = n;
            n += 1;
            edges.push((entry, source));
            source = entry;
            normalization.virtual_source = Some(entry);
        }
        if exits.len() > 1 {
            let exit = n;
            n += 1;
            for &v in &exits {
                edges.push((v, exit));
            }
            sink = exit;
            normalization.virtual_sink = Some(exit);
        }

        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            out_edges[u].push(id);
            in_edges[v].push(id);
        }
        let cfg = Cfg { node_count: n, edges, source, sink, out_edges, in_edges, normalization, meta };
        let forward = cfg.reachable_from(source, |e| cfg.out_edges[e].iter().map(|&id| cfg.edges[id].1));
        if let Some(v) = (0..n).find(|&v| !forward[v]) {
            return Err(CfgError::UnreachableNode(v));
        }
        let backward = cfg.reachable_from(sink, |e| cfg.in_edges[e].iter().map(|&id| cfg.edges[id].0));
        if let Some(v) = (0..n).find(|&v| !backward[v]) {
            return Err(CfgError::DeadEndNode(v));
        }
        Ok(cfg)
    }

    /// Convenience for tests and fixtures.
    pub fn from_edges(edges: &[(NodeId, NodeId)], source: NodeId, sink: NodeId) -> Result<Cfg, CfgError> {
        Cfg::validate(RawGraph::from_edges(edges, source, sink))
    }

    fn reachable_from<I>(&self, start: NodeId, next: impl Fn(NodeId) -> I) -> Vec<bool>
    where
        I: Iterator<Item = NodeId>,
    {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for w in next(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (NodeId, NodeId) {
        self.edges[id]
    }

    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.out_edges.get(u)?.iter().copied().find(|&id| self.edges[id].1 == v)
    }

    /// Outgoing edge ids of `v`, ascending.
    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    /// Incoming edge ids of `v`, ascending.
    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.out_edges[v].len() + self.in_edges[v].len()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn meta(&self) -> &Value {
        &self.meta
    }

    /// `|E| - |V| + 2`; at least 1 for every validated graph.
    pub fn cyclomatic_complexity(&self) -> usize {
        self.edges.len() + 2 - self.node_count
    }
}
