//! Turning per-edge traversal counts back into explicit walks.

use thiserror::Error;

use crate::cfg::{Cfg, EdgeId, NodeId, PathWalk};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("flow is not a unit source-to-sink flow at node {node}")]
    UnbalancedFlow { node: NodeId },
    #[error("flow on edges {stranded:?} is not reachable from the source walk")]
    DisconnectedFlow { stranded: Vec<EdgeId> },
}

/// Rebuilds a source-to-sink walk whose incidence vector equals `flow`.
///
/// The main trail leaves the source along the smallest available edge id
/// until it reaches the sink. Remaining flow is spliced in as closed
/// sub-walks: the smallest remaining edge id whose tail already lies on the
/// walk starts a cycle, inserted at that tail's first occurrence.
pub fn extract_walk(cfg: &Cfg, flow: &[u32]) -> Result<PathWalk, ExtractError> {
    assert_eq!(flow.len(), cfg.edge_count(), "one count per edge");
    for v in 0..cfg.node_count() {
        let out: i64 = cfg.out_edges(v).iter().map(|&e| flow[e] as i64).sum();
        let inc: i64 = cfg.in_edges(v).iter().map(|&e| flow[e] as i64).sum();
        let want = if v == cfg.source() {
            1
        } else if v == cfg.sink() {
            -1
        } else {
            0
        };
        if out - inc != want {
            return Err(ExtractError::UnbalancedFlow { node: v });
        }
    }
    let mut remaining = flow.to_vec();
    let mut edges = trail(cfg, &mut remaining, cfg.source());
    loop {
        let mut on_walk = vec![false; cfg.node_count()];
        on_walk[cfg.source()] = true;
        for &e in &edges {
            on_walk[cfg.edge(e).1] = true;
        }
        let Some(next) = (0..cfg.edge_count()).find(|&e| remaining[e] > 0 && on_walk[cfg.edge(e).0]) else {
            break;
        };
        let tail = cfg.edge(next).0;
        remaining[next] -= 1;
        let mut cycle = vec![next];
        cycle.extend(trail(cfg, &mut remaining, cfg.edge(next).1));
        let at = if tail == cfg.source() {
            0
        } else {
            edges.iter().position(|&e| cfg.edge(e).1 == tail).expect("tail on walk") + 1
        };
        edges.splice(at..at, cycle);
    }
    let stranded: Vec<EdgeId> = (0..cfg.edge_count()).filter(|&e| remaining[e] > 0).collect();
    if !stranded.is_empty() {
        return Err(ExtractError::DisconnectedFlow { stranded });
    }
    Ok(PathWalk::from_edges(cfg, edges).expect("balanced connected flow yields a walk"))
}

/// Follows smallest-id edges with remaining flow until none is left at the
/// current node.
fn trail(cfg: &Cfg, remaining: &mut [u32], start: NodeId) -> Vec<EdgeId> {
    let mut out = Vec::new();
    let mut at = start;
    while let Some(&e) = cfg.out_edges(at).iter().find(|&&e| remaining[e] > 0) {
        remaining[e] -= 1;
        out.push(e);
        at = cfg.edge(e).1;
    }
    out
}

/// True when every used edge can be reached from the source through used
/// edges.
pub fn verify_connected_support(cfg: &Cfg, used: &[bool]) -> bool {
    let mut seen = vec![false; cfg.node_count()];
    let mut stack = vec![cfg.source()];
    seen[cfg.source()] = true;
    while let Some(v) = stack.pop() {
        for &e in cfg.out_edges(v) {
            let w = cfg.edge(e).1;
            if used[e] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    cfg.edges().iter().zip(used).all(|(&(u, _), &on)| !on || seen[u])
}
