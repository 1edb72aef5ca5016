//! Reference graphs and path traces shared by tests, examples and the CLI.
//!
//! The ten-node graph is the loop-heavy illustration with complexity 9; its
//! edge list is the union of the edges walked by the breadth-first path set,
//! in first-use order, which also fixes its edge ids.

use crate::cfg::{Cfg, PathWalk};

pub const DOUBLE_DIAMOND_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)];

pub const ILLUSTRATIVE_EDGES: &[(usize, usize)] = &[
    (0, 1),
    (1, 2),
    (2, 9),
    (1, 3),
    (3, 4),
    (4, 9),
    (2, 1),
    (3, 5),
    (5, 6),
    (6, 9),
    (3, 8),
    (8, 9),
    (4, 3),
    (5, 7),
    (7, 5),
    (6, 3),
    (8, 3),
];

pub fn double_diamond() -> Cfg {
    Cfg::from_edges(DOUBLE_DIAMOND_EDGES, 0, 6).expect("valid fixture")
}

pub fn illustrative() -> Cfg {
    Cfg::from_edges(ILLUSTRATIVE_EDGES, 0, 9).expect("valid fixture")
}

/// Breadth-first baseline path set on the illustrative graph.
pub const BFS_TRACES: &[&[usize]] = &[
    &[0, 1, 2, 9],
    &[0, 1, 3, 4, 9],
    &[0, 1, 2, 1, 2, 9],
    &[0, 1, 3, 5, 6, 9],
    &[0, 1, 3, 8, 9],
    &[0, 1, 3, 4, 3, 4, 9],
    &[0, 1, 3, 5, 7, 5, 6, 9],
    &[0, 1, 3, 5, 6, 3, 4, 9],
    &[0, 1, 3, 8, 3, 4, 9],
];

/// Holistic path set with connectivity enforced.
pub const HOLISTIC_TRACES: &[&[usize]] = &[
    &[0, 1, 2, 9],
    &[0, 1, 3, 4, 9],
    &[0, 1, 3, 8, 9],
    &[0, 1, 3, 5, 6, 9],
    &[0, 1, 2, 1, 3, 4, 9],
    &[0, 1, 3, 4, 3, 8, 9],
    &[0, 1, 3, 8, 3, 4, 9],
    &[0, 1, 3, 5, 6, 3, 4, 9],
    &[0, 1, 3, 5, 7, 5, 6, 9],
];

/// Holistic solution without the connectivity rows: each entry is a main
/// trail plus optional detached cycles, given as node sequences.
pub const HOLISTIC_NO_CONNECTIVITY_FLOWS: &[&[&[usize]]] = &[
    &[&[0, 1, 3, 8, 9]],
    &[&[0, 1, 2, 9]],
    &[&[0, 1, 3, 4, 9]],
    &[&[0, 1, 2, 9], &[3, 4, 3]],
    &[&[0, 1, 2, 9], &[5, 7, 5]],
    &[&[0, 1, 2, 9], &[3, 5, 6, 3]],
    &[&[0, 1, 2, 1, 2, 9]],
    &[&[0, 1, 2, 9], &[3, 8, 3]],
    &[&[0, 1, 3, 5, 6, 9]],
];

/// Greedy (length-only) incremental path set.
pub const INCR_GREEDY_TRACES: &[&[usize]] = &[
    &[0, 1, 2, 9],
    &[0, 1, 3, 4, 9],
    &[0, 1, 3, 8, 9],
    &[0, 1, 3, 5, 6, 9],
    &[0, 1, 2, 1, 2, 9],
    &[0, 1, 3, 8, 3, 4, 9],
    &[0, 1, 3, 4, 3, 4, 9],
    &[0, 1, 3, 5, 7, 5, 6, 9],
    &[0, 1, 3, 5, 6, 3, 4, 9],
];

/// Novelty-penalised incremental path set.
pub const INCR_NOVELTY_TRACES: &[&[usize]] = &[
    &[0, 1, 2, 9],
    &[0, 1, 2, 1, 2, 9],
    &[0, 1, 3, 4, 9],
    &[0, 1, 3, 8, 9],
    &[0, 1, 3, 4, 3, 4, 9],
    &[0, 1, 3, 8, 3, 4, 9],
    &[0, 1, 3, 5, 6, 9],
    &[0, 1, 3, 5, 6, 3, 4, 9],
    &[0, 1, 3, 5, 7, 5, 6, 9],
];

pub fn traces(cfg: &Cfg, traces: &[&[usize]]) -> Vec<PathWalk> {
    traces.iter().map(|t| PathWalk::from_nodes(cfg, t).expect("fixture trace is a walk")).collect()
}

/// Per-edge traversal counts of a union of node sequences.
pub fn flow_of(cfg: &Cfg, pieces: &[&[usize]]) -> Vec<u32> {
    let mut flow = vec![0u32; cfg.edge_count()];
    for piece in pieces {
        for w in piece.windows(2) {
            let e = cfg.edge_id(w[0], w[1]).expect("fixture edge");
            flow[e] += 1;
        }
    }
    flow
}

/// Small graphs with `|E| <= 10` used for exhaustive optimality checks.
pub fn small_graphs() -> Vec<(&'static str, Cfg)> {
    let build = |edges: &[(usize, usize)], sink| Cfg::from_edges(edges, 0, sink).expect("valid fixture");
    vec![
        ("single_edge", build(&[(0, 1)], 1)),
        ("chain", build(&[(0, 1), (1, 2), (2, 3)], 3)),
        ("if_else", build(&[(0, 1), (0, 2), (1, 3), (2, 3)], 3)),
        ("double_diamond", double_diamond()),
        ("while_loop", build(&[(0, 1), (1, 2), (2, 1), (1, 3)], 3)),
        ("if_in_while", build(&[(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 1), (1, 5)], 5)),
        ("do_while_with_exit", build(&[(0, 1), (1, 2), (2, 1), (2, 3), (1, 4), (3, 4)], 4)),
        ("nested_loops", build(&[(0, 1), (1, 2), (2, 3), (3, 2), (3, 1), (1, 4)], 4)),
        (
            "loop_with_branch_exit",
            build(&[(0, 1), (1, 2), (2, 3), (3, 1), (2, 4), (1, 5), (4, 5), (0, 4), (3, 5), (4, 1)], 5),
        ),
    ]
}
