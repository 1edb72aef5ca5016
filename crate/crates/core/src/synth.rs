//! Random control-flow graphs with a prescribed node count and complexity.
//!
//! A spine `0 -> p(1) -> ... -> p(n-2) -> n-1` through a random permutation
//! of the inner nodes makes every node lie on a source-to-sink path. The
//! remaining `m - (n-1)` edges are the first admissible pairs of a
//! Fisher-Yates shuffle over all ordered pairs `(u, v)` with `u != v`,
//! `u != sink`, `v != source`, excluding spine edges.
//!
//! Randomness is ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by the seed as
//! 8 little-endian bytes followed by 24 zero bytes. An index below `n` is
//! drawn by rejection sampling: take `next_u64`, reject values at or above
//! the largest multiple of `n`, reduce modulo `n`. Following these rules
//! reproduces a corpus in any language with a ChaCha8 implementation.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfg::{Cfg, CfgDocument, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("no graph with complexity {cc} and {nodes} nodes: needs {needed} edges, at most {capacity} fit")]
    InfeasibleParameters { cc: usize, nodes: usize, needed: usize, capacity: usize },
}

/// Largest edge count the structural rules allow on `n` nodes.
pub fn edge_capacity(nodes: usize) -> usize {
    if nodes < 2 {
        return 0;
    }
    (nodes - 1) + (nodes - 2) * (nodes - 2)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let n = n as u64;
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % n) as usize;
        }
    }
}

fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

/// Random graph with `nodes` nodes and `cc + nodes - 2` edges.
pub fn generate(cc: usize, nodes: usize, seed: u64) -> Result<Cfg, SynthError> {
    let capacity = edge_capacity(nodes);
    let needed = (cc + nodes).saturating_sub(2);
    if cc < 1 || nodes < 2 || needed > capacity {
        return Err(SynthError::InfeasibleParameters { cc, nodes, needed, capacity });
    }
    let (s, t) = (0, nodes - 1);
    let mut rng = rng_for(seed);
    let mut inner: Vec<NodeId> = (1..t).collect();
    shuffle(&mut rng, &mut inner);
    let mut order = vec![s];
    order.extend(inner);
    order.push(t);
    let mut edges: Vec<(NodeId, NodeId)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    let mut present: BTreeSet<(NodeId, NodeId)> = edges.iter().copied().collect();

    let mut pairs: Vec<(NodeId, NodeId)> = (0..nodes)
        .flat_map(|u| (0..nodes).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && u != t && v != s && !present.contains(&(u, v)))
        .collect();
    shuffle(&mut rng, &mut pairs);
    let position: Vec<usize> = {
        let mut p = vec![0; nodes];
        for (i, &v) in order.iter().enumerate() {
            p[v] = i;
        }
        p
    };
    for (u, v) in pairs {
        if edges.len() == needed {
            break;
        }
        // a back edge must close a cycle through its target
        if position[v] < position[u] && !reaches(&edges, nodes, v, u) {
            continue;
        }
        present.insert((u, v));
        edges.push((u, v));
    }
    let cfg = Cfg::from_edges(&edges, s, t).expect("spine keeps the graph valid");
    debug_assert_eq!(cfg.cyclomatic_complexity(), cc);
    Ok(cfg)
}

fn reaches(edges: &[(NodeId, NodeId)], nodes: usize, from: NodeId, to: NodeId) -> bool {
    let mut seen = vec![false; nodes];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        for &(a, b) in edges {
            if a == x && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub group: String,
    pub cc: usize,
    pub nodes: usize,
    pub seed: u64,
    /// Graph file, relative to the manifest's directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, crate::Error> {
        Ok(serde_json::from_str(&crate::read_file(path)?)?)
    }
}

pub fn group_name(cc: usize, nodes: usize) -> String {
    format!("cc{cc}-v{nodes}")
}

/// Writes `count` graphs with seeds `first_seed..` into `dir`, plus
/// `manifest.json` listing them.
pub fn write_corpus(
    dir: &Path,
    cc: usize,
    nodes: usize,
    first_seed: u64,
    count: usize,
) -> Result<Manifest, crate::Error> {
    std::fs::create_dir_all(dir).map_err(|source| crate::Error::Io { path: dir.display().to_string(), source })?;
    let group = group_name(cc, nodes);
    let mut manifest = Manifest::default();
    for seed in first_seed..first_seed + count as u64 {
        let cfg = generate(cc, nodes, seed)?;
        let file = PathBuf::from(format!("{group}-s{seed}.json"));
        let text = serde_json::to_string_pretty(&document(&cfg, cc, nodes, seed))? + "\n";
        crate::write_file(&dir.join(&file), &text)?;
        manifest.entries.push(ManifestEntry { group: group.clone(), cc, nodes, seed, path: file });
    }
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    crate::write_file(&dir.join("manifest.json"), &text)?;
    Ok(manifest)
}

/// Document form of a generated graph, with its parameters in `meta`.
pub fn document(cfg: &Cfg, cc: usize, nodes: usize, seed: u64) -> CfgDocument {
    let mut doc = CfgDocument::from(cfg);
    doc.meta = serde_json::json!({ "generator": "chacha8-spine", "cc": cc, "nodes": nodes, "seed": seed });
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(generate(10, 9, 1).unwrap().edge_count(), 17);
        let chain = generate(1, 5, 0).unwrap();
        assert_eq!(chain.edge_count(), 4);
        assert!((0..5).all(|v| chain.out_edges(v).len() <= 1));
        let big = generate(100, 50, 7).unwrap();
        assert_eq!((big.edge_count(), big.cyclomatic_complexity()), (148, 100));
    }

    #[test]
    fn rejects_overfull_parameters() {
        assert_eq!(edge_capacity(3), 3);
        assert!(generate(2, 3, 0).is_ok());
        assert_eq!(
            generate(3, 3, 0),
            Err(SynthError::InfeasibleParameters { cc: 3, nodes: 3, needed: 4, capacity: 3 })
        );
        assert!(generate(0, 4, 0).is_err());
        assert!(generate(1, 1, 0).is_err());
    }

    #[test]
    fn same_seed_same_graph() {
        assert_eq!(generate(10, 9, 42).unwrap().to_json(), generate(10, 9, 42).unwrap().to_json());
        assert_ne!(generate(10, 9, 42).unwrap().to_json(), generate(10, 9, 43).unwrap().to_json());
    }

    #[test]
    fn rejection_sampling_stays_in_range() {
        let mut rng = rng_for(3);
        assert!((0..1000).all(|_| below(&mut rng, 7) < 7));
    }
}
