use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Cfg, CfgError, PathWalk, RawGraph};

/// On-disk CFG interchange format. Edge order is significant: it fixes edge
/// ids and therefore the variable layout of every model built on the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfgDocument {
    pub nodes: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
    pub source: usize,
    pub sink: usize,
    #[serde(default, skip_serializing_if = "is_empty_meta")]
    pub meta: Value,
}

fn is_empty_meta(meta: &Value) -> bool {
    match meta {
        Value::Null => true,
        Value::Object(map) => map.is_empty(),
        _ => false,
    }
}

impl CfgDocument {
    pub fn into_raw(self) -> RawGraph {
        RawGraph {
            nodes: self.nodes,
            edges: self.edges.into_iter().map(|[u, v]| (u, v)).collect(),
            source: self.source,
            sink: self.sink,
            meta: self.meta,
        }
    }

    pub fn validate(self) -> Result<Cfg, CfgError> {
        Cfg::validate(self.into_raw())
    }
}

impl From<&Cfg> for CfgDocument {
    fn from(cfg: &Cfg) -> Self {
        let mut meta = cfg.meta().clone();
        let norm = cfg.normalization();
        if norm.virtual_source.is_some() || norm.virtual_sink.is_some() {
            if !meta.is_object() {
                meta = Value::Object(Default::default());
            }
            let map = meta.as_object_mut().expect("object");
            if let Some(v) = norm.virtual_source {
                map.insert("virtual_source".into(), v.into());
            }
            if let Some(v) = norm.virtual_sink {
                map.insert("virtual_sink".into(), v.into());
            }
        }
        CfgDocument {
            nodes: (0..cfg.node_count()).collect(),
            edges: cfg.edges().iter().map(|&(u, v)| [u, v]).collect(),
            source: cfg.source(),
            sink: cfg.sink(),
            meta,
        }
    }
}

impl Cfg {
    pub fn from_json(text: &str) -> Result<Cfg, crate::Error> {
        let doc: CfgDocument = serde_json::from_str(text)?;
        Ok(doc.validate()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CfgDocument::from(self)).expect("serialisable")
    }
}

/// Graphviz rendering. Edges carry their id; when `paths` is non-empty each
/// edge also lists the 1-based indices of the paths that traverse it.
pub fn to_dot(cfg: &Cfg, paths: &[PathWalk]) -> String {
    let mut out = String::from("digraph cfg {\n  node [shape=circle];\n");
    for v in 0..cfg.node_count() {
        let shape = if v == cfg.source() {
            "doublecircle"
        } else if v == cfg.sink() {
            "doubleoctagon"
        } else {
            "circle"
        };
        let _ = writeln!(out, "  n{v} [label=\"{v}\", shape={shape}];");
    }
    for (id, &(u, v)) in cfg.edges().iter().enumerate() {
        let users: Vec<String> = paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.incidence_vector()[id] > 0)
            .map(|(i, _)| (i + 1).to_string())
            .collect();
        let label = if users.is_empty() { format!("e{id}") } else { format!("e{id} [{}]", users.join(",")) };
        let _ = writeln!(out, "  n{u} -> n{v} [label=\"{label}\"];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn json_round_trip_keeps_edge_order() {
        let cfg = fixtures::illustrative();
        let back = Cfg::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back.edges(), cfg.edges());
        assert_eq!(back.cyclomatic_complexity(), 9);
    }

    #[test]
    fn parses_canonical_schema() {
        let text = r#"{"nodes":[0,1,2],"edges":[[0,1],[1,2],[0,2]],"source":0,"sink":2,"meta":{"name":"tri"}}"#;
        let cfg = Cfg::from_json(text).unwrap();
        assert_eq!(cfg.edge_id(0, 2), Some(2));
        assert_eq!(cfg.meta()["name"], "tri");
    }

    #[test]
    fn normalised_graph_records_virtual_nodes() {
        let cfg = Cfg::from_edges(&[(0, 1), (0, 2), (1, 3)], 0, 3).unwrap();
        let doc = CfgDocument::from(&cfg);
        assert_eq!(doc.meta["virtual_sink"], 4);
        // reloading an already-normalised document is a fixed point
        let again = doc.validate().unwrap();
        assert_eq!(again.edges(), cfg.edges());
    }

    #[test]
    fn dot_marks_entry_and_exit() {
        let cfg = fixtures::double_diamond();
        let p = PathWalk::from_nodes(&cfg, &[0, 1, 3, 4, 6]).unwrap();
        let dot = to_dot(&cfg, &[p]);
        assert!(dot.contains("n0 [label=\"0\", shape=doublecircle]"));
        assert!(dot.contains("n6 [label=\"6\", shape=doubleoctagon]"));
        assert!(dot.contains("n0 -> n1 [label=\"e0 [1]\"]"));
        assert!(dot.contains("n0 -> n2 [label=\"e1\"]"));
    }
}
