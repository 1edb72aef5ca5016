//! Hand-off to external solvers: an LP file plus a layout file that is
//! enough to rebuild the same model and decode a returned assignment.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cfg::{coverage_fraction, independence_rank, Cfg, Coverage, EdgeId, PathWalk};
use crate::extract::extract_walk;
use crate::milp::{export_lp, import_solution, MilpModel, Solution};
use crate::models::{build_holistic, incremental_model, VariableLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Holistic,
    Incremental,
}

/// Contents of the `<model>.lp-layout` file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub model: ModelKind,
    pub enforce_connectivity: bool,
    pub novelty: bool,
    pub covered: Vec<EdgeId>,
    /// Edge list of the graph the model was built on, in id order.
    pub edges: Vec<[usize; 2]>,
    pub variables: usize,
    pub constraints: usize,
}

impl LayoutFile {
    pub fn holistic(cfg: &Cfg, enforce_connectivity: bool) -> Self {
        Self::new(cfg, ModelKind::Holistic, enforce_connectivity, false, Vec::new())
    }

    pub fn incremental(cfg: &Cfg, covered: &BTreeSet<EdgeId>, novelty: bool) -> Self {
        Self::new(cfg, ModelKind::Incremental, true, novelty, covered.iter().copied().collect())
    }

    fn new(cfg: &Cfg, model: ModelKind, enforce_connectivity: bool, novelty: bool, covered: Vec<EdgeId>) -> Self {
        let mut layout = LayoutFile {
            model,
            enforce_connectivity,
            novelty,
            covered,
            edges: cfg.edges().iter().map(|&(u, v)| [u, v]).collect(),
            variables: 0,
            constraints: 0,
        };
        let (m, _) = layout.build(cfg).expect("built on this graph");
        layout.variables = m.variables().len();
        layout.constraints = m.constraints().len();
        layout
    }

    /// Rebuilds the model; fails when `cfg` is not the graph it was made for.
    pub fn build(&self, cfg: &Cfg) -> Result<(MilpModel, VariableLayout), crate::Error> {
        let edges: Vec<[usize; 2]> = cfg.edges().iter().map(|&(u, v)| [u, v]).collect();
        if edges != self.edges {
            return Err(crate::Error::LayoutMismatch("edge list differs from the layout file".into()));
        }
        if let Some(&bad) = self.covered.iter().find(|&&e| e >= cfg.edge_count()) {
            return Err(crate::Error::LayoutMismatch(format!("covered edge {bad} does not exist")));
        }
        let built = match self.model {
            ModelKind::Holistic => build_holistic(cfg, self.enforce_connectivity),
            ModelKind::Incremental => incremental_model(cfg, &self.covered.iter().copied().collect(), self.novelty),
        };
        if self.variables != 0 && built.0.variables().len() != self.variables {
            return Err(crate::Error::LayoutMismatch("variable count differs from the layout file".into()));
        }
        Ok(built)
    }
}

/// LP text and layout for a model on `cfg`.
pub fn export(cfg: &Cfg, layout: &LayoutFile) -> Result<(String, String), crate::Error> {
    let (model, _) = layout.build(cfg)?;
    Ok((export_lp(&model), serde_json::to_string_pretty(layout)? + "\n"))
}

/// A verified external assignment decoded into walks.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportedPaths {
    pub solution: Solution,
    pub paths: Vec<PathWalk>,
    /// Path blocks whose flow did not decode, with the reason.
    pub errors: Vec<(usize, String)>,
    pub rank: usize,
    pub coverage: Coverage,
}

/// Re-verifies `solution_text` against the rebuilt model and decodes it.
pub fn import(cfg: &Cfg, layout: &LayoutFile, solution_text: &str) -> Result<ImportedPaths, crate::Error> {
    let (model, vars) = layout.build(cfg)?;
    let solution = import_solution(&model, solution_text)?;
    let mut paths = Vec::new();
    let mut errors = Vec::new();
    for (i, flow) in vars.flows(&solution.values).iter().enumerate() {
        match extract_walk(cfg, flow) {
            Ok(p) => paths.push(p),
            Err(e) => errors.push((i + 1, e.to_string())),
        }
    }
    Ok(ImportedPaths {
        rank: independence_rank(&paths, cfg),
        coverage: coverage_fraction(&paths, cfg),
        solution,
        paths,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::models::encode_assignment;

    #[test]
    fn export_then_import_round_trip() {
        let cfg = fixtures::double_diamond();
        let layout = LayoutFile::holistic(&cfg, true);
        let (lp, text) = export(&cfg, &layout).unwrap();
        assert!(lp.contains("Minimize"));
        let back: LayoutFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, layout);

        let (model, vars) = back.build(&cfg).unwrap();
        let flows: Vec<Vec<u32>> = [&[0, 1, 3, 4, 6][..], &[0, 2, 3, 4, 6], &[0, 1, 3, 5, 6]]
            .iter()
            .map(|t| fixtures::flow_of(&cfg, &[t]))
            .collect();
        let values = encode_assignment(&cfg, &model, &vars, &flows);
        let solution_text: String = model
            .variables()
            .iter()
            .zip(&values)
            .filter(|(_, &v)| v != 0.0)
            .map(|(var, v)| format!("{} {v}\n", var.name))
            .collect();
        let imported = import(&cfg, &back, &solution_text).unwrap();
        assert_eq!((imported.rank, imported.paths.len()), (3, 3));
        assert!(imported.errors.is_empty());
        assert_eq!(imported.solution.objective, 12.0);
    }

    #[test]
    fn mismatched_graph_is_rejected() {
        let layout = LayoutFile::holistic(&fixtures::double_diamond(), true);
        assert!(matches!(layout.build(&fixtures::illustrative()), Err(crate::Error::LayoutMismatch(_))));
    }
}
