use crate::cfg::Cfg;
use crate::milp::{MilpModel, Relation};

use super::{add_block, add_path_rows, big_m_values, BigM, VariableLayout};

#[derive(Debug, Clone, PartialEq)]
pub struct HolisticOptions {
    /// Emit the auxiliary single-source flow rows that forbid detached cycles.
    pub enforce_connectivity: bool,
    pub big_m: BigM,
}

impl HolisticOptions {
    pub fn new(cfg: &Cfg, enforce_connectivity: bool) -> Self {
        HolisticOptions { enforce_connectivity, big_m: big_m_values(cfg) }
    }
}

/// All `k` paths in one model, minimising their total length.
pub fn build_holistic(cfg: &Cfg, enforce_connectivity: bool) -> (MilpModel, VariableLayout) {
    build_holistic_with(cfg, &HolisticOptions::new(cfg, enforce_connectivity))
}

pub fn build_holistic_with(cfg: &Cfg, options: &HolisticOptions) -> (MilpModel, VariableLayout) {
    let k = cfg.cyclomatic_complexity();
    let mut model = MilpModel::new();
    let big_m = &options.big_m;
    let blocks: Vec<_> =
        (1..=k).map(|i| add_block(&mut model, cfg, i, big_m, options.enforce_connectivity, true)).collect();
    model.set_objective(blocks.iter().flat_map(|b| b.x.iter().map(|&j| (j, 1.0))).collect());
    for (i, block) in blocks.iter().enumerate() {
        add_path_rows(&mut model, cfg, i + 1, block, big_m);
    }
    for e in 0..cfg.edge_count() {
        model.add_constraint(
            format!("coverage_{e}"),
            "coverage",
            blocks.iter().map(|b| (b.y[e], 1.0)).collect(),
            Relation::Ge,
            1.0,
        );
    }
    for (i, block) in blocks.iter().enumerate() {
        let label = i + 1;
        let z = block.z.as_ref().expect("holistic blocks carry z");
        model.add_constraint(
            format!("private_sum_{label}"),
            "private_sum",
            z.iter().map(|&j| (j, 1.0)).collect(),
            Relation::Ge,
            1.0,
        );
        for e in 0..cfg.edge_count() {
            model.add_constraint(
                format!("private_link_{label}_{e}"),
                "private_link",
                vec![(z[e], 1.0), (block.y[e], -1.0)],
                Relation::Le,
                0.0,
            );
        }
        if i == 0 {
            continue;
        }
        // a private edge of path i is unused by every earlier path
        for e in 0..cfg.edge_count() {
            let mut terms: Vec<(usize, f64)> = blocks[..i].iter().map(|b| (b.y[e], 1.0)).collect();
            terms.push((z[e], big_m.m_z));
            model.add_constraint(format!("private_def_{label}_{e}"), "private_def", terms, Relation::Le, big_m.m_z);
        }
    }
    (model, VariableLayout { blocks })
}
