//! Solver-neutral MILP instances, a branch-and-bound solver, and a file
//! bridge (CPLEX LP export, `name value` solution import) for external
//! solvers.

mod bnb;
mod import;
mod lp_format;
mod simplex;

pub use bnb::{solve, solve_with_start};
pub use import::{import_solution, parse_assignment, ImportError};
pub use lp_format::export_lp;

use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on constraint and bound satisfaction.
pub const FEAS_TOL: f64 = 1e-6;
/// Distance from the nearest integer below which a value counts as integral.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    /// Amount by which `lhs rel rhs` is violated (0 when satisfied).
    pub fn violation(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Le => (lhs - rhs).max(0.0),
            Relation::Ge => (rhs - lhs).max(0.0),
            Relation::Eq => (lhs - rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Family the row belongs to, e.g. `flow` or `aux_flow`.
    pub group: String,
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelInvariantError {
    #[error("duplicate variable name {0}")]
    DuplicateName(String),
    #[error("constraint {constraint} references undeclared variable {index}")]
    UnknownVariable { constraint: String, index: usize },
    #[error("variable {0} has an infinite or NaN bound")]
    UnboundedVariable(String),
    #[error("binary variable {0} must have bounds within [0, 1]")]
    BinaryBounds(String),
}

/// A minimisation MILP with finite variable bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, f64)>,
    names: HashMap<String, usize>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a variable and returns its index. Binary variables get
    /// bounds `[0, 1]` regardless of the arguments.
    pub fn add_variable(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> usize {
        let name = name.into();
        let (lower, upper) = if kind == VarKind::Binary { (0.0, 1.0) } else { (lower, upper) };
        let index = self.variables.len();
        self.names.insert(name.clone(), index);
        self.variables.push(Variable { name, kind, lower, upper });
        index
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        group: impl Into<String>,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint { name: name.into(), group: group.into(), terms, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, f64)>) {
        self.objective = terms;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    pub fn set_bounds(&mut self, index: usize, lower: f64, upper: f64) {
        let var = &mut self.variables[index];
        var.lower = lower;
        var.upper = upper;
    }

    /// Row counts per constraint group.
    pub fn group_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for c in &self.constraints {
            *counts.entry(c.group.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn kind_counts(&self) -> BTreeMap<VarKind, usize> {
        let mut counts = BTreeMap::new();
        for v in &self.variables {
            *counts.entry(v.kind).or_insert(0) += 1;
        }
        counts
    }

    pub fn check_invariants(&self) -> Result<(), ModelInvariantError> {
        if self.names.len() != self.variables.len() {
            let mut seen = std::collections::HashSet::new();
            for v in &self.variables {
                if !seen.insert(&v.name) {
                    return Err(ModelInvariantError::DuplicateName(v.name.clone()));
                }
            }
        }
        for v in &self.variables {
            if !v.lower.is_finite() || !v.upper.is_finite() {
                return Err(ModelInvariantError::UnboundedVariable(v.name.clone()));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(ModelInvariantError::BinaryBounds(v.name.clone()));
            }
        }
        let n = self.variables.len();
        let objective = Constraint {
            name: "objective".into(),
            group: String::new(),
            terms: self.objective.clone(),
            relation: Relation::Eq,
            rhs: 0.0,
        };
        for c in self.constraints.iter().chain(std::iter::once(&objective)) {
            if let Some(&(index, _)) = c.terms.iter().find(|(i, _)| *i >= n) {
                return Err(ModelInvariantError::UnknownVariable { constraint: c.name.clone(), index });
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * values[j]).sum()
    }

    pub fn row_activity(&self, row: usize, values: &[f64]) -> f64 {
        self.constraints[row].terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Independent feasibility check of a full assignment: bounds,
    /// integrality and every row, each within `tol`. Returns the first
    /// violation found.
    pub fn check_assignment(&self, values: &[f64], tol: f64) -> Result<(), Violation> {
        assert_eq!(values.len(), self.variables.len(), "assignment length");
        for (v, &x) in self.variables.iter().zip(values) {
            let amount = (v.lower - x).max(x - v.upper).max(0.0);
            if amount > tol || x.is_nan() {
                return Err(Violation::Bound { variable: v.name.clone(), value: x });
            }
            if v.kind.is_integral() && (x - x.round()).abs() > INT_TOL {
                return Err(Violation::Integrality { variable: v.name.clone(), value: x });
            }
        }
        for (row, c) in self.constraints.iter().enumerate() {
            let lhs = self.row_activity(row, values);
            let amount = c.relation.violation(lhs, c.rhs);
            if amount > tol {
                return Err(Violation::Row { constraint: c.name.clone(), group: c.group.clone(), amount });
            }
        }
        Ok(())
    }

    /// Every violated row, for diagnostics.
    pub fn violated_rows(&self, values: &[f64], tol: f64) -> Vec<(usize, f64)> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(row, c)| {
                let amount = c.relation.violation(self.row_activity(row, values), c.rhs);
                (amount > tol).then_some((row, amount))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("variable {variable} = {value} is outside its bounds")]
    Bound { variable: String, value: f64 },
    #[error("variable {variable} = {value} is not integral")]
    Integrality { variable: String, value: f64 },
    #[error("constraint {constraint} ({group}) violated by {amount}")]
    Row { constraint: String, group: String, amount: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimedOut,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    /// Incumbents found by the search itself, excluding a supplied start.
    pub incumbents: u64,
    pub lp_iterations: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    /// One value per variable; empty when there is no incumbent.
    pub values: Vec<f64>,
    pub objective: f64,
    pub stats: SolveStats,
}

/// Search budgets. The node budget counts LP relaxations solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub time: Option<Duration>,
    pub nodes: Option<u64>,
}

impl Limits {
    pub const DEFAULT_TIME: Duration = Duration::from_secs(3600);

    pub fn unlimited() -> Self {
        Limits { time: None, nodes: None }
    }

    pub fn with_time(seconds: f64) -> Self {
        Limits { time: Some(Duration::from_secs_f64(seconds)), nodes: None }
    }

    pub fn with_nodes(nodes: u64) -> Self {
        Limits { time: None, nodes: Some(nodes) }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits { time: Some(Self::DEFAULT_TIME), nodes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid model: {0}")]
    InvalidModel(#[from] ModelInvariantError),
    #[error("variable {0} has no finite bound, so the relaxation may be unbounded")]
    Unbounded(String),
    #[error("numerical failure in the LP solver: {0}")]
    Numerical(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_bounds_are_forced() {
        let mut m = MilpModel::new();
        let b = m.add_variable("b", VarKind::Binary, -5.0, 9.0);
        assert_eq!((m.variables()[b].lower, m.variables()[b].upper), (0.0, 1.0));
    }

    #[test]
    fn invariant_violations_are_reported() {
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Continuous, 0.0, f64::INFINITY);
        assert_eq!(m.check_invariants(), Err(ModelInvariantError::UnboundedVariable("x".into())));
        m.set_bounds(x, 0.0, 1.0);
        m.add_constraint("c", "g", vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(matches!(m.check_invariants(), Err(ModelInvariantError::UnknownVariable { index: 3, .. })));
    }

    #[test]
    fn assignment_check_names_the_row() {
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Integer, 0.0, 10.0);
        m.add_constraint("lo", "g", vec![(x, 1.0)], Relation::Ge, 3.0);
        assert!(m.check_assignment(&[3.0], FEAS_TOL).is_ok());
        assert_eq!(
            m.check_assignment(&[2.0], FEAS_TOL),
            Err(Violation::Row { constraint: "lo".into(), group: "g".into(), amount: 1.0 })
        );
        assert!(matches!(m.check_assignment(&[3.5], FEAS_TOL), Err(Violation::Integrality { .. })));
    }
}
