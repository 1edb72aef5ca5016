use thiserror::Error;

use super::{MilpModel, Solution, SolveStats, SolveStatus, Violation, FEAS_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImportError {
    #[error("line {line}: expected `name value`")]
    Malformed { line: usize },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("imported assignment is infeasible: {0}")]
    InfeasibleImport(Violation),
}

/// Parsed solution file: values by variable index plus optional claims.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub values: Vec<f64>,
    pub claimed_status: Option<SolveStatus>,
    pub claimed_objective: Option<f64>,
}

/// Reads `name value` lines. Variables that are not listed are zero.
/// Comment lines start with `#`; `# status <optimal|feasible>` and
/// `# objective <value>` are recognised as claims.
pub fn parse_assignment(model: &MilpModel, text: &str) -> Result<Assignment, ImportError> {
    let mut values = vec![0.0; model.variables().len()];
    let mut claimed_status = None;
    let mut claimed_objective = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            match (words.next(), words.next()) {
                (Some("status"), Some(s)) => {
                    claimed_status = match s.to_ascii_lowercase().as_str() {
                        "optimal" => Some(SolveStatus::Optimal),
                        "feasible" => Some(SolveStatus::Feasible),
                        _ => claimed_status,
                    }
                }
                (Some("objective"), Some(v)) => claimed_objective = v.parse().ok(),
                _ => {}
            }
            continue;
        }
        let mut words = line.split_whitespace().filter(|w| *w != "=");
        let (Some(name), Some(value), None) = (words.next(), words.next(), words.next()) else {
            return Err(ImportError::Malformed { line: idx + 1 });
        };
        let value: f64 = value.parse().map_err(|_| ImportError::Malformed { line: idx + 1 })?;
        let j = model.variable_index(name).ok_or_else(|| ImportError::UnknownVariable(name.to_string()))?;
        values[j] = value;
    }
    Ok(Assignment { values, claimed_status, claimed_objective })
}

/// Imports an externally computed assignment and re-verifies it locally.
///
/// The result carries the claimed status (optimal by default). A claimed
/// objective that disagrees with the recomputed one downgrades an optimal
/// claim to `Feasible`.
pub fn import_solution(model: &MilpModel, text: &str) -> Result<Solution, ImportError> {
    let assignment = parse_assignment(model, text)?;
    model.check_assignment(&assignment.values, FEAS_TOL).map_err(ImportError::InfeasibleImport)?;
    let objective = model.objective_value(&assignment.values);
    let mut status = assignment.claimed_status.unwrap_or(SolveStatus::Optimal);
    if let Some(claimed) = assignment.claimed_objective {
        if (claimed - objective).abs() > FEAS_TOL * objective.abs().max(1.0) {
            status = SolveStatus::Feasible;
        }
    }
    Ok(Solution { status, values: assignment.values, objective, stats: SolveStats::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{Relation, VarKind};

    fn trivial() -> MilpModel {
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Integer, 0.0, 10.0);
        m.add_constraint("c", "g", vec![(x, 1.0)], Relation::Ge, 3.0);
        m.set_objective(vec![(x, 1.0)]);
        m
    }

    #[test]
    fn valid_assignment_is_optimal() {
        let s = import_solution(&trivial(), "# from an external solver\nx 3\n").unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, 3.0);
    }

    #[test]
    fn violation_names_the_constraint() {
        let err = import_solution(&trivial(), "x 2").unwrap_err();
        match err {
            ImportError::InfeasibleImport(Violation::Row { constraint, amount, .. }) => {
                assert_eq!(constraint, "c");
                assert_eq!(amount, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_names_and_bad_lines() {
        assert_eq!(import_solution(&trivial(), "y 1"), Err(ImportError::UnknownVariable("y".into())));
        assert_eq!(import_solution(&trivial(), "x"), Err(ImportError::Malformed { line: 1 }));
        assert!(import_solution(&trivial(), "x = 4").is_ok());
    }

    #[test]
    fn objective_mismatch_downgrades() {
        let s = import_solution(&trivial(), "# objective 2\nx 4").unwrap();
        assert_eq!(s.status, SolveStatus::Feasible);
    }
}
