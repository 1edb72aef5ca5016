//! LP-based branch and bound.
//!
//! Nodes are explored depth first; every 1000 nodes the open list is
//! re-sorted so the best bound is expanded next. Branching picks the most
//! fractional integer variable (lowest index on ties). Each node keeps the
//! basis of its parent so a popped sibling re-solves warm.

use std::rc::Rc;
use std::time::Instant;

use super::simplex::{Basis, DualSimplex, LpStatus};
use super::{Limits, MilpModel, ModelInvariantError, Solution, SolveError, SolveStats, SolveStatus, FEAS_TOL, INT_TOL};

const RESORT_EVERY: u64 = 1000;

struct Node {
    /// Bound overrides relative to the root, in application order.
    changes: Vec<(usize, f64, f64)>,
    basis: Rc<Basis>,
    basis_id: u64,
    bound: f64,
}

/// Solves `model` to proven optimality unless a budget runs out first.
///
/// Returns `Optimal` when the search completes with an incumbent,
/// `Infeasible` when it completes without one, and `Feasible` or `TimedOut`
/// when a budget is exhausted with or without an incumbent. Every incumbent
/// is re-checked against the original rows before it is accepted.
pub fn solve(model: &MilpModel, limits: Limits) -> Result<Solution, SolveError> {
    solve_with_start(model, limits, None)
}

/// Like [`solve`], seeded with a known assignment. The start becomes the
/// first incumbent if it passes the same re-check as search incumbents;
/// otherwise it is ignored.
pub fn solve_with_start(model: &MilpModel, limits: Limits, warm: Option<&[f64]>) -> Result<Solution, SolveError> {
    model.check_invariants().map_err(|e| match e {
        ModelInvariantError::UnboundedVariable(name) => SolveError::Unbounded(name),
        other => SolveError::InvalidModel(other),
    })?;
    let start = Instant::now();
    let deadline = limits.time.map(|t| start + t);
    let n = model.variables().len();
    let integral: Vec<bool> = model.variables().iter().map(|v| v.kind.is_integral()).collect();
    // integer objective coefficients on integer columns only => integral objective
    let integral_objective = model.objective().iter().all(|&(j, c)| c == 0.0 || (integral[j] && c.fract() == 0.0));

    let mut lp = DualSimplex::new(model);
    let root_bounds: Vec<(f64, f64)> = (0..n).map(|j| lp.bounds(j)).collect();
    let mut stats = SolveStats::default();
    let mut incumbent: Option<(f64, Vec<f64>)> = warm
        .filter(|v| v.len() == n && model.check_assignment(v, FEAS_TOL).is_ok())
        .map(|v| (model.objective_value(v), v.to_vec()));
    let mut next_basis_id = 1u64;
    let mut current_basis_id = 0u64;
    let mut stack =
        vec![Node { changes: Vec::new(), basis: Rc::new(lp.snapshot()), basis_id: 0, bound: f64::NEG_INFINITY }];
    let mut exhausted = false;

    let prune_above = |incumbent: &Option<(f64, Vec<f64>)>| -> f64 {
        match incumbent {
            None => f64::INFINITY,
            Some((best, _)) if integral_objective => best - 1.0 + 1e-6,
            Some((best, _)) => best - 1e-9 * best.abs().max(1.0),
        }
    };

    while let Some(node) = stack.pop() {
        if node.bound > prune_above(&incumbent) {
            continue;
        }
        if limits.nodes.is_some_and(|cap| stats.nodes >= cap) || deadline.is_some_and(|d| Instant::now() >= d) {
            exhausted = true;
            break;
        }
        if node.basis_id != current_basis_id {
            lp.restore(&node.basis);
        }
        let mut target = root_bounds.clone();
        for &(j, lo, up) in &node.changes {
            target[j] = (lo, up);
        }
        for (j, &(lo, up)) in target.iter().enumerate() {
            if lp.bounds(j) != (lo, up) {
                lp.set_bounds(j, lo, up);
            }
        }
        stats.nodes += 1;
        let status = lp.solve(deadline);
        stats.lp_iterations = lp.iterations;
        // the basis now differs from every stored snapshot
        current_basis_id = u64::MAX;
        match status {
            LpStatus::Infeasible => continue,
            LpStatus::TimeLimit => {
                exhausted = true;
                break;
            }
            LpStatus::IterationLimit => {
                return Err(SolveError::Numerical(format!("LP iteration limit at node {}", stats.nodes)))
            }
            LpStatus::Optimal => {}
        }
        let bound = lp.objective();
        if bound > prune_above(&incumbent) {
            continue;
        }
        let values = lp.values();
        let branch = (0..n)
            .filter(|&j| integral[j])
            .map(|j| (j, (values[j] - values[j].floor()).min(values[j].ceil() - values[j])))
            .filter(|&(_, frac)| frac > INT_TOL)
            .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
                Some(a) if a.1 >= cur.1 => Some(a),
                _ => Some(cur),
            });
        match branch {
            None => {
                let candidate: Vec<f64> =
                    values.iter().zip(&integral).map(|(&v, &int)| if int { v.round() } else { v }).collect();
                if model.check_assignment(&candidate, FEAS_TOL).is_ok() {
                    let obj = model.objective_value(&candidate);
                    if incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
                        incumbent = Some((obj, candidate));
                        stats.incumbents += 1;
                    }
                }
            }
            Some((j, _)) => {
                let v = values[j];
                let (lo, up) = target[j];
                let basis = Rc::new(lp.snapshot());
                let id = next_basis_id;
                next_basis_id += 1;
                current_basis_id = id;
                let mut down = node.changes.clone();
                down.push((j, lo, v.floor()));
                let mut upc = node.changes;
                upc.push((j, v.ceil(), up));
                let down = Node { changes: down, basis: Rc::clone(&basis), basis_id: id, bound };
                let upn = Node { changes: upc, basis, basis_id: id, bound };
                // the child pushed last is explored first
                stack.push(down);
                stack.push(upn);
            }
        }
        if stats.nodes % RESORT_EVERY == 0 {
            // stable: equal bounds keep depth-first order
            stack.sort_by(|a, b| b.bound.total_cmp(&a.bound));
        }
    }

    stats.wall_time_s = start.elapsed().as_secs_f64();
    let (status, values, objective) = match (incumbent, exhausted) {
        (Some((obj, values)), false) => (SolveStatus::Optimal, values, obj),
        (Some((obj, values)), true) => (SolveStatus::Feasible, values, obj),
        (None, false) => (SolveStatus::Infeasible, Vec::new(), f64::NAN),
        (None, true) => (SolveStatus::TimedOut, Vec::new(), f64::NAN),
    };
    Ok(Solution { status, values, objective, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{Relation, VarKind};

    #[test]
    fn integer_lower_bound() {
        // min x s.t. x >= 3, x integer
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Integer, 0.0, 10.0);
        m.add_constraint("c", "g", vec![(x, 1.0)], Relation::Ge, 3.0);
        m.set_objective(vec![(x, 1.0)]);
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.values, vec![3.0]);
        assert_eq!(s.objective, 3.0);
    }

    #[test]
    fn knapsack_needs_branching() {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut m = MilpModel::new();
        let a = m.add_variable("a", VarKind::Integer, 0.0, 5.0);
        let b = m.add_variable("b", VarKind::Integer, 0.0, 5.0);
        let c = m.add_variable("c", VarKind::Integer, 0.0, 5.0);
        m.add_constraint("r1", "g", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Relation::Le, 5.0);
        m.add_constraint("r2", "g", vec![(a, 4.0), (b, 1.0), (c, 2.0)], Relation::Le, 11.0);
        m.add_constraint("r3", "g", vec![(a, 3.0), (b, 4.0), (c, 2.0)], Relation::Le, 8.0);
        m.set_objective(vec![(a, -5.0), (b, -4.0), (c, -3.0)]);
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, -13.0);
        assert!(m.check_assignment(&s.values, FEAS_TOL).is_ok());
    }

    #[test]
    fn infeasible_integer_program() {
        // 2x = 1 has no integer solution
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Integer, 0.0, 3.0);
        m.add_constraint("c", "g", vec![(x, 2.0)], Relation::Eq, 1.0);
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(s.values.is_empty());
    }

    #[test]
    fn node_budget_reports_timed_out_or_feasible() {
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Integer, 0.0, 3.0);
        m.add_constraint("c", "g", vec![(x, 2.0)], Relation::Eq, 1.0);
        let s = solve(&m, Limits::with_nodes(0)).unwrap();
        assert_eq!(s.status, SolveStatus::TimedOut);
    }

    #[test]
    fn rejects_unbounded_columns() {
        let mut m = MilpModel::new();
        m.add_variable("x", VarKind::Continuous, 0.0, f64::INFINITY);
        assert_eq!(solve(&m, Limits::default()), Err(SolveError::Unbounded("x".into())));
    }
}
