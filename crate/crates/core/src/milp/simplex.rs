//! Bounded-variable dual simplex on a dense tableau.
//!
//! Row `i` of the model becomes `a_i x + s_i = b_i` with a slack `s_i` whose
//! bounds are implied by the relation and the activity range of the row.
//! Because every structural variable is boxed, every column is boxed, so any
//! basis can be made dual feasible by parking each nonbasic column at the
//! bound that matches the sign of its reduced cost. That makes the dual
//! simplex usable both from the initial slack basis and for warm re-solves
//! after branching changes bounds.

use std::time::Instant;

use super::{MilpModel, Relation};

const NONBASIC: usize = usize::MAX;
const PRIMAL_TOL: f64 = 1e-9;
/// Violations this small are accepted when no entering column exists.
const PRIMAL_SLACK_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-7;
const DROP_TOL: f64 = 1e-11;
/// Under Bland's rule a tied candidate must reach this share of the largest
/// tied pivot magnitude.
const BLAND_PIVOT_SHARE: f64 = 1e-2;
const RESIDUAL_TOL: f64 = 1e-9;
/// Pivots between residual checks.
const CHECK_EVERY: u64 = 50;
const PERTURBATION: f64 = 1e-6;
/// Consecutive non-improving pivots before switching to Bland's rule.
const STALL_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
    TimeLimit,
}

/// Basis header: which column is basic in each row plus nonbasic bound sides.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Basis {
    basic: Vec<usize>,
    at_upper: Vec<bool>,
}

pub(crate) struct DualSimplex {
    n: usize,
    m: usize,
    width: usize,
    stride: usize,
    tab: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    at_upper: Vec<bool>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    xb: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    trivially_infeasible: bool,
    pub(crate) iterations: u64,
}

impl DualSimplex {
    pub(crate) fn new(model: &MilpModel) -> DualSimplex {
        let n = model.variables().len();
        let m = model.constraints().len();
        let width = n + m;
        let stride = width + 1;
        let mut lower: Vec<f64> = model.variables().iter().map(|v| v.lower).collect();
        let mut upper: Vec<f64> = model.variables().iter().map(|v| v.upper).collect();
        let mut cost = vec![0.0; width];
        for &(j, c) in model.objective() {
            cost[j] += c;
        }
        let mut tab = vec![0.0; m * stride];
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut trivially_infeasible = false;
        for (i, c) in model.constraints().iter().enumerate() {
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(c.terms.len());
            for &(j, a) in &c.terms {
                match merged.iter_mut().find(|(k, _)| *k == j) {
                    Some(entry) => entry.1 += a,
                    None => merged.push((j, a)),
                }
            }
            let (mut act_min, mut act_max) = (0.0, 0.0);
            for &(j, a) in &merged {
                tab[i * stride + j] = a;
                if a >= 0.0 {
                    act_min += a * lower[j];
                    act_max += a * upper[j];
                } else {
                    act_min += a * upper[j];
                    act_max += a * lower[j];
                }
            }
            tab[i * stride + n + i] = 1.0;
            tab[i * stride + width] = c.rhs;
            let (slo, sup) = match c.relation {
                Relation::Le => (0.0, c.rhs - act_min),
                Relation::Ge => (c.rhs - act_max, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            if slo > sup + PRIMAL_SLACK_TOL {
                trivially_infeasible = true;
            }
            lower.push(slo);
            upper.push(sup.max(slo));
            rows.push(merged);
            rhs.push(c.rhs);
        }
        let at_upper = (0..width).map(|j| cost[j] < 0.0).collect();
        let mut lp = DualSimplex {
            n,
            m,
            width,
            stride,
            tab,
            basis: (n..width).collect(),
            row_of: (0..width).map(|j| if j < n { NONBASIC } else { j - n }).collect(),
            at_upper,
            lower,
            upper,
            reduced: cost.clone(),
            cost,
            xb: vec![0.0; m],
            rows,
            rhs,
            trivially_infeasible,
            iterations: 0,
        };
        lp.recompute_primal();
        lp
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            self.lower[j]
        }
    }

    pub(crate) fn value(&self, j: usize) -> f64 {
        match self.row_of[j] {
            NONBASIC => self.nonbasic_value(j),
            r => self.xb[r],
        }
    }

    /// Structural values.
    pub(crate) fn values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.value(j)).collect()
    }

    pub(crate) fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.value(j)).sum()
    }

    pub(crate) fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub(crate) fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        if self.row_of[j] == NONBASIC {
            let old = self.nonbasic_value(j);
            self.lower[j] = lower;
            self.upper[j] = upper;
            let delta = self.nonbasic_value(j) - old;
            if delta != 0.0 {
                for r in 0..self.m {
                    let t = self.tab[r * self.stride + j];
                    if t != 0.0 {
                        self.xb[r] -= t * delta;
                    }
                }
            }
        } else {
            self.lower[j] = lower;
            self.upper[j] = upper;
        }
    }

    pub(crate) fn snapshot(&self) -> Basis {
        Basis { basic: self.basis.clone(), at_upper: self.at_upper.clone() }
    }

    /// Moves the tableau to `target` by pivoting the missing columns in.
    pub(crate) fn restore(&mut self, target: &Basis) {
        let mut in_target = vec![false; self.width];
        for &j in &target.basic {
            in_target[j] = true;
        }
        let mut entering: Vec<usize> = target.basic.iter().copied().filter(|&j| self.row_of[j] == NONBASIC).collect();
        let mut ok = true;
        for r in 0..self.m {
            if in_target[self.basis[r]] {
                continue;
            }
            let best = entering.iter().enumerate().map(|(pos, &j)| (pos, self.tab[r * self.stride + j].abs())).fold(
                None,
                |acc: Option<(usize, f64)>, cur| match acc {
                    Some(a) if a.1 >= cur.1 => Some(a),
                    _ => Some(cur),
                },
            );
            match best {
                Some((pos, mag)) if mag > PIVOT_TOL => {
                    let j = entering.swap_remove(pos);
                    self.pivot(r, j);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            self.refactor(&target.basic);
        }
        self.at_upper.clone_from(&target.at_upper);
        self.recompute_primal();
    }

    fn recompute_primal(&mut self) {
        let moved: Vec<(usize, f64)> = (0..self.width)
            .filter(|&j| self.row_of[j] == NONBASIC)
            .map(|j| (j, self.nonbasic_value(j)))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        for r in 0..self.m {
            let row = &self.tab[r * self.stride..(r + 1) * self.stride];
            let mut v = row[self.width];
            for &(j, x) in &moved {
                v -= row[j] * x;
            }
            self.xb[r] = v;
        }
    }

    fn recompute_reduced(&mut self) {
        self.reduced.clone_from(&self.cost);
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[r * self.stride..r * self.stride + self.width];
            for (d, &t) in self.reduced.iter_mut().zip(row) {
                *d -= cb * t;
            }
        }
        for &j in &self.basis {
            self.reduced[j] = 0.0;
        }
    }

    /// Rebuilds the tableau from the original rows for the given basic set.
    fn refactor(&mut self, basic: &[usize]) {
        self.tab.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                self.tab[i * self.stride + j] = a;
            }
            self.tab[i * self.stride + self.n + i] = 1.0;
            self.tab[i * self.stride + self.width] = self.rhs[i];
        }
        self.basis = (self.n..self.width).collect();
        self.row_of = (0..self.width).map(|j| if j < self.n { NONBASIC } else { j - self.n }).collect();
        let mut in_target = vec![false; self.width];
        for &j in basic {
            in_target[j] = true;
        }
        let structurals: Vec<usize> = basic.iter().copied().filter(|&j| j < self.n).collect();
        for j in structurals {
            let best = (0..self.m)
                .filter(|&r| !in_target[self.basis[r]])
                .map(|r| (r, self.tab[r * self.stride + j].abs()))
                .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
                    Some(a) if a.1 >= cur.1 => Some(a),
                    _ => Some(cur),
                });
            if let Some((r, mag)) = best {
                if mag > PIVOT_TOL {
                    self.pivot(r, j);
                }
            }
        }
        self.recompute_reduced();
    }

    /// Basis exchange at `(r, q)` updating tableau and reduced costs.
    fn pivot(&mut self, r: usize, q: usize) {
        let stride = self.stride;
        let alpha = self.tab[r * stride + q];
        {
            let row = &mut self.tab[r * stride..(r + 1) * stride];
            let inv = 1.0 / alpha;
            for v in row.iter_mut() {
                if *v != 0.0 {
                    *v *= inv;
                }
            }
            row[q] = 1.0;
        }
        let pivot_row: Vec<(usize, f64)> = self.tab[r * stride..(r + 1) * stride]
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > DROP_TOL)
            .map(|(k, &v)| (k, v))
            .collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i * stride + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.tab[i * stride..(i + 1) * stride];
            for &(k, v) in &pivot_row {
                let updated = row[k] - f * v;
                row[k] = if updated.abs() < DROP_TOL { 0.0 } else { updated };
            }
            row[q] = 0.0;
        }
        let dq = self.reduced[q];
        if dq != 0.0 {
            for &(k, v) in &pivot_row {
                if k < self.width {
                    self.reduced[k] -= dq * v;
                }
            }
        }
        self.reduced[q] = 0.0;
        let leaving = self.basis[r];
        self.basis[r] = q;
        self.row_of[q] = r;
        self.row_of[leaving] = NONBASIC;
    }

    /// Parks every movable nonbasic column on the bound its reduced cost
    /// prefers. Returns whether anything moved.
    fn restore_dual_feasibility(&mut self) -> bool {
        let mut moved = false;
        for j in 0..self.width {
            if self.row_of[j] != NONBASIC || self.upper[j] - self.lower[j] <= 0.0 {
                continue;
            }
            let d = self.reduced[j];
            if d < -DUAL_TOL && !self.at_upper[j] {
                self.at_upper[j] = true;
                moved = true;
            } else if d > DUAL_TOL && self.at_upper[j] {
                self.at_upper[j] = false;
                moved = true;
            }
        }
        moved
    }

    fn max_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let lhs: f64 = row.iter().map(|&(j, a)| a * self.value(j)).sum::<f64>() + self.value(self.n + i);
            worst = worst.max((lhs - self.rhs[i]).abs());
        }
        worst
    }

    /// Optimises from the current basis. Costs are first perturbed to break
    /// dual degeneracy; the exact costs are then restored and the basis
    /// re-optimised, so the reported objective is exact.
    pub(crate) fn solve(&mut self, deadline: Option<Instant>) -> LpStatus {
        if self.trivially_infeasible {
            return LpStatus::Infeasible;
        }
        let exact = self.cost.clone();
        self.perturb_costs();
        let status = self.run(deadline);
        self.cost = exact;
        self.recompute_reduced();
        if status != LpStatus::Optimal {
            return status;
        }
        self.run(deadline)
    }

    fn perturb_costs(&mut self) {
        for j in 0..self.width {
            if self.upper[j] - self.lower[j] <= 0.0 {
                continue;
            }
            // golden-ratio sequence: deterministic, well spread in [0, 1)
            let u = (j as f64 * 0.618_033_988_749_894_9).fract();
            let eps = PERTURBATION * (1.0 + self.cost[j].abs()) * (1.0 + u);
            let downward = self.row_of[j] == NONBASIC && self.at_upper[j];
            self.cost[j] += if downward { -eps } else { eps };
        }
        self.recompute_reduced();
    }

    fn refactor_current(&mut self) {
        let basic = self.basis.clone();
        self.refactor(&basic);
        self.recompute_primal();
    }

    fn run(&mut self, deadline: Option<Instant>) -> LpStatus {
        if self.restore_dual_feasibility() {
            self.recompute_primal();
        }
        let limit = 50 * (self.m + self.width) as u64 + 10_000;
        let mut local = 0u64;
        let mut stall = 0usize;
        let mut last_obj = f64::NEG_INFINITY;
        let mut tolerated = vec![false; self.m];
        let mut refactored = false;
        loop {
            if local > 0 && local.is_multiple_of(CHECK_EVERY) && self.max_residual() > RESIDUAL_TOL {
                self.refactor_current();
                if self.restore_dual_feasibility() {
                    self.recompute_primal();
                }
            }
            if local >= limit {
                return LpStatus::IterationLimit;
            }
            if local.is_multiple_of(64) {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return LpStatus::TimeLimit;
                    }
                }
            }
            let bland = stall >= STALL_LIMIT;
            let Some((r, to_upper)) = self.choose_leaving(bland, &tolerated) else {
                if self.max_residual() > RESIDUAL_TOL && !refactored {
                    refactored = true;
                    self.refactor_current();
                    if self.restore_dual_feasibility() {
                        self.recompute_primal();
                    }
                    continue;
                }
                return LpStatus::Optimal;
            };
            let Some(q) = self.choose_entering(r, to_upper, bland) else {
                let j = self.basis[r];
                let violation = if to_upper { self.xb[r] - self.upper[j] } else { self.lower[j] - self.xb[r] };
                if violation <= PRIMAL_SLACK_TOL {
                    tolerated[r] = true;
                    continue;
                }
                if !refactored && self.max_residual() > RESIDUAL_TOL {
                    refactored = true;
                    self.refactor_current();
                    self.restore_dual_feasibility();
                    self.recompute_primal();
                    continue;
                }
                return LpStatus::Infeasible;
            };
            let leaving = self.basis[r];
            let target = if to_upper { self.upper[leaving] } else { self.lower[leaving] };
            let alpha = self.tab[r * self.stride + q];
            let delta = (self.xb[r] - target) / alpha;
            let entering_value = self.nonbasic_value(q) + delta;
            if delta != 0.0 {
                for i in 0..self.m {
                    let t = self.tab[i * self.stride + q];
                    if t != 0.0 {
                        self.xb[i] -= t * delta;
                    }
                }
            }
            self.pivot(r, q);
            self.xb[r] = entering_value;
            self.at_upper[leaving] = to_upper;
            self.at_upper[q] = false;
            tolerated.iter_mut().for_each(|t| *t = false);
            self.iterations += 1;
            local += 1;
            let obj = self.objective();
            if obj > last_obj + 1e-12 {
                last_obj = obj;
                stall = 0;
            } else {
                stall += 1;
            }
        }
    }

    fn choose_leaving(&self, bland: bool, tolerated: &[bool]) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool, f64)> = None;
        for r in 0..self.m {
            if tolerated[r] {
                continue;
            }
            let j = self.basis[r];
            let x = self.xb[r];
            let (violation, to_upper) = if x < self.lower[j] - PRIMAL_TOL {
                (self.lower[j] - x, false)
            } else if x > self.upper[j] + PRIMAL_TOL {
                (x - self.upper[j], true)
            } else {
                continue;
            };
            let better = match best {
                None => true,
                Some((br, _, bv)) => {
                    if bland {
                        j < self.basis[br]
                    } else {
                        violation > bv
                    }
                }
            };
            if better {
                best = Some((r, to_upper, violation));
            }
        }
        best.map(|(r, up, _)| (r, up))
    }

    /// Ratio test: Harris two-pass normally, smallest index under Bland.
    fn choose_entering(&self, r: usize, to_upper: bool, bland: bool) -> Option<usize> {
        let row = &self.tab[r * self.stride..r * self.stride + self.width];
        let mut candidates: Vec<(usize, f64, f64)> = Vec::new();
        for (j, &alpha) in row.iter().enumerate() {
            if alpha.abs() <= PIVOT_TOL || self.row_of[j] != NONBASIC {
                continue;
            }
            if self.upper[j] - self.lower[j] <= 0.0 {
                continue;
            }
            let increasing = !self.at_upper[j];
            // leaving to lower needs the basic value to rise, i.e. alpha * step < 0
            let eligible = if to_upper {
                (increasing && alpha > 0.0) || (!increasing && alpha < 0.0)
            } else {
                (increasing && alpha < 0.0) || (!increasing && alpha > 0.0)
            };
            if !eligible {
                continue;
            }
            let d = if increasing { self.reduced[j].max(0.0) } else { (-self.reduced[j]).max(0.0) };
            candidates.push((j, d, alpha.abs()));
        }
        if candidates.is_empty() {
            return None;
        }
        if bland {
            let min_ratio = candidates.iter().map(|&(_, d, a)| d / a).fold(f64::INFINITY, f64::min);
            let tied: Vec<(usize, f64)> =
                candidates.iter().filter(|&&(_, d, a)| d / a <= min_ratio + 1e-12).map(|&(j, _, a)| (j, a)).collect();
            let largest = tied.iter().map(|&(_, a)| a).fold(0.0, f64::max);
            return tied.iter().filter(|&&(_, a)| a >= BLAND_PIVOT_SHARE * largest).map(|&(j, _)| j).min();
        }
        let bound = candidates.iter().map(|&(_, d, a)| (d + DUAL_TOL) / a).fold(f64::INFINITY, f64::min);
        let mut best: Option<(usize, f64)> = None;
        for &(j, d, a) in &candidates {
            if d / a <= bound {
                match best {
                    Some((_, ba)) if ba >= a => {}
                    _ => best = Some((j, a)),
                }
            }
        }
        best.map(|(j, _)| j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarKind;

    fn lp(model: &MilpModel) -> (LpStatus, f64, Vec<f64>) {
        let mut s = DualSimplex::new(model);
        let status = s.solve(None);
        (status, s.objective(), s.values())
    }

    #[test]
    fn small_lp_optimum() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x, y <= 10
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Continuous, 0.0, 10.0);
        let y = m.add_variable("y", VarKind::Continuous, 0.0, 10.0);
        m.add_constraint("a", "g", vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        m.add_constraint("b", "g", vec![(x, 3.0), (y, 1.0)], Relation::Le, 6.0);
        m.set_objective(vec![(x, -1.0), (y, -1.0)]);
        let (status, obj, v) = lp(&m);
        assert_eq!(status, LpStatus::Optimal);
        assert!((obj + 2.8).abs() < 1e-9, "{obj}");
        assert!((v[0] - 1.6).abs() < 1e-9 && (v[1] - 1.2).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y  s.t. x + y = 3, x - y >= -1, x <= 1.5
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Continuous, 0.0, 1.5);
        let y = m.add_variable("y", VarKind::Continuous, 0.0, 5.0);
        m.add_constraint("e", "g", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 3.0);
        m.add_constraint("f", "g", vec![(x, 1.0), (y, -1.0)], Relation::Ge, -1.0);
        m.set_objective(vec![(x, 1.0), (y, 2.0)]);
        let (status, obj, v) = lp(&m);
        assert_eq!(status, LpStatus::Optimal);
        assert!((obj - 4.5).abs() < 1e-9, "{obj} {v:?}");
    }

    #[test]
    fn detects_infeasibility() {
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Continuous, 0.0, 1.0);
        m.add_constraint("c", "g", vec![(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(lp(&m).0, LpStatus::Infeasible);
        let mut e = MilpModel::new();
        e.add_variable("x", VarKind::Continuous, 0.0, 1.0);
        e.add_constraint("empty", "g", vec![], Relation::Ge, 1.0);
        assert_eq!(lp(&e).0, LpStatus::Infeasible);
    }

    #[test]
    fn warm_restart_after_bound_change() {
        let mut m = MilpModel::new();
        let x = m.add_variable("x", VarKind::Continuous, 0.0, 10.0);
        let y = m.add_variable("y", VarKind::Continuous, 0.0, 10.0);
        m.add_constraint("a", "g", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 2.5);
        m.set_objective(vec![(x, 1.0), (y, 1.5)]);
        let mut s = DualSimplex::new(&m);
        assert_eq!(s.solve(None), LpStatus::Optimal);
        assert!((s.objective() - 2.5).abs() < 1e-9);
        let root = s.snapshot();
        s.set_bounds(x, 0.0, 2.0);
        assert_eq!(s.solve(None), LpStatus::Optimal);
        assert!((s.objective() - 2.75).abs() < 1e-9);
        s.set_bounds(x, 0.0, 10.0);
        s.restore(&root);
        assert_eq!(s.solve(None), LpStatus::Optimal);
        assert!((s.objective() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn degenerate_holistic_root_stays_feasible() {
        let cfg = crate::fixtures::illustrative();
        let (model, _) = crate::models::build_holistic(&cfg, true);
        let mut s = DualSimplex::new(&model);
        assert_eq!(s.solve(None), LpStatus::Optimal);
        assert!(s.objective() <= 47.0 + 1e-6);
        assert!(s.max_residual() < 1e-6);
    }
}
