//! Oracles shared by the integration tests. None of them call into the
//! solver, the rank routine or the walk decoder of the library.

#![allow(dead_code)]

use basispath_core::milp::{MilpModel, Relation, VarKind};
use basispath_core::Cfg;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Row echelon form over the integers with fraction-free elimination.
#[derive(Default, Clone)]
pub struct Echelon {
    rows: Vec<(usize, Vec<i128>)>,
}

impl Echelon {
    /// Adds `v` if it is independent of the rows so far.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (p, row) in &self.rows {
            if v[*p] != 0 {
                let (a, b) = (row[*p], v[*p]);
                for (x, r) in v.iter_mut().zip(row) {
                    *x = *x * a - r * b;
                }
                let g = v.iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    v.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => false,
            Some(p) => {
                for (_, row) in self.rows.iter_mut() {
                    if row[p] != 0 {
                        let (a, b) = (v[p], row[p]);
                        for (r, x) in row.iter_mut().zip(&v) {
                            *r = *r * a - x * b;
                        }
                        let g = row.iter().fold(0, |g, &x| gcd(g, x));
                        if g > 1 {
                            row.iter_mut().for_each(|x| *x /= g);
                        }
                    }
                }
                self.rows.push((p, v));
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

pub fn rank_of(vectors: &[Vec<u32>]) -> usize {
    let mut e = Echelon::default();
    vectors.iter().filter(|v| e.insert(v)).count()
}

/// Incidence vector of a node sequence, checking every step is an edge.
pub fn incidence(cfg: &Cfg, nodes: &[usize]) -> Vec<u32> {
    let mut v = vec![0u32; cfg.edge_count()];
    for w in nodes.windows(2) {
        let e = cfg.edges().iter().position(|&(a, b)| (a, b) == (w[0], w[1])).expect("consecutive nodes are adjacent");
        v[e] += 1;
    }
    v
}

/// Checks a node sequence is a source-to-sink walk.
pub fn is_walk(cfg: &Cfg, nodes: &[usize]) -> bool {
    nodes.first() == Some(&cfg.source())
        && nodes.last() == Some(&cfg.sink())
        && nodes.windows(2).all(|w| cfg.edges().contains(&(w[0], w[1])))
}

/// Distinct incidence vectors of all source-to-sink walks that use each
/// edge at most `cap` times.
pub fn walk_vectors(cfg: &Cfg, cap: u32) -> Vec<Vec<u32>> {
    fn go(cfg: &Cfg, cap: u32, at: usize, used: &mut Vec<u32>, out: &mut std::collections::BTreeSet<Vec<u32>>) {
        if at == cfg.sink() {
            out.insert(used.clone());
        }
        for (e, &(u, v)) in cfg.edges().iter().enumerate() {
            if u == at && used[e] < cap {
                used[e] += 1;
                go(cfg, cap, v, used, out);
                used[e] -= 1;
            }
        }
    }
    let mut out = std::collections::BTreeSet::new();
    go(cfg, cap, cfg.source(), &mut vec![0; cfg.edge_count()], &mut out);
    out.into_iter().collect()
}

/// Minimum total length of `k` walks (per-edge cap 2) that cover every
/// edge and have full rank `k`.
pub fn brute_force_min_length(cfg: &Cfg) -> Option<u32> {
    let k = cfg.edge_count() + 2 - cfg.node_count();
    let mut walks = walk_vectors(cfg, 2);
    let len = |v: &Vec<u32>| v.iter().sum::<u32>();
    walks.sort_by_key(len);
    let mut best = None;
    struct Search<'a> {
        walks: &'a [Vec<u32>],
        k: usize,
        best: &'a mut Option<u32>,
    }
    fn go(s: &mut Search, from: usize, chosen: &mut Vec<usize>, ech: &Echelon, total: u32) {
        if chosen.len() == s.k {
            let covered = (0..s.walks[0].len()).all(|e| chosen.iter().any(|&i| s.walks[i][e] > 0));
            if covered && s.best.is_none_or(|b| total < b) {
                *s.best = Some(total);
            }
            return;
        }
        for i in from..s.walks.len() {
            let l: u32 = s.walks[i].iter().sum();
            let remaining = (s.k - chosen.len()) as u32;
            if s.best.is_some_and(|b| total + l * remaining >= b) {
                break;
            }
            let mut next = ech.clone();
            if next.insert(&s.walks[i]) {
                chosen.push(i);
                go(s, i + 1, chosen, &next, total + l);
                chosen.pop();
            }
        }
    }
    let mut s = Search { walks: &walks, k, best: &mut best };
    go(&mut s, 0, &mut Vec::new(), &Echelon::default(), 0);
    best
}

/// A pure integer program kept alongside the library model for enumeration.
pub struct SmallIp {
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub objective: Vec<i64>,
    pub rows: Vec<(Vec<i64>, Relation, i64)>,
}

impl SmallIp {
    pub fn random(rng: &mut ChaCha8Rng) -> SmallIp {
        let mut pick = |lo: i64, hi: i64| lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64;
        let n = pick(1, 40) as usize;
        let wide = n <= 16;
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for _ in 0..n {
            if wide && pick(0, 1) == 1 {
                let l = pick(-2, 1);
                lower.push(l);
                upper.push(l + pick(0, 3));
            } else {
                lower.push(0);
                upper.push(1);
            }
        }
        let objective: Vec<i64> = (0..n).map(|_| pick(-6, 6)).collect();
        let point: Vec<i64> = (0..n).map(|j| pick(lower[j], upper[j])).collect();
        let m = pick(1, 6) as usize;
        let mut rows = Vec::new();
        for _ in 0..m {
            let coef: Vec<i64> = (0..n).map(|_| if pick(0, 9) < 4 { pick(-5, 5) } else { 0 }).collect();
            let at: i64 = coef.iter().zip(&point).map(|(a, x)| a * x).sum();
            let (rel, rhs) = match pick(0, 9) {
                0 => (Relation::Eq, at),
                1 => (Relation::Le, at - pick(1, 4)),
                2..=5 => (Relation::Le, at + pick(0, 3)),
                _ => (Relation::Ge, at - pick(0, 3)),
            };
            rows.push((coef, rel, rhs));
        }
        SmallIp { lower, upper, objective, rows }
    }

    pub fn to_model(&self) -> MilpModel {
        let mut m = MilpModel::new();
        for j in 0..self.lower.len() {
            let kind = if (self.lower[j], self.upper[j]) == (0, 1) { VarKind::Binary } else { VarKind::Integer };
            m.add_variable(format!("v{j}"), kind, self.lower[j] as f64, self.upper[j] as f64);
        }
        for (i, (coef, rel, rhs)) in self.rows.iter().enumerate() {
            let terms = coef.iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j, c as f64)).collect();
            m.add_constraint(format!("r{i}"), "rows", terms, *rel, *rhs as f64);
        }
        m.set_objective(self.objective.iter().enumerate().map(|(j, &c)| (j, c as f64)).collect());
        m
    }

    /// Exhaustive enumeration with interval pruning; `None` when infeasible.
    pub fn enumerate_optimum(&self) -> Option<i64> {
        let n = self.lower.len();
        let range = |c: i64, j: usize| {
            let (a, b) = (c * self.lower[j], c * self.upper[j]);
            (a.min(b), a.max(b))
        };
        // suffix[j] = (min, max) of the contribution of variables j..n
        let suffix = |coef: &[i64]| {
            let mut s = vec![(0i64, 0i64); n + 1];
            for j in (0..n).rev() {
                let (lo, hi) = range(coef[j], j);
                s[j] = (s[j + 1].0 + lo, s[j + 1].1 + hi);
            }
            s
        };
        let row_suffix: Vec<Vec<(i64, i64)>> = self.rows.iter().map(|(c, _, _)| suffix(c)).collect();
        let obj_suffix = suffix(&self.objective);
        let mut best: Option<i64> = None;
        let mut activity = vec![0i64; self.rows.len()];
        self.dfs(0, 0, &mut activity, &row_suffix, &obj_suffix, &mut best);
        best
    }

    fn dfs(
        &self,
        j: usize,
        obj: i64,
        activity: &mut Vec<i64>,
        row_suffix: &[Vec<(i64, i64)>],
        obj_suffix: &[(i64, i64)],
        best: &mut Option<i64>,
    ) {
        if best.is_some_and(|b| obj + obj_suffix[j].0 >= b) {
            return;
        }
        for (i, (_, rel, rhs)) in self.rows.iter().enumerate() {
            let (lo, hi) = (activity[i] + row_suffix[i][j].0, activity[i] + row_suffix[i][j].1);
            let ok = match rel {
                Relation::Le => lo <= *rhs,
                Relation::Ge => hi >= *rhs,
                Relation::Eq => lo <= *rhs && hi >= *rhs,
            };
            if !ok {
                return;
            }
        }
        if j == self.lower.len() {
            *best = Some(obj);
            return;
        }
        for x in self.lower[j]..=self.upper[j] {
            for (i, (c, _, _)) in self.rows.iter().enumerate() {
                activity[i] += c[j] * x;
            }
            self.dfs(j + 1, obj + self.objective[j] * x, activity, row_suffix, obj_suffix, best);
            for (i, (c, _, _)) in self.rows.iter().enumerate() {
                activity[i] -= c[j] * x;
            }
        }
    }

    /// Re-verifies an assignment with integer arithmetic after rounding.
    pub fn verify(&self, values: &[f64]) -> Result<i64, String> {
        if values.len() != self.lower.len() {
            return Err(format!("{} values for {} variables", values.len(), self.lower.len()));
        }
        let mut x = Vec::new();
        for (j, &v) in values.iter().enumerate() {
            let r = v.round();
            if (v - r).abs() > 1e-6 {
                return Err(format!("v{j} = {v} is fractional"));
            }
            let r = r as i64;
            if r < self.lower[j] || r > self.upper[j] {
                return Err(format!("v{j} = {r} out of bounds"));
            }
            x.push(r);
        }
        for (i, (c, rel, rhs)) in self.rows.iter().enumerate() {
            let a: i64 = c.iter().zip(&x).map(|(c, x)| c * x).sum();
            let ok = match rel {
                Relation::Le => a <= *rhs,
                Relation::Ge => a >= *rhs,
                Relation::Eq => a == *rhs,
            };
            if !ok {
                return Err(format!("row r{i} violated: {a} vs {rhs}"));
            }
        }
        Ok(self.objective.iter().zip(&x).map(|(c, x)| c * x).sum())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}
