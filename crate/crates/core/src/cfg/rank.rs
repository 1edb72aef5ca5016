//! Exact linear-independence and coverage measures for path sets.

use std::collections::BTreeSet;

use num::rational::Ratio;
use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use super::{Cfg, PathWalk};

/// Rank over the rationals of the incidence matrix whose rows are the
/// paths' traversal-count vectors.
///
/// Row reduction is carried out in exact arithmetic, so the result can be
/// used to audit any path set regardless of how it was produced.
pub fn independence_rank(paths: &[PathWalk], cfg: &Cfg) -> usize {
    let rows: Vec<Vec<u32>> = paths.iter().map(|p| p.incidence_vector().to_vec()).collect();
    rank_of_rows(&rows, cfg.edge_count())
}

pub(crate) fn rank_of_rows(rows: &[Vec<u32>], width: usize) -> usize {
    let mut matrix: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|row| {
            (0..width).map(|c| BigRational::from_integer(BigInt::from(row.get(c).copied().unwrap_or(0)))).collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        if rank == matrix.len() {
            break;
        }
        let Some(pivot) = (rank..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(rank, pivot);
        let inv = BigRational::one() / matrix[rank][col].clone();
        let pivot_row: Vec<BigRational> = matrix[rank].iter().map(|v| v * &inv).collect();
        for r in (rank + 1)..matrix.len() {
            if matrix[r][col].is_zero() {
                continue;
            }
            let factor = matrix[r][col].clone();
            for c in col..width {
                if !pivot_row[c].is_zero() {
                    let delta = &factor * &pivot_row[c];
                    matrix[r][c] -= delta;
                }
            }
        }
        matrix[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Fraction of edges traversed by at least one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub covered: usize,
    pub total: usize,
}

impl Coverage {
    pub fn ratio(&self) -> Ratio<usize> {
        if self.total == 0 {
            Ratio::zero()
        } else {
            Ratio::new(self.covered, self.total)
        }
    }

    pub fn as_f64(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }

    pub fn is_complete(&self) -> bool {
        self.covered == self.total
    }
}

pub fn coverage_fraction(paths: &[PathWalk], cfg: &Cfg) -> Coverage {
    let covered: BTreeSet<usize> = paths.iter().flat_map(|p| p.support()).collect();
    Coverage { covered: covered.len(), total: cfg.edge_count() }
}

/// `rank / k`, the share of the required basis size that is independent.
pub fn independent_fraction(paths: &[PathWalk], cfg: &Cfg) -> Ratio<usize> {
    Ratio::new(independence_rank(paths, cfg), cfg.cyclomatic_complexity())
}
