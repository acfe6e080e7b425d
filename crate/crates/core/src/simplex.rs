//! Dense tableau simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! A non-negative right-hand side makes the slack basis feasible, so no
//! phase one is needed. Entering columns follow Dantzig's rule and switch
//! to Bland's rule after a run of degenerate pivots.

use thiserror::Error;

use crate::par::Execution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("objective is unbounded")]
    Unbounded,
    #[error("row {row} has negative right-hand side {rhs}")]
    NegativeRhs { row: usize, rhs: f64 },
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 200_000;
// Below this many tableau entries a pivot is cheaper than a rayon dispatch.
const PARALLEL_PIVOT_MIN: usize = 1 << 16;

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `sum coeffs[k].1 * x[coeffs[k].0] <= rhs`.
    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.objective.len()));
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    pub fn solve(&self, tol: f64) -> Result<LpSolution, LpError> {
        self.solve_with(tol, Execution::default())
    }

    pub fn solve_with(&self, tol: f64, exec: Execution) -> Result<LpSolution, LpError> {
        let n = self.objective.len();
        let m = self.rows.len();
        if let Some((row, &rhs)) = self.rhs.iter().enumerate().find(|(_, &r)| r < 0.0) {
            return Err(LpError::NegativeRhs { row, rhs });
        }
        let width = n + m + 1;
        let rhs_col = n + m;
        let mut t = vec![0.0; (m + 1) * width];
        for (i, row) in self.rows.iter().enumerate() {
            let r = &mut t[i * width..(i + 1) * width];
            for &(j, a) in row {
                r[j] += a;
            }
            r[n + i] = 1.0;
            r[rhs_col] = self.rhs[i];
        }
        {
            let obj = &mut t[m * width..];
            for (j, &c) in self.objective.iter().enumerate() {
                obj[j] = -c;
            }
        }
        let mut basis: Vec<usize> = (n..n + m).collect();
        let parallel = exec == Execution::Parallel && t.len() >= PARALLEL_PIVOT_MIN;

        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let obj = &t[m * width..m * width + n + m];
            let entering = if degenerate < DEGENERATE_RUN {
                obj.iter()
                    .enumerate()
                    .filter(|(_, &d)| d < -tol)
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(j, _)| j)
            } else {
                obj.iter().position(|&d| d < -tol)
            };
            let Some(e) = entering else { break };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = t[i * width + e];
                if a > tol {
                    let ratio = t[i * width + rhs_col] / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            let eps = 1e-12 * best.abs().max(1.0);
                            ratio < best - eps || (ratio <= best + eps && basis[i] < basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(LpError::Unbounded);
            };
            if ratio <= tol {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            pivot(&mut t, width, r, e, parallel);
            basis[r] = e;
            pivots += 1;
            if pivots >= MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
        }

        let mut x = vec![0.0; n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = t[i * width + rhs_col].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots,
        })
    }
}

fn pivot(t: &mut [f64], width: usize, r: usize, e: usize, parallel: bool) {
    let p = t[r * width + e];
    let pivot_row: Vec<f64> = t[r * width..(r + 1) * width]
        .iter()
        .map(|v| v / p)
        .collect();
    let update = |(i, row): (usize, &mut [f64])| {
        if i == r {
            row.copy_from_slice(&pivot_row);
            return;
        }
        let f = row[e];
        if f != 0.0 {
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
            row[e] = 0.0;
        }
    };
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        t.par_chunks_mut(width).enumerate().for_each(update);
        return;
    }
    let _ = parallel;
    t.chunks_mut(width).enumerate().for_each(update);
}
