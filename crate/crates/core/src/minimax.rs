//! Discrete linear Chebyshev approximation.
//!
//! Finds coefficients `a` minimizing `max_k |f_k − a·φ_k|` over a finite point
//! set by solving the dual linear program
//!
//! ```text
//! maximize   Σ f_k (u_k − w_k)
//! subject to Σ (u_k − w_k) φ_k = 0,   Σ (u_k + w_k) = 1,   u, w ≥ 0
//! ```
//!
//! with a two-phase dense tableau simplex. The optimal simplex multipliers are
//! the primal solution `(a, e)`.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-12;
const MAX_ITERATIONS: usize = 100_000;
const DEGENERATE_STREAK: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevFit {
    pub coeffs: Vec<f64>,
    /// `max_k |f_k − a·φ_k|`, recomputed from `coeffs`.
    pub deviation: f64,
    /// Index of a point attaining the deviation.
    pub argmax: usize,
}

struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let cols = self.cols;
        let piv = self.at(r, e);
        for v in &mut self.data[r * cols..(r + 1) * cols] {
            *v /= piv;
        }
        self.rhs[r] /= piv;
        let (pivot_row, pivot_rhs) = (self.data[r * cols..(r + 1) * cols].to_vec(), self.rhs[r]);
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let factor = self.at(i, e);
            if factor == 0.0 {
                continue;
            }
            for (v, p) in self.data[i * cols..(i + 1) * cols].iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.rhs[i] -= factor * pivot_rhs;
        }
        self.basis[r] = e;
    }

    /// Maximizes `cost · x` over columns accepted by `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Result<()> {
        let mut degenerate = 0usize;
        let mut reduced = vec![0.0; self.cols];
        for _ in 0..MAX_ITERATIONS {
            reduced.copy_from_slice(cost);
            for i in 0..self.rows {
                let cb = cost[self.basis[i]];
                if cb == 0.0 {
                    continue;
                }
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                for (d, t) in reduced.iter_mut().zip(row) {
                    *d -= cb * t;
                }
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = COST_EPS;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                if reduced[j] > best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = reduced[j];
                }
            }
            let Some(e) = entering else {
                return Ok(());
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let t = self.at(i, e);
                if t <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / t;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best_ratio)) => {
                        if ratio < best_ratio - 1e-14
                            || (ratio <= best_ratio + 1e-14 && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best_ratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Internal("Chebyshev dual program is unbounded".into()));
            };
            degenerate = if ratio <= 1e-14 { degenerate + 1 } else { 0 };
            self.pivot(r, e);
        }
        Err(Error::Internal("simplex iteration limit reached".into()))
    }
}

/// Best uniform approximation of `targets` by linear combinations of the
/// columns of `design` (one row `φ_k` per point).
pub fn chebyshev_fit(design: &[Vec<f64>], targets: &[f64]) -> Result<ChebyshevFit> {
    let n = design.len();
    if n == 0 || n != targets.len() {
        return Err(Error::DegenerateGrid(format!("{n} design rows for {} targets", targets.len())));
    }
    let p = design[0].len();
    if p == 0 || design.iter().any(|r| r.len() != p) {
        return Err(Error::DegenerateGrid("design rows have inconsistent length".into()));
    }
    if design.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateGrid("non-finite design or target value".into()));
    }

    let rows = p + 1;
    let art = 2 * n;
    let cols = 2 * n + rows;
    let mut data = vec![0.0; rows * cols];
    for (k, phi) in design.iter().enumerate() {
        for (i, &v) in phi.iter().enumerate() {
            data[i * cols + k] = v;
            data[i * cols + n + k] = -v;
        }
        data[p * cols + k] = 1.0;
        data[p * cols + n + k] = 1.0;
    }
    for i in 0..rows {
        data[i * cols + art + i] = 1.0;
    }
    let mut rhs = vec![0.0; rows];
    rhs[p] = 1.0;
    let mut tab = Tableau { rows, cols, data, rhs, basis: (art..cols).collect() };

    // phase 1: drive the artificial variables to zero
    let mut phase1 = vec![0.0; cols];
    phase1[art..].iter_mut().for_each(|c| *c = -1.0);
    tab.optimize(&phase1, |_| true)?;
    let infeasibility: f64 = (0..rows).filter(|&i| tab.basis[i] >= art).map(|i| tab.rhs[i]).sum();
    if infeasibility > 1e-9 {
        return Err(Error::Internal(format!("dual program infeasible ({infeasibility:e})")));
    }
    for r in 0..rows {
        if tab.basis[r] < art {
            continue;
        }
        let candidate = (0..art)
            .filter(|j| !tab.basis.contains(j))
            .max_by(|&a, &b| tab.at(r, a).abs().total_cmp(&tab.at(r, b).abs()));
        match candidate {
            Some(j) if tab.at(r, j).abs() > 1e-9 => tab.pivot(r, j),
            _ => return Err(Error::DegenerateGrid("design matrix is rank deficient".into())),
        }
    }

    // phase 2
    let mut cost = vec![0.0; cols];
    for (k, &f) in targets.iter().enumerate() {
        cost[k] = f;
        cost[n + k] = -f;
    }
    tab.optimize(&cost, |j| j < art)?;

    let multipliers: Vec<f64> = (0..rows)
        .map(|c| (0..rows).map(|i| cost[tab.basis[i]] * tab.at(i, art + c)).sum())
        .collect();
    let coeffs = multipliers[..p].to_vec();

    let (argmax, deviation) = design
        .iter()
        .zip(targets)
        .map(|(phi, &f)| (f - phi.iter().zip(&coeffs).map(|(a, b)| a * b).sum::<f64>()).abs())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, d)| if d > best.1 { (k, d) } else { best });
    Ok(ChebyshevFit { coeffs, deviation, argmax })
}
