//! Small dense linear algebra: a row-major matrix and a rank-revealing
//! least-squares solve (Householder QR with column pivoting).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, sqrt};

/// Relative threshold on `|R_kk| / |R_00|` below which a pivot counts as zero.
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(alloc::format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`least_squares`].
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    /// Numerical rank detected during the factorization.
    pub rank: usize,
    /// Max-norm of `A x - b`.
    pub residual: f64,
}

/// Minimizes `|A x - b|_2`.
///
/// Rank-deficient systems get the basic solution: free variables (the
/// trailing pivoted columns) are set to zero. The caller decides whether the
/// reported residual is acceptable.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<LeastSquares> {
    let (m, n) = (a.rows, a.cols);
    if b.len() != m {
        return Err(Error::InvalidParameter(alloc::format!(
            "right-hand side has {} entries, matrix has {m} rows",
            b.len()
        )));
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);
    let mut rank = steps;
    let mut leading = 0.0;

    for k in 0..steps {
        // Column pivoting on the remaining column norms.
        let norm_below = |r: &Matrix, j: usize| -> f64 {
            sqrt((k..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>())
        };
        let (pivot, pivot_norm) = (k..n)
            .map(|j| (j, norm_below(&r, j)))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if k == 0 {
            leading = pivot_norm;
        }
        if pivot_norm == 0.0 || pivot_norm <= RANK_TOLERANCE * leading {
            rank = k;
            break;
        }
        if pivot != k {
            for i in 0..m {
                let tmp = r[(i, k)];
                r[(i, k)] = r[(i, pivot)];
                r[(i, pivot)] = tmp;
            }
            perm.swap(k, pivot);
        }

        let alpha = if r[(k, k)] > 0.0 { -pivot_norm } else { pivot_norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in k..n {
                let dot: f64 = v.iter().enumerate().map(|(t, vi)| vi * r[(k + t, j)]).sum();
                let s = 2.0 * dot / vnorm2;
                for (t, vi) in v.iter().enumerate() {
                    r[(k + t, j)] -= s * vi;
                }
            }
            let dot: f64 = v.iter().enumerate().map(|(t, vi)| vi * rhs[k + t]).sum();
            let s = 2.0 * dot / vnorm2;
            for (t, vi) in v.iter().enumerate() {
                rhs[k + t] -= s * vi;
            }
        }
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)] = 0.0;
        }
    }

    let mut z = vec![0.0; n];
    for k in (0..rank).rev() {
        let mut s = rhs[k];
        for j in k + 1..rank {
            s -= r[(k, j)] * z[j];
        }
        z[k] = s / r[(k, k)];
    }
    let mut x = vec![0.0; n];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = z[k];
    }

    let residual = a
        .mul_vec(&x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| abs(ax - bi))
        .fold(0.0, f64::max);
    Ok(LeastSquares { x, rank, residual })
}

/// Solves a square system, failing if it is rank deficient or the residual
/// exceeds `tolerance`.
pub fn solve_checked(a: &Matrix, b: &[f64], tolerance: f64) -> Result<Vec<f64>> {
    let sol = least_squares(a, b)?;
    if sol.residual > tolerance {
        return Err(Error::Residual { residual: sol.residual, tolerance });
    }
    Ok(sol.x)
}


/// Anderson acceleration of a fixed-point iteration `x ← G(x)`.
///
/// Keeps the last `depth` differences of iterates and residuals and mixes
/// them through a small least-squares problem on the residual Gram matrix.
#[derive(Debug, Clone)]
pub struct Anderson {
    depth: usize,
    prev: Option<(Vec<f64>, Vec<f64>)>,
    df: VecDeque<Vec<f64>>,
    dg: VecDeque<Vec<f64>>,
}

impl Anderson {
    pub fn new(depth: usize) -> Self {
        Self { depth, prev: None, df: VecDeque::new(), dg: VecDeque::new() }
    }

    /// Forgets the history.
    pub fn reset(&mut self) {
        self.prev = None;
        self.df.clear();
        self.dg.clear();
    }

    /// Next iterate from the current iterate `x` and its image `g = G(x)`.
    pub fn next(&mut self, x: &[f64], g: &[f64]) -> Vec<f64> {
        let f: Vec<f64> = g.iter().zip(x).map(|(g, x)| g - x).collect();
        if self.depth == 0 {
            return g.to_vec();
        }
        if let Some((pf, pg)) = self.prev.take() {
            self.df.push_back(f.iter().zip(&pf).map(|(a, b)| a - b).collect());
            self.dg.push_back(g.iter().zip(&pg).map(|(a, b)| a - b).collect());
            if self.df.len() > self.depth {
                self.df.pop_front();
                self.dg.pop_front();
            }
        }
        self.prev = Some((f.clone(), g.to_vec()));
        let m = self.df.len();
        if m == 0 {
            return g.to_vec();
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut gram = Matrix::zeros(m, m);
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            for j in 0..=i {
                let v = dot(&self.df[i], &self.df[j]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
            rhs[i] = dot(&self.df[i], &f);
        }
        let Ok(sol) = least_squares(&gram, &rhs) else {
            self.reset();
            return g.to_vec();
        };
        let mut out = g.to_vec();
        for (coef, dg) in sol.x.iter().zip(&self.dg) {
            for (o, d) in out.iter_mut().zip(dg) {
                *o -= coef * d;
            }
        }
        out
    }
}
