//! Dense linear algebra kept deliberately small: a row-major square matrix,
//! a cyclic Jacobi eigensolver for symmetric matrices, Gaussian elimination
//! with partial pivoting, and a Householder deflation step.
//!
//! State spaces here are at most a few hundred states, so robustness wins
//! over asymptotic speed everywhere.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense `n x n` matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("matrix has no rows".to_string()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `y = M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> SquareMatrix {
        let mut t = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max absolute asymmetry `|M_ij - M_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Eigenvalues (descending) and matching orthonormal eigenvector columns of a
/// symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: SquareMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps rotate every off-diagonal pair to zero until the total off-diagonal
/// weight falls below the working tolerance. Quadratic convergence makes this
/// reliable to near machine precision for the small dense matrices used here.
pub fn jacobi_eigen(m: &SquareMatrix) -> Result<SymmetricEigen> {
    let n = m.n();
    let mut a = m.clone();
    let mut v = SquareMatrix::identity(n);

    let scale = a.max_abs().max(1.0);
    let stop = 1e-15 * scale * (n as f64);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        if off <= stop {
            return Ok(sorted_eigen(a, v));
        }

        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                // Rotation angle from the classic two-by-two reduction.
                let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                let t = if theta.abs() > 1e154 {
                    // Avoid overflow in theta^2; the rotation is tiny anyway.
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let tau = s / (1.0 + c);

                let h = t * apq;
                a.set(p, p, a.get(p, p) - h);
                a.set(q, q, a.get(q, q) + h);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);

                for j in 0..n {
                    if j != p && j != q {
                        let ajp = a.get(j, p);
                        let ajq = a.get(j, q);
                        let np = ajp - s * (ajq + tau * ajp);
                        let nq = ajq + s * (ajp - tau * ajq);
                        a.set(j, p, np);
                        a.set(p, j, np);
                        a.set(j, q, nq);
                        a.set(q, j, nq);
                    }
                }
                for j in 0..n {
                    let vjp = v.get(j, p);
                    let vjq = v.get(j, q);
                    v.set(j, p, vjp - s * (vjq + tau * vjp));
                    v.set(j, q, vjq + s * (vjp - tau * vjq));
                }
            }
        }
    }

    Err(Error::Inconsistency(
        "Jacobi eigensolver did not converge".to_string(),
    ))
}

fn sorted_eigen(a: SquareMatrix, v: SquareMatrix) -> SymmetricEigen {
    let n = a.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).partial_cmp(&a.get(i, i)).unwrap());

    let values: Vec<f64> = order.iter().map(|&k| a.get(k, k)).collect();
    let mut vectors = SquareMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, k));
        }
    }
    SymmetricEigen { values, vectors }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with [`Error::SingularSystem`] when a pivot is negligible relative
/// to the initial scale of `A`.
pub fn solve_linear(a: &SquareMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let pivot_floor = 1e-13 * m.max_abs().max(1.0) * (n as f64);

    for col in 0..n {
        let (pivot_row, pivot_abs) =
            (col..n)
                .map(|r| (r, m.get(r, col).abs()))
                .fold(
                    (col, -1.0),
                    |best, cand| if cand.1 > best.1 { cand } else { best },
                );
        if pivot_abs <= pivot_floor {
            return Err(Error::SingularSystem);
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = m.get(col, col);
        for r in (col + 1)..n {
            let factor = m.get(r, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            m.set(r, col, 0.0);
            for j in (col + 1)..n {
                m.set(r, j, m.get(r, j) - factor * m.get(col, j));
            }
            rhs[r] -= factor * rhs[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..n {
            acc -= m.get(row, j) * x[j];
        }
        x[row] = acc / m.get(row, row);
    }
    Ok(x)
}

/// Householder reflector data for a unit vector `w`: the reflector
/// `H = I - beta v v^T` maps `w` to `-sign(w_0) e_0`.
pub(crate) fn householder_vector(w: &[f64]) -> (Vec<f64>, f64) {
    let mut v = w.to_vec();
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign; // ||w|| = 1 by assumption
    let vtv: f64 = v.iter().map(|x| x * x).sum();
    (v, 2.0 / vtv)
}

/// Restriction of a symmetric matrix to the orthogonal complement of the
/// unit vector `w`: computes `H S H` for the Householder reflector sending
/// `w` to a coordinate axis and returns the trailing `(n-1) x (n-1)` block.
pub(crate) fn deflate_symmetric(s: &SquareMatrix, w: &[f64]) -> SquareMatrix {
    let n = s.n();
    debug_assert_eq!(w.len(), n);
    let (v, beta) = householder_vector(w);

    // B = S - v k^T - k v^T with k = beta*t - (beta^2 (v.t)/2) v, t = S v.
    let t = s.mul_vec(&v);
    let vt: f64 = v.iter().zip(&t).map(|(a, b)| a * b).sum();
    let k: Vec<f64> = t
        .iter()
        .zip(&v)
        .map(|(&ti, &vi)| beta * ti - 0.5 * beta * beta * vt * vi)
        .collect();

    let mut block = SquareMatrix::zeros(n - 1);
    for i in 1..n {
        for j in 1..n {
            let b = s.get(i, j) - v[i] * k[j] - k[i] * v[j];
            block.set(i - 1, j - 1, b);
        }
    }
    block
}

/// Lifts a vector from the deflated `(n-1)`-dimensional block back to the
/// original coordinates (the complement of `w`): returns `H [0; m]`.
pub(crate) fn deflate_lift(w: &[f64], m: &[f64]) -> Vec<f64> {
    let n = w.len();
    debug_assert_eq!(m.len(), n - 1);
    let (v, beta) = householder_vector(w);
    let dot: f64 = v[1..].iter().zip(m).map(|(a, b)| a * b).sum();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let base = if i == 0 { 0.0 } else { m[i - 1] };
        y[i] = base - beta * dot * v[i];
    }
    y
}
