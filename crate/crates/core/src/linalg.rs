//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Pairwise (cascade) summation in a fixed order.
///
/// The recursion splits at the midpoint, so the result depends only on the
/// order of `values`, never on thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Fails unless `u` has unit norm within `tol`.
pub fn check_unit(u: &[f64], tol: f64) -> Result<()> {
    check_finite(u, "direction vector")?;
    let n = norm(u);
    if (n - 1.0).abs() > tol {
        return Err(Error::NotUnit { norm: n });
    }
    Ok(())
}

pub fn normalized(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// Householder reflection `H` (symmetric, orthogonal) with `H e_pivot = u`.
///
/// Columns of `H` other than `pivot` form an orthonormal basis of the
/// hyperplane orthogonal to `u`. For `u == e_pivot` the identity is returned.
pub fn householder_to(u: &[f64], pivot: usize) -> DMatrix<f64> {
    let n = u.len();
    let mut v: Vec<f64> = u.iter().map(|x| -x).collect();
    v[pivot] += 1.0;
    let vv = dot(&v, &v);
    let mut h = DMatrix::<f64>::identity(n, n);
    if vv < 1e-300 {
        return h;
    }
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] -= 2.0 * v[i] * v[j] / vv;
        }
    }
    h
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl SortedEigen {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let n = m.nrows();
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        SortedEigen { values, vectors }
    }

    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        &self.vectors * d * self.vectors.transpose()
    }

    /// Coordinates of `v` in the eigenbasis.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        let n = self.values.len();
        (0..n)
            .map(|i| (0..n).map(|r| self.vectors[(r, i)] * v[r]).sum())
            .collect()
    }
}

pub fn max_abs_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}
