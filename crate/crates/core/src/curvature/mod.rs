//! Curvature tensors in an orthonormal frame, Jacobi operators, and the
//! catalog of model spaces.
//!
//! Components are stored so that `R(e_i, e_j, e_i, e_j)` is the sectional
//! curvature of the plane spanned by the orthonormal pair `e_i, e_j`. With
//! this placement the Ricci tensor is `rho_ab = sum_i R_{iaib}`, and the
//! Jacobi operator of a unit vector `u` is `(R_u)_{bc} = sum R_{bjcl} u^j u^l`,
//! which is the projection onto `u`-perp on the unit sphere.

pub mod catalog;
pub mod conditions;
pub mod lie;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SortedEigen};

/// Tolerance on `|u| - 1` accepted for direction vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Rank-4 curvature tensor in a fixed orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannCurvature {
    dim: usize,
    components: Vec<f64>,
}

/// Largest residual of each curvature symmetry class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureDiagnostics {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

impl CurvatureDiagnostics {
    pub fn max(&self) -> f64 {
        self.antisymmetry.max(self.pair_symmetry).max(self.bianchi)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

impl RiemannCurvature {
    pub fn new(dim: usize, components: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Unsupported("dimension must be positive".into()));
        }
        let expected = dim.pow(4);
        if components.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: components.len(),
            });
        }
        linalg::check_finite(&components, "curvature components")?;
        Ok(RiemannCurvature { dim, components })
    }

    pub fn zero(dim: usize) -> Self {
        RiemannCurvature {
            dim,
            components: vec![0.0; dim.pow(4)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut components = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        components.push(f(i, j, k, l));
                    }
                }
            }
        }
        RiemannCurvature { dim, components }
    }

    /// Constant sectional curvature `kappa`.
    pub fn constant(dim: usize, kappa: f64) -> Self {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Self::from_fn(dim, |i, j, k, l| kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k)))
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.components[self.index(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let idx = self.index(i, j, k, l);
        self.components[idx] = value;
    }

    /// Row-major flat component array.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RiemannCurvature {
            dim: self.dim,
            components: self.components.iter().map(|c| c * factor).collect(),
        }
    }

    /// Residuals of the three algebraic curvature symmetries.
    pub fn diagnostics(&self) -> CurvatureDiagnostics {
        let n = self.dim;
        let mut anti = 0.0_f64;
        let mut pair = 0.0_f64;
        let mut bianchi = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        anti = anti
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs());
                        pair = pair.max((r - self.get(k, l, i, j)).abs());
                        bianchi = bianchi
                            .max((r + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        CurvatureDiagnostics {
            antisymmetry: anti,
            pair_symmetry: pair,
            bianchi,
        }
    }

    /// Checks all three symmetries against `tol`; returns the diagnostics on success.
    pub fn validate(&self, tol: f64) -> Result<CurvatureDiagnostics> {
        linalg::check_finite(&self.components, "curvature components")?;
        let d = self.diagnostics();
        for (class, residual) in [
            ("antisymmetry", d.antisymmetry),
            ("pair", d.pair_symmetry),
            ("Bianchi", d.bianchi),
        ] {
            if residual > tol {
                return Err(Error::Symmetry { class, residual });
            }
        }
        Ok(d)
    }

    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |a, b| (0..n).map(|i| self.get(i, a, i, b)).sum())
    }

    pub fn scalar(&self) -> f64 {
        self.ricci().trace()
    }

    /// `||R||^2 = sum R_{ijkl}^2`.
    pub fn norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum()
    }

    /// `R(x, y, z, w)` for arbitrary vectors.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if z[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        acc += x[i] * y[j] * z[k] * w[l] * self.get(i, j, k, l);
                    }
                }
            }
        }
        acc
    }

    /// Sectional curvature of the plane spanned by `x`, `y` (any basis of it).
    pub fn sectional(&self, x: &[f64], y: &[f64]) -> f64 {
        let xx = linalg::dot(x, x);
        let yy = linalg::dot(y, y);
        let xy = linalg::dot(x, y);
        self.eval(x, y, x, y) / (xx * yy - xy * xy)
    }

    /// Matrix of `x -> R(x, w) w` for an arbitrary (not necessarily unit) `w`.
    pub fn jacobi_matrix(&self, w: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for b in 0..n {
            for c in b..n {
                let mut acc = 0.0;
                for j in 0..n {
                    for l in 0..n {
                        acc += self.get(b, j, c, l) * w[j] * w[l];
                    }
                }
                m[(b, c)] = acc;
                m[(c, b)] = acc;
            }
        }
        m
    }

    /// Jacobi operator `R_u` of a unit vector.
    pub fn jacobi_operator(&self, u: &[f64]) -> Result<JacobiOperator> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: u.len(),
            });
        }
        linalg::check_unit(u, UNIT_TOL)?;
        JacobiOperator::new(self.jacobi_matrix(u), u.to_vec())
    }

    /// Components in the basis given by the columns of the orthogonal `basis`.
    pub fn rotated(&self, basis: &DMatrix<f64>) -> Self {
        let n = self.dim;
        let mut cur = self.components.clone();
        // Contract one slot at a time: O(n^5).
        for slot in 0..4 {
            let mut next = vec![0.0; cur.len()];
            let stride = n.pow(3 - slot as u32);
            for idx in 0..cur.len() {
                let digit = (idx / stride) % n;
                let base = idx - digit * stride;
                let mut acc = 0.0;
                for a in 0..n {
                    acc += basis[(a, digit)] * cur[base + a * stride];
                }
                next[idx] = acc;
            }
            cur = next;
        }
        RiemannCurvature {
            dim: n,
            components: cur,
        }
    }

    /// Curvature of a Riemannian product (cross terms vanish).
    pub fn direct_sum(&self, other: &RiemannCurvature) -> Self {
        let n1 = self.dim;
        let n = n1 + other.dim;
        Self::from_fn(n, |i, j, k, l| {
            if i < n1 && j < n1 && k < n1 && l < n1 {
                self.get(i, j, k, l)
            } else if i >= n1 && j >= n1 && k >= n1 && l >= n1 {
                other.get(i - n1, j - n1, k - n1, l - n1)
            } else {
                0.0
            }
        })
    }

    pub fn to_document(&self) -> CurvatureDocument {
        CurvatureDocument {
            dim: self.dim,
            components: self.components.clone(),
            convention: CurvatureDocument::CONVENTION.to_string(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    /// Parses a JSON document and re-validates the curvature symmetries at `tol`.
    pub fn from_json(text: &str, tol: f64) -> Result<Self> {
        let doc: CurvatureDocument = serde_json::from_str(text)?;
        doc.into_curvature(tol)
    }
}

/// Serialized form of a curvature tensor.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CurvatureDocument {
    pub dim: usize,
    pub components: Vec<f64>,
    pub convention: String,
}

impl CurvatureDocument {
    pub const CONVENTION: &'static str = "R(x,y,z,w)";

    pub fn into_curvature(self, tol: f64) -> Result<RiemannCurvature> {
        if self.convention != Self::CONVENTION {
            return Err(Error::Parse(format!(
                "unknown curvature convention {:?}",
                self.convention
            )));
        }
        let r = RiemannCurvature::new(self.dim, self.components)?;
        r.validate(tol)?;
        Ok(r)
    }
}

/// Symmetric Jacobi operator `R_u` with a cached spectral decomposition.
#[derive(Debug, Clone)]
pub struct JacobiOperator {
    matrix: DMatrix<f64>,
    direction: Vec<f64>,
    eigen: SortedEigen,
}

impl JacobiOperator {
    pub fn new(matrix: DMatrix<f64>, direction: Vec<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != direction.len() {
            return Err(Error::DimensionMismatch {
                expected: direction.len(),
                actual: matrix.nrows(),
            });
        }
        linalg::check_finite(matrix.as_slice(), "Jacobi operator")?;
        let scale = matrix.amax().max(1.0);
        let asym = linalg::max_abs_asymmetry(&matrix);
        if asym > 1e-12 * scale {
            return Err(Error::Symmetry {
                class: "Jacobi operator",
                residual: asym,
            });
        }
        let eigen = SortedEigen::new(&matrix);
        Ok(JacobiOperator {
            matrix,
            direction,
            eigen,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigen(&self) -> &SortedEigen {
        &self.eigen
    }

    /// `S_k = tr(R_u^k)` from the spectrum.
    pub fn power_sum(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::Unsupported(
                "power sum of order 0 is the dimension".into(),
            ));
        }
        let terms: Vec<f64> = self.eigen.values.iter().map(|l| l.powi(k as i32)).collect();
        Ok(linalg::pairwise_sum(&terms))
    }

    /// Power sums `S_1..=S_order`.
    pub fn power_sums(&self, order: usize) -> Vec<f64> {
        (1..=order as u32)
            .map(|k| self.power_sum(k).expect("k >= 1"))
            .collect()
    }

    /// `<f(R_u) v, v>` by spectral functional calculus.
    pub fn spectral_quadratic(&self, v: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        let coords = self.eigen.coordinates(v);
        let terms: Vec<f64> = self
            .eigen
            .values
            .iter()
            .zip(&coords)
            .map(|(&l, &c)| f(l) * c * c)
            .collect();
        linalg::pairwise_sum(&terms)
    }

    /// `<R_u^k v, v>`.
    pub fn moment(&self, v: &[f64], k: u32) -> f64 {
        self.spectral_quadratic(v, |l| l.powi(k as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn sphere_tensor_is_exactly_symmetric() {
        let r = RiemannCurvature::constant(3, 1.0);
        let d = r.validate(0.0).unwrap();
        assert_eq!(d.max(), 0.0);
    }

    #[test]
    fn flipped_component_gives_antisymmetry_residual_two() {
        let mut r = RiemannCurvature::constant(3, 1.0);
        // R_{0101} = 1; flipping its sign breaks R_{0101} = -R_{1001}.
        r.set(0, 1, 0, 1, -1.0);
        let d = r.diagnostics();
        assert_eq!(d.antisymmetry, 2.0);
        assert!(matches!(
            r.validate(1e-12),
            Err(Error::Symmetry {
                class: "antisymmetry",
                ..
            })
        ));
    }

    #[test]
    fn non_finite_components_rejected() {
        let mut c = vec![0.0; 16];
        c[3] = f64::NAN;
        assert!(matches!(
            RiemannCurvature::new(2, c),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(matches!(
            RiemannCurvature::new(2, vec![0.0; 15]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sphere_ricci_and_scalar() {
        for n in 2..=6 {
            let r = RiemannCurvature::constant(n, 1.0);
            let rho = r.ricci();
            let expected = DMatrix::<f64>::identity(n, n) * (n as f64 - 1.0);
            assert_eq!(rho, expected);
            assert_eq!(r.scalar(), (n * (n - 1)) as f64);
        }
    }

    #[test]
    fn sphere_sectional_is_one() {
        let r = RiemannCurvature::constant(4, 1.0);
        let x = linalg::normalized(&[1.0, 2.0, 0.0, -1.0]);
        let y = linalg::normalized(&[0.0, 1.0, 3.0, 2.0]);
        assert!((r.sectional(&x, &y) - 1.0).abs() < 1e-14);
        assert!((r.eval(&unit(4, 0), &unit(4, 1), &unit(4, 0), &unit(4, 1)) - 1.0).abs() == 0.0);
    }

    #[test]
    fn sphere_jacobi_operator_is_projection() {
        let r = RiemannCurvature::constant(4, 1.0);
        let u = linalg::normalized(&[1.0, -1.0, 2.0, 0.5]);
        let ru = r.jacobi_operator(&u).unwrap();
        let ev = ru.eigenvalues();
        assert!(ev[0].abs() < 1e-14);
        for l in &ev[1..] {
            assert!((l - 1.0).abs() < 1e-14);
        }
        assert!((ru.power_sum(2).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn hyperbolic_jacobi_spectrum() {
        let r = RiemannCurvature::constant(3, -1.0);
        let ru = r.jacobi_operator(&unit(3, 2)).unwrap();
        assert_eq!(ru.eigenvalues(), &[-1.0, -1.0, 0.0]);
    }

    #[test]
    fn power_sum_zero_order_rejected() {
        let r = RiemannCurvature::constant(3, 1.0);
        let ru = r.jacobi_operator(&unit(3, 0)).unwrap();
        assert!(ru.power_sum(0).is_err());
    }

    #[test]
    fn non_unit_direction_rejected() {
        let r = RiemannCurvature::constant(3, 1.0);
        assert!(matches!(
            r.jacobi_operator(&[1.0, 1e-5, 0.0]),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn rotation_preserves_sphere_tensor() {
        let r = RiemannCurvature::constant(4, 1.0);
        let h = linalg::householder_to(&linalg::normalized(&[1.0, 2.0, 3.0, 4.0]), 0);
        let rr = r.rotated(&h);
        for (a, b) in rr.components().iter().zip(r.components()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_and_revalidation() {
        let r = RiemannCurvature::constant(3, 2.0);
        let text = r.to_json().unwrap();
        assert!(text.contains("R(x,y,z,w)"));
        let back = RiemannCurvature::from_json(&text, 1e-12).unwrap();
        assert_eq!(back, r);

        let mut bad = r.to_document();
        bad.components[1 * 9 + 0 * 3 + 1] = 5.0; // R_{0101}: breaks symmetries
        let text = serde_json::to_string(&bad).unwrap();
        assert!(matches!(
            RiemannCurvature::from_json(&text, 1e-12),
            Err(Error::Symmetry { .. })
        ));
    }
}
