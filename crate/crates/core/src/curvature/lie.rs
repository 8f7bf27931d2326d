//! Real Lie algebras given by structure constants, and the curvature of the
//! associated left-invariant metric.

use nalgebra::{Cholesky, DMatrix};

use super::RiemannCurvature;
use crate::error::{Error, Result};

/// Tolerance for the Jacobi identity on structure constants.
pub const JACOBI_TOL: f64 = 1e-10;

/// Partition of basis indices for a Cartan decomposition `g = k + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanSplit {
    pub k_indices: Vec<usize>,
    pub p_indices: Vec<usize>,
}

/// A Lie algebra `[e_i, e_j] = sum_k c_{ij}^k e_k` with an inner product.
#[derive(Debug, Clone)]
pub struct LieAlgebraData {
    dim: usize,
    /// `c[(i * dim + j) * dim + k]`.
    constants: Vec<f64>,
    inner_product: DMatrix<f64>,
    cartan_split: Option<CartanSplit>,
}

impl LieAlgebraData {
    /// Validates antisymmetry, the Jacobi identity and positivity of the inner product.
    pub fn new(
        dim: usize,
        constants: Vec<f64>,
        inner_product: DMatrix<f64>,
        cartan_split: Option<CartanSplit>,
    ) -> Result<Self> {
        if constants.len() != dim.pow(3) {
            return Err(Error::DimensionMismatch {
                expected: dim.pow(3),
                actual: constants.len(),
            });
        }
        if inner_product.nrows() != dim || inner_product.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: inner_product.nrows(),
            });
        }
        crate::linalg::check_finite(&constants, "structure constants")?;
        let asym = crate::linalg::max_abs_asymmetry(&inner_product);
        if asym > 1e-12 {
            return Err(Error::Axiom {
                what: "inner product symmetry".into(),
                residual: asym,
            });
        }
        if Cholesky::new(inner_product.clone()).is_none() {
            return Err(Error::Axiom {
                what: "inner product positive definiteness".into(),
                residual: 0.0,
            });
        }
        if let Some(split) = &cartan_split {
            let mut all: Vec<usize> = split
                .k_indices
                .iter()
                .chain(&split.p_indices)
                .copied()
                .collect();
            all.sort_unstable();
            if all != (0..dim).collect::<Vec<_>>() {
                return Err(Error::Unsupported(
                    "Cartan split must partition the basis indices".into(),
                ));
            }
        }
        let algebra = LieAlgebraData {
            dim,
            constants,
            inner_product,
            cartan_split,
        };
        let anti = algebra.antisymmetry_residual();
        if anti > JACOBI_TOL {
            return Err(Error::Axiom {
                what: "bracket antisymmetry".into(),
                residual: anti,
            });
        }
        let jac = algebra.jacobi_residual();
        if jac > JACOBI_TOL {
            return Err(Error::Axiom {
                what: "Jacobi identity".into(),
                residual: jac,
            });
        }
        Ok(algebra)
    }

    /// Builds from a bracket on basis vectors, `bracket(i, j) -> coefficients`.
    pub fn from_bracket(
        dim: usize,
        bracket: impl Fn(usize, usize) -> Vec<f64>,
        inner_product: DMatrix<f64>,
        cartan_split: Option<CartanSplit>,
    ) -> Result<Self> {
        let mut constants = vec![0.0; dim.pow(3)];
        for i in 0..dim {
            for j in 0..dim {
                let v = bracket(i, j);
                constants[(i * dim + j) * dim..(i * dim + j + 1) * dim].copy_from_slice(&v);
            }
        }
        Self::new(dim, constants, inner_product, cartan_split)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn inner_product(&self) -> &DMatrix<f64> {
        &self.inner_product
    }

    pub fn cartan_split(&self) -> Option<&CartanSplit> {
        self.cartan_split.as_ref()
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += x[i] * y[j] * self.c(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad(x)` acting on coordinate columns.
    pub fn ad(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| x[i] * self.c(i, j, k)).sum())
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Max over basis triples of `|[[a,b],c] + [[b,c],a] + [[c,a],b]|`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for m in 0..n {
                        let mut acc = 0.0;
                        for l in 0..n {
                            acc += self.c(a, b, l) * self.c(l, c, m)
                                + self.c(b, c, l) * self.c(l, a, m)
                                + self.c(c, a, l) * self.c(l, b, m);
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        worst
    }

    /// The same algebra expressed in an orthonormal basis of the inner product.
    ///
    /// Returns the new constants and the change-of-basis matrix whose columns
    /// are the orthonormal vectors in old coordinates.
    fn orthonormal_constants(&self) -> (Vec<f64>, DMatrix<f64>) {
        let n = self.dim;
        let chol = Cholesky::new(self.inner_product.clone()).expect("validated positive definite");
        let l = chol.l();
        // G = L L^T, orthonormal basis f_a = sum_i M_{ia} e_i with M = L^{-T}.
        let m = l
            .transpose()
            .try_inverse()
            .expect("Cholesky factor is invertible");
        let m_inv = l.transpose();
        let mut out = vec![0.0; n.pow(3)];
        for a in 0..n {
            for b in 0..n {
                let fa: Vec<f64> = m.column(a).iter().copied().collect();
                let fb: Vec<f64> = m.column(b).iter().copied().collect();
                let br = self.bracket(&fa, &fb);
                for c in 0..n {
                    out[(a * n + b) * n + c] = (0..n).map(|k| m_inv[(c, k)] * br[k]).sum();
                }
            }
        }
        (out, m)
    }

    /// Curvature at the identity of the simply connected group with the
    /// left-invariant metric induced by `inner_product`, in an orthonormal basis.
    ///
    /// Uses the Koszul formula for left-invariant fields,
    /// `<nabla_X Y, Z> = 1/2 (<[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>)`, and
    /// `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`.
    pub fn left_invariant_curvature(&self) -> RiemannCurvature {
        let n = self.dim;
        let (c, _) = self.orthonormal_constants();
        let cc = |i: usize, j: usize, k: usize| c[(i * n + j) * n + k];
        // gamma[i][j][k] = <nabla_{e_i} e_j, e_k>
        let mut gamma = vec![0.0; n.pow(3)];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma[(i * n + j) * n + k] = 0.5 * (cc(i, j, k) - cc(j, k, i) + cc(k, i, j));
                }
            }
        }
        let g = |i: usize, j: usize, k: usize| gamma[(i * n + j) * n + k];
        // r[i][j][z][w] = <R(e_i,e_j) e_z, e_w>
        let mut full = vec![0.0; n.pow(4)];
        for i in 0..n {
            for j in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let mut acc = 0.0;
                        for m in 0..n {
                            acc += g(j, z, m) * g(i, m, w) - g(i, z, m) * g(j, m, w)
                                - cc(i, j, m) * g(m, z, w);
                        }
                        full[((i * n + j) * n + z) * n + w] = acc;
                    }
                }
            }
        }
        // Stored component R_{ijkl} = <R(e_i,e_j) e_l, e_k>.
        RiemannCurvature::from_fn(n, |i, j, k, l| full[((i * n + j) * n + l) * n + k])
    }

    /// Curvature of the symmetric space with tangent space `p` at the base
    /// point, `R(X,Y)Z = -[[X,Y],Z]`, in the (orthonormal) `p`-basis.
    pub fn symmetric_space_curvature(&self) -> Result<RiemannCurvature> {
        let split = self
            .cartan_split
            .as_ref()
            .ok_or_else(|| Error::Unsupported("symmetric space curvature needs a Cartan split".into()))?;
        let p = &split.p_indices;
        let n = self.dim;
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        let dim = p.len();
        let mut r = RiemannCurvature::zero(dim);
        for (a, &i) in p.iter().enumerate() {
            for (b, &j) in p.iter().enumerate() {
                let xy = self.bracket(&e(i), &e(j));
                for (d, &l) in p.iter().enumerate() {
                    let rz = self.bracket(&xy, &e(l));
                    for (c, &k) in p.iter().enumerate() {
                        // <R(e_a,e_b) e_d, e_c> = -<[[e_a,e_b],e_d], e_c>
                        let val: f64 = -(0..n)
                            .map(|m| rz[m] * self.inner_product[(m, k)])
                            .sum::<f64>();
                        r.set(a, b, c, d, val);
                    }
                }
            }
        }
        Ok(r)
    }
}

/// `so(3) + so(3)` with `[X1,X2]=X3` (cyclic) in each factor, unit inner
/// product, `k = span(X3, Y3)` and `p = span(X1, X2, Y1, Y2)`.
///
/// Basis order: `X1, X2, X3, Y1, Y2, Y3`. The symmetric space is `S^2 x S^2`
/// with unit sectional curvature on each factor.
pub fn so3_plus_so3() -> LieAlgebraData {
    let bracket = |i: usize, j: usize| {
        let mut out = vec![0.0; 6];
        if i / 3 == j / 3 && i != j {
            let (a, b) = (i % 3, j % 3);
            let c = 3 - a - b;
            let sign = if (a + 1) % 3 == b { 1.0 } else { -1.0 };
            out[(i / 3) * 3 + c] = sign;
        }
        out
    };
    LieAlgebraData::from_bracket(
        6,
        bracket,
        DMatrix::identity(6, 6),
        Some(CartanSplit {
            k_indices: vec![2, 5],
            p_indices: vec![0, 1, 3, 4],
        }),
    )
    .expect("so(3)+so(3) satisfies the Jacobi identity")
}

/// `so(3)` with `[e1,e2]=e3` cyclic and the unit inner product.
pub fn so3() -> LieAlgebraData {
    let bracket = |i: usize, j: usize| {
        let mut out = vec![0.0; 3];
        if i != j {
            let c = 3 - i - j;
            out[c] = if (i + 1) % 3 == j { 1.0 } else { -1.0 };
        }
        out
    };
    LieAlgebraData::from_bracket(3, bracket, DMatrix::identity(3, 3), None)
        .expect("so(3) satisfies the Jacobi identity")
}
