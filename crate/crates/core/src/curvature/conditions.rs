//! Curvature conditions: Einstein and 2-stein probes, the quadratic tensors
//! `P` and `Q`, and the small-radius tube coefficients `A` and `B`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::RiemannCurvature;
use crate::error::{Error, Result};
use crate::linalg::{self, householder_to};

/// Default absolute tolerance on Einstein deviations.
pub const EINSTEIN_TOL: f64 = 1e-8;

/// Result of probing `rho(u,u)` and `tr(R_u^2)` over a set of unit vectors.
#[derive(Debug, Clone, Serialize)]
pub struct SteinReport {
    /// Mean of `rho(u,u)` over the probes.
    pub einstein_constant: f64,
    /// `max - min` of `rho(u,u)` over the probes.
    pub einstein_deviation: f64,
    /// Mean of `tr(R_u^2)` over the probes.
    pub two_stein_constant: f64,
    /// `max - min` of `tr(R_u^2)` over the probes.
    pub two_stein_deviation: f64,
    pub probes: Vec<Vec<f64>>,
}

impl SteinReport {
    pub fn is_einstein(&self, tol: f64) -> bool {
        self.einstein_deviation <= tol
    }

    pub fn is_two_stein(&self, tol: f64) -> bool {
        self.is_einstein(tol) && self.two_stein_deviation <= tol
    }
}

/// Basis vectors, normalized pair sums and normalized triple sums.
pub fn standard_probes(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let basis = |idx: &[usize]| {
        let mut v = vec![0.0; n];
        let s = 1.0 / (idx.len() as f64).sqrt();
        for &i in idx {
            v[i] = s;
        }
        v
    };
    for a in 0..n {
        out.push(basis(&[a]));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            out.push(basis(&[a, b]));
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                out.push(basis(&[a, b, c]));
            }
        }
    }
    out
}

fn mean_and_range(values: &[f64]) -> (f64, f64) {
    let mean = linalg::pairwise_sum(values) / values.len() as f64;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (mean, max - min)
}

/// Probes `rho(u,u)` and `tr(R_u^2)`; needs at least `n(n+1)/2` probes.
pub fn stein_check(r: &RiemannCurvature, probes: &[Vec<f64>]) -> Result<SteinReport> {
    let n = r.dim();
    let needed = n * (n + 1) / 2;
    if probes.len() < needed {
        return Err(Error::Unsupported(format!(
            "stein check needs at least {needed} probes, got {}",
            probes.len()
        )));
    }
    let rho = r.ricci();
    let mut ricci_vals = Vec::with_capacity(probes.len());
    let mut tr2_vals = Vec::with_capacity(probes.len());
    for u in probes {
        let ru = r.jacobi_operator(u)?;
        let rv = nalgebra::DVector::from_column_slice(u);
        ricci_vals.push((rv.transpose() * &rho * &rv)[(0, 0)]);
        tr2_vals.push(ru.power_sum(2)?);
    }
    let (k, kdev) = mean_and_range(&ricci_vals);
    let (lam, ldev) = mean_and_range(&tr2_vals);
    Ok(SteinReport {
        einstein_constant: k,
        einstein_deviation: kdev,
        two_stein_constant: lam,
        two_stein_deviation: ldev,
        probes: probes.to_vec(),
    })
}

/// `P_ab = sum R_aijk R_bijk`, `Q_abcd = sum R_aibj R_cidj`.
#[derive(Debug, Clone)]
pub struct PQTensors {
    pub p: DMatrix<f64>,
    dim: usize,
    q: Vec<f64>,
    pub norm_r_sq: f64,
}

impl PQTensors {
    pub fn q(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.q[((a * n + b) * n + c) * n + d]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn pq_tensors(r: &RiemannCurvature) -> PQTensors {
    let n = r.dim();
    let p = DMatrix::from_fn(n, n, |a, b| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    acc += r.get(a, i, j, k) * r.get(b, i, j, k);
                }
            }
        }
        acc
    });
    let mut q = vec![0.0; n.pow(4)];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            acc += r.get(a, i, b, j) * r.get(c, i, d, j);
                        }
                    }
                    q[((a * n + b) * n + c) * n + d] = acc;
                }
            }
        }
    }
    PQTensors {
        p,
        dim: n,
        q,
        norm_r_sq: r.norm_sq(),
    }
}

/// Residuals of the `P`/`Q` contraction identities.
#[derive(Debug, Clone, Serialize)]
pub struct PqResiduals {
    /// `max_a |sum_b Q_abab - P_aa|`
    pub q_abab: f64,
    /// `max_a |sum_b Q_abba - P_aa / 2|`
    pub q_abba: f64,
    /// `|sum_a P_aa - ||R||^2|`
    pub trace_p: f64,
    /// `max_a |sum_b Q_aabb - K^2|` (Einstein constant `K`)
    pub q_aabb: f64,
    /// `max |P_ab - P_ba|`
    pub p_symmetry: f64,
    /// `max |Q_abcd - Q_badc|, |Q_abcd - Q_cdab|`
    pub q_symmetry: f64,
}

impl PqResiduals {
    pub fn max(&self) -> f64 {
        [
            self.q_abab,
            self.q_abba,
            self.trace_p,
            self.q_aabb,
            self.p_symmetry,
            self.q_symmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn pq_identity_check(t: &PQTensors, einstein_constant: f64) -> PqResiduals {
    let n = t.dim;
    let mut res = PqResiduals {
        q_abab: 0.0,
        q_abba: 0.0,
        trace_p: (t.p.trace() - t.norm_r_sq).abs(),
        q_aabb: 0.0,
        p_symmetry: linalg::max_abs_asymmetry(&t.p),
        q_symmetry: 0.0,
    };
    for a in 0..n {
        let s1: f64 = (0..n).map(|b| t.q(a, b, a, b)).sum();
        let s2: f64 = (0..n).map(|b| t.q(a, b, b, a)).sum();
        let s3: f64 = (0..n).map(|b| t.q(a, a, b, b)).sum();
        res.q_abab = res.q_abab.max((s1 - t.p[(a, a)]).abs());
        res.q_abba = res.q_abba.max((s2 - 0.5 * t.p[(a, a)]).abs());
        res.q_aabb = res.q_aabb.max((s3 - einstein_constant * einstein_constant).abs());
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = t.q(a, b, c, d);
                    res.q_symmetry = res
                        .q_symmetry
                        .max((v - t.q(b, a, d, c)).abs())
                        .max((v - t.q(c, d, a, b)).abs());
                }
            }
        }
    }
    res
}

/// Curvature tensor in an orthonormal basis whose first vector is `e`.
pub fn adapted_to(r: &RiemannCurvature, e: &[f64]) -> Result<RiemannCurvature> {
    linalg::check_unit(e, super::UNIT_TOL)?;
    Ok(r.rotated(&householder_to(e, 0)))
}

/// `A = -(tau + rho(e,e)) / (6(n+1))`.
pub fn gray_vanhecke_a(r: &RiemannCurvature, e: &[f64]) -> Result<f64> {
    linalg::check_unit(e, super::UNIT_TOL)?;
    let n = r.dim() as f64;
    let rho = r.ricci();
    let ev = nalgebra::DVector::from_column_slice(e);
    let rho_ee = (ev.transpose() * &rho * &ev)[(0, 0)];
    Ok(-(r.scalar() + rho_ee) / (6.0 * (n + 1.0)))
}

/// The `r^4` tube coefficient for a geodesic in direction `e` of an Einstein space.
///
/// Fails with [`Error::Condition`] unless the Ricci tensor is `K g` within
/// [`EINSTEIN_TOL`].
pub fn gray_vanhecke_b_einstein_geodesic(r: &RiemannCurvature, e: &[f64]) -> Result<f64> {
    let n = r.dim();
    let rho = r.ricci();
    let k = rho.trace() / n as f64;
    let dev = (&rho - DMatrix::<f64>::identity(n, n) * k).amax();
    if dev > EINSTEIN_TOL {
        return Err(Error::Condition(format!(
            "B coefficient needs an Einstein tensor (Ricci deviation {dev:e})"
        )));
    }
    let ra = adapted_to(r, e)?;
    let rho = ra.ricci();
    let tau = rho.trace();
    let rho_sq: f64 = rho.iter().map(|x| x * x).sum();
    let rho11 = rho[(0, 0)];
    let norm_r = ra.norm_sq();
    let mut r1ijk = 0.0;
    let mut r1i1j = 0.0;
    for i in 1..n {
        for j in 1..n {
            r1i1j += ra.get(0, i, 0, j).powi(2);
            for k in 1..n {
                r1ijk += ra.get(0, i, j, k).powi(2);
            }
        }
    }
    let nf = n as f64;
    let numerator = 5.0 * tau * tau + 8.0 * rho_sq - 3.0 * norm_r + 10.0 * tau * rho11
        + 14.0 * rho11 * rho11
        - 6.0 * r1ijk
        - 3.0 * rho11 * rho11
        - 10.0 * r1i1j;
    Ok(numerator / (360.0 * (nf + 1.0) * (nf + 3.0)))
}
