//! Deterministic quadrature on unit spheres inside hyperplanes `u^perp` and
//! nested radial integration over balls.
//!
//! Sphere rules are products of Gauss-Gegenbauer rules in the polar angles
//! (weight `(1-t^2)^a`, exact for polynomials) and an equally spaced rule on
//! the final circle. Every rule is symmetric under `x -> -x` coordinatewise,
//! so odd monomials integrate to zero up to rounding.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, householder_to, pairwise_sum};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;
/// Largest supported exactness degree.
pub const MAX_DEGREE: usize = 20;
pub const DEFAULT_SPHERE_DEGREE: usize = 12;
pub const DEFAULT_RADIAL_NODES: usize = 32;

/// `Gamma(twice / 2)` for a positive integer `twice`, exact up to rounding of
/// the running product.
pub fn gamma_half(twice: u32) -> f64 {
    assert!(twice > 0, "Gamma has a pole at 0");
    if twice % 2 == 0 {
        (1..twice / 2).map(f64::from).product()
    } else {
        // Gamma(k + 1/2) = sqrt(pi) * prod_{j=0}^{k-1} (j + 1/2)
        let k = (twice - 1) / 2;
        PI.sqrt() * (0..k).map(|j| f64::from(j) + 0.5).product::<f64>()
    }
}

/// Surface measure of the unit sphere `S^m` in `R^{m+1}`.
pub fn sphere_area(m: usize) -> f64 {
    2.0 * PI.powf((m as f64 + 1.0) / 2.0) / gamma_half(m as u32 + 1)
}

/// Volume of the Euclidean unit ball in `R^m`, `pi^{m/2} / Gamma(m/2 + 1)`.
pub fn unit_ball_volume(m: usize) -> f64 {
    PI.powf(m as f64 / 2.0) / gamma_half(m as u32 + 2)
}

/// Integral of `x_1^{a_1} ... x_m^{a_m}` over the unit sphere `S^{m-1}`.
///
/// Zero if any exponent is odd; otherwise
/// `2 Gamma(b_1)...Gamma(b_m) / Gamma(b_1 + ... + b_m)` with `b_j = (a_j + 1)/2`.
pub fn monomial_sphere_integral(exponents: &[u32]) -> f64 {
    if exponents.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let num: f64 = exponents.iter().map(|&a| gamma_half(a + 1)).product();
    let total: u32 = exponents.iter().map(|&a| a + 1).sum();
    2.0 * num / gamma_half(total)
}

/// Gauss rule for the weight `(1 - t^2)^a` on `[-1, 1]` with `n` nodes,
/// `a = half_twice / 2`. `half_twice = 0` gives Gauss-Legendre.
pub fn gauss_gegenbauer(n: usize, half_twice: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let a = f64::from(half_twice) / 2.0;
    // mu_0 = sqrt(pi) Gamma(a+1) / Gamma(a+3/2)
    let mu0 = PI.sqrt() * gamma_half(half_twice + 2) / gamma_half(half_twice + 3);
    let off: Vec<f64> = (1..=n)
        .map(|k| {
            let k = k as f64;
            (k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0))).sqrt()
        })
        .collect();
    let jac = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    guesses.sort_by(f64::total_cmp);

    // Orthonormal polynomials: t p_k = b_{k+1} p_{k+1} + b_k p_{k-1}.
    let eval = |t: f64| -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut p = 1.0 / mu0.sqrt();
        let mut d_prev = 0.0;
        let mut d = 0.0;
        let mut sum_sq = p * p;
        for k in 0..n {
            let b_next = off[k];
            let b_cur = if k == 0 { 0.0 } else { off[k - 1] };
            let p_next = (t * p - b_cur * p_prev) / b_next;
            let d_next = (t * d + p - b_cur * d_prev) / b_next;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            if k + 1 < n {
                sum_sq += p * p;
            }
        }
        (p, d, sum_sq)
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for g in guesses {
        let mut t = g;
        for _ in 0..8 {
            let (p, d, _) = eval(t);
            let step = p / d;
            t -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        nodes.push(t);
    }
    // Exact symmetry about zero.
    for i in 0..n / 2 {
        let s = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -s;
        nodes[n - 1 - i] = s;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    for &t in &nodes {
        let (_, _, sum_sq) = eval(t);
        weights.push(1.0 / sum_sq);
    }
    for i in 0..n / 2 {
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_gegenbauer(n, 0);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Product rule on `S^m` in `R^{m+1}` exact through degree `d`.
fn local_sphere_rule(m: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    if m == 1 {
        let count = 2 * (d / 2) + 2;
        let h = 2.0 * PI / count as f64;
        let nodes = (0..count)
            .map(|j| {
                let th = h * (j as f64 + 0.5);
                vec![th.cos(), th.sin()]
            })
            .collect();
        return (nodes, vec![h; count]);
    }
    let (inner_nodes, inner_weights) = local_sphere_rule(m - 1, d);
    let (ts, tw) = gauss_gegenbauer(d / 2 + 1, m as u32 - 2);
    let mut nodes = Vec::with_capacity(ts.len() * inner_nodes.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (t, wt) in ts.iter().zip(&tw) {
        let s = (1.0 - t * t).sqrt();
        for (y, wy) in inner_nodes.iter().zip(&inner_weights) {
            let mut x = Vec::with_capacity(m + 1);
            x.push(*t);
            x.extend(y.iter().map(|c| s * c));
            nodes.push(x);
            weights.push(wt * wy);
        }
    }
    (nodes, weights)
}

/// Quadrature rule on the unit sphere `S^{n-2}` of the hyperplane `u^perp` in `R^n`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    ambient_dim: usize,
    normal: Vec<f64>,
    /// Orthonormal basis of `u^perp` (columns), completing `u` by a Householder reflection.
    basis: DMatrix<f64>,
    local: Vec<Vec<f64>>,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    exact_degree: usize,
}

impl SphereQuadrature {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    /// Unit nodes in ambient coordinates, each orthogonal to the normal.
    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    /// Nodes in the coordinates of [`Self::hyperplane_basis`].
    pub fn local_nodes(&self) -> &[Vec<f64>] {
        &self.local
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `n x (n-1)` matrix whose columns span `u^perp`.
    pub fn hyperplane_basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Sum of `w_i f(node_i)` with deterministic pairwise reduction.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<f64> {
        let vals: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(x))
            .collect();
        linalg::check_finite(&vals, "sphere integrand sample")?;
        Ok(pairwise_sum(&vals))
    }

    /// Largest relative error over all even monomials of degree `<= exact_degree`
    /// in the hyperplane coordinates (absolute error for odd ones, which vanish).
    pub fn exactness_audit(&self, max_degree: usize) -> (f64, f64) {
        let m = self.ambient_dim - 1;
        let mut worst_even = 0.0_f64;
        let mut worst_odd = 0.0_f64;
        let mut exps = vec![0_u32; m];
        loop {
            let deg: u32 = exps.iter().sum();
            if deg as usize <= max_degree {
                let q: f64 = pairwise_sum(
                    &self
                        .local
                        .iter()
                        .zip(&self.weights)
                        .map(|(x, w)| w * x.iter().zip(&exps).map(|(c, &a)| c.powi(a as i32)).product::<f64>())
                        .collect::<Vec<_>>(),
                );
                let exact = monomial_sphere_integral(&exps);
                if exact == 0.0 {
                    worst_odd = worst_odd.max(q.abs());
                } else {
                    worst_even = worst_even.max(((q - exact) / exact).abs());
                }
            }
            // odometer over exponents 0..=max_degree
            let mut i = 0;
            loop {
                if i == m {
                    return (worst_even, worst_odd);
                }
                exps[i] += 1;
                if exps.iter().sum::<u32>() as usize <= max_degree {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    /// CSV with one row per node: ambient coordinates then the weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.ambient_dim).map(|i| format!("x{i}")).collect();
        let _ = writeln!(out, "{},weight", header.join(","));
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let row: Vec<String> = x.iter().map(|c| format!("{c:.16e}")).collect();
            let _ = writeln!(out, "{},{w:.16e}", row.join(","));
        }
        out
    }
}

/// Rule on the unit sphere of `u^perp` in `R^n`, exact through degree `d`.
pub fn sphere_rule(n: usize, normal: &[f64], degree: usize) -> Result<SphereQuadrature> {
    if !(3..=MAX_DIM).contains(&n) {
        return Err(Error::Unsupported(format!(
            "sphere rules need 3 <= n <= {MAX_DIM}, got {n}"
        )));
    }
    if degree > MAX_DEGREE {
        return Err(Error::Unsupported(format!(
            "sphere rule degree {degree} exceeds {MAX_DEGREE}"
        )));
    }
    if normal.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: normal.len(),
        });
    }
    linalg::check_unit(normal, crate::curvature::UNIT_TOL)?;
    let h = householder_to(normal, n - 1);
    let basis = h.columns(0, n - 1).into_owned();
    let (local, weights) = local_sphere_rule(n - 2, degree);
    let nodes = local
        .iter()
        .map(|y| {
            let mut x = vec![0.0; n];
            for (j, c) in y.iter().enumerate() {
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi += basis[(i, j)] * c;
                }
            }
            x
        })
        .collect();
    Ok(SphereQuadrature {
        ambient_dim: n,
        normal: normal.to_vec(),
        basis,
        local,
        nodes,
        weights,
        exact_degree: degree,
    })
}

/// Quadrature value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `int_0^r int_S g_w(rho) dw drho` where `prepare(w)` builds the radial
/// integrand for direction `w` once (e.g. a spectral decomposition).
///
/// The radial integral uses Gauss-Legendre with `radial_nodes` and
/// `2 * radial_nodes` points; the finer value is returned and the difference
/// is the error estimate.
pub fn radial_sphere_integral_with<P, G>(
    rule: &SphereQuadrature,
    r: f64,
    radial_nodes: usize,
    prepare: P,
) -> Result<Estimate>
where
    P: Fn(&[f64]) -> Result<G> + Sync,
    G: Fn(f64) -> Result<f64>,
{
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::NonFinite("radius".into()));
    }
    let coarse_rule = gauss_legendre(radial_nodes, 0.0, r);
    let fine_rule = gauss_legendre(2 * radial_nodes, 0.0, r);
    let per_node: Vec<Result<(f64, f64)>> = rule
        .nodes
        .par_iter()
        .map(|w| {
            let g = prepare(w)?;
            let radial = |(xs, ws): &(Vec<f64>, Vec<f64>)| -> Result<f64> {
                let mut vals = Vec::with_capacity(xs.len());
                for (x, wt) in xs.iter().zip(ws) {
                    let v = g(*x)?;
                    if !v.is_finite() {
                        return Err(Error::NonFinite(format!("integrand at rho = {x}")));
                    }
                    vals.push(wt * v);
                }
                Ok(pairwise_sum(&vals))
            };
            Ok((radial(&coarse_rule)?, radial(&fine_rule)?))
        })
        .collect();
    let mut coarse = Vec::with_capacity(per_node.len());
    let mut fine = Vec::with_capacity(per_node.len());
    for (res, w) in per_node.into_iter().zip(&rule.weights) {
        let (c, f) = res?;
        coarse.push(w * c);
        fine.push(w * f);
    }
    let c = pairwise_sum(&coarse);
    let f = pairwise_sum(&fine);
    Ok(Estimate {
        value: f,
        error: (f - c).abs(),
    })
}

/// `int_0^r int_S f(rho, w) dw drho` (plain integrand form).
pub fn radial_sphere_integral(
    f: impl Fn(f64, &[f64]) -> f64 + Sync,
    r: f64,
    rule: &SphereQuadrature,
    radial_nodes: usize,
) -> Result<Estimate> {
    radial_sphere_integral_with(rule, r, radial_nodes, |w| {
        let w = w.to_vec();
        let f = &f;
        Ok(move |rho: f64| Ok(f(rho, &w)))
    })
}
