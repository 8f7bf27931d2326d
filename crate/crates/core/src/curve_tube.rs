//! Tubes about arbitrary unit-speed curves in constant-curvature models.
//!
//! A curve is given by samples carrying the point, velocity, covariant
//! acceleration and an orthonormal frame `E_1..E_n` with `E_n = gamma'`, all in
//! ambient coordinates: `R^n` for Euclidean space, the unit sphere in
//! `R^{n+1}`, or the hyperboloid `<x, x> = -1, x_0 > 0` in Minkowski space
//! `R^{1,n}` (coordinate 0 timelike). Tube integrands are evaluated in frame
//! coordinates, where the curvature tensor has constant components.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{RiemannCurvature, UNIT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{check_unit, dot, norm, pairwise_sum};
use crate::quadrature::{gauss_legendre, radial_sphere_integral_with, sphere_rule, SphereQuadrature};
use crate::special::{cotc_sqrt, sinc_sqrt};
use crate::symmetric_tube::TubeOptions;

/// Margin below `pi` required of `sqrt(lambda_max) * |w|`.
pub const CONJUGATE_MARGIN: f64 = 1e-3;
/// Tolerance for unit speed and frame orthonormality of curve samples.
pub const CURVE_TOL: f64 = 1e-10;

/// `det(d Exp_w)`: the product of `sinc_sqrt(mu_i, 1)` over the eigenvalues
/// `mu_i` of the Jacobi matrix of the (non-unit) vector `w`.
pub fn omega_density(r: &RiemannCurvature, w: &[f64]) -> Result<f64> {
    if w.len() != r.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            actual: w.len(),
        });
    }
    crate::linalg::check_finite(w, "omega argument")?;
    let m = r.jacobi_matrix(w);
    let eig = SymmetricEigen::new(m);
    let mut det = 1.0;
    for &mu in eig.eigenvalues.iter() {
        det *= sinc_sqrt(mu, 1.0)?;
    }
    Ok(det)
}

/// `-<J'(0), u>` in arclength for the Jacobi field along `s -> Exp(s w/|w|)`
/// with `J(0) = u`, `J(|w|) = 0`, i.e. `<sqrt(R) cot(sqrt(R) |w|) u, u>` for
/// `R` the Jacobi operator of `w/|w|`. Equals `1/|w|` in flat space.
pub fn tilde_jacobi_form(r: &RiemannCurvature, w: &[f64], u: &[f64]) -> Result<f64> {
    check_unit(u, UNIT_TOL)?;
    let rho = norm(w);
    if !(rho > 0.0) {
        return Err(Error::Unsupported("boundary Jacobi form needs w != 0".into()));
    }
    let what: Vec<f64> = w.iter().map(|x| x / rho).collect();
    let op = r.jacobi_operator(&what)?;
    let lmax = op.eigenvalues().last().copied().unwrap_or(0.0);
    if lmax > 0.0 {
        let arg = lmax.sqrt() * rho;
        if arg > PI - CONJUGATE_MARGIN {
            return Err(Error::Guard {
                argument: arg,
                limit: PI - CONJUGATE_MARGIN,
            });
        }
    }
    let coords = op.eigen().coordinates(u);
    let mut terms = Vec::with_capacity(coords.len());
    for (&l, c) in op.eigenvalues().iter().zip(&coords) {
        terms.push(cotc_sqrt(l, rho)? / rho * c * c);
    }
    Ok(pairwise_sum(&terms))
}

/// `int_{B_r(u^perp)} <w, v> omega(w) dw` by radial/sphere quadrature with
/// the sphere rule `rule` (normal `u`).
pub fn datri_second_term(
    r: &RiemannCurvature,
    u: &[f64],
    v: &[f64],
    radius: f64,
    rule: &SphereQuadrature,
    radial_nodes: usize,
) -> Result<f64> {
    check_unit(u, UNIT_TOL)?;
    let inner = dot(u, v);
    if inner.abs() > UNIT_TOL * (1.0 + norm(v)) {
        return Err(Error::NotOrthogonal { inner });
    }
    let pow = r.dim() as i32 - 2;
    let est = radial_sphere_integral_with(rule, radius, radial_nodes, |wh| {
        let c = dot(wh, v);
        let wh = wh.to_vec();
        Ok(move |rho: f64| {
            let w: Vec<f64> = wh.iter().map(|x| rho * x).collect();
            Ok(rho.powi(pow) * rho * c * omega_density(r, &w)?)
        })
    })?;
    Ok(est.value)
}

/// Constant-curvature model hosting a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveSpace {
    Euclidean(usize),
    /// Unit sphere `S^n` in `R^{n+1}`.
    Sphere(usize),
    /// Hyperboloid model of `H^n` in `R^{1,n}`.
    Hyperbolic(usize),
}

impl CurveSpace {
    pub fn dim(&self) -> usize {
        match *self {
            CurveSpace::Euclidean(n) | CurveSpace::Sphere(n) | CurveSpace::Hyperbolic(n) => n,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            CurveSpace::Euclidean(n) => n,
            CurveSpace::Sphere(n) | CurveSpace::Hyperbolic(n) => n + 1,
        }
    }

    pub fn kappa(&self) -> f64 {
        match self {
            CurveSpace::Euclidean(_) => 0.0,
            CurveSpace::Sphere(_) => 1.0,
            CurveSpace::Hyperbolic(_) => -1.0,
        }
    }

    /// Ambient inner product restricted to tangent vectors.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            CurveSpace::Hyperbolic(_) => dot(&a[1..], &b[1..]) - a[0] * b[0],
            _ => dot(a, b),
        }
    }

    pub fn curvature(&self) -> RiemannCurvature {
        RiemannCurvature::constant(self.dim(), self.kappa())
    }

    /// Parses `e3`, `s3`, `h3`.
    pub fn parse(name: &str) -> Result<Self> {
        let s = name.trim().to_ascii_lowercase();
        let bad = || Error::Unsupported(format!("curves need a constant-curvature model e<n>, s<n> or h<n>, got {name:?}"));
        if s.len() < 2 {
            return Err(bad());
        }
        let (tag, dim) = s.split_at(1);
        let n: usize = dim.parse().map_err(|_| bad())?;
        if n < 2 {
            return Err(bad());
        }
        match tag {
            "e" => Ok(CurveSpace::Euclidean(n)),
            "s" => Ok(CurveSpace::Sphere(n)),
            "h" => Ok(CurveSpace::Hyperbolic(n)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSample {
    pub t: f64,
    /// Quadrature weight of this sample in the arclength integral.
    pub weight: f64,
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Covariant acceleration.
    pub acceleration: Vec<f64>,
    /// `E_1..E_n`, with `E_n` the velocity.
    pub frame: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSpec {
    space: CurveSpace,
    samples: Vec<CurveSample>,
}

impl CurveSpec {
    /// Validates unit speed, frame orthonormality, `E_n = gamma'`, tangency of
    /// frame and acceleration, and `<gamma'', gamma'> = 0`.
    pub fn new(space: CurveSpace, samples: Vec<CurveSample>) -> Result<Self> {
        let n = space.dim();
        let m = space.ambient_dim();
        if samples.is_empty() {
            return Err(Error::Unsupported("curve has no samples".into()));
        }
        let fail = |what: String, residual: f64| Err(Error::Axiom { what, residual });
        for (j, s) in samples.iter().enumerate() {
            for v in [&s.point, &s.velocity, &s.acceleration] {
                if v.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        actual: v.len(),
                    });
                }
                crate::linalg::check_finite(v, "curve sample")?;
            }
            if s.frame.len() != n || s.frame.iter().any(|f| f.len() != m) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: s.frame.len(),
                });
            }
            let on_model = match space {
                CurveSpace::Euclidean(_) => 0.0,
                CurveSpace::Sphere(_) => (dot(&s.point, &s.point) - 1.0).abs(),
                CurveSpace::Hyperbolic(_) => (space.inner(&s.point, &s.point) + 1.0).abs(),
            };
            if on_model > CURVE_TOL {
                return fail(format!("sample {j} lies on the model"), on_model);
            }
            let speed = space.inner(&s.velocity, &s.velocity).sqrt();
            if (speed - 1.0).abs() > CURVE_TOL {
                return fail(format!("unit speed at sample {j}"), (speed - 1.0).abs());
            }
            let last = &s.frame[n - 1];
            let gap = last
                .iter()
                .zip(&s.velocity)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if gap > CURVE_TOL {
                return fail(format!("E_n equals the velocity at sample {j}"), gap);
            }
            for a in 0..n {
                for b in 0..n {
                    let g = space.inner(&s.frame[a], &s.frame[b]) - if a == b { 1.0 } else { 0.0 };
                    if g.abs() > CURVE_TOL {
                        return fail(format!("frame orthonormality at sample {j}"), g.abs());
                    }
                }
                if !matches!(space, CurveSpace::Euclidean(_)) {
                    let tangency = space.inner(&s.frame[a], &s.point).abs();
                    if tangency > CURVE_TOL {
                        return fail(format!("frame tangency at sample {j}"), tangency);
                    }
                }
            }
            if !matches!(space, CurveSpace::Euclidean(_)) {
                let tangency = space.inner(&s.acceleration, &s.point).abs();
                if tangency > CURVE_TOL {
                    return fail(format!("acceleration tangency at sample {j}"), tangency);
                }
            }
            let orth = space.inner(&s.acceleration, &s.velocity).abs();
            if orth > CURVE_TOL {
                return fail(format!("acceleration orthogonal to velocity at sample {j}"), orth);
            }
        }
        Ok(CurveSpec { space, samples })
    }

    pub fn space(&self) -> CurveSpace {
        self.space
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    /// Sum of the arclength weights.
    pub fn length(&self) -> f64 {
        pairwise_sum(&self.samples.iter().map(|s| s.weight).collect::<Vec<_>>())
    }

    /// Acceleration in frame coordinates `a_i = <gamma'', E_i>`.
    pub fn frame_acceleration(&self, j: usize) -> Vec<f64> {
        let s = &self.samples[j];
        s.frame.iter().map(|e| self.space.inner(&s.acceleration, e)).collect()
    }

    /// CSV rows `t, point..., velocity..., acceleration..., E_1..., ..., E_n..., weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let m = self.space.ambient_dim();
        let mut cols = vec!["t".to_string()];
        for tag in ["x", "v", "a"] {
            cols.extend((0..m).map(|i| format!("{tag}{i}")));
        }
        for f in 0..self.space.dim() {
            cols.extend((0..m).map(|i| format!("e{}_{i}", f + 1)));
        }
        cols.push("weight".into());
        let _ = writeln!(out, "{}", cols.join(","));
        for s in &self.samples {
            let mut row = vec![s.t];
            row.extend(&s.point);
            row.extend(&s.velocity);
            row.extend(&s.acceleration);
            for f in &s.frame {
                row.extend(f);
            }
            row.push(s.weight);
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Reads rows in the [`Self::to_csv`] layout. A header line is optional.
    /// When the weight column is absent, trapezoid weights in `t` are used.
    pub fn from_csv(text: &str, space: CurveSpace) -> Result<Self> {
        let n = space.dim();
        let m = space.ambient_dim();
        let base = 1 + 3 * m + n * m;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cells: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            match cells {
                Ok(v) => rows.push(v),
                Err(_) if rows.is_empty() && i == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("line {}: {e}", i + 1))),
            }
        }
        if rows.is_empty() {
            return Err(Error::Parse("curve file has no rows".into()));
        }
        let width = rows[0].len();
        if width != base && width != base + 1 {
            return Err(Error::Parse(format!(
                "expected {base} or {} columns for {space:?}, found {width}",
                base + 1
            )));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Parse("rows have differing column counts".into()));
        }
        let ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let weights: Vec<f64> = if width == base + 1 {
            rows.iter().map(|r| r[base]).collect()
        } else {
            trapezoid_weights(&ts)
        };
        let samples = rows
            .iter()
            .zip(weights)
            .map(|(r, w)| CurveSample {
                t: r[0],
                weight: w,
                point: r[1..1 + m].to_vec(),
                velocity: r[1 + m..1 + 2 * m].to_vec(),
                acceleration: r[1 + 2 * m..1 + 3 * m].to_vec(),
                frame: (0..n)
                    .map(|f| r[1 + 3 * m + f * m..1 + 3 * m + (f + 1) * m].to_vec())
                    .collect(),
            })
            .collect();
        Self::new(space, samples)
    }
}

fn trapezoid_weights(ts: &[f64]) -> Vec<f64> {
    let k = ts.len();
    if k < 2 {
        return vec![0.0; k];
    }
    (0..k)
        .map(|i| {
            let left = if i > 0 { ts[i] - ts[i - 1] } else { 0.0 };
            let right = if i + 1 < k { ts[i + 1] - ts[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Composite Gauss-Legendre nodes and weights on `[0, length]`.
fn composite_nodes(length: f64, panels: usize, per_panel: usize) -> Vec<(f64, f64)> {
    let h = length / panels as f64;
    let mut out = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let (x, w) = gauss_legendre(per_panel, p as f64 * h, (p + 1) as f64 * h);
        out.extend(x.into_iter().zip(w));
    }
    out
}

/// Points per panel used by the curve generators.
pub const GENERATOR_NODES_PER_PANEL: usize = 8;

/// Circle of geodesic curvature `kappa >= 0` in the unit `S^3`, arclength
/// `length` (default: the full circle, `2 pi sin(beta)` with `cot(beta) = kappa`).
pub fn small_circle_s3(kappa: f64, length: Option<f64>, panels: usize) -> Result<CurveSpec> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::Unsupported(format!("circle curvature must be >= 0, got {kappa}")));
    }
    let beta = 1.0_f64.atan2(kappa);
    let (sb, cb) = beta.sin_cos();
    let length = length.unwrap_or(2.0 * PI * sb);
    let samples = composite_nodes(length, panels, GENERATOR_NODES_PER_PANEL)
        .into_iter()
        .map(|(s, w)| {
            let (st, ct) = (s / sb).sin_cos();
            let normal = vec![-cb * ct, -cb * st, sb, 0.0];
            CurveSample {
                t: s,
                weight: w,
                point: vec![sb * ct, sb * st, cb, 0.0],
                velocity: vec![-st, ct, 0.0, 0.0],
                acceleration: normal.iter().map(|x| kappa * x).collect(),
                frame: vec![normal, vec![0.0, 0.0, 0.0, 1.0], vec![-st, ct, 0.0, 0.0]],
            }
        })
        .collect();
    CurveSpec::new(CurveSpace::Sphere(3), samples)
}

/// Arc of a circle of radius `1/kappa` in the `xy`-plane of `R^3`; `kappa = 0`
/// gives a straight segment.
pub fn planar_arc_r3(kappa: f64, length: f64, panels: usize) -> Result<CurveSpec> {
    if !(kappa.is_finite() && kappa >= 0.0 && length > 0.0) {
        return Err(Error::Unsupported("arc needs kappa >= 0 and positive length".into()));
    }
    let samples = composite_nodes(length, panels, GENERATOR_NODES_PER_PANEL)
        .into_iter()
        .map(|(s, w)| {
            let (st, ct) = (kappa * s).sin_cos();
            let point = if kappa == 0.0 {
                vec![s, 0.0, 0.0]
            } else {
                vec![st / kappa, (1.0 - ct) / kappa, 0.0]
            };
            let normal = vec![-st, ct, 0.0];
            CurveSample {
                t: s,
                weight: w,
                point,
                velocity: vec![ct, st, 0.0],
                acceleration: normal.iter().map(|x| kappa * x).collect(),
                frame: vec![normal, vec![0.0, 0.0, 1.0], vec![ct, st, 0.0]],
            }
        })
        .collect();
    CurveSpec::new(CurveSpace::Euclidean(3), samples)
}

/// Geodesic `s -> (cosh s, sinh s, 0, 0)` in the hyperboloid model of `H^3`.
pub fn hyperbolic_geodesic_h3(length: f64, panels: usize) -> Result<CurveSpec> {
    let samples = composite_nodes(length, panels, GENERATOR_NODES_PER_PANEL)
        .into_iter()
        .map(|(s, w)| {
            let (sh, ch) = (s.sinh(), s.cosh());
            CurveSample {
                t: s,
                weight: w,
                point: vec![ch, sh, 0.0, 0.0],
                velocity: vec![sh, ch, 0.0, 0.0],
                acceleration: vec![0.0; 4],
                frame: vec![vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0], vec![sh, ch, 0.0, 0.0]],
            }
        })
        .collect();
    CurveSpec::new(CurveSpace::Hyperbolic(3), samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTubeVolume {
    pub volume: f64,
    /// Weighted sum of radial-doubling estimates.
    pub error: f64,
    pub length: f64,
    /// Largest `|int <x, gamma''> omega dx|` over the samples.
    pub max_second_term: f64,
}

/// Tube volume `int_0^l int_{B_r} (-<J'(0), gamma'> - <x, gamma''>) omega dx dt`
/// in frame coordinates, with the `t`-integral taken from the sample weights.
pub fn general_curve_tube_volume(curve: &CurveSpec, radius: f64, options: &TubeOptions) -> Result<CurveTubeVolume> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Unsupported(format!("radius must be positive, got {radius}")));
    }
    let n = curve.space.dim();
    if n < 3 {
        return Err(Error::Unsupported("tube volumes need dimension at least 3".into()));
    }
    let r = curve.space.curvature();
    let mut en = vec![0.0; n];
    en[n - 1] = 1.0;
    let rule = sphere_rule(n, &en, options.sphere_degree)?;
    let pow = n as i32 - 2;
    let per_sample: Vec<Result<(f64, f64, f64)>> = (0..curve.samples.len())
        .into_par_iter()
        .map(|j| {
            let a = curve.frame_acceleration(j);
            let first = radial_sphere_integral_with(&rule, radius, options.radial_nodes, |wh| {
                let wh = wh.to_vec();
                let r = &r;
                let en = &en;
                Ok(move |rho: f64| {
                    let w: Vec<f64> = wh.iter().map(|x| rho * x).collect();
                    Ok(rho.powi(pow) * rho * tilde_jacobi_form(r, &w, en)? * omega_density(r, &w)?)
                })
            })?;
            let second = datri_second_term(&r, &en, &a, radius, &rule, options.radial_nodes)?;
            Ok((first.value - second, first.error, second))
        })
        .collect();
    let mut vals = Vec::with_capacity(per_sample.len());
    let mut errs = Vec::with_capacity(per_sample.len());
    let mut max_second = 0.0_f64;
    for (res, s) in per_sample.into_iter().zip(&curve.samples) {
        let (v, e, second) = res?;
        vals.push(s.weight * v);
        errs.push(s.weight.abs() * e);
        max_second = max_second.max(second.abs());
    }
    Ok(CurveTubeVolume {
        volume: pairwise_sum(&vals),
        error: pairwise_sum(&errs),
        length: curve.length(),
        max_second_term: max_second,
    })
}

/// Fundamental-matrix shooting for the boundary Jacobi field: RK4 on
/// `J'' = -R J` with a constant Jacobi operator `jac` up to `rho` with step `h`.
/// Returns `-<J'(0), u>` for `J(0) = u`, `J(rho) = 0`.
pub fn shooting_jacobi_form(jac: &DMatrix<f64>, u: &[f64], rho: f64, h: f64) -> Result<f64> {
    let n = jac.nrows();
    // State (Y, Y') for Y in {C, S}, stacked as a 2n x 2n system.
    let mut y = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        y[(i, i)] = 1.0; // C(0) = I
        y[(n + i, n + i)] = 1.0; // S'(0) = I
    }
    let f = |y: &DMatrix<f64>| -> DMatrix<f64> {
        let mut d = DMatrix::<f64>::zeros(2 * n, 2 * n);
        let pos = y.rows(0, n).into_owned();
        let vel = y.rows(n, n).into_owned();
        d.rows_mut(0, n).copy_from(&vel);
        d.rows_mut(n, n).copy_from(&(-(jac * pos)));
        d
    };
    let steps = (rho / h).ceil().max(1.0) as usize;
    let dt = rho / steps as f64;
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&(&y + &k1 * (dt / 2.0)));
        let k3 = f(&(&y + &k2 * (dt / 2.0)));
        let k4 = f(&(&y + &k3 * dt));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    let c = y.view((0, 0), (n, n)).into_owned();
    let s = y.view((0, n), (n, n)).into_owned();
    let uv = nalgebra::DVector::from_column_slice(u);
    let s_inv = s
        .try_inverse()
        .ok_or_else(|| Error::Condition("conjugate point: S(rho) is singular".into()))?;
    let b = -(s_inv * (c * &uv));
    Ok(-b.dot(&uv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_examples() {
        let z = RiemannCurvature::zero(3);
        assert_eq!(omega_density(&z, &[0.3, -2.0, 1.0]).unwrap(), 1.0);
        let s = RiemannCurvature::constant(3, 1.0);
        let rho: f64 = 0.9;
        let w = [0.0, rho * 0.6, rho * 0.8];
        let want = (rho.sin() / rho).powi(2);
        assert!((omega_density(&s, &w).unwrap() - want).abs() < 1e-15);
        let mw = [-0.0, -rho * 0.6, -rho * 0.8];
        assert_eq!(omega_density(&s, &w).unwrap(), omega_density(&s, &mw).unwrap());
    }

    #[test]
    fn tilde_jacobi_examples() {
        let rho: f64 = 0.7;
        let w = [rho, 0.0, 0.0];
        let u = [0.0, 1.0, 0.0];
        let z = RiemannCurvature::zero(3);
        assert!((tilde_jacobi_form(&z, &w, &u).unwrap() - 1.0 / rho).abs() < 1e-15);
        let s = RiemannCurvature::constant(3, 1.0);
        assert!((tilde_jacobi_form(&s, &w, &u).unwrap() - 1.0 / rho.tan()).abs() < 1e-14);
        let h = RiemannCurvature::constant(3, -1.0);
        assert!((tilde_jacobi_form(&h, &w, &u).unwrap() - 1.0 / rho.tanh()).abs() < 1e-14);
        assert!(matches!(
            tilde_jacobi_form(&s, &[3.141, 0.0, 0.0], &u),
            Err(Error::Guard { .. })
        ));
    }

    #[test]
    fn circle_is_a_valid_curve() {
        let c = small_circle_s3(0.5, None, 4).unwrap();
        let beta = 1.0_f64.atan2(0.5);
        assert!((c.length() - 2.0 * PI * beta.sin()).abs() < 1e-13);
        let a = c.frame_acceleration(3);
        assert!((a[0] - 0.5).abs() < 1e-15 && a[1].abs() < 1e-15 && a[2].abs() < 1e-15);
    }

    #[test]
    fn broken_frame_rejected() {
        let mut c = planar_arc_r3(1.0, 1.0, 1).unwrap();
        let mut samples = c.samples.clone();
        samples[0].frame[0][2] = 0.5;
        assert!(matches!(CurveSpec::new(CurveSpace::Euclidean(3), samples), Err(Error::Axiom { .. })));
        c.samples[0].velocity[0] *= 1.01;
        assert!(CurveSpec::new(CurveSpace::Euclidean(3), c.samples).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = small_circle_s3(0.5, Some(1.0), 1).unwrap();
        let back = CurveSpec::from_csv(&c.to_csv(), CurveSpace::Sphere(3)).unwrap();
        assert_eq!(back.samples().len(), c.samples().len());
        for (a, b) in back.samples().iter().zip(c.samples()) {
            assert_eq!(a.point, b.point);
            assert_eq!(a.weight, b.weight);
        }
    }

    #[test]
    fn csv_without_weights_uses_trapezoid() {
        let c = planar_arc_r3(0.0, 2.0, 2).unwrap();
        let text: String = c
            .to_csv()
            .lines()
            .skip(1)
            .map(|l| {
                let mut cells: Vec<&str> = l.split(',').collect();
                cells.pop();
                cells.join(",") + "\n"
            })
            .collect();
        let back = CurveSpec::from_csv(&text, CurveSpace::Euclidean(3)).unwrap();
        let first = back.samples()[0].t;
        let last = back.samples().last().unwrap().t;
        assert!((back.length() - (last - first)).abs() < 1e-14);
    }

    #[test]
    fn curve_space_names() {
        assert_eq!(CurveSpace::parse("s3").unwrap(), CurveSpace::Sphere(3));
        assert_eq!(CurveSpace::parse("H4").unwrap(), CurveSpace::Hyperbolic(4));
        assert!(CurveSpace::parse("cp2").is_err());
    }
}
