//! Tube volumes about geodesics in spaces with parallel curvature, the
//! per-direction tube-property scanner, Taylor coefficients of the tube
//! density, and the Lie-algebraic power-trace witness.
//!
//! For a unit geodesic direction `e` the tube of radius `r` and length `l` has
//! volume `l * int_0^r int_{S(e^perp)} rho^{n-2} det(sinc(sqrt(R_u) rho)) <cotc(R_u, rho) e, e> du drho`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::curvature::lie::LieAlgebraData;
use crate::curvature::{JacobiOperator, RiemannCurvature, UNIT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{check_unit, dot, pairwise_sum};
use crate::quadrature::{
    radial_sphere_integral_with, sphere_rule, SphereQuadrature, DEFAULT_RADIAL_NODES,
    DEFAULT_SPHERE_DEGREE,
};
use crate::special::{adaptive_log_det_sinc, cot_table, cotc_sqrt, sinc_sqrt, MAX_COT_ORDER};

/// How the determinant factor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Eigenvalues of `R_u` fed to the closed-form kernels.
    Spectral,
    /// Adaptive power-sum series for `log det`.
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeOptions {
    pub sphere_degree: usize,
    pub radial_nodes: usize,
    pub engine: Engine,
    /// Absolute tail target for the adaptive series.
    pub series_target: f64,
}

impl Default for TubeOptions {
    fn default() -> Self {
        TubeOptions {
            sphere_degree: DEFAULT_SPHERE_DEGREE,
            radial_nodes: DEFAULT_RADIAL_NODES,
            engine: Engine::Spectral,
            series_target: 1e-10,
        }
    }
}

fn check_orthogonal(e: &[f64], u: &[f64]) -> Result<()> {
    let inner = dot(e, u);
    if inner.abs() > UNIT_TOL {
        return Err(Error::NotOrthogonal { inner });
    }
    Ok(())
}

/// Per-direction data reused across all radii.
struct DirectionData {
    op: JacobiOperator,
    /// `<e, xi_i>^2` for the eigenvectors of `R_u`.
    weights: Vec<f64>,
}

impl DirectionData {
    fn new(r: &RiemannCurvature, e: &[f64], u: &[f64]) -> Result<Self> {
        let op = r.jacobi_operator(u)?;
        let weights = op.eigen().coordinates(e).iter().map(|c| c * c).collect();
        Ok(DirectionData { op, weights })
    }

    /// The integrand divided by `rho^{n-2}`.
    fn reduced(&self, rho: f64, engine: Engine, target: f64) -> Result<f64> {
        let lambdas = self.op.eigenvalues();
        let det = match engine {
            Engine::Spectral => {
                let mut det = 1.0;
                for &l in lambdas {
                    det *= sinc_sqrt(l, rho)?;
                }
                det
            }
            Engine::Series => adaptive_log_det_sinc(&self.op, rho, target)?.value,
        };
        let mut terms = Vec::with_capacity(lambdas.len());
        for (&l, w) in lambdas.iter().zip(&self.weights) {
            terms.push(cotc_sqrt(l, rho)? * w);
        }
        Ok(det * pairwise_sum(&terms))
    }
}

/// `rho^{n-2} det(sinc) <cotc(R_u) e, e>` for unit `e`, unit `u` orthogonal to `e`.
pub fn geodesic_tube_integrand(
    r: &RiemannCurvature,
    e: &[f64],
    u: &[f64],
    rho: f64,
    engine: Engine,
) -> Result<f64> {
    Ok(rho.powi(r.dim() as i32 - 2) * reduced_integrand(r, e, u, rho, engine)?)
}

/// [`geodesic_tube_integrand`] without the `rho^{n-2}` factor; finite at `rho = 0`.
pub fn reduced_integrand(
    r: &RiemannCurvature,
    e: &[f64],
    u: &[f64],
    rho: f64,
    engine: Engine,
) -> Result<f64> {
    check_unit(e, UNIT_TOL)?;
    check_orthogonal(e, u)?;
    DirectionData::new(r, e, u)?.reduced(rho, engine, TubeOptions::default().series_target)
}

/// Volume with a radial-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeVolume {
    pub volume: f64,
    pub error: f64,
}

/// Volume of the tube of radius `r` about a geodesic segment of length `l`
/// with unit direction `e`, using the sphere `rule` in `e^perp`.
pub fn geodesic_tube_volume(
    r: &RiemannCurvature,
    e: &[f64],
    radius: f64,
    length: f64,
    rule: &SphereQuadrature,
    options: &TubeOptions,
) -> Result<TubeVolume> {
    check_unit(e, UNIT_TOL)?;
    if r.dim() != e.len() || rule.ambient_dim() != e.len() {
        return Err(Error::DimensionMismatch {
            expected: e.len(),
            actual: r.dim(),
        });
    }
    let normal_gap = rule
        .normal()
        .iter()
        .zip(e)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if normal_gap > UNIT_TOL {
        return Err(Error::Unsupported("sphere rule normal differs from the geodesic direction".into()));
    }
    if !(radius.is_finite() && radius > 0.0 && length.is_finite() && length > 0.0) {
        return Err(Error::Unsupported(format!(
            "radius and length must be positive, got r = {radius}, l = {length}"
        )));
    }
    let pow = r.dim() as i32 - 2;
    let est = radial_sphere_integral_with(rule, radius, options.radial_nodes, |u| {
        let data = DirectionData::new(r, e, u)?;
        let engine = options.engine;
        let target = options.series_target;
        Ok(move |rho: f64| Ok(rho.powi(pow) * data.reduced(rho, engine, target)?))
    })?;
    Ok(TubeVolume {
        volume: length * est.value,
        error: length * est.error,
    })
}

/// Convenience wrapper building the sphere rule from `options`.
pub fn geodesic_tube_volume_default(
    r: &RiemannCurvature,
    e: &[f64],
    radius: f64,
    length: f64,
    options: &TubeOptions,
) -> Result<TubeVolume> {
    let rule = sphere_rule(r.dim(), e, options.sphere_degree)?;
    geodesic_tube_volume(r, e, radius, length, &rule, options)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionValue {
    pub direction: Vec<f64>,
    pub value: f64,
    pub error: f64,
}

/// Tube volumes `V_e(r)` (length 1) over a set of directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeVolumeReport {
    pub radius: f64,
    pub length: f64,
    pub per_direction: Vec<DirectionValue>,
    /// `(max - min) / mean` over directions.
    pub spread: f64,
    /// Largest series order used, when the series engine is active.
    pub series_order: Option<usize>,
    pub sphere_degree: usize,
    pub radial_nodes: usize,
}

impl TubeVolumeReport {
    pub fn to_csv(&self) -> String {
        let n = self.per_direction.first().map_or(0, |d| d.direction.len());
        let mut out = String::from("index");
        for i in 0..n {
            let _ = write!(out, ",e{i}");
        }
        out.push_str(",volume,error,spread\n");
        for (k, d) in self.per_direction.iter().enumerate() {
            let _ = write!(out, "{k}");
            for c in &d.direction {
                let _ = write!(out, ",{c:.16e}");
            }
            let _ = writeln!(out, ",{:.16e},{:.16e},{:.16e}", d.value, d.error, self.spread);
        }
        out
    }
}

/// Relative spread `(max - min) / mean` of positive values.
pub fn relative_spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    let mean = pairwise_sum(values) / values.len() as f64;
    (max - min) / mean
}

/// Basis vectors, normalized two-index and three-index diagonals.
pub fn standard_directions(n: usize) -> Vec<Vec<f64>> {
    crate::curvature::conditions::standard_probes(n)
}

pub fn tube_property_scan(
    r: &RiemannCurvature,
    radius: f64,
    directions: &[Vec<f64>],
    options: &TubeOptions,
) -> Result<TubeVolumeReport> {
    let mut per_direction = Vec::with_capacity(directions.len());
    for e in directions {
        let v = geodesic_tube_volume_default(r, e, radius, 1.0, options)?;
        per_direction.push(DirectionValue {
            direction: e.clone(),
            value: v.volume,
            error: v.error,
        });
    }
    let values: Vec<f64> = per_direction.iter().map(|d| d.value).collect();
    Ok(TubeVolumeReport {
        radius,
        length: 1.0,
        spread: relative_spread(&values),
        per_direction,
        series_order: (options.engine == Engine::Series).then_some(24),
        sphere_degree: options.sphere_degree,
        radial_nodes: options.radial_nodes,
    })
}

/// Ordered compositions of `m` into positive parts.
fn compositions(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=m {
        for mut rest in compositions(m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Coefficient of `rho^{2k}` in `sum_{l} b_l M_l rho^{2l} * exp(sum_j (b_j / 2j) S_j rho^{2j})`
/// for power sums `S_j = tr(R_u^j)` and moments `M_l = <R_u^l e, e>` (`M_0 = 1`).
///
/// The exponential is expanded as `sum_m (1/m!) (sum_j ...)^m`, i.e. over
/// ordered compositions of the remaining degree weighted by `1/m!`.
pub fn k_coefficient_from_traces(power_sums: &[f64], moments: &[f64], k: usize) -> f64 {
    let b = cot_table().values();
    let mut total = Vec::new();
    for l in 0..=k {
        let lead = b[l] * moments[l];
        for parts in compositions(k - l) {
            let m = parts.len();
            let fact: f64 = (1..=m).map(|i| i as f64).product();
            let prod: f64 = parts
                .iter()
                .map(|&j| b[j] / (2.0 * j as f64) * power_sums[j - 1])
                .product();
            total.push(lead * prod / fact);
        }
    }
    pairwise_sum(&total)
}

/// Integral over `u` in the unit sphere of `e^perp` of the `rho^{2k}` Taylor
/// coefficient of the reduced tube integrand.
pub fn k_integral_coefficient(
    r: &RiemannCurvature,
    e: &[f64],
    k: usize,
    rule: &SphereQuadrature,
) -> Result<f64> {
    check_unit(e, UNIT_TOL)?;
    if k > MAX_COT_ORDER {
        return Err(Error::Unsupported(format!("coefficient order {k} exceeds {MAX_COT_ORDER}")));
    }
    let samples: Vec<Result<f64>> = rule
        .nodes()
        .iter()
        .map(|u| {
            let op = r.jacobi_operator(u)?;
            let sums = op.power_sums(k.max(1));
            let moments: Vec<f64> = (0..=k as u32)
                .map(|j| if j == 0 { dot(e, e) } else { op.moment(e, j) })
                .collect();
            Ok(k_coefficient_from_traces(&sums, &moments, k))
        })
        .collect();
    let mut vals = Vec::with_capacity(samples.len());
    for (s, w) in samples.into_iter().zip(rule.weights()) {
        vals.push(w * s?);
    }
    Ok(pairwise_sum(&vals))
}

/// Bivariate polynomial `sum c_ij x^i y^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariatePolynomial {
    pub terms: Vec<(u32, u32, f64)>,
}

impl BivariatePolynomial {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        BivariatePolynomial { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }
}

/// The degree-`k` homogeneous component evaluated at `(1, i)`.
pub fn trig_poly_top_component(p: &BivariatePolynomial, k: u32) -> Complex64 {
    let unit_powers = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    p.terms
        .iter()
        .filter(|(i, j, _)| i + j == k)
        .map(|&(_, j, c)| unit_powers[(j % 4) as usize] * c)
        .sum()
}

/// Commutator tolerance for [`ad_power_trace`].
pub const COMMUTING_TOL: f64 = 1e-12;

fn embed_p(l: &LieAlgebraData, a: &[f64]) -> Result<Vec<f64>> {
    let split = l
        .cartan_split()
        .ok_or_else(|| Error::Unsupported("ad power traces need a Cartan split".into()))?;
    if a.len() != split.p_indices.len() {
        return Err(Error::DimensionMismatch {
            expected: split.p_indices.len(),
            actual: a.len(),
        });
    }
    let mut x = vec![0.0; l.dim()];
    for (&i, v) in split.p_indices.iter().zip(a) {
        x[i] = *v;
    }
    Ok(x)
}

fn complex_ad(l: &LieAlgebraData, a1: &[f64], a2: &[f64]) -> Result<(DMatrix<Complex64>, Vec<usize>)> {
    let x1 = embed_p(l, a1)?;
    let x2 = embed_p(l, a2)?;
    let comm = l.bracket(&x1, &x2);
    let size = comm.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if size > COMMUTING_TOL {
        return Err(Error::Condition(format!("[a1, a2] has size {size:e}; inputs must commute")));
    }
    let m1 = l.ad(&x1);
    let m2 = l.ad(&x2);
    let m = DMatrix::from_fn(l.dim(), l.dim(), |i, j| Complex64::new(m1[(i, j)], m2[(i, j)]));
    let p = l.cartan_split().expect("checked above").p_indices.clone();
    Ok((m, p))
}

/// `tr_{C (x) p} (ad(a1 + i a2))^{2k}` for commuting `a1, a2` in `p`
/// (given in `p`-coordinates).
pub fn ad_power_trace(l: &LieAlgebraData, a1: &[f64], a2: &[f64], k: u32) -> Result<Complex64> {
    let (m, p) = complex_ad(l, a1, a2)?;
    let sq = &m * &m;
    let mut pow = DMatrix::<Complex64>::identity(l.dim(), l.dim());
    for _ in 0..k {
        pow = &pow * &sq;
    }
    Ok(p.iter().map(|&i| pow[(i, i)]).sum())
}

/// `1/2 sum_lambda lambda^{2k}` over the eigenvalues of `ad(a1 + i a2)` on the
/// complexified algebra.
pub fn ad_power_trace_from_roots(l: &LieAlgebraData, a1: &[f64], a2: &[f64], k: u32) -> Result<Complex64> {
    let (m, _) = complex_ad(l, a1, a2)?;
    let eig = nalgebra::Schur::new(m)
        .eigenvalues()
        .ok_or_else(|| Error::Convergence {
            order: 0,
            tail_bound: f64::NAN,
        })?;
    Ok(eig.iter().map(|z| z.powu(2 * k)).sum::<Complex64>() * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::lie::so3_plus_so3;
    use std::f64::consts::PI;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn sphere_and_flat_integrands() {
        let s = RiemannCurvature::constant(4, 1.0);
        let h = RiemannCurvature::constant(4, -1.0);
        let z = RiemannCurvature::zero(4);
        let rho = 0.7;
        for engine in [Engine::Spectral, Engine::Series] {
            let v = geodesic_tube_integrand(&s, &e(4, 0), &e(4, 2), rho, engine).unwrap();
            assert!((v - rho.sin().powi(2) * rho.cos()).abs() < 1e-12);
            let v = geodesic_tube_integrand(&h, &e(4, 0), &e(4, 2), rho, engine).unwrap();
            assert!((v - rho.sinh().powi(2) * rho.cosh()).abs() < 1e-12);
            let v = geodesic_tube_integrand(&z, &e(4, 0), &e(4, 2), rho, engine).unwrap();
            assert!((v - rho * rho).abs() < 1e-15);
        }
    }

    #[test]
    fn non_orthogonal_direction_rejected() {
        let s = RiemannCurvature::constant(3, 1.0);
        let u = crate::linalg::normalized(&[1.0, 1.0, 0.0]);
        assert!(matches!(
            geodesic_tube_integrand(&s, &e(3, 0), &u, 0.5, Engine::Spectral),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn flat_and_round_volumes() {
        let opts = TubeOptions::default();
        let v = geodesic_tube_volume_default(&RiemannCurvature::zero(3), &e(3, 2), 0.5, 2.0, &opts).unwrap();
        assert!((v.volume - PI * 0.25 * 2.0).abs() < 1e-13);
        let v = geodesic_tube_volume_default(&RiemannCurvature::constant(3, 1.0), &e(3, 0), 0.5, 1.0, &opts)
            .unwrap();
        assert!((v.volume - PI * 0.5f64.sin().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn compositions_are_counted() {
        assert_eq!(compositions(0).len(), 1);
        assert_eq!(compositions(4).len(), 8);
    }

    #[test]
    fn trig_examples() {
        let p = BivariatePolynomial::new(vec![(2, 0, 1.0), (0, 2, 1.0)]);
        assert_eq!(trig_poly_top_component(&p, 2), Complex64::new(0.0, 0.0));
        let p = BivariatePolynomial::new(vec![(2, 0, 1.0), (0, 2, -1.0)]);
        assert_eq!(trig_poly_top_component(&p, 2), Complex64::new(2.0, 0.0));
        let p = BivariatePolynomial::new(vec![(4, 0, 1.0), (2, 2, 2.0), (0, 4, 1.0), (1, 0, 5.0)]);
        assert_eq!(trig_poly_top_component(&p, 4), Complex64::new(0.0, 0.0));
        assert_eq!(p.degree(), 4);
    }

    #[test]
    fn zero_pair_has_zero_trace() {
        let l = so3_plus_so3();
        let z = [0.0; 4];
        assert_eq!(ad_power_trace(&l, &z, &z, 2).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn non_commuting_pair_rejected() {
        let l = so3_plus_so3();
        // X1 and X2 do not commute.
        let err = ad_power_trace(&l, &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 1).unwrap_err();
        assert!(matches!(err, Error::Condition(_)));
    }
}
