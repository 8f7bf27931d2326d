use std::f64::consts::PI;

use num_complex::Complex64;
use tubelab::curvature::catalog::ModelSpace;
use tubelab::curvature::conditions::{gray_vanhecke_a, gray_vanhecke_b_einstein_geodesic};
use tubelab::curvature::lie::so3_plus_so3;
use tubelab::damek_ricci::tube_volume_closed_form;
use tubelab::linalg::normalized;
use tubelab::quadrature::{sphere_rule, unit_ball_volume};
use tubelab::samples::unit_vectors;
use tubelab::special::{adaptive_log_det_sinc, matrix_trig};
use tubelab::symmetric_tube::*;
use tubelab::RiemannCurvature;

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn space(name: &str) -> RiemannCurvature {
    name.parse::<ModelSpace>().unwrap().curvature().unwrap()
}

fn opts(degree: usize) -> TubeOptions {
    TubeOptions {
        sphere_degree: degree,
        ..TubeOptions::default()
    }
}

#[test]
fn constant_curvature_oracles() {
    for n in [3, 4, 7] {
        let degree = if n == 7 { 6 } else { 12 };
        let e = normalized(&(1..=n).map(|i| i as f64).collect::<Vec<_>>());
        for r in [0.25, 0.5, 1.0] {
            for engine in [Engine::Spectral, Engine::Series] {
                let o = TubeOptions { engine, ..opts(degree) };
                let s = geodesic_tube_volume_default(&RiemannCurvature::constant(n, 1.0), &e, r, 1.5, &o).unwrap();
                let exact = unit_ball_volume(n - 1) * r.sin().powi(n as i32 - 1) * 1.5;
                assert!(((s.volume - exact) / exact).abs() <= 1e-8, "S^{n} r={r}");
                let h = geodesic_tube_volume_default(&RiemannCurvature::constant(n, -1.0), &e, r, 1.5, &o).unwrap();
                let exact = unit_ball_volume(n - 1) * r.sinh().powi(n as i32 - 1) * 1.5;
                assert!(((h.volume - exact) / exact).abs() <= 1e-8, "H^{n} r={r}");
                assert!(s.error >= 0.0 && h.error >= 0.0);
            }
        }
    }
}

#[test]
fn complex_hyperbolic_tube_matches_damek_ricci_closed_form() {
    let r = space("ch2");
    // The closed form is the tube about the orbit of A, the last basis vector.
    for radius in [0.25, 0.5, 0.75] {
        let v = geodesic_tube_volume_default(&r, &unit(4, 3), radius, 1.0, &TubeOptions::default()).unwrap();
        let exact = tube_volume_closed_form(2, 1, radius, 1.0).unwrap();
        assert!(((v.volume - exact) / exact).abs() <= 1e-6, "r={radius}: {} vs {exact}", v.volume);
    }
}

#[test]
fn series_and_spectral_integrands_agree_within_tail() {
    for name in ["s3", "h4", "cp2", "ch2", "s2xs2"] {
        let r = space(name);
        let n = r.dim();
        let e = normalized(&vec![1.0; n]);
        let rule = sphere_rule(n, &e, 6).unwrap();
        for u in rule.nodes() {
            let op = r.jacobi_operator(u).unwrap();
            for rho in [0.1, 0.5, 0.75] {
                let series = adaptive_log_det_sinc(&op, rho, 1e-10).unwrap();
                let spectral = matrix_trig(&op, rho).unwrap().det_sinc();
                assert!((series.value - spectral).abs() <= series.tail_bound + 1e-15, "{name}");
                let a = geodesic_tube_integrand(&r, &e, u, rho, Engine::Spectral).unwrap();
                let b = geodesic_tube_integrand(&r, &e, u, rho, Engine::Series).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }
}

#[test]
fn isotropy_of_constant_curvature() {
    let dirs = unit_vectors(4, 10, 21);
    let rep = tube_property_scan(&RiemannCurvature::constant(4, 1.0), 0.5, &dirs, &TubeOptions::default()).unwrap();
    assert!(rep.spread <= 1e-8, "{}", rep.spread);
    assert_eq!(rep.per_direction.len(), 10);
    assert!(rep.per_direction.iter().all(|d| d.value > 0.0 && d.error >= 0.0));
}

#[test]
fn harmonic_spaces_have_direction_independent_tubes() {
    for name in ["s4", "h4", "ch2"] {
        let r = space(name);
        let rep = tube_property_scan(&r, 0.5, &standard_directions(4), &TubeOptions::default()).unwrap();
        assert!(rep.spread <= 1e-6, "{name}: {}", rep.spread);
    }
}

#[test]
fn product_of_spheres_tube_depends_on_direction() {
    // The spread is driven by the r^4 coefficient and is small at r = 0.5,
    // but it is well above the harmonic level.
    let r = space("s2xs2");
    let dirs = vec![unit(4, 0), normalized(&[1.0, 0.0, 1.0, 0.0])];
    let rep = tube_property_scan(&r, 0.5, &dirs, &TubeOptions::default()).unwrap();
    assert!(rep.spread > 1e-6, "{}", rep.spread);
    assert!(rep.per_direction[0].value > rep.per_direction[1].value);
    let csv = rep.to_csv();
    assert!(csv.starts_with("index,e0,e1,e2,e3,volume,error,spread"));
}

#[test]
fn guard_violation_is_reported() {
    let r = RiemannCurvature::constant(3, 1.0);
    let err = geodesic_tube_volume_default(&r, &unit(3, 0), 3.5, 1.0, &TubeOptions::default()).unwrap_err();
    assert!(matches!(err, tubelab::Error::Guard { .. }));
}

/// Coefficients of exp(sum_j a_j x^j) by the power-series recurrence.
fn exp_series(a: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for m in 1..=order {
        let s: f64 = (1..=m).map(|j| j as f64 * a[j] * out[m - j]).sum();
        out.push(s / m as f64);
    }
    out
}

#[test]
fn k_coefficient_matches_series_product() {
    let b = tubelab::special::cot_table().values();
    let sums = [1.3, -0.4, 2.2, 0.7, -1.1, 0.3];
    let moments = [1.0, 0.6, -0.2, 0.9, 0.1, -0.5, 0.2];
    let mut a = vec![0.0];
    a.extend((1..=6).map(|j| b[j] / (2.0 * j as f64) * sums[j - 1]));
    let e = exp_series(&a, 6);
    for k in 0..=6 {
        let oracle: f64 = (0..=k).map(|l| b[l] * moments[l] * e[k - l]).sum();
        let got = k_coefficient_from_traces(&sums, &moments, k);
        assert!((got - oracle).abs() < 1e-14, "k={k}");
    }
}

/// Integral over the sphere of the reduced integrand at radius rho.
fn reduced_sphere_integral(r: &RiemannCurvature, e: &[f64], rho: f64, degree: usize) -> f64 {
    let rule = sphere_rule(r.dim(), e, degree).unwrap();
    rule.integrate(|u| reduced_integrand(r, e, u, rho, Engine::Spectral).unwrap()).unwrap()
}

#[test]
fn k_integral_examples() {
    let z = RiemannCurvature::zero(4);
    let e = unit(4, 1);
    let rule = sphere_rule(4, &e, 12).unwrap();
    for k in 1..5 {
        assert_eq!(k_integral_coefficient(&z, &e, k, &rule).unwrap(), 0.0);
    }
    // S^3: the reduced integral is 2 pi (sin rho / rho) cos rho; c_1 by Richardson differences.
    let s3 = RiemannCurvature::constant(3, 1.0);
    let e = normalized(&[0.3, -0.4, 0.5]);
    let rule = sphere_rule(3, &e, 12).unwrap();
    let c1 = k_integral_coefficient(&s3, &e, 1, &rule).unwrap();
    let f0 = reduced_sphere_integral(&s3, &e, 0.0, 12);
    let d = |h: f64| (reduced_sphere_integral(&s3, &e, h, 12) - f0) / (h * h);
    let h = 1e-2;
    let fd = (4.0 * d(h / 2.0) - d(h)) / 3.0;
    assert!((c1 - fd).abs() <= 1e-8, "{c1} vs {fd}");
    // Closed form: (sin rho / rho) cos rho -> -2/3 rho^2 times 2 pi.
    assert!((c1 + 2.0 * PI * 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn k_integral_distinguishes_directions_on_product() {
    let r = space("s2xs2");
    let e1 = unit(4, 0);
    let e2 = normalized(&[1.0, 0.0, 1.0, 0.0]);
    let c1 = k_integral_coefficient(&r, &e1, 2, &sphere_rule(4, &e1, 12).unwrap()).unwrap();
    let c2 = k_integral_coefficient(&r, &e2, 2, &sphere_rule(4, &e2, 12).unwrap()).unwrap();
    assert!((c1 - c2).abs() >= 1e-4, "{c1} vs {c2}");
    // k = 1 is Ricci-determined and so agrees for an Einstein product.
    let d1 = k_integral_coefficient(&r, &e1, 1, &sphere_rule(4, &e1, 12).unwrap()).unwrap();
    let d2 = k_integral_coefficient(&r, &e2, 1, &sphere_rule(4, &e2, 12).unwrap()).unwrap();
    assert!((d1 - d2).abs() < 1e-12);
}

#[test]
fn taylor_polynomial_reproduces_reduced_integral() {
    for name in ["s3", "cp2", "s2xs2"] {
        let r = space(name);
        let n = r.dim();
        let e = normalized(&(0..n).map(|i| 1.0 + i as f64 * 0.3).collect::<Vec<_>>());
        let rule = sphere_rule(n, &e, 12).unwrap();
        let c: Vec<f64> = (0..=4).map(|k| k_integral_coefficient(&r, &e, k, &rule).unwrap()).collect();
        for rho in [0.05_f64, 0.1, 0.2] {
            let poly: f64 = c.iter().enumerate().map(|(k, ck)| ck * rho.powi(2 * k as i32)).sum();
            let f = reduced_sphere_integral(&r, &e, rho, 12);
            assert!((poly - f).abs() <= 1e-6 * f.abs(), "{name} rho={rho}");
        }
    }
}

fn slope(r: &RiemannCurvature, e: &[f64]) -> f64 {
    let n = r.dim();
    let a = gray_vanhecke_a(r, e).unwrap();
    let b = gray_vanhecke_b_einstein_geodesic(r, e).unwrap();
    let rule = sphere_rule(n, e, 12).unwrap();
    let radii = [0.02, 0.05, 0.1, 0.2];
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .map(|&rad| {
            let v = geodesic_tube_volume(r, e, rad, 1.0, &rule, &TubeOptions::default()).unwrap();
            let ratio = v.volume / (unit_ball_volume(n - 1) * rad.powi(n as i32 - 1));
            let res = (ratio - 1.0 - a * rad * rad - b * rad.powi(4)).abs();
            (rad.ln(), res.ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

#[test]
fn gray_vanhecke_residual_is_sixth_order() {
    let s3 = RiemannCurvature::constant(3, 1.0);
    let k = slope(&s3, &normalized(&[1.0, 2.0, 2.0]));
    assert!(k >= 5.5, "S^3 slope {k}");
    let cp2 = space("cp2");
    let k = slope(&cp2, &normalized(&[1.0, 0.5, -0.3, 0.2]));
    assert!(k >= 5.5, "CP^2 slope {k}");
}

#[test]
fn ad_power_trace_matches_roots() {
    let l = so3_plus_so3();
    // p-coordinates: X1, X2, Y1, Y2.
    let a1 = [1.0, 0.0, 0.0, 0.0];
    let a2 = [0.0, 0.0, 0.6, 0.8];
    for k in 1..=4 {
        let t = ad_power_trace(&l, &a1, &a2, k).unwrap();
        let roots = ad_power_trace_from_roots(&l, &a1, &a2, k).unwrap();
        assert!((t - roots).norm() <= 1e-10, "k={k}");
        // Equal factors: (-1)^k + 1.
        let expect = if k % 2 == 0 { 2.0 } else { 0.0 };
        assert!((t - Complex64::new(expect, 0.0)).norm() < 1e-12, "k={k}: {t}");
    }
}

#[test]
fn damek_ricci_4_3_tube_integral_matches_closed_form() {
    // Non-symmetric, so the integral is a cross-check rather than an identity.
    let r = space("dr4,3");
    for radius in [0.3, 0.6] {
        let v = geodesic_tube_volume_default(&r, &unit(8, 7), radius, 1.0, &opts(6)).unwrap();
        let exact = tube_volume_closed_form(4, 3, radius, 1.0).unwrap();
        assert!(((v.volume - exact) / exact).abs() <= 1e-8, "r={radius}");
    }
}
