use std::f64::consts::PI;

use proptest::prelude::*;
use tubelab::curvature::catalog::ModelSpace;
use tubelab::curve_tube::*;
use tubelab::linalg::normalized;
use tubelab::quadrature::{sphere_rule, unit_ball_volume};
use tubelab::samples::{rng, unit_vector, unit_vector_orthogonal_to};
use tubelab::symmetric_tube::{geodesic_tube_volume_default, TubeOptions};
use tubelab::RiemannCurvature;

fn space(name: &str) -> RiemannCurvature {
    name.parse::<ModelSpace>().unwrap().curvature().unwrap()
}

#[test]
fn boundary_form_matches_rk4_shooting() {
    for name in ["s3", "h3", "cp2"] {
        let r = space(name);
        let n = r.dim();
        let mut g = rng(31);
        for _ in 0..6 {
            let what = unit_vector(&mut g, n);
            let u = unit_vector(&mut g, n);
            for rho in [0.3, 0.8] {
                let w: Vec<f64> = what.iter().map(|x| rho * x).collect();
                let jac = r.jacobi_operator(&what).unwrap().matrix().clone();
                let oracle = shooting_jacobi_form(&jac, &u, rho, 1e-3).unwrap();
                let got = tilde_jacobi_form(&r, &w, &u).unwrap();
                assert!((got - oracle).abs() <= 1e-6, "{name}: {got} vs {oracle}");
            }
        }
    }
}

#[test]
fn datri_term_vanishes_on_symmetric_spaces() {
    for name in ["s4", "h3"] {
        let r = space(name);
        let n = r.dim();
        let mut g = rng(32);
        for _ in 0..20 {
            let u = unit_vector(&mut g, n);
            let v = unit_vector_orthogonal_to(&mut g, &u);
            let rule = sphere_rule(n, &u, 12).unwrap();
            let val = datri_second_term(&r, &u, &v, 0.8, &rule, 32).unwrap();
            assert!(val.abs() <= 1e-10, "{name}: {val}");
        }
    }
    let z = RiemannCurvature::zero(3);
    let rule = sphere_rule(3, &[0.0, 0.0, 1.0], 12).unwrap();
    let val = datri_second_term(&z, &[0.0, 0.0, 1.0], &[0.6, 0.8, 0.0], 0.5, &rule, 16).unwrap();
    assert!(val.abs() <= 1e-14);
}

#[test]
fn omega_is_even_for_catalog_tensors() {
    for name in ["s3", "h4", "cp2", "ch2", "s2xs2", "dr4,3"] {
        let r = space(name);
        let mut g = rng(33);
        for _ in 0..20 {
            let w: Vec<f64> = unit_vector(&mut g, r.dim()).iter().map(|x| 0.6 * x).collect();
            let mw: Vec<f64> = w.iter().map(|x| -x).collect();
            assert_eq!(omega_density(&r, &w).unwrap(), omega_density(&r, &mw).unwrap());
        }
    }
}

#[test]
fn geodesic_curve_matches_geodesic_tube() {
    let opts = TubeOptions::default();
    let r = 0.4;
    let curve = small_circle_s3(0.0, Some(1.3), 2).unwrap();
    let v = general_curve_tube_volume(&curve, r, &opts).unwrap();
    let s3 = RiemannCurvature::constant(3, 1.0);
    let g = geodesic_tube_volume_default(&s3, &[0.0, 0.0, 1.0], r, 1.3, &opts).unwrap();
    assert!(((v.volume - g.volume) / g.volume).abs() <= 1e-8);
    let curve = hyperbolic_geodesic_h3(0.9, 2).unwrap();
    let v = general_curve_tube_volume(&curve, r, &opts).unwrap();
    let exact = unit_ball_volume(2) * r.sinh().powi(2) * 0.9;
    assert!(((v.volume - exact) / exact).abs() <= 1e-8);
}

#[test]
fn small_circle_tube_has_geodesic_volume() {
    let opts = TubeOptions::default();
    let curve = small_circle_s3(0.5, None, 4).unwrap();
    let v = general_curve_tube_volume(&curve, 0.3, &opts).unwrap();
    let exact = PI * 0.3f64.sin().powi(2) * curve.length();
    assert!(((v.volume - exact) / exact).abs() <= 1e-6);
    assert!(v.max_second_term <= 1e-10);
    // Doubling the panels does not move the result.
    let finer = general_curve_tube_volume(&small_circle_s3(0.5, None, 8).unwrap(), 0.3, &opts).unwrap();
    assert!((finer.volume - v.volume).abs() <= 1e-10);
}

#[test]
fn flat_tubes_depend_only_on_length() {
    let opts = TubeOptions::default();
    let seg = general_curve_tube_volume(&planar_arc_r3(0.0, 2.0, 2).unwrap(), 0.2, &opts).unwrap();
    let arc = general_curve_tube_volume(&planar_arc_r3(1.5, 2.0, 4).unwrap(), 0.2, &opts).unwrap();
    assert!((seg.volume - arc.volume).abs() <= 1e-8 * seg.volume);
    assert!((seg.volume - PI * 0.04 * 2.0).abs() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn omega_even_and_bounded_on_spheres(x in prop::collection::vec(-1.0f64..1.0, 4), s in 0.05f64..2.5) {
        let v = normalized(&x);
        prop_assume!(v.iter().all(|c| c.is_finite()));
        let w: Vec<f64> = v.iter().map(|c| s * c).collect();
        let mw: Vec<f64> = w.iter().map(|c| -c).collect();
        let r = RiemannCurvature::constant(4, 1.0);
        let o = omega_density(&r, &w).unwrap();
        prop_assert_eq!(o, omega_density(&r, &mw).unwrap());
        prop_assert!((o - (s.sin() / s).powi(3)).abs() < 1e-13);
    }

    #[test]
    fn boundary_form_flat_is_inverse_radius(x in prop::collection::vec(-1.0f64..1.0, 3), s in 0.05f64..5.0) {
        let v = normalized(&x);
        prop_assume!(v.iter().all(|c| c.is_finite()));
        let w: Vec<f64> = v.iter().map(|c| s * c).collect();
        let r = RiemannCurvature::zero(3);
        let val = tilde_jacobi_form(&r, &w, &[0.0, 1.0, 0.0]).unwrap();
        prop_assert!((val - 1.0 / s).abs() < 1e-12 / s);
    }
}
