use nalgebra::DMatrix;
use proptest::prelude::*;
use tubelab::curvature::catalog::ModelSpace;
use tubelab::curvature::conditions::*;
use tubelab::linalg::{householder_to, normalized};
use tubelab::samples::{rng, unit_vector};
use tubelab::RiemannCurvature;

const CATALOG: [&str; 8] = ["s3", "h4", "e3", "cp2", "ch2", "s2xs2", "s2xh2", "dr4,3"];

fn space(name: &str) -> RiemannCurvature {
    name.parse::<ModelSpace>().unwrap().curvature().unwrap()
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Orthogonal matrix from a product of Householder reflections.
fn orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut g = rng(seed);
    let mut q = DMatrix::<f64>::identity(n, n);
    for k in 0..n {
        q = q * householder_to(&unit_vector(&mut g, n), k % n);
    }
    q
}

#[test]
fn catalog_symmetries_hold() {
    for name in CATALOG {
        let d = space(name).diagnostics();
        assert!(d.passes(1e-12), "{name}: {d:?}");
    }
}

#[test]
fn jacobi_operators_annihilate_direction_and_match_matrix_powers() {
    for name in CATALOG {
        let r = space(name);
        let n = r.dim();
        let mut g = rng(41);
        for _ in 0..20 {
            let u = unit_vector(&mut g, n);
            let op = r.jacobi_operator(&u).unwrap();
            let m = op.matrix();
            let ru = m * nalgebra::DVector::from_column_slice(&u);
            assert!(ru.norm() <= 1e-12 * m.norm().max(1.0), "{name}");
            assert!((op.eigen().reconstruct() - m).amax() <= 1e-10);
            let mut pow = DMatrix::<f64>::identity(n, n);
            for k in 1..=6 {
                pow = &pow * m;
                let s = op.power_sum(k).unwrap();
                assert!((s - pow.trace()).abs() <= 1e-9 * s.abs().max(1.0), "{name} k={k}");
            }
        }
    }
}

#[test]
fn jacobi_spectra_examples() {
    let r = space("s2xs2");
    let op = r.jacobi_operator(&unit(4, 0)).unwrap();
    assert_eq!(op.eigenvalues(), &[0.0, 0.0, 0.0, 1.0]);
    let mixed = normalized(&[1.0, 0.0, 1.0, 0.0]);
    assert!((r.jacobi_operator(&mixed).unwrap().power_sum(2).unwrap() - 0.5).abs() < 1e-15);
    assert!((space("s4").jacobi_operator(&unit(4, 2)).unwrap().power_sum(2).unwrap() - 3.0).abs() < 1e-15);
    assert_eq!(space("e3").jacobi_operator(&unit(3, 1)).unwrap().power_sum(3).unwrap(), 0.0);
}

#[test]
fn stein_dichotomy() {
    for name in ["s3", "s4", "h3", "h4", "cp2", "ch2"] {
        let r = space(name);
        let rep = stein_check(&r, &standard_probes(r.dim())).unwrap();
        assert!(rep.einstein_deviation <= 1e-10, "{name}");
        assert!(rep.two_stein_deviation <= 1e-10, "{name}: {}", rep.two_stein_deviation);
    }
    let s4 = stein_check(&space("s4"), &standard_probes(4)).unwrap();
    assert_eq!((s4.einstein_constant, s4.two_stein_constant), (3.0, 3.0));
    let p = stein_check(&space("s2xs2"), &standard_probes(4)).unwrap();
    assert!(p.einstein_deviation <= 1e-12);
    assert!(p.two_stein_deviation >= 0.49);
}

#[test]
fn pq_identities_on_catalog() {
    for name in ["s3", "e3", "cp2", "ch2", "h4", "s2xs2", "dr4,3"] {
        let r = space(name);
        let k = stein_check(&r, &standard_probes(r.dim())).unwrap().einstein_constant;
        let t = pq_tensors(&r);
        let res = pq_identity_check(&t, k);
        assert!(res.max() <= 1e-10, "{name}: {res:?}");
    }
}

#[test]
fn gray_vanhecke_sphere_expansion() {
    for n in 3..8 {
        let r = RiemannCurvature::constant(n, 1.0);
        let e = normalized(&(0..n).map(|i| (i as f64 + 1.0).sqrt()).collect::<Vec<_>>());
        let a = gray_vanhecke_a(&r, &e).unwrap();
        assert!((a + (n as f64 - 1.0) / 6.0).abs() <= 1e-14, "n={n}");
    }
    // (sin r / r)^2 = 1 - r^2/3 + 2 r^4/45 - ...
    let s3 = RiemannCurvature::constant(3, 1.0);
    let e = unit(3, 1);
    assert!((gray_vanhecke_a(&s3, &e).unwrap() + 1.0 / 3.0).abs() <= 1e-10);
    assert!((gray_vanhecke_b_einstein_geodesic(&s3, &e).unwrap() - 2.0 / 45.0).abs() <= 1e-10);
    let z = RiemannCurvature::zero(4);
    assert_eq!(gray_vanhecke_a(&z, &unit(4, 0)).unwrap(), 0.0);
    assert_eq!(gray_vanhecke_b_einstein_geodesic(&z, &unit(4, 0)).unwrap(), 0.0);
}

#[test]
fn coefficient_a_ignores_completion_of_e() {
    let r = space("cp2");
    let e = normalized(&[1.0, 2.0, 0.5, -1.0]);
    let a0 = gray_vanhecke_a(&r, &e).unwrap();
    // Rotating the whole tensor while carrying e along leaves A unchanged.
    for seed in 0..5 {
        let q = orthogonal(4, seed);
        let rr = r.rotated(&q);
        let qe: Vec<f64> = (q.transpose() * nalgebra::DVector::from_column_slice(&e)).iter().copied().collect();
        assert!((gray_vanhecke_a(&rr, &qe).unwrap() - a0).abs() <= 1e-12);
        assert!(
            (gray_vanhecke_b_einstein_geodesic(&rr, &qe).unwrap()
                - gray_vanhecke_b_einstein_geodesic(&r, &e).unwrap())
            .abs()
                <= 1e-12
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rotations_preserve_symmetries_and_invariants(seed in 0u64..10_000, which in 0usize..CATALOG.len()) {
        let r = space(CATALOG[which]);
        let q = orthogonal(r.dim(), seed);
        let rr = r.rotated(&q);
        prop_assert!(rr.diagnostics().passes(1e-12));
        prop_assert!((rr.scalar() - r.scalar()).abs() <= 1e-10 * r.scalar().abs().max(1.0));
        prop_assert!((rr.norm_sq() - r.norm_sq()).abs() <= 1e-10 * r.norm_sq().max(1.0));
    }

    #[test]
    fn sectional_curvature_of_cp2_is_pinched(a in prop::collection::vec(-1.0f64..1.0, 4), b in prop::collection::vec(-1.0f64..1.0, 4)) {
        let r = space("cp2");
        let x = normalized(&a);
        let mut y = b.clone();
        let c = tubelab::linalg::dot(&x, &y);
        for (yi, xi) in y.iter_mut().zip(&x) { *yi -= c * xi; }
        prop_assume!(tubelab::linalg::norm(&y) > 1e-3 && x.iter().all(|v| v.is_finite()));
        let y = normalized(&y);
        let k = r.sectional(&x, &y);
        prop_assert!((1.0 - 1e-12..=4.0 + 1e-12).contains(&k));
    }
}
