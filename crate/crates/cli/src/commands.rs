//! One function per subcommand. Each returns a finished [`Summary`].

use serde_json::json;
use tubelab::curvature::catalog::ModelSpace;
use tubelab::curvature::conditions::{gray_vanhecke_a, gray_vanhecke_b_einstein_geodesic, stein_check};
use tubelab::curvature::lie::so3_plus_so3;
use tubelab::curve_tube::{
    general_curve_tube_volume, hyperbolic_geodesic_h3, planar_arc_r3, small_circle_s3, CurveSpace, CurveSpec,
};
use tubelab::damek_ricci::{tube_surface_area, tube_volume_closed_form, DamekRicciSpace, GroupPoint};
use tubelab::linalg::normalized;
use tubelab::quadrature::{sphere_rule, unit_ball_volume};
use tubelab::samples::{rng, uniform_vector, unit_vector, unit_vectors, Sampler};
use tubelab::symmetric_tube::{
    ad_power_trace, ad_power_trace_from_roots, geodesic_tube_volume_default, k_integral_coefficient,
    standard_directions, tube_property_scan,
};

use crate::config::{parse_directions, resolve_space, DirectionSet, ExperimentConfig, ResolvedSpace, Tolerances};
use crate::error::{CliError, CliResult};
use crate::report::{Cell, Check, CsvTable, Summary};

fn radii_or(cfg: &ExperimentConfig, default: &[f64]) -> Vec<f64> {
    if cfg.tube.radii.is_empty() {
        default.to_vec()
    } else {
        cfg.tube.radii.clone()
    }
}

fn lengths_or(cfg: &ExperimentConfig, default: f64) -> Vec<f64> {
    if cfg.tube.lengths.is_empty() {
        vec![default]
    } else {
        cfg.tube.lengths.clone()
    }
}

fn resolve_checked(cfg: &ExperimentConfig, radii: &[f64]) -> CliResult<ResolvedSpace> {
    let s = resolve_space(&cfg.space)?;
    if let Some(k) = s.bound {
        cfg.check_radii(radii, k)?;
    }
    Ok(s)
}

fn geodesic_direction(cfg: &ExperimentConfig, n: usize) -> CliResult<Vec<f64>> {
    match &cfg.tube.direction {
        Some(d) if d.len() != n => Err(CliError::Config(format!("direction has {} entries, space has dimension {n}", d.len()))),
        Some(d) => {
            let u = normalized(d);
            if u.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config("direction must be nonzero".into()));
            }
            Ok(u)
        }
        None => {
            let mut e = vec![0.0; n];
            e[n - 1] = 1.0;
            Ok(e)
        }
    }
}

pub fn directions(cfg: &ExperimentConfig, n: usize) -> CliResult<Vec<Vec<f64>>> {
    Ok(match parse_directions(&cfg.tube.directions)? {
        DirectionSet::Standard => standard_directions(n),
        DirectionSet::Sampled(k) => unit_vectors(n, k, 0),
    })
}

fn push_vector_cells(cells: &mut Vec<Cell>, v: &[f64]) {
    cells.extend(v.iter().map(|x| Cell::F(*x)));
}

fn indexed_header(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn stein(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let space = resolve_space(&cfg.space)?;
    let r = &space.curvature;
    let n = r.dim();
    let probes = directions(cfg, n)?;
    let rep = stein_check(r, &probes)?;
    let mut s = Summary::new("stein", Some(space.label.clone()));
    s.value("einstein_constant", rep.einstein_constant);
    s.value("einstein_deviation", rep.einstein_deviation);
    s.value("two_stein_constant", rep.two_stein_constant);
    s.value("two_stein_deviation", rep.two_stein_deviation);
    s.check(Check::at_most("einstein_deviation", rep.einstein_deviation, cfg.tolerances.einstein));
    s.check(Check::at_most("two_stein_deviation", rep.two_stein_deviation, cfg.tolerances.two_stein));
    let ricci = r.ricci();
    let mut header = indexed_header("u", n);
    header.insert(0, "index".into());
    header.extend(["ricci_uu".into(), "trace_ru2".into()]);
    let mut t = CsvTable::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for (i, u) in probes.iter().enumerate() {
        let v = nalgebra::DVector::from_column_slice(u);
        let ruu = (v.transpose() * &ricci * &v)[(0, 0)];
        let tr2 = r.jacobi_operator(u)?.power_sum(2)?;
        let mut cells = vec![Cell::I(i as i64)];
        push_vector_cells(&mut cells, u);
        cells.extend([Cell::F(ruu), Cell::F(tr2)]);
        t.row(&cells);
    }
    s.table("stein.csv", t.finish());
    Ok(s.finish())
}

/// Closed-form geodesic tube volume where one is known.
pub fn closed_form_volume(model: &ModelSpace, r: f64, l: f64) -> CliResult<Option<f64>> {
    let n = model.dim();
    let ball = unit_ball_volume(n - 1);
    let m = n as i32 - 1;
    Ok(match model {
        ModelSpace::Euclidean(_) => Some(ball * r.powi(m) * l),
        ModelSpace::Sphere { kappa, .. } => {
            let s = kappa.sqrt();
            Some(ball * ((s * r).sin() / s).powi(m) * l)
        }
        ModelSpace::Hyperbolic { kappa, .. } => {
            let s = kappa.sqrt();
            Some(ball * ((s * r).sinh() / s).powi(m) * l)
        }
        ModelSpace::ComplexHyperbolicPlane => Some(tube_volume_closed_form(2, 1, r, l)?),
        ModelSpace::DamekRicci { p, q } => Some(tube_volume_closed_form(*p, *q, r, l)?),
        ModelSpace::ComplexProjectivePlane | ModelSpace::Product(..) => None,
    })
}

pub fn tube(cfg: &ExperimentConfig, compare_closed_form: bool) -> CliResult<Summary> {
    let radii = radii_or(cfg, &[0.5]);
    let lengths = lengths_or(cfg, 1.0);
    let space = resolve_checked(cfg, &radii)?;
    let e = geodesic_direction(cfg, space.dim())?;
    let opts = cfg.tube_options()?;
    if compare_closed_form {
        let known = match &space.model {
            Some(m) => closed_form_volume(m, 1.0, 1.0)?.is_some(),
            None => false,
        };
        if !known {
            return Err(CliError::Config(format!("no closed form for {}", space.label)));
        }
    }
    let mut s = Summary::new("tube", Some(space.label.clone()));
    let mut header = vec!["radius", "length", "volume", "error"];
    if compare_closed_form {
        header.extend(["closed_form", "relative_error"]);
    }
    let mut t = CsvTable::new(&header);
    let mut rows = Vec::new();
    for &r in &radii {
        for &l in &lengths {
            let v = geodesic_tube_volume_default(&space.curvature, &e, r, l, &opts)?;
            let mut cells = vec![Cell::F(r), Cell::F(l), Cell::F(v.volume), Cell::F(v.error)];
            let mut row = json!({"radius": r, "length": l, "volume": v.volume, "error": v.error});
            if compare_closed_form {
                let exact = closed_form_volume(space.model.as_ref().expect("checked"), r, l)?.expect("checked");
                let rel = ((v.volume - exact) / exact).abs();
                cells.extend([Cell::F(exact), Cell::F(rel)]);
                row["closed_form"] = json!(exact);
                row["relative_error"] = json!(rel);
                s.check(Check::at_most(format!("closed_form r={r} l={l}"), rel, cfg.tolerances.closed_form));
            }
            t.row(&cells);
            rows.push(row);
        }
    }
    s.data = json!({"direction": e, "rows": rows, "options": opts});
    s.table("tube.csv", t.finish());
    Ok(s.finish())
}

pub fn tube_scan(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let radii = radii_or(cfg, &[0.5]);
    let space = resolve_checked(cfg, &radii)?;
    let dirs = directions(cfg, space.dim())?;
    let opts = cfg.tube_options()?;
    let mut s = Summary::new("tube-scan", Some(space.label.clone()));
    let mut reports = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let rep = tube_property_scan(&space.curvature, r, &dirs, &opts)?;
        s.check(Check::at_most(format!("spread r={r}"), rep.spread, cfg.tolerances.spread));
        s.table(format!("tube-scan-{i}.csv"), rep.to_csv());
        reports.push(rep);
    }
    s.data = serde_json::to_value(&reports).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(s.finish())
}

/// Curve selection for `tube-curve`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    /// `circle`, `arc` or `geodesic`; ignored when `file` is set.
    pub kind: String,
    pub kappa: f64,
    pub length: Option<f64>,
    pub panels: usize,
    pub file: Option<std::path::PathBuf>,
}

impl Default for CurveRequest {
    fn default() -> Self {
        CurveRequest {
            kind: "circle".into(),
            kappa: 0.5,
            length: None,
            panels: 4,
            file: None,
        }
    }
}

fn build_curve(space: CurveSpace, req: &CurveRequest) -> CliResult<CurveSpec> {
    if let Some(path) = &req.file {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        return Ok(CurveSpec::from_csv(&text, space)?);
    }
    if req.panels == 0 {
        return Err(CliError::Config("panels must be positive".into()));
    }
    let unsupported = || CliError::Config(format!("curve {:?} is not available in {space:?}", req.kind));
    Ok(match (req.kind.as_str(), space) {
        ("circle", CurveSpace::Sphere(3)) => small_circle_s3(req.kappa, req.length, req.panels)?,
        ("geodesic", CurveSpace::Sphere(3)) => small_circle_s3(0.0, req.length, req.panels)?,
        ("circle" | "arc", CurveSpace::Euclidean(3)) => {
            let l = req.length.unwrap_or(2.0);
            planar_arc_r3(req.kappa, l, req.panels)?
        }
        ("geodesic", CurveSpace::Euclidean(3)) => planar_arc_r3(0.0, req.length.unwrap_or(2.0), req.panels)?,
        ("geodesic", CurveSpace::Hyperbolic(3)) => hyperbolic_geodesic_h3(req.length.unwrap_or(1.0), req.panels)?,
        _ => return Err(unsupported()),
    })
}

/// `omega_{n-1} sn_k(r)^{n-1}` per unit length.
fn constant_curvature_tube(n: usize, kappa: f64, r: f64) -> f64 {
    let sn = if kappa > 0.0 {
        (kappa.sqrt() * r).sin() / kappa.sqrt()
    } else if kappa < 0.0 {
        ((-kappa).sqrt() * r).sinh() / (-kappa).sqrt()
    } else {
        r
    };
    unit_ball_volume(n - 1) * sn.powi(n as i32 - 1)
}

pub fn tube_curve(cfg: &ExperimentConfig, req: &CurveRequest) -> CliResult<Summary> {
    let name = cfg.space.name.clone().unwrap_or_else(|| "s3".into());
    if cfg.space.tensor.is_some() || cfg.space.p.is_some() {
        return Err(CliError::Config("curve tubes need a constant-curvature model e<n>, s<n> or h<n>".into()));
    }
    let space = CurveSpace::parse(&name)?;
    let radii = radii_or(cfg, &[0.3]);
    cfg.check_radii(&radii, space.kappa().max(0.0))?;
    let curve = build_curve(space, req)?;
    let opts = cfg.tube_options()?;
    let mut s = Summary::new("tube-curve", Some(name));
    let mut t = CsvTable::new(&[
        "radius",
        "length",
        "volume",
        "error",
        "geodesic_volume",
        "relative_error",
        "max_second_term",
    ]);
    for &r in &radii {
        let v = general_curve_tube_volume(&curve, r, &opts)?;
        let exact = constant_curvature_tube(space.dim(), space.kappa(), r) * v.length;
        let rel = ((v.volume - exact) / exact).abs();
        t.row(&[
            Cell::F(r),
            Cell::F(v.length),
            Cell::F(v.volume),
            Cell::F(v.error),
            Cell::F(exact),
            Cell::F(rel),
            Cell::F(v.max_second_term),
        ]);
        s.check(Check::at_most(format!("hotelling r={r}"), rel, cfg.tolerances.hotelling));
        s.check(Check::at_most(format!("second_term r={r}"), v.max_second_term, cfg.tolerances.second_term));
        s.value(&format!("volume r={r}"), v.volume);
    }
    s.value("length", curve.length());
    s.table("tube-curve.csv", t.finish());
    s.table("tube-curve-samples.csv", curve.to_csv());
    Ok(s.finish())
}

fn random_point(s: &DamekRicciSpace, g: &mut Sampler) -> CliResult<GroupPoint> {
    Ok(GroupPoint::new(
        uniform_vector(g, s.p(), 1.0),
        uniform_vector(g, s.q(), 1.0),
        uniform_vector(g, 1, 1.0)[0],
    )?)
}

fn split_unit(s: &DamekRicciSpace, g: &mut Sampler) -> (Vec<f64>, Vec<f64>) {
    let u = unit_vector(g, s.p() + s.q());
    (u[..s.p()].to_vec(), u[s.p()..].to_vec())
}

/// Heisenberg axioms, group associativity, left invariance of the metric,
/// unit speed, Euler-Arnold residual and ellipsoid membership on fixed samples.
pub fn damek_ricci_structure(p: usize, q: usize, tol: &Tolerances) -> CliResult<Vec<Check>> {
    let s = DamekRicciSpace::build(p, q)?;
    let tag = format!("({p},{q})");
    let mut checks = vec![Check::at_most(format!("axioms {tag}"), s.algebra().axiom_residuals().max(), tol.axioms)];

    let mut g = rng(101);
    let mut assoc = 0.0_f64;
    let mut inv = 0.0_f64;
    for _ in 0..50 {
        let (a, b, c) = (random_point(&s, &mut g)?, random_point(&s, &mut g)?, random_point(&s, &mut g)?);
        let left = s.multiply(&s.multiply(&a, &b)?, &c)?;
        let right = s.multiply(&a, &s.multiply(&b, &c)?)?;
        assoc = assoc.max(left.distance(&right));
        let x = GroupPoint::from_slice(&uniform_vector(&mut g, s.dim(), 1.0), p, q);
        let y = GroupPoint::from_slice(&uniform_vector(&mut g, s.dim(), 1.0), p, q);
        let base = s.metric_at(&b, &x, &y);
        let moved = s.metric_at(
            &s.multiply(&a, &b)?,
            &s.left_translate_vector(&a, &x),
            &s.left_translate_vector(&a, &y),
        );
        inv = inv.max((base - moved).abs() / (1.0 + base.abs()));
    }
    checks.push(Check::at_most(format!("associativity {tag}"), assoc, tol.associativity));
    checks.push(Check::at_most(format!("left_invariance {tag}"), inv, tol.left_invariance));

    let mut g = rng(102);
    let ts: Vec<f64> = (0..9).map(|i| 0.25 * i as f64).collect();
    let mut speed = 0.0_f64;
    let mut ea = 0.0_f64;
    for _ in 0..3 {
        let (v, z) = split_unit(&s, &mut g);
        for &t in &ts {
            speed = speed.max((s.geodesic_speed(&v, &z, t)? - 1.0).abs());
        }
        ea = ea.max(s.euler_arnold_residual(&v, &z, &ts)?);
    }
    checks.push(Check::at_most(format!("unit_speed {tag}"), speed, tol.unit_speed));
    checks.push(Check::at_most(format!("euler_arnold {tag}"), ea, tol.euler_arnold));

    let mut g = rng(103);
    let mut ell = 0.0_f64;
    for i in 0..200 {
        let (v, z) = split_unit(&s, &mut g);
        let radius = 0.1 + 0.01 * i as f64;
        let pt = s.cross_section_point(&v, &z, radius)?;
        ell = ell.max(s.ellipsoid_residual(&pt, radius).abs());
    }
    checks.push(Check::at_most(format!("ellipsoid {tag}"), ell, tol.ellipsoid));
    Ok(checks)
}

/// Relative gap between the closed-form area and a Richardson-extrapolated
/// central difference of the closed-form volume.
pub fn area_derivative_residual(p: usize, q: usize, r: f64) -> CliResult<f64> {
    let h = 1e-3;
    let d = |h: f64| -> CliResult<f64> {
        Ok((tube_volume_closed_form(p, q, r + h, 1.0)? - tube_volume_closed_form(p, q, r - h, 1.0)?) / (2.0 * h))
    };
    let fd = (4.0 * d(h / 2.0)? - d(h)?) / 3.0;
    let area = tube_surface_area(p, q, r, 1.0)?;
    Ok(((fd - area) / area).abs())
}

pub fn damek_ricci(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let (p, q) = match (&cfg.space.name, cfg.space.p, cfg.space.q) {
        (None, Some(p), Some(q)) => (p, q),
        (None, None, None) => (2, 1),
        (Some(name), None, None) => match name.parse::<ModelSpace>()? {
            ModelSpace::DamekRicci { p, q } => (p, q),
            ModelSpace::ComplexHyperbolicPlane => (2, 1),
            other => return Err(CliError::Config(format!("{other} is not a Damek-Ricci space"))),
        },
        _ => return Err(CliError::Config("select the Damek-Ricci space by p and q".into())),
    };
    let radii = radii_or(cfg, &[0.7]);
    let lengths = lengths_or(cfg, 1.0);
    let mut s = Summary::new("damek-ricci", Some(format!("dr{p},{q}")));
    for c in damek_ricci_structure(p, q, &cfg.tolerances)? {
        s.check(c);
    }
    let mut t = CsvTable::new(&["radius", "length", "volume", "area", "area_relative_gap"]);
    for &r in &radii {
        let gap = area_derivative_residual(p, q, r)?;
        s.check(Check::at_most(format!("area_derivative r={r}"), gap, cfg.tolerances.area_derivative));
        for &l in &lengths {
            t.row(&[
                Cell::F(r),
                Cell::F(l),
                Cell::F(tube_volume_closed_form(p, q, r, l)?),
                Cell::F(tube_surface_area(p, q, r, l)?),
                Cell::F(gap),
            ]);
        }
    }
    s.table("damek-ricci.csv", t.finish());
    let space = DamekRicciSpace::build(p, q)?;
    let (v, z) = split_unit(&space, &mut rng(104));
    let ts: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
    s.table("damek-ricci-geodesic.csv", space.geodesic_csv(&v, &z, &ts)?);
    s.data = json!({"p": p, "q": q, "dim": space.dim(), "geodesic_v": v, "geodesic_z": z});
    Ok(s.finish())
}

pub fn coeffs(cfg: &ExperimentConfig) -> CliResult<Summary> {
    let space = resolve_space(&cfg.space)?;
    let r = &space.curvature;
    let n = r.dim();
    let e = geodesic_direction(cfg, n)?;
    let mut s = Summary::new("coeffs", Some(space.label.clone()));
    let a = gray_vanhecke_a(r, &e)?;
    s.value("A", a);
    let b = match gray_vanhecke_b_einstein_geodesic(r, &e) {
        Ok(b) => {
            s.value("B", b);
            Some(b)
        }
        Err(tubelab::Error::Condition(_)) => None,
        Err(err) => return Err(err.into()),
    };
    // (sn_k(r) / r)^m = 1 - m k r^2 / 6 + (m / 120 + m (m - 1) / 72) k^2 r^4 + ...
    let kappa = match &space.model {
        Some(ModelSpace::Sphere { kappa, .. }) => Some(*kappa),
        Some(ModelSpace::Hyperbolic { kappa, .. }) => Some(-*kappa),
        Some(ModelSpace::Euclidean(_)) => Some(0.0),
        _ => None,
    };
    if let Some(k) = kappa {
        let m = (n - 1) as f64;
        let a_exact = -m * k / 6.0;
        let b_exact = (m / 120.0 + m * (m - 1.0) / 72.0) * k * k;
        s.value("A_expected", a_exact);
        s.value("B_expected", b_exact);
        s.check(Check::at_most("A", (a - a_exact).abs(), cfg.tolerances.coefficient));
        if let Some(b) = b {
            s.check(Check::at_most("B", (b - b_exact).abs(), cfg.tolerances.coefficient));
        }
    }
    let rule = sphere_rule(n, &e, cfg.quadrature.sphere_degree)?;
    let mut t = CsvTable::new(&["k", "integral_coefficient"]);
    let mut ks = Vec::new();
    for k in 0..=cfg.series.order {
        let c = k_integral_coefficient(r, &e, k, &rule)?;
        t.row(&[Cell::I(k as i64), Cell::F(c)]);
        ks.push(c);
    }
    s.table("coeffs.csv", t.finish());
    s.data = json!({"direction": e, "integral_coefficients": ks, "einstein": b.is_some()});
    Ok(s.finish())
}

pub fn quad_audit(cfg: &ExperimentConfig, dims: &[usize], write_nodes: bool) -> CliResult<Summary> {
    let degree = cfg.quadrature.sphere_degree;
    let mut s = Summary::new("quad-audit", None);
    let mut t = CsvTable::new(&["dim", "degree", "nodes", "worst_even_relative", "worst_odd_absolute"]);
    for &n in dims {
        let normal = normalized(&(1..=n).map(|i| i as f64).collect::<Vec<_>>());
        let rule = sphere_rule(n, &normal, degree)?;
        let (even, odd) = rule.exactness_audit(degree);
        s.check(Check::at_most(format!("even n={n}"), even, cfg.tolerances.exactness_even));
        s.check(Check::at_most(format!("odd n={n}"), odd, cfg.tolerances.exactness_odd));
        t.row(&[
            Cell::I(n as i64),
            Cell::I(degree as i64),
            Cell::I(rule.len() as i64),
            Cell::F(even),
            Cell::F(odd),
        ]);
        if write_nodes {
            s.table(format!("quad-nodes-{n}.csv"), rule.to_csv());
        }
    }
    s.table("quad-audit.csv", t.finish());
    Ok(s.finish())
}

pub const DEFAULT_A1: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
pub const DEFAULT_A2: [f64; 4] = [0.0, 0.0, 0.6, 0.8];

/// Traces of `(ad(a1 + i a2))^{2k}` on `so(3) + so(3)`, checked against the
/// root sums and for being nonzero.
pub fn ad_trace_checks(a1: &[f64], a2: &[f64], k_max: u32, tol: &Tolerances) -> CliResult<(Vec<Check>, CsvTable)> {
    let l = so3_plus_so3();
    let mut checks = Vec::new();
    let mut t = CsvTable::new(&["k", "trace_re", "trace_im", "roots_re", "roots_im", "difference"]);
    for k in 1..=k_max {
        let tr = ad_power_trace(&l, a1, a2, k)?;
        let roots = ad_power_trace_from_roots(&l, a1, a2, k)?;
        let diff = (tr - roots).norm();
        checks.push(Check::at_most(format!("roots k={k}"), diff, tol.ad_trace));
        checks.push(Check::at_least(format!("nonzero k={k}"), tr.norm(), tol.ad_trace_floor.max(f64::MIN_POSITIVE)));
        t.row(&[
            Cell::I(k as i64),
            Cell::F(tr.re),
            Cell::F(tr.im),
            Cell::F(roots.re),
            Cell::F(roots.im),
            Cell::F(diff),
        ]);
    }
    Ok((checks, t))
}

pub fn ad_trace(cfg: &ExperimentConfig, a1: &[f64], a2: &[f64], k_max: u32) -> CliResult<Summary> {
    if k_max == 0 {
        return Err(CliError::Config("k-max must be at least 1".into()));
    }
    let mut s = Summary::new("ad-trace", Some("so3+so3".into()));
    let (checks, t) = ad_trace_checks(a1, a2, k_max, &cfg.tolerances)?;
    for c in checks {
        s.check(c);
    }
    s.table("ad-trace.csv", t.finish());
    s.data = json!({"a1": a1, "a2": a2});
    Ok(s.finish())
}
