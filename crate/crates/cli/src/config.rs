//! Experiment configuration: a TOML file with sections, overridden by flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tubelab::curvature::catalog::ModelSpace;
use tubelab::curve_tube::CONJUGATE_MARGIN;
use tubelab::quadrature::{DEFAULT_RADIAL_NODES, DEFAULT_SPHERE_DEGREE, MAX_DEGREE};
use tubelab::symmetric_tube::{Engine, TubeOptions};
use tubelab::RiemannCurvature;

use crate::error::{CliError, CliResult};

/// Environment variable naming the output directory.
pub const OUT_ENV: &str = "TUBELAB_OUT";
pub const DEFAULT_OUT_DIR: &str = "tubelab-out";
pub const MAX_RADIAL_NODES: usize = 512;
/// Symmetry tolerance for tensors read from files.
pub const TENSOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub tube: TubeConfig,
    pub quadrature: QuadratureConfig,
    pub series: SeriesConfig,
    pub output: OutputConfig,
    pub tolerances: Tolerances,
}

/// Exactly one of `name`, `p`/`q` or `tensor` selects the space.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceConfig {
    /// Catalog name such as `s3`, `h4@0.25`, `cp2`, `ch2`, `s2xs2`, `dr4,3`.
    pub name: Option<String>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    /// JSON curvature document.
    pub tensor: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TubeConfig {
    /// Empty means "use the command's defaults".
    pub radii: Vec<f64>,
    pub lengths: Vec<f64>,
    /// `standard` or `sampled:<count>`.
    pub directions: String,
    /// Geodesic direction for single-direction commands; defaults to the last basis vector.
    pub direction: Option<Vec<f64>>,
}

impl Default for TubeConfig {
    fn default() -> Self {
        TubeConfig {
            radii: Vec::new(),
            lengths: Vec::new(),
            directions: "standard".into(),
            direction: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub sphere_degree: usize,
    pub radial_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            sphere_degree: DEFAULT_SPHERE_DEGREE,
            radial_nodes: DEFAULT_RADIAL_NODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesConfig {
    /// `spectral` or `series`.
    pub engine: String,
    /// Absolute tail target of the adaptive series.
    pub target: f64,
    /// Highest Taylor order reported by `coeffs`.
    pub order: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            engine: "spectral".into(),
            target: 1e-10,
            order: 4,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// Tolerances of every check the driver runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub einstein: f64,
    pub two_stein: f64,
    /// Lower bound on the 2-stein deviation of the non-harmonic witness.
    pub two_stein_gap: f64,
    pub closed_form: f64,
    pub constant_curvature: f64,
    pub area_derivative: f64,
    pub spread: f64,
    /// Lower bound on the direction spread of the non-harmonic witness.
    pub spread_gap: f64,
    pub second_term: f64,
    pub hotelling: f64,
    pub coefficient: f64,
    pub gv_slope: f64,
    pub exactness_even: f64,
    pub exactness_odd: f64,
    pub ad_trace: f64,
    /// `|trace|` at or below this counts as zero.
    pub ad_trace_floor: f64,
    pub axioms: f64,
    pub associativity: f64,
    pub left_invariance: f64,
    pub unit_speed: f64,
    pub euler_arnold: f64,
    pub ellipsoid: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            einstein: 1e-10,
            two_stein: 1e-10,
            two_stein_gap: 0.49,
            closed_form: 1e-6,
            constant_curvature: 1e-8,
            area_derivative: 1e-8,
            spread: 1e-6,
            spread_gap: 1e-3,
            second_term: 1e-10,
            hotelling: 1e-6,
            coefficient: 1e-12,
            gv_slope: 5.5,
            exactness_even: 1e-11,
            exactness_odd: 1e-12,
            ad_trace: 1e-10,
            ad_trace_floor: 1e-12,
            axioms: 1e-12,
            associativity: 1e-12,
            left_invariance: 1e-12,
            unit_speed: 1e-8,
            euler_arnold: 1e-7,
            ellipsoid: 1e-12,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn engine(&self) -> CliResult<Engine> {
        match self.series.engine.to_ascii_lowercase().as_str() {
            "spectral" => Ok(Engine::Spectral),
            "series" => Ok(Engine::Series),
            other => Err(CliError::Config(format!("unknown engine {other:?}"))),
        }
    }

    pub fn tube_options(&self) -> CliResult<TubeOptions> {
        Ok(TubeOptions {
            sphere_degree: self.quadrature.sphere_degree,
            radial_nodes: self.quadrature.radial_nodes,
            engine: self.engine()?,
            series_target: self.series.target,
        })
    }

    /// Output directory: config value, else the environment variable, else a default.
    /// A command-line `--out` is applied to `output.dir` before this is called.
    pub fn out_dir(&self) -> PathBuf {
        if let Some(d) = &self.output.dir {
            return d.clone();
        }
        std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    /// Checks ranges that do not depend on the selected space.
    pub fn validate(&self) -> CliResult<()> {
        let q = &self.quadrature;
        if !(2..=MAX_DEGREE).contains(&q.sphere_degree) {
            return Err(CliError::Config(format!(
                "sphere_degree {} outside 2..={MAX_DEGREE}",
                q.sphere_degree
            )));
        }
        if !(1..=MAX_RADIAL_NODES).contains(&q.radial_nodes) {
            return Err(CliError::Config(format!(
                "radial_nodes {} outside 1..={MAX_RADIAL_NODES}",
                q.radial_nodes
            )));
        }
        if !(self.series.target > 0.0 && self.series.target.is_finite()) {
            return Err(CliError::Config("series target must be positive".into()));
        }
        if self.series.order > tubelab::special::MAX_COT_ORDER {
            return Err(CliError::Config(format!("series order {} too large", self.series.order)));
        }
        self.engine()?;
        for (what, list) in [("radius", &self.tube.radii), ("length", &self.tube.lengths)] {
            if let Some(bad) = list.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(CliError::Config(format!("{what} {bad} must be positive")));
            }
        }
        parse_directions(&self.tube.directions)?;
        let sel = [self.space.name.is_some(), self.space.p.is_some() || self.space.q.is_some(), self.space.tensor.is_some()];
        if sel.iter().filter(|b| **b).count() > 1 {
            return Err(CliError::Config("select the space by name, by (p, q) or by tensor file, not several".into()));
        }
        if self.space.p.is_some() != self.space.q.is_some() {
            return Err(CliError::Config("p and q must be given together".into()));
        }
        Ok(())
    }

    /// Rejects radii at or past the conjugate-point guard for curvature bound `k`.
    pub fn check_radii(&self, radii: &[f64], k: f64) -> CliResult<()> {
        if k <= 0.0 {
            return Ok(());
        }
        let limit = (PI - CONJUGATE_MARGIN) / k.sqrt();
        if let Some(r) = radii.iter().find(|r| **r >= limit) {
            return Err(CliError::Config(format!("radius {r} beyond guard {limit:.6} for curvature bound {k}")));
        }
        Ok(())
    }
}

/// Selected space with a label for reports.
#[derive(Debug, Clone)]
pub struct ResolvedSpace {
    pub label: String,
    pub model: Option<ModelSpace>,
    pub curvature: RiemannCurvature,
    /// Upper bound on positive sectional curvature, when known.
    pub bound: Option<f64>,
}

impl ResolvedSpace {
    pub fn dim(&self) -> usize {
        self.curvature.dim()
    }
}

pub fn resolve_space(cfg: &SpaceConfig) -> CliResult<ResolvedSpace> {
    let model = match (&cfg.name, cfg.p, cfg.q, &cfg.tensor) {
        (Some(name), None, None, None) => name.parse::<ModelSpace>()?,
        (None, Some(p), Some(q), None) => ModelSpace::DamekRicci { p, q },
        (None, None, None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let curvature = RiemannCurvature::from_json(&text, TENSOR_TOL)?;
            return Ok(ResolvedSpace {
                label: path.display().to_string(),
                model: None,
                curvature,
                bound: None,
            });
        }
        (None, None, None, None) => return Err(CliError::Config("no space selected".into())),
        _ => return Err(CliError::Config("ambiguous space selection".into())),
    };
    Ok(ResolvedSpace {
        label: model.to_string(),
        curvature: model.curvature()?,
        bound: Some(positive_bound(&model)),
        model: Some(model),
    })
}

/// Largest positive sectional curvature; zero for nonpositively curved models.
pub fn positive_bound(m: &ModelSpace) -> f64 {
    match m {
        ModelSpace::Euclidean(_)
        | ModelSpace::Hyperbolic { .. }
        | ModelSpace::ComplexHyperbolicPlane
        | ModelSpace::DamekRicci { .. } => 0.0,
        ModelSpace::Sphere { kappa, .. } => *kappa,
        ModelSpace::ComplexProjectivePlane => 4.0,
        ModelSpace::Product(a, b) => positive_bound(a).max(positive_bound(b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionSet {
    Standard,
    Sampled(usize),
}

pub fn parse_directions(s: &str) -> CliResult<DirectionSet> {
    let s = s.trim().to_ascii_lowercase();
    if s == "standard" {
        return Ok(DirectionSet::Standard);
    }
    if let Some(n) = s.strip_prefix("sampled:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Config(format!("bad direction count in {s:?}")))?;
        if n == 0 {
            return Err(CliError::Config("direction count must be positive".into()));
        }
        return Ok(DirectionSet::Sampled(n));
    }
    Err(CliError::Config(format!("unknown direction set {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_rejects_unknown_keys() {
        let cfg = ExperimentConfig::from_toml(
            "[space]\nname = \"cp2\"\n[tube]\nradii = [0.25, 0.5]\n[quadrature]\nsphere_degree = 8\n[tolerances]\nspread = 1e-5\n",
        )
        .unwrap();
        assert_eq!(cfg.space.name.as_deref(), Some("cp2"));
        assert_eq!(cfg.tube.radii, vec![0.25, 0.5]);
        assert_eq!(cfg.quadrature.sphere_degree, 8);
        assert_eq!(cfg.quadrature.radial_nodes, DEFAULT_RADIAL_NODES);
        assert_eq!(cfg.tolerances.spread, 1e-5);
        assert_eq!(cfg.tolerances.einstein, 1e-10);
        cfg.validate().unwrap();
        assert!(ExperimentConfig::from_toml("[tube]\nradius = 1.0\n").is_err());
        assert!(ExperimentConfig::from_toml("[nonsense]\n").is_err());
    }

    #[test]
    fn validation_limits() {
        let mut cfg = ExperimentConfig::default();
        cfg.quadrature.sphere_degree = 40;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.tube.radii = vec![0.5, -1.0];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.space.p = Some(2);
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::default();
        assert!(cfg.check_radii(&[3.2], 1.0).is_err());
        assert!(cfg.check_radii(&[1.5], 1.0).is_ok());
        assert!(cfg.check_radii(&[1.6], 4.0).is_err());
        assert!(cfg.check_radii(&[100.0], 0.0).is_ok());
    }

    #[test]
    fn space_selection() {
        let s = resolve_space(&SpaceConfig {
            name: Some("s2xs2".into()),
            ..Default::default()
        })
        .unwrap();
        assert_eq!((s.dim(), s.bound), (4, Some(1.0)));
        let s = resolve_space(&SpaceConfig {
            p: Some(4),
            q: Some(3),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(s.label, "dr4,3");
        assert!(resolve_space(&SpaceConfig {
            name: Some("klein-bottle".into()),
            ..Default::default()
        })
        .is_err());
        assert_eq!(parse_directions("sampled:7").unwrap(), DirectionSet::Sampled(7));
        assert!(parse_directions("sampled:0").is_err());
    }
}
