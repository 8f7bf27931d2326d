//! Command-line front end: argument parsing, config merging, output.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, CurveRequest, DEFAULT_A1, DEFAULT_A2};
use crate::config::{ExperimentConfig, SpaceConfig};
use crate::error::CliResult;
use crate::report::Summary;
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "tubelab", version, about = "Tube volumes, curvature conditions and harmonic-space checks")]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: config, then $TUBELAB_OUT, then ./tubelab-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Skip writing report files.
    #[arg(long, global = true)]
    pub no_write: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by the space-based subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Catalog space: s<n>, h<n>, e<n> (optionally @kappa), cp2, ch2, dr<p>,<q>, AxB.
    #[arg(long)]
    pub space: Option<String>,
    /// JSON curvature tensor file.
    #[arg(long)]
    pub tensor: Option<PathBuf>,
    /// Tube radii (comma separated).
    #[arg(long = "r", alias = "radius", value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Curve or geodesic lengths (comma separated).
    #[arg(long = "length", value_delimiter = ',')]
    pub lengths: Vec<f64>,
    /// Direction set: standard or sampled:<count>.
    #[arg(long)]
    pub directions: Option<String>,
    /// Geodesic direction (comma separated components).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub direction: Option<Vec<f64>>,
    #[arg(long)]
    pub sphere_degree: Option<usize>,
    #[arg(long)]
    pub radial_nodes: Option<usize>,
    /// spectral or series.
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long)]
    pub series_target: Option<f64>,
    #[arg(long)]
    pub series_order: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Compare {
    ClosedForm,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Einstein and 2-stein deviations over a direction set.
    Stein(Common),
    /// Geodesic tube volumes.
    Tube {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        compare: Option<Compare>,
    },
    /// Tube volumes over many directions and their spread.
    TubeScan(Common),
    /// Tube volume about a curve in a constant-curvature model.
    TubeCurve {
        #[command(flatten)]
        common: Common,
        /// circle, arc or geodesic.
        #[arg(long, default_value = "circle")]
        curve: String,
        /// Geodesic curvature of generated circles and arcs.
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 4)]
        panels: usize,
        /// CSV curve samples instead of a generated curve.
        #[arg(long)]
        curve_file: Option<PathBuf>,
    },
    /// Structural checks and closed-form tubes of a Damek-Ricci space.
    DamekRicci {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Gray-Vanhecke coefficients and Taylor integrals.
    Coeffs(Common),
    /// Exactness audit of the sphere quadrature rules.
    QuadAudit {
        #[command(flatten)]
        common: Common,
        /// Ambient dimensions (comma separated).
        #[arg(long = "dim", value_delimiter = ',', default_values_t = [3usize, 4, 5, 6])]
        dims: Vec<usize>,
        /// Also write the nodes and weights.
        #[arg(long)]
        nodes: bool,
    },
    /// Traces of powers of ad on so(3)+so(3).
    AdTrace {
        #[arg(long, default_value_t = 4)]
        k_max: u32,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a1: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a2: Option<Vec<f64>>,
    },
    /// Runs every acceptance criterion.
    VerifyAll(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stein(_) => "stein",
            Command::Tube { .. } => "tube",
            Command::TubeScan(_) => "tube-scan",
            Command::TubeCurve { .. } => "tube-curve",
            Command::DamekRicci { .. } => "damek-ricci",
            Command::Coeffs(_) => "coeffs",
            Command::QuadAudit { .. } => "quad-audit",
            Command::AdTrace { .. } => "ad-trace",
            Command::VerifyAll(_) => "verify-all",
        }
    }

    fn common(&self) -> Option<&Common> {
        match self {
            Command::Stein(c) | Command::TubeScan(c) | Command::Coeffs(c) | Command::VerifyAll(c) => Some(c),
            Command::Tube { common, .. }
            | Command::TubeCurve { common, .. }
            | Command::DamekRicci { common, .. }
            | Command::QuadAudit { common, .. } => Some(common),
            Command::AdTrace { .. } => None,
        }
    }
}

/// Applies command-line values on top of the file config.
pub fn apply_overrides(cfg: &mut ExperimentConfig, c: &Common) {
    if let Some(name) = &c.space {
        cfg.space = SpaceConfig {
            name: Some(name.clone()),
            ..Default::default()
        };
    }
    if let Some(t) = &c.tensor {
        cfg.space = SpaceConfig {
            tensor: Some(t.clone()),
            ..Default::default()
        };
    }
    if !c.radii.is_empty() {
        cfg.tube.radii = c.radii.clone();
    }
    if !c.lengths.is_empty() {
        cfg.tube.lengths = c.lengths.clone();
    }
    if let Some(d) = &c.directions {
        cfg.tube.directions = d.clone();
    }
    if let Some(d) = &c.direction {
        cfg.tube.direction = Some(d.clone());
    }
    if let Some(d) = c.sphere_degree {
        cfg.quadrature.sphere_degree = d;
    }
    if let Some(n) = c.radial_nodes {
        cfg.quadrature.radial_nodes = n;
    }
    if let Some(e) = &c.engine {
        cfg.series.engine = e.clone();
    }
    if let Some(t) = c.series_target {
        cfg.series.target = t;
    }
    if let Some(o) = c.series_order {
        cfg.series.order = o;
    }
}

/// Merged configuration for `cli`.
pub fn effective_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = cli.command.common() {
        apply_overrides(&mut cfg, c);
    }
    if let Command::DamekRicci { p, q, .. } = &cli.command {
        if p.is_some() || q.is_some() {
            cfg.space = SpaceConfig {
                p: *p,
                q: *q,
                ..Default::default()
            };
        }
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli, cfg: &ExperimentConfig) -> CliResult<(Summary, Vec<String>)> {
    let mut lines = Vec::new();
    let summary = match &cli.command {
        Command::Stein(_) => commands::stein(cfg)?,
        Command::Tube { compare, .. } => commands::tube(cfg, compare.is_some())?,
        Command::TubeScan(_) => commands::tube_scan(cfg)?,
        Command::TubeCurve {
            curve,
            kappa,
            panels,
            curve_file,
            ..
        } => {
            let req = CurveRequest {
                kind: curve.to_ascii_lowercase(),
                kappa: *kappa,
                length: cfg.tube.lengths.first().copied(),
                panels: *panels,
                file: curve_file.clone(),
            };
            commands::tube_curve(cfg, &req)?
        }
        Command::DamekRicci { .. } => commands::damek_ricci(cfg)?,
        Command::Coeffs(_) => commands::coeffs(cfg)?,
        Command::QuadAudit { dims, nodes, .. } => commands::quad_audit(cfg, dims, *nodes)?,
        Command::AdTrace { k_max, a1, a2 } => {
            let a1 = a1.clone().unwrap_or(DEFAULT_A1.to_vec());
            let a2 = a2.clone().unwrap_or(DEFAULT_A2.to_vec());
            commands::ad_trace(cfg, &a1, &a2, *k_max)?
        }
        Command::VerifyAll(_) => {
            let report = verify::verify_all(cfg)?;
            lines.extend(report.criteria.iter().map(|c| c.line()));
            verify::summarize(&report)
        }
    };
    Ok((summary, lines))
}

/// Runs the tool on `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { crate::error::EXIT_CONFIG } else { 0 };
        }
    };
    let name = cli.command.name();
    let cfg = match effective_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("tubelab {name}: {e}");
            return e.exit_code();
        }
    };
    let space = cfg.space.name.clone();
    let (mut summary, lines) = match execute(&cli, &cfg) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("tubelab {name}: {e}");
            (Summary::from_error(name, space, &e), Vec::new())
        }
    };
    for l in &lines {
        println!("{l}");
    }
    print!("{}", summary.render());
    if !cli.no_write {
        match summary.write(&cfg.out_dir()) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("tubelab {name}: {e}");
                return e.exit_code();
            }
        }
    }
    summary.exit_code
}

