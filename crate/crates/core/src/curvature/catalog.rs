//! Built-in model spaces.

use std::fmt;
use std::str::FromStr;

use super::RiemannCurvature;
use crate::damek_ricci::{DamekRicciSpace, HeisenbergAlgebra};
use crate::error::{Error, Result};

/// A model space with a curvature tensor that is parallel (locally symmetric)
/// or, for Damek-Ricci entries, homogeneous.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpace {
    Euclidean(usize),
    /// Round sphere of sectional curvature `kappa > 0`.
    Sphere { dim: usize, kappa: f64 },
    /// Hyperbolic space of sectional curvature `-kappa`, `kappa > 0`.
    Hyperbolic { dim: usize, kappa: f64 },
    /// Complex projective plane, Fubini-Study metric of holomorphic curvature 4.
    ComplexProjectivePlane,
    /// Complex hyperbolic plane, realized as the Damek-Ricci space with
    /// `(p, q) = (2, 1)`; holomorphic curvature -1.
    ComplexHyperbolicPlane,
    /// Damek-Ricci space `S` over the generalized Heisenberg algebra `(p, q)`.
    DamekRicci { p: usize, q: usize },
    Product(Box<ModelSpace>, Box<ModelSpace>),
}

impl ModelSpace {
    pub fn dim(&self) -> usize {
        match self {
            ModelSpace::Euclidean(n) => *n,
            ModelSpace::Sphere { dim, .. } | ModelSpace::Hyperbolic { dim, .. } => *dim,
            ModelSpace::ComplexProjectivePlane | ModelSpace::ComplexHyperbolicPlane => 4,
            ModelSpace::DamekRicci { p, q } => p + q + 1,
            ModelSpace::Product(a, b) => a.dim() + b.dim(),
        }
    }

    pub fn curvature(&self) -> Result<RiemannCurvature> {
        Ok(match self {
            ModelSpace::Euclidean(n) => RiemannCurvature::zero(*n),
            ModelSpace::Sphere { dim, kappa } => RiemannCurvature::constant(*dim, *kappa),
            ModelSpace::Hyperbolic { dim, kappa } => RiemannCurvature::constant(*dim, -*kappa),
            ModelSpace::ComplexProjectivePlane => complex_space_form(1.0),
            ModelSpace::ComplexHyperbolicPlane => damek_ricci_curvature(2, 1)?,
            ModelSpace::DamekRicci { p, q } => damek_ricci_curvature(*p, *q)?,
            ModelSpace::Product(a, b) => a.curvature()?.direct_sum(&b.curvature()?),
        })
    }

    /// True for spaces that are harmonic (flat, rank one symmetric, or Damek-Ricci).
    pub fn is_harmonic(&self) -> bool {
        !matches!(self, ModelSpace::Product(..))
    }

    /// Upper bound on `|sectional curvature|` used for radius guards.
    pub fn curvature_bound(&self) -> f64 {
        match self {
            ModelSpace::Euclidean(_) => 0.0,
            ModelSpace::Sphere { kappa, .. } | ModelSpace::Hyperbolic { kappa, .. } => *kappa,
            ModelSpace::ComplexProjectivePlane => 4.0,
            ModelSpace::ComplexHyperbolicPlane | ModelSpace::DamekRicci { .. } => 1.0,
            ModelSpace::Product(a, b) => a.curvature_bound().max(b.curvature_bound()),
        }
    }
}

fn damek_ricci_curvature(p: usize, q: usize) -> Result<RiemannCurvature> {
    let algebra = HeisenbergAlgebra::build(p, q)?;
    Ok(DamekRicciSpace::new(algebra)?
        .lie_algebra()
        .left_invariant_curvature())
}

/// Complex space form of complex dimension 2 with holomorphic curvature `4c`,
/// complex structure `J e0 = e1`, `J e2 = e3`.
fn complex_space_form(c: f64) -> RiemannCurvature {
    let n = 4;
    // J as a matrix: column j is J e_j.
    let mut j = [[0.0_f64; 4]; 4];
    j[1][0] = 1.0;
    j[0][1] = -1.0;
    j[3][2] = 1.0;
    j[2][3] = -1.0;
    let g = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    // <J e_a, e_b>
    let jg = |a: usize, b: usize| j[b][a];
    RiemannCurvature::from_fn(n, |a, b, cc, d| {
        c * (g(a, cc) * g(b, d) - g(a, d) * g(b, cc) + jg(a, cc) * jg(b, d) - jg(a, d) * jg(b, cc)
            + 2.0 * jg(a, b) * jg(cc, d))
    })
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpace::Euclidean(n) => write!(f, "e{n}"),
            ModelSpace::Sphere { dim, kappa } if *kappa == 1.0 => write!(f, "s{dim}"),
            ModelSpace::Sphere { dim, kappa } => write!(f, "s{dim}@{kappa}"),
            ModelSpace::Hyperbolic { dim, kappa } if *kappa == 1.0 => write!(f, "h{dim}"),
            ModelSpace::Hyperbolic { dim, kappa } => write!(f, "h{dim}@{kappa}"),
            ModelSpace::ComplexProjectivePlane => write!(f, "cp2"),
            ModelSpace::ComplexHyperbolicPlane => write!(f, "ch2"),
            ModelSpace::DamekRicci { p, q } => write!(f, "dr{p},{q}"),
            ModelSpace::Product(a, b) => write!(f, "{a}x{b}"),
        }
    }
}

/// Parses names such as `s3`, `h4@0.25`, `e3`, `cp2`, `ch2`, `dr4,3`, `s2xs2`.
impl FromStr for ModelSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Some((a, b)) = split_product(&s) {
            return Ok(ModelSpace::Product(Box::new(a.parse()?), Box::new(b.parse()?)));
        }
        let unknown = || Error::Unsupported(format!("unknown space {s:?}"));
        match s.as_str() {
            "cp2" => return Ok(ModelSpace::ComplexProjectivePlane),
            "ch2" => return Ok(ModelSpace::ComplexHyperbolicPlane),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("dr") {
            let (p, q) = rest.split_once(',').ok_or_else(unknown)?;
            let p = p.parse().map_err(|_| unknown())?;
            let q = q.parse().map_err(|_| unknown())?;
            return Ok(ModelSpace::DamekRicci { p, q });
        }
        let (head, kappa) = match s.split_once('@') {
            Some((h, k)) => (h, k.parse::<f64>().map_err(|_| unknown())?),
            None => (s.as_str(), 1.0),
        };
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Unsupported(format!("curvature scale must be positive in {s:?}")));
        }
        let (tag, dim) = head.split_at(1.min(head.len()));
        let dim: usize = dim.parse().map_err(|_| unknown())?;
        if dim < 2 {
            return Err(Error::Unsupported(format!("dimension must be at least 2 in {s:?}")));
        }
        match tag {
            "e" => Ok(ModelSpace::Euclidean(dim)),
            "s" => Ok(ModelSpace::Sphere { dim, kappa }),
            "h" => Ok(ModelSpace::Hyperbolic { dim, kappa }),
            _ => Err(unknown()),
        }
    }
}

fn split_product(s: &str) -> Option<(&str, &str)> {
    // Factor names never contain 'x', so the first one splits the product.
    s.split_once('x')
}
