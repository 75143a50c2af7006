//! Parsing of state files and the small spec strings used on the command line.

use anyhow::{bail, Context, Result};
use qrenyi::entropy::RenyiOrder;
use qrenyi::linalg::Matrix;
use qrenyi::metrology::{canonical_povm_for, Estimator, Prior};
use qrenyi::random::haar_unitary;
use qrenyi::spectral::{DensityOperator, Generator, GeneratorKind, HermitianMatrix};
use qrenyi::time_energy::EnergySpectrum;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::Path;

pub fn load_state(path: &Path) -> Result<DensityOperator<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DensityOperator::from_json_str(&text).with_context(|| format!("invalid state file {}", path.display()))
}

pub fn load_spectrum(path: &Path) -> Result<EnergySpectrum> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    EnergySpectrum::from_json_str(&text).with_context(|| format!("invalid spectrum file {}", path.display()))
}

pub fn parse_orders(items: &[String]) -> Result<Vec<RenyiOrder<f64>>> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| RenyiOrder::parse(s).map_err(Into::into))
        .collect()
}

/// Generator spec: `number`, `jz` or `diag:v0,v1,...`.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Number,
    Jz,
    Diagonal(Vec<f64>),
}

impl std::str::FromStr for GeneratorSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "number" | "n" => Ok(Self::Number),
            "jz" => Ok(Self::Jz),
            other => match other.strip_prefix("diag:") {
                Some(rest) => rest
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad diagonal entry '{v}': {e}")))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map(Self::Diagonal),
                None => Err(format!("unknown generator '{other}' (expected number, jz or diag:v0,v1,...)")),
            },
        }
    }
}

impl GeneratorSpec {
    pub fn build(&self, dim: usize) -> Result<Generator<f64>> {
        Ok(match self {
            Self::Number => Generator::number(dim),
            Self::Jz => {
                if dim.is_multiple_of(2) {
                    bail!("jz needs an odd dimension, got {dim}");
                }
                Generator::angular_momentum_z((dim - 1) / 2)
            }
            Self::Diagonal(v) => {
                if v.len() != dim {
                    bail!("generator has {} entries but the state has dimension {dim}", v.len());
                }
                Generator::from_diagonal(v, GeneratorKind::Custom)
            }
        })
    }
}

/// Prior spec: `circle` or `interval:LENGTH[:CENTER]`.
pub fn parse_prior(s: &str) -> std::result::Result<Prior, String> {
    let s = s.trim();
    if s == "circle" {
        return Ok(Prior::UniformCircle);
    }
    let rest = s.strip_prefix("interval:").ok_or_else(|| format!("unknown prior '{s}' (expected circle or interval:L[:c])"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    match parts.as_slice() {
        [l] => Ok(Prior::UniformInterval { length: num(l)?, center: 0.0 }),
        [l, c] => Ok(Prior::UniformInterval { length: num(l)?, center: num(c)? }),
        _ => Err(format!("malformed interval prior '{s}'")),
    }
}

/// Estimator spec: `canonical`, `constant:ANGLE`, `rotated` or `projective`. The last two are
/// drawn from the seeded generator.
#[derive(Clone, Debug, PartialEq)]
pub enum EstimatorSpec {
    Canonical,
    Constant(f64),
    Rotated,
    Projective,
}

impl std::str::FromStr for EstimatorSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "canonical" => Ok(Self::Canonical),
            "rotated" => Ok(Self::Rotated),
            "projective" => Ok(Self::Projective),
            other => match other.strip_prefix("constant:") {
                Some(a) => a.trim().parse().map(Self::Constant).map_err(|e| format!("bad angle '{a}': {e}")),
                None => Err(format!("unknown estimator '{other}'")),
            },
        }
    }
}

impl EstimatorSpec {
    pub fn build(&self, g: &Generator<f64>, rng: &mut ChaCha8Rng) -> Result<Estimator> {
        let d = g.dim();
        Ok(match self {
            Self::Canonical => Estimator::Canonical(canonical_povm_for(g)?),
            Self::Constant(a) => Estimator::constant(*a, d),
            Self::Rotated => Estimator::random_rotation(&canonical_povm_for(g)?, rng),
            Self::Projective => {
                let u = haar_unitary(d, rng);
                let angles: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
                Estimator::projective(&u, &angles)?
            }
        })
    }

    /// Whether the estimator at a larger cutoff is the same estimator restricted back.
    pub fn extends_to_larger_cutoff(&self) -> bool {
        matches!(self, Self::Canonical | Self::Constant(_))
    }
}

/// Embeds `rho` into a space of dimension `dim` with number labels `0..dim`.
pub fn pad_state(rho: &DensityOperator<f64>, dim: usize) -> Result<DensityOperator<f64>> {
    let d = rho.dim();
    let m = Matrix::from_fn(dim, dim, |i, j| if i < d && j < d { rho.entry(i, j) } else { num_complex::Complex::new(0.0, 0.0) });
    Ok(DensityOperator::new(HermitianMatrix::new(m)?, (0..dim as i64).collect())?)
}
