//! TOML run configuration. Unknown keys are rejected.
//!
//! ```toml
//! [field]
//! min_poly = [1, -1, -1, -1, 1]   # constant term first
//!
//! [units]
//! candidates = [[0, 1, 0, 0], [1, -1, 0, 0]]
//! generators = [[1, 0]]           # exponent words over the candidates
//!
//! [run]
//! mode = "construction"
//! ```

use num_bigint::BigInt;
use serde::Deserialize;
use thiserror::Error;

use crate::certificate::Mode;
use crate::poly::{IntPoly, Q};
use crate::qmat::QMatrix;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldConfig,
    #[serde(default)]
    pub units: UnitsConfig,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub fan: Option<FanConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    /// Integer coefficients, constant term first.
    pub min_poly: Vec<i64>,
    /// Integral basis as columns of power-basis coordinates; entries are
    /// integers or `"p/q"` strings.
    pub basis: Option<Vec<Vec<Rational>>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Rational {
    Int(i64),
    Str(String),
}

impl Rational {
    fn parse(&self) -> Result<Q, ConfigError> {
        match self {
            Rational::Int(v) => Ok(Q::from_integer(BigInt::from(*v))),
            Rational::Str(s) => {
                let (p, q) = s.split_once('/').unwrap_or((s.as_str(), "1"));
                let p: BigInt = p.trim().parse().map_err(|_| bad_rational(s))?;
                let q: BigInt = q.trim().parse().map_err(|_| bad_rational(s))?;
                if q == BigInt::from(0) {
                    return Err(bad_rational(s));
                }
                Ok(Q::new(p, q))
            }
        }
    }
}

fn bad_rational(s: &str) -> ConfigError {
    ConfigError::Invalid(format!("not a rational number: {s:?}"))
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UnitsConfig {
    /// Units as integer coordinate vectors in the integral basis.
    #[serde(default)]
    pub candidates: Vec<Vec<i64>>,
    /// Generators of `W` as exponent words over `candidates`. When absent,
    /// `W` is searched for.
    pub generators: Option<Vec<Vec<i64>>>,
    pub b: Option<usize>,
    #[serde(default = "default_search_window")]
    pub search_window: u32,
}

fn default_search_window() -> u32 {
    2
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    pub mode: Mode,
    pub window: u32,
    pub c_window: u32,
    pub samples: usize,
    pub seed: u64,
    pub injectivity_samples: usize,
    pub height: i64,
    pub collapse_k_max: u32,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            mode: Mode::Construction,
            window: 64,
            c_window: 10,
            samples: 1000,
            seed: 42,
            injectivity_samples: 1000,
            height: 20,
            collapse_k_max: 8,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Residual tolerance of the numeric identity checks.
    pub check: f64,
    /// Minimum image separation for the injectivity checks.
    pub separation: f64,
    /// Largest acceptable condition number of `B_K` before warning.
    pub max_condition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            check: crate::tol::LINEAR,
            separation: crate::tol::SEPARATION,
            max_condition: crate::tol::MAX_CONDITION,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FanConfig {
    pub cones: Vec<ConeConfig>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    pub rays: Vec<RayConfig>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RayConfig {
    Vector(Vec<f64>),
    Tag {
        /// Element of `O_K` whose labeled real embeddings give the ray.
        tag: Vec<i64>,
    },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub certificate: String,
    pub plot: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            certificate: "certificate.json".into(),
            plot: "fundamental_domain.svg".into(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not need the field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.field.min_poly.len() < 3 {
            return Err(ConfigError::Invalid("min_poly must have degree at least 2".into()));
        }
        let n = self.field.min_poly.len() - 1;
        if let Some(cols) = &self.field.basis {
            if cols.len() != n || cols.iter().any(|c| c.len() != n) {
                return Err(ConfigError::Invalid(format!("basis must be {n} columns of length {n}")));
            }
        }
        if let Some(c) = self.units.candidates.iter().find(|c| c.len() != n) {
            return Err(ConfigError::Invalid(format!("unit candidate {c:?} must have {n} coordinates")));
        }
        if let Some(gens) = &self.units.generators {
            let m = self.units.candidates.len();
            if let Some(g) = gens.iter().find(|g| g.len() != m) {
                return Err(ConfigError::Invalid(format!(
                    "generator word {g:?} must have one exponent per candidate ({m})"
                )));
            }
            if let Some(b) = self.units.b {
                if b != gens.len() {
                    return Err(ConfigError::Invalid(format!(
                        "b = {b} but {} generators given",
                        gens.len()
                    )));
                }
            }
        }
        let t = &self.tolerances;
        if !(t.check > 0.0 && t.separation > 0.0 && t.max_condition > 0.0) {
            return Err(ConfigError::Invalid("tolerances must be positive".into()));
        }
        if self.run.samples == 0 {
            return Err(ConfigError::Invalid("samples must be positive".into()));
        }
        if let Some(f) = &self.fan {
            for c in &f.cones {
                for r in &c.rays {
                    let ok = match r {
                        RayConfig::Vector(v) => v.iter().all(|x| x.is_finite()),
                        RayConfig::Tag { tag } => tag.len() == n,
                    };
                    if !ok {
                        return Err(ConfigError::Invalid(format!("bad ray {r:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn min_poly(&self) -> IntPoly {
        IntPoly::from_i64(&self.field.min_poly)
    }

    pub fn basis(&self) -> Result<Option<QMatrix>, ConfigError> {
        let Some(cols) = &self.field.basis else {
            return Ok(None);
        };
        let cols = cols
            .iter()
            .map(|c| c.iter().map(Rational::parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(QMatrix::from_columns(&cols)))
    }

    /// Rank of `W` requested for the mode, before the field is known.
    pub fn requested_b(&self) -> Option<usize> {
        self.units
            .b
            .or_else(|| self.units.generators.as_ref().map(Vec::len))
            .or(match self.run.mode {
                Mode::Lvmb => Some(0),
                Mode::Construction => Some(1),
                Mode::Ot => None,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SALEM: &str = r#"
[field]
min_poly = [1, -1, -1, -1, 1]

[units]
candidates = [[0, 1, 0, 0], [1, -1, 0, 0]]
generators = [[1, 0]]
"#;

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::from_toml(SALEM).unwrap();
        assert_eq!(c.run.window, 64);
        assert_eq!(c.run.seed, 42);
        assert_eq!(c.run.mode, Mode::Construction);
        assert_eq!(c.requested_b(), Some(1));
        assert!(c.basis().unwrap().is_none());
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{SALEM}\n[run]\nwindw = 3\n");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Parse(_))));
        let text = format!("{SALEM}\n[extra]\nx = 1\n");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn shape_errors() {
        let text = SALEM.replace("[[1, 0]]", "[[1, 0, 0]]");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
        let text = SALEM.replace("[0, 1, 0, 0],", "[0, 1, 0],");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rays_and_basis() {
        let text = r#"
[field]
min_poly = [-5, 0, 1]
basis = [[1, 0], ["1/2", "1/2"]]

[run]
mode = "lvmb"

[fan]
cones = [{ rays = [[1, 0], { tag = [0, 1] }] }]
"#;
        let c = RunConfig::from_toml(text).unwrap();
        let m = c.basis().unwrap().unwrap();
        assert_eq!(m.column(1)[0], Q::new(1.into(), 2.into()));
        assert_eq!(c.requested_b(), Some(0));
        let rays = &c.fan.unwrap().cones[0].rays;
        assert_eq!(rays[0], RayConfig::Vector(vec![1.0, 0.0]));
        assert_eq!(rays[1], RayConfig::Tag { tag: vec![0, 1] });
    }
}
