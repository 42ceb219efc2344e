//! Run configuration: a single JSON document, every rational as a string.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use torsion_core::random::FieldParams;
use torsion_core::rational::parse_rational;
use torsion_core::ratfunc::UPoly;
use torsion_core::ricci::MixWeights;
use torsion_core::Rational;

/// Rejected configuration; the binary exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn default_dimension() -> usize {
    3
}
fn default_degree() -> u32 {
    2
}
fn default_bound() -> i64 {
    3
}
fn default_instances() -> usize {
    3
}
fn default_window() -> [String; 2] {
    ["0".into(), "1".into()]
}
fn default_panels() -> usize {
    1000
}
fn default_samples() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default)]
    pub seed: u64,
    /// Maximum total degree of the random polynomial entries.
    #[serde(default = "default_degree")]
    pub degree: u32,
    /// Random integer coefficients are drawn from `-bound..=bound`.
    #[serde(default = "default_bound")]
    pub bound: i64,
    #[serde(default = "default_instances")]
    pub instances: usize,
    /// Five rows of three weights for the mixed family; random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed_weights: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosmology: Option<CosmologyConfig>,
    /// Report path. Not echoed, so reports written to different places
    /// stay byte-identical.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

/// Ascending coefficient lists in `t` for `s1..s4` and `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosmologyConfig {
    pub s: Vec<Vec<String>>,
    pub n: Vec<String>,
    /// The value of `v' - w`.
    pub coupling: String,
    #[serde(default = "default_window")]
    pub window: [String; 2],
    #[serde(default = "default_panels")]
    pub panels: usize,
    /// Sampled floats are reported at `samples + 1` evenly spaced points.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dimension: default_dimension(),
            seed: 0,
            degree: default_degree(),
            bound: default_bound(),
            instances: default_instances(),
            mixed_weights: None,
            cosmology: None,
            output: None,
        }
    }
}

/// Parsed cosmology block.
#[derive(Clone, Debug, PartialEq)]
pub struct CosmologyInput {
    pub s: [UPoly; 4],
    pub n: UPoly,
    pub coupling: Rational,
    pub t0: Rational,
    pub t1: Rational,
    pub panels: usize,
    pub samples: usize,
}

fn rational(field: &str, s: &str) -> Result<Rational, ConfigError> {
    parse_rational(s).map_err(|_| bad(format!("{field}: cannot parse '{s}' as a rational")))
}

fn upoly(field: &str, coeffs: &[String]) -> Result<UPoly, ConfigError> {
    if coeffs.is_empty() {
        return Err(bad(format!("{field}: empty coefficient list")));
    }
    let c = coeffs
        .iter()
        .enumerate()
        .map(|(k, s)| rational(&format!("{field}[{k}]"), s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(UPoly::new(c))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(2..=6).contains(&self.dimension) {
            return Err(bad(format!("dimension: {} is outside 2..=6", self.dimension)));
        }
        if !(1..=6).contains(&self.degree) {
            return Err(bad(format!("degree: {} is outside 1..=6", self.degree)));
        }
        if self.bound < 1 {
            return Err(bad(format!("bound: must be positive, got {}", self.bound)));
        }
        if self.instances == 0 {
            return Err(bad("instances: must be positive"));
        }
        if self.mixed_weights.is_some() {
            self.weights()?;
        }
        if self.cosmology.is_some() {
            self.cosmology_input()?;
        }
        Ok(())
    }

    pub fn params(&self) -> FieldParams {
        FieldParams { degree: self.degree, bound: self.bound }
    }

    /// The configured mixing weights, if any.
    pub fn weights(&self) -> Result<Option<MixWeights>, ConfigError> {
        let Some(rows) = &self.mixed_weights else { return Ok(None) };
        if rows.len() != 5 {
            return Err(bad(format!("mixed_weights: expected 5 rows, got {}", rows.len())));
        }
        let mut parsed: Vec<[Rational; 3]> = Vec::with_capacity(5);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != 3 {
                return Err(bad(format!("mixed_weights[{r}]: expected 3 weights, got {}", row.len())));
            }
            let v = row
                .iter()
                .enumerate()
                .map(|(k, s)| rational(&format!("mixed_weights[{r}][{k}]"), s))
                .collect::<Result<Vec<_>, _>>()?;
            parsed.push(v.try_into().expect("length checked"));
        }
        let rows: [[Rational; 3]; 5] = parsed.try_into().expect("length checked");
        MixWeights::new(rows).map(Some).map_err(|e| bad(format!("mixed_weights: {e}")))
    }

    pub fn cosmology_input(&self) -> Result<CosmologyInput, ConfigError> {
        let c = self.cosmology.as_ref().ok_or_else(|| bad("cosmology: block required for this command"))?;
        if c.s.len() != 4 {
            return Err(bad(format!("cosmology.s: expected 4 coefficient lists, got {}", c.s.len())));
        }
        let s = [
            upoly("cosmology.s[0]", &c.s[0])?,
            upoly("cosmology.s[1]", &c.s[1])?,
            upoly("cosmology.s[2]", &c.s[2])?,
            upoly("cosmology.s[3]", &c.s[3])?,
        ];
        let n = upoly("cosmology.n", &c.n)?;
        let coupling = rational("cosmology.coupling", &c.coupling)?;
        let t0 = rational("cosmology.window[0]", &c.window[0])?;
        let t1 = rational("cosmology.window[1]", &c.window[1])?;
        if t1 <= t0 {
            return Err(bad("cosmology.window: end must exceed start"));
        }
        if c.panels == 0 {
            return Err(bad("cosmology.panels: must be positive"));
        }
        if c.samples == 0 {
            return Err(bad("cosmology.samples: must be positive"));
        }
        Ok(CosmologyInput { s, n, coupling, t0, t1, panels: c.panels, samples: c.samples })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_takes_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn zero_instances_rejected() {
        let e = RunConfig::from_json(r#"{"instances": 0}"#).unwrap_err();
        assert!(e.0.contains("instances"), "{e}");
    }

    #[test]
    fn unknown_field_reports_position() {
        let e = RunConfig::from_json("{\n  \"dimensions\": 3\n}").unwrap_err();
        assert!(e.0.contains("dimensions") && e.0.contains("line 2"), "{e}");
    }

    #[test]
    fn weight_row_sum_checked() {
        let mut rows = vec![vec!["1".to_string(), "0".into(), "0".into()]; 5];
        rows[3] = vec!["1/2".into(), "1/2".into(), "1/2".into()];
        let cfg = RunConfig { mixed_weights: Some(rows), ..RunConfig::default() };
        let e = cfg.validate().unwrap_err();
        assert!(e.0.contains("row 4"), "{e}");
    }

    #[test]
    fn cosmology_needs_four_scale_factors() {
        let e = RunConfig::from_json(r#"{"cosmology": {"s": [["1"], ["1"], ["1"]], "n": ["0"], "coupling": "1"}}"#)
            .unwrap_err();
        assert!(e.0.contains("cosmology.s"), "{e}");
    }
}
