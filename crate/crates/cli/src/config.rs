use std::path::PathBuf;

use nonnormal::detequiv::{TruncationConfig, DEFAULT_ETA};
use nonnormal::models::{DiagonalLaw, Generator, NoiseSpec, RegularizationParams, TwistedSymbol};
use nonnormal::spectra::{ring, GridSpec};
use nonnormal::C64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Banded Toeplitz with constant `coefficients`.
    Toeplitz,
    /// Twisted Toeplitz from `symbol`, optionally block-regularized.
    Twisted,
    /// `D + J` with i.i.d. diagonal drawn from `law`.
    BidiagonalIid,
    /// `D + J` with `d_i = profile(i / N)`.
    BidiagonalProfile,
    /// `z I + J`.
    Jordan,
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Self::Real(re) => C64::new(re, 0.0),
            Self::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestPoints {
    Ring { center: Scalar, radius: f64, count: usize },
    Points { points: Vec<Scalar> },
}

impl Default for TestPoints {
    fn default() -> Self {
        Self::Ring {
            center: Scalar::Real(0.0),
            radius: 4.0,
            count: 32,
        }
    }
}

impl TestPoints {
    pub fn resolve(&self) -> Vec<C64> {
        match self {
            Self::Ring { center, radius, count } => ring(center.value(), *radius, *count),
            Self::Points { points } => points.iter().map(|p| p.value()).collect(),
        }
    }
}

fn default_gamma() -> f64 {
    2.0
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_eta() -> f64 {
    DEFAULT_ETA
}

fn default_delta() -> f64 {
    0.3
}

fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub n: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<TwistedSymbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<DiagonalLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub test_points: TestPoints,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization: Option<RegularizationParams>,
    /// Partition exponent for the rigidity checks.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Number of limit-law samples written by `predict`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Reads an optional JSON file, applies `--key value` overrides (dotted
    /// keys reach into nested objects) and validates the result.
    pub fn load(file_text: Option<&str>, overrides: &[String]) -> Result<Self, CliError> {
        let mut root = match file_text {
            Some(t) => serde_json::from_str::<Value>(t).map_err(|e| CliError::Config(e.to_string()))?,
            None => Value::Object(Map::new()),
        };
        if !root.is_object() {
            return Err(CliError::Config("config must be a JSON object".into()));
        }
        for (key, value) in parse_overrides(overrides)? {
            set_path(&mut root, &key, value)?;
        }
        let cfg: Self = serde_json::from_value(root).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Self::load(Some(text), &[])
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.n > nonnormal::io::MAX_MATRIX_DIM {
            return bad(format!("n = {} exceeds {}", self.n, nonnormal::io::MAX_MATRIX_DIM));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        NoiseSpec::new(self.gamma, 0).map_err(CliError::invalid)?;
        TruncationConfig::new(self.gamma, self.eta).map_err(CliError::invalid)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        let need = |present: bool, field: &str| {
            if present {
                Ok(())
            } else {
                bad(format!("model {:?} needs `{field}`", self.model))
            }
        };
        match self.model {
            ModelKind::Toeplitz => {
                need(self.coefficients.is_some(), "coefficients")?;
                if self.toeplitz_symbol()?.generators.iter().all(|g| g.eval(0.0) == C64::new(0.0, 0.0)) {
                    return bad("symbol is identically zero".into());
                }
            }
            ModelKind::Twisted => {
                need(self.symbol.is_some(), "symbol")?;
                let sym = self.symbol.as_ref().expect("checked");
                sym.validate().map_err(CliError::invalid)?;
                let zero = (0..=16).all(|k| sym.coefficients_at(k as f64 / 16.0).iter().all(|c| c.norm() == 0.0));
                if zero {
                    return bad("symbol is identically zero".into());
                }
                if let Some(r) = &self.regularization {
                    r.validate(self.gamma, sym.band()).map_err(CliError::invalid)?;
                }
            }
            ModelKind::BidiagonalIid => {
                need(self.law.is_some(), "law")?;
                self.law.as_ref().expect("checked").validate().map_err(CliError::invalid)?;
            }
            ModelKind::BidiagonalProfile => {
                need(self.profile.is_some(), "profile")?;
                self.profile.as_ref().expect("checked").validate().map_err(CliError::invalid)?;
            }
            ModelKind::Jordan => need(self.z.is_some(), "z")?,
        }
        if let Some(g) = &self.grid {
            g.validate().map_err(CliError::invalid)?;
            if g.nx.saturating_mul(g.ny) > nonnormal::io::MAX_GRID_NODES {
                return bad("grid has too many nodes".into());
            }
        }
        match &self.test_points {
            TestPoints::Ring { radius, count, .. } if !(*radius >= 0.0) || *count == 0 => {
                bad("test ring needs a non-negative radius and at least one point".into())
            }
            TestPoints::Points { points } if points.is_empty() => bad("empty test point list".into()),
            _ => Ok(()),
        }
    }

    pub fn toeplitz_symbol(&self) -> Result<TwistedSymbol, CliError> {
        let a: Vec<C64> = self.coefficients.iter().flatten().map(|s| s.value()).collect();
        TwistedSymbol::constant(&a).map_err(CliError::invalid)
    }

    pub fn truncation(&self) -> TruncationConfig {
        TruncationConfig {
            gamma: self.gamma,
            eta: self.eta,
        }
    }
}

/// Pairs `--key value` (or `--key=value`) tokens.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, Value)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(tok) = it.next() {
        let Some(key) = tok.strip_prefix("--") else {
            return Err(CliError::Usage(format!("expected --key, found `{tok}`")));
        };
        let (key, raw) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("--{key} needs a value")))?;
                (key.to_string(), v.clone())
            }
        };
        if key.is_empty() {
            return Err(CliError::Usage("empty override key".into()));
        }
        let key = key.replace('-', "_");
        let value = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
        out.push((key, value));
    }
    Ok(out)
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields one part");
    let mut node = root;
    for p in parts {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("`{key}`: parent is not an object")))?;
        node = obj.entry(p).or_insert_with(|| Value::Object(Map::new()));
    }
    node.as_object_mut()
        .ok_or_else(|| CliError::Config(format!("`{key}`: parent is not an object")))?
        .insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn flags_override_file() {
        let file = r#"{"model": "jordan", "n": 10, "z": 0.5, "gamma": 1.5}"#;
        let cfg = RunConfig::load(Some(file), &args(&["--n", "20", "--gamma=3"])).unwrap();
        assert_eq!(cfg.n, 20);
        assert_eq!(cfg.gamma, 3.0);
        assert_eq!(cfg.z, Some(Scalar::Real(0.5)));
    }

    #[test]
    fn dotted_keys_and_strings() {
        let cfg = RunConfig::load(
            None,
            &args(&["--model", "jordan", "--n", "5", "--z", "[0, 1]", "--grid.nx", "3", "--grid", "null"]),
        )
        .unwrap();
        assert_eq!(cfg.z.unwrap().value(), C64::new(0.0, 1.0));
        assert!(cfg.grid.is_none());
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = RunConfig::from_json(r#"{"model": "jordan", "n": 4, "z": 0.5, "colour": 1}"#).unwrap_err();
        assert!(matches!(e, CliError::Config(_)), "{e}");
    }

    #[test]
    fn small_gamma_rejected() {
        let e = RunConfig::from_json(r#"{"model": "jordan", "n": 4, "z": 0.5, "gamma": 0.4}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn missing_model_data_rejected() {
        assert!(RunConfig::from_json(r#"{"model": "toeplitz", "n": 4}"#).is_err());
        assert!(RunConfig::from_json(r#"{"model": "toeplitz", "n": 4, "coefficients": []}"#).is_err());
        assert!(RunConfig::from_json(r#"{"model": "toeplitz", "n": 4, "coefficients": [0, [0, 0]]}"#).is_err());
    }

    #[test]
    fn dangling_flag_is_usage_error() {
        let e = parse_overrides(&args(&["--n"])).unwrap_err();
        assert!(matches!(e, CliError::Usage(_)));
        assert!(parse_overrides(&args(&["n", "3"])).is_err());
    }
}
