//! Run configuration: flat `key = value` files, command-line overrides and
//! validation.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::background::CosmologyParams;
use crate::csfr::SFParams;
use crate::error::Error as ModelError;
use crate::numerics::ToleranceSpec;
use crate::pipeline::PipelineConfig;

/// Environment variable naming the output directory. Lowest precedence
/// after the built-in default.
pub const OUTPUT_DIR_ENV: &str = "COSMOHIST_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "output";

/// Every key accepted in a config file, in canonical order.
pub const KEYS: &[&str] = &[
    "omega_m",
    "omega_b",
    "omega_lambda",
    "h",
    "sigma8",
    "ns",
    "x",
    "tau",
    "n",
    "m_low",
    "m_high",
    "return_fraction",
    "mass_min",
    "mass_max",
    "z_max",
    "samples",
    "mass_samples",
    "rel_tol",
    "output_dir",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{key}`{}", suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey { key: String, suggestion: Option<String> },
    #[error("invalid value for `{key}`: {value:?} (expected {expected})")]
    InvalidValue {
        key: String,
        value: String,
        expected: String,
    },
    #[error("`omega_m` + `omega_lambda` must equal 1 for a flat universe (got omega_m = {omega_m}, omega_lambda = {omega_lambda}, sum = {})", omega_m + omega_lambda)]
    NotFlat { omega_m: f64, omega_lambda: f64 },
    #[error("{path}:{line}: expected `key = value`, found {text:?}")]
    Syntax { path: PathBuf, line: usize, text: String },
    #[error("{path}:{line}: duplicate key `{key}`")]
    Duplicate { path: PathBuf, line: usize, key: String },
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Complete, validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega_m: f64,
    pub omega_b: f64,
    pub omega_lambda: f64,
    pub h: f64,
    pub sigma8: f64,
    pub ns: f64,
    pub x: f64,
    pub tau: f64,
    pub n: f64,
    pub m_low: f64,
    pub m_high: f64,
    pub return_fraction: f64,
    /// `log10(M_min / M_sun)`.
    pub mass_min: f64,
    /// `log10(M_max / M_sun)`.
    pub mass_max: f64,
    pub z_max: f64,
    /// Redshift intervals in background and CSFR tables.
    pub samples: usize,
    /// Rows in mass function tables.
    pub mass_samples: usize,
    pub rel_tol: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cosmo = CosmologyParams::<f64>::default();
        let sf = SFParams::<f64>::default();
        let model = PipelineConfig::<f64>::default();
        Self {
            omega_m: cosmo.omega_m,
            omega_b: cosmo.omega_b,
            omega_lambda: cosmo.omega_lambda,
            h: cosmo.h,
            sigma8: cosmo.sigma8,
            ns: cosmo.ns,
            x: sf.x,
            tau: sf.tau,
            n: sf.n,
            m_low: sf.m_low,
            m_high: sf.m_high,
            return_fraction: sf.return_fraction,
            mass_min: model.log10_mass_min,
            mass_max: model.log10_mass_max,
            z_max: cosmo.z_max,
            samples: model.samples,
            mass_samples: 121,
            rel_tol: model.tolerance.rel_tol,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
        }
    }
}

fn nearest_key(key: &str) -> Option<String> {
    let normalized = key.replace('-', "_");
    KEYS.iter()
        .map(|k| (strsim::levenshtein(&normalized, k), *k))
        .min()
        .filter(|(d, k)| *d <= 3.max(k.len() / 2))
        .map(|(_, k)| k.to_string())
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            expected: "a finite number".into(),
        })
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.trim().parse::<usize>().map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
        expected: "a non-negative integer".into(),
    })
}

impl RunConfig {
    /// Assigns one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let f = |v: &str| parse_f64(key, v);
        match key {
            "omega_m" => self.omega_m = f(value)?,
            "omega_b" => self.omega_b = f(value)?,
            "omega_lambda" => self.omega_lambda = f(value)?,
            "h" => self.h = f(value)?,
            "sigma8" => self.sigma8 = f(value)?,
            "ns" => self.ns = f(value)?,
            "x" => self.x = f(value)?,
            "tau" => self.tau = f(value)?,
            "n" => self.n = f(value)?,
            "m_low" => self.m_low = f(value)?,
            "m_high" => self.m_high = f(value)?,
            "return_fraction" => self.return_fraction = f(value)?,
            "mass_min" => self.mass_min = f(value)?,
            "mass_max" => self.mass_max = f(value)?,
            "z_max" => self.z_max = f(value)?,
            "samples" => self.samples = parse_usize(key, value)?,
            "mass_samples" => self.mass_samples = parse_usize(key, value)?,
            "rel_tol" => self.rel_tol = f(value)?,
            "output_dir" => {
                let v = value.trim();
                if v.is_empty() {
                    return Err(ConfigError::InvalidValue {
                        key: key.into(),
                        value: value.into(),
                        expected: "a non-empty path".into(),
                    });
                }
                self.output_dir = PathBuf::from(v)
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    key: key.into(),
                    suggestion: nearest_key(key),
                })
            }
        }
        Ok(())
    }

    /// Textual value of `key` as echoed into manifests.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "omega_m" => self.omega_m.to_string(),
            "omega_b" => self.omega_b.to_string(),
            "omega_lambda" => self.omega_lambda.to_string(),
            "h" => self.h.to_string(),
            "sigma8" => self.sigma8.to_string(),
            "ns" => self.ns.to_string(),
            "x" => self.x.to_string(),
            "tau" => self.tau.to_string(),
            "n" => self.n.to_string(),
            "m_low" => self.m_low.to_string(),
            "m_high" => self.m_high.to_string(),
            "return_fraction" => self.return_fraction.to_string(),
            "mass_min" => self.mass_min.to_string(),
            "mass_max" => self.mass_max.to_string(),
            "z_max" => self.z_max.to_string(),
            "samples" => self.samples.to_string(),
            "mass_samples" => self.mass_samples.to_string(),
            "rel_tol" => self.rel_tol.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            _ => return None,
        })
    }

    /// Applies the `key = value` lines of `text`. Blank lines and `#`
    /// comments are ignored; duplicate keys are rejected.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<(), ConfigError> {
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    path: origin.to_path_buf(),
                    line: idx + 1,
                    text: raw.to_string(),
                });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    path: origin.to_path_buf(),
                    line: idx + 1,
                    text: raw.to_string(),
                });
            }
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::Duplicate {
                    path: origin.to_path_buf(),
                    line: idx + 1,
                    key: key.to_string(),
                });
            }
            seen.push(key.to_string());
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text, path)
    }

    /// Resolves defaults, then `env_output_dir`, then the file, then the
    /// flag overrides, and validates the result.
    pub fn resolve(
        file: Option<&Path>,
        overrides: &[(&str, String)],
        env_output_dir: Option<String>,
    ) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(dir) = env_output_dir.filter(|d| !d.trim().is_empty()) {
            cfg.output_dir = PathBuf::from(dir);
        }
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        for (key, value) in overrides {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cosmology(&self) -> CosmologyParams<f64> {
        CosmologyParams {
            omega_m: self.omega_m,
            omega_b: self.omega_b,
            omega_lambda: self.omega_lambda,
            h: self.h,
            sigma8: self.sigma8,
            ns: self.ns,
            z_max: self.z_max,
        }
    }

    pub fn star_formation(&self) -> SFParams<f64> {
        SFParams {
            x: self.x,
            tau: self.tau,
            n: self.n,
            m_low: self.m_low,
            m_high: self.m_high,
            return_fraction: self.return_fraction,
        }
    }

    pub fn tolerance(&self) -> ToleranceSpec<f64> {
        ToleranceSpec {
            rel_tol: self.rel_tol,
            ..ToleranceSpec::default()
        }
    }

    pub fn pipeline(&self) -> PipelineConfig<f64> {
        PipelineConfig {
            cosmology: self.cosmology(),
            star_formation: self.star_formation(),
            log10_mass_min: self.mass_min,
            log10_mass_max: self.mass_max,
            samples: self.samples,
            tolerance: self.tolerance(),
        }
    }

    fn invalid(key: &str, value: impl fmt::Display, expected: &str) -> ConfigError {
        ConfigError::InvalidValue {
            key: key.into(),
            value: value.to_string(),
            expected: expected.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let model_err = |e: ModelError| match e {
            ModelError::InvalidParam { key, value, expected } => Self::invalid(key, value, &expected),
            ModelError::NotFlat { omega_m, omega_lambda } => ConfigError::NotFlat { omega_m, omega_lambda },
            other => Self::invalid("config", "", &other.to_string()),
        };
        self.cosmology().validate().map_err(model_err)?;
        self.star_formation().validate().map_err(model_err)?;
        if !(self.mass_min > 0.0) {
            return Err(Self::invalid("mass_min", self.mass_min, "0 < mass_min < mass_max"));
        }
        if !(self.mass_max > self.mass_min && self.mass_max <= 20.0) {
            return Err(Self::invalid("mass_max", self.mass_max, "mass_min < mass_max <= 20"));
        }
        if self.samples < 1 || self.samples > 1_000_000 {
            return Err(Self::invalid("samples", self.samples, "1 <= samples <= 1000000"));
        }
        if self.mass_samples < 2 || self.mass_samples > 100_000 {
            return Err(Self::invalid(
                "mass_samples",
                self.mass_samples,
                "2 <= mass_samples <= 100000",
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Self::invalid("rel_tol", self.rel_tol, "0 < rel_tol <= 1e-3"));
        }
        Ok(())
    }

    /// `key = value` lines for every key, in canonical order.
    pub fn echo(&self) -> Vec<(String, String)> {
        KEYS.iter()
            .map(|k| (k.to_string(), self.get(k).expect("known key")))
            .collect()
    }
}
