//! Run configuration: command-line flags merged over an optional TOML file.
//!
//! Every value is accepted in the same textual syntax in both places, and a
//! flag always wins over the file. Numeric literals go through the active
//! backend's parser, so `0.2` is the exact `1/5` in rational mode.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use rde5::numerics::Scalar;
use rde5::recurrence::{CoefficientSequence, InitialConditions};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("missing required field `{0}` (flag or config file)")]
    Missing(&'static str),
}

fn field_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

/// Raw TOML shape; all values are strings in the same syntax the flags use.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub ic: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub backend: Option<String>,
    pub form: Option<String>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub max_period: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        toml::from_str(&text)
            .map_err(|source| ConfigError::Toml { path: path.to_owned(), source: Box::new(source) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Backend {
    #[default]
    Rational,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum IndexForm {
    /// Label values from `x[-4]`.
    #[default]
    X,
    /// Label values from `u[0]`.
    U,
}

impl IndexForm {
    pub fn start_label(self) -> i64 {
        match self {
            Self::X => -4,
            Self::U => 0,
        }
    }
}

/// Five comma-separated seed values.
pub fn parse_seeds<S: Scalar>(text: &str) -> Result<InitialConditions<S>, ConfigError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(field_err("ic", format!("need exactly five values, got {}", parts.len())));
    }
    let mut vals = Vec::with_capacity(5);
    for (i, p) in parts.iter().enumerate() {
        vals.push(
            S::parse_str(p)
                .map_err(|e| field_err("ic", format!("value {} (`{p}`): {e}", i + 1)))?,
        );
    }
    let seeds: [S; 5] = vals.try_into().expect("length checked above");
    InitialConditions::new(seeds).map_err(|e| field_err("ic", e.to_string()))
}

/// Coefficient rule: a single value for a constant sequence,
/// `periodic:v1,v2,...`, or `explicit:v1,v2,...`.
pub fn parse_coefficients<S: Scalar>(
    field: &'static str,
    text: &str,
) -> Result<CoefficientSequence<S>, ConfigError> {
    let parse_list = |body: &str| -> Result<Vec<S>, ConfigError> {
        body.split(',')
            .map(str::trim)
            .map(|p| S::parse_str(p).map_err(|e| field_err(field, format!("`{p}`: {e}"))))
            .collect()
    };
    if let Some(body) = text.strip_prefix("periodic:") {
        CoefficientSequence::periodic(parse_list(body)?)
            .map_err(|e| field_err(field, e.to_string()))
    } else if let Some(body) = text.strip_prefix("explicit:") {
        CoefficientSequence::explicit(parse_list(body)?)
            .map_err(|e| field_err(field, e.to_string()))
    } else {
        let v = S::parse_str(text.trim())
            .map_err(|e| field_err(field, format!("`{}`: {e}", text.trim())))?;
        CoefficientSequence::constant(v).map_err(|e| field_err(field, e.to_string()))
    }
}

pub fn parse_backend(text: &str) -> Result<Backend, ConfigError> {
    match text.trim() {
        "rational" => Ok(Backend::Rational),
        "float" => Ok(Backend::Float),
        other => Err(field_err("backend", format!("`{other}` is not rational|float"))),
    }
}

pub fn parse_form(text: &str) -> Result<IndexForm, ConfigError> {
    match text.trim() {
        "x" => Ok(IndexForm::X),
        "u" => Ok(IndexForm::U),
        other => Err(field_err("form", format!("`{other}` is not x|u"))),
    }
}

/// Flag values merged over the file; still textual, typed per command later.
#[derive(Debug, Default, Clone)]
pub struct Merged {
    pub ic: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub backend: Option<Backend>,
    pub form: Option<IndexForm>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub max_period: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl Merged {
    /// Flags first, then the file for anything the flags left unset.
    pub fn new(flags: Merged, file: Option<FileConfig>) -> Result<Merged, ConfigError> {
        let mut merged = flags;
        if let Some(f) = file {
            merged.ic = merged.ic.or(f.ic);
            merged.a = merged.a.or(f.a);
            merged.b = merged.b.or(f.b);
            if merged.backend.is_none() {
                merged.backend = f.backend.as_deref().map(parse_backend).transpose()?;
            }
            if merged.form.is_none() {
                merged.form = f.form.as_deref().map(parse_form).transpose()?;
            }
            merged.n_max = merged.n_max.or(f.n_max);
            merged.out = merged.out.or(f.out);
            merged.tol = merged.tol.or(f.tol);
            merged.max_period = merged.max_period.or(f.max_period);
            merged.seed = merged.seed.or(f.seed);
            merged.samples = merged.samples.or(f.samples);
        }
        Ok(merged)
    }

    pub fn require_ic(&self) -> Result<&str, ConfigError> {
        self.ic.as_deref().ok_or(ConfigError::Missing("ic"))
    }

    pub fn require_a(&self) -> Result<&str, ConfigError> {
        self.a.as_deref().ok_or(ConfigError::Missing("a"))
    }

    pub fn require_b(&self) -> Result<&str, ConfigError> {
        self.b.as_deref().ok_or(ConfigError::Missing("b"))
    }
}
