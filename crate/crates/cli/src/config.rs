//! `RunConfig`: the JSON document every subcommand reads.

use std::fmt;
use std::path::{Path, PathBuf};

use num_rational::Rational64;
use rmcurve_core::curve::CurveSpec;
use rmcurve_core::error::SpecError;
use rmcurve_core::evolution::Convention;
use rmcurve_core::mc::MAX_N;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    #[serde(default)]
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub endpoints: Vec<Endpoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoint {
    pub a: f64,
    pub fraction: Fraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Single { t: f64 },
    Grid { grid: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    #[serde(rename = "N")]
    pub n: usize,
    pub draws: usize,
    pub seed: u64,
    pub bins: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            n: 200,
            draws: 500,
            seed: 0,
            bins: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionName {
    #[default]
    Paper,
    Sqrt,
}

impl From<ConventionName> for Convention {
    fn from(c: ConventionName) -> Self {
        match c {
            ConventionName::Paper => Convention::Paper,
            ConventionName::Sqrt => Convention::Sqrt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analysis {
    pub points_per_cut: usize,
    pub bulk_window: Option<[f64; 2]>,
    /// 1-based edge indices; `None` means the two outermost edges.
    pub edges: Option<Vec<usize>>,
    pub convention: ConventionName,
}

impl Default for Analysis {
    fn default() -> Self {
        Analysis {
            points_per_cut: 50,
            bulk_window: None,
            edges: None,
            convention: ConventionName::Paper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            dir: PathBuf::from("rmcurve-out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl Output {
    pub fn csv(&self) -> bool {
        self.formats.contains(&Format::Csv)
    }

    pub fn json(&self) -> bool {
        self.formats.contains(&Format::Json)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, message: String },
    Parse { line: usize, column: usize, message: String },
    Invalid { field: String, message: String },
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Io { .. } => "CONFIG_IO",
            ConfigError::Parse { .. } => "CONFIG_PARSE",
            ConfigError::Invalid { .. } => "CONFIG_INVALID",
        }
    }

    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            ConfigError::Parse { line, column, message } => write!(f, "line {line}, column {column}: {message}"),
            ConfigError::Invalid { field, message } => write!(f, "{field}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A `summary.json` written by a previous run; its `config` is a valid input.
#[derive(Deserialize)]
struct Echo {
    config: RunConfig,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

/// Parses a config, or the `config` member of a previous summary, and validates it.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg = match serde_json::from_str::<RunConfig>(text) {
        Ok(c) => c,
        Err(first) => match serde_json::from_str::<Echo>(text) {
            Ok(echo) => echo.config,
            Err(_) => {
                return Err(ConfigError::Parse {
                    line: first.line(),
                    column: first.column(),
                    message: first.to_string(),
                })
            }
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn spec(&self) -> Result<CurveSpec, ConfigError> {
        for (i, e) in self.model.endpoints.iter().enumerate() {
            if e.fraction.den <= 0 {
                return Err(ConfigError::invalid(
                    format!("model.endpoints[{i}].fraction.den"),
                    "denominator must be positive",
                ));
            }
        }
        let a = self.model.endpoints.iter().map(|e| e.a).collect();
        let eps = self.fractions();
        CurveSpec::new(a, eps).map_err(|e| match e {
            SpecError::FractionSum(s) => ConfigError::invalid("model.endpoints", format!("fractions sum ≠ 1 (sum is {s})")),
            SpecError::NonFinite(_) | SpecError::DuplicateEigenvalue(_) => {
                ConfigError::invalid("model.endpoints[].a", e.to_string())
            }
            SpecError::NonPositiveFraction { index, .. } => {
                ConfigError::invalid(format!("model.endpoints[{index}].fraction"), e.to_string())
            }
            other => ConfigError::invalid("model.endpoints", other.to_string()),
        })
    }

    pub fn fractions(&self) -> Vec<Rational64> {
        self.model
            .endpoints
            .iter()
            .map(|e| Rational64::new(e.fraction.num, e.fraction.den))
            .collect()
    }

    pub fn convention(&self) -> Convention {
        self.analysis.convention.into()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.spec()?;
        let s = &self.sampling;
        if s.n == 0 || s.n > MAX_N {
            return Err(ConfigError::invalid("sampling.N", format!("N must be in 1..={MAX_N}")));
        }
        for f in self.fractions() {
            let d = *f.denom() as usize;
            if s.n % d != 0 {
                return Err(ConfigError::invalid("sampling.N", format!("N not multiple of {d}")));
            }
        }
        if s.draws == 0 {
            return Err(ConfigError::invalid("sampling.draws", "draws must be at least 1"));
        }
        if s.bins == 0 {
            return Err(ConfigError::invalid("sampling.bins", "bins must be at least 1"));
        }
        let in_unit = |t: f64| t > 0.0 && t < 1.0;
        match &self.time {
            Some(TimeSpec::Single { t }) if !in_unit(*t) => {
                return Err(ConfigError::invalid("time.t", format!("t = {t} outside (0, 1)")));
            }
            Some(TimeSpec::Grid { grid }) => {
                if grid.is_empty() {
                    return Err(ConfigError::invalid("time.grid", "grid is empty"));
                }
                if let Some((i, t)) = grid.iter().enumerate().find(|(_, t)| !in_unit(**t)) {
                    return Err(ConfigError::invalid(format!("time.grid[{i}]"), format!("t = {t} outside (0, 1)")));
                }
                if grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ConfigError::invalid("time.grid", "grid must be strictly increasing"));
                }
            }
            _ => {}
        }
        let a = &self.analysis;
        if a.points_per_cut < 2 {
            return Err(ConfigError::invalid("analysis.points_per_cut", "must be at least 2"));
        }
        if let Some([lo, hi]) = a.bulk_window {
            if !(hi > lo) {
                return Err(ConfigError::invalid("analysis.bulk_window", "window must satisfy lo < hi"));
            }
        }
        if let Some(edges) = &a.edges {
            if edges.is_empty() || edges.contains(&0) {
                return Err(ConfigError::invalid("analysis.edges", "edge indices are 1-based and non-empty"));
            }
        }
        if self.output.formats.is_empty() {
            return Err(ConfigError::invalid("output.formats", "choose at least one of csv, json"));
        }
        Ok(())
    }
}
