//! Scan configuration, read from JSON. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ConfigError;

/// Default number of samples per scan.
pub const DEFAULT_COUNT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Absent only for cylinder scans, which build their own metric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSpec>,
    #[serde(default)]
    pub samples: SampleSpec,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Overrides of the per-residual defaults in [`default_tolerance`].
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conformal: Option<ConformalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_checks() -> Vec<Check> {
    vec![Check::Properties]
}

fn default_order() -> usize {
    finsler::jets::DEFAULT_ORDER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_y_scale")]
    pub y_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
}

fn default_count() -> usize {
    DEFAULT_COUNT
}

fn default_y_scale() -> f64 {
    1.0
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            count: DEFAULT_COUNT,
            seed: 0,
            y_scale: 1.0,
            domain: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Properties,
    Einstein,
    Conformal,
    Cylinder,
    Warped,
    Oracle,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::Properties => "properties",
            Check::Einstein => "einstein",
            Check::Conformal => "conformal",
            Check::Cylinder => "cylinder",
            Check::Warped => "warped",
            Check::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

/// Conformal factor `u` for conformal checks, or cylinder profile `φ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scal: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(ConfigError::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.checks.is_empty() {
            return Err(ConfigError::Invalid("no checks requested".into()));
        }
        if !(self.samples.y_scale.is_finite() && self.samples.y_scale > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "samples.y_scale must be positive, got {}",
                self.samples.y_scale
            )));
        }
        if self.order < 4 && self.checks.iter().any(|c| *c != Check::Properties) {
            return Err(ConfigError::Invalid(format!(
                "order {} is too low: curvature checks need order 4",
                self.order
            )));
        }
        if self.order < 3 {
            return Err(ConfigError::Invalid(format!("order {} is too low, need at least 3", self.order)));
        }
        if let Some(d) = &self.samples.domain {
            if d.lower.len() != d.upper.len() || d.lower.iter().zip(&d.upper).any(|(l, u)| !(l <= u)) {
                return Err(ConfigError::Invalid("samples.domain needs lower <= upper, same length".into()));
            }
        }
        for (k, v) in &self.tolerances {
            if !(*v >= 0.0) {
                return Err(ConfigError::Invalid(format!("tolerance {k} must be non-negative, got {v}")));
            }
        }
        let cylinder = self.checks.contains(&Check::Cylinder);
        match (&self.metric, cylinder) {
            (Some(_), true) => {
                return Err(ConfigError::Invalid(
                    "cylinder scans build their metric from `conformal`; drop `metric`".into(),
                ))
            }
            (None, false) => return Err(ConfigError::Invalid("missing `metric`".into())),
            _ => {}
        }
        let conf = self.conformal.clone().unwrap_or_default();
        if cylinder && conf.phi.is_none() {
            return Err(ConfigError::Invalid("cylinder check needs conformal.phi".into()));
        }
        if self.checks.contains(&Check::Conformal) && conf.u.is_none() {
            return Err(ConfigError::Invalid("conformal check needs conformal.u".into()));
        }
        Ok(())
    }

    /// Tolerance for a residual: the configured override or the default.
    pub fn tolerance(&self, name: &str) -> Option<f64> {
        self.tolerances.get(name).copied().or_else(|| default_tolerance(name))
    }
}

/// Built-in pass thresholds. Residuals without one are reported but never
/// fail a scan.
pub fn default_tolerance(name: &str) -> Option<f64> {
    let t = match name {
        "homogeneity" => 1e-9,
        "g_homogeneity" | "euler" | "n_gamma" => 1e-8,
        "cartan_symmetry" | "cartan_contraction" => 1e-9,
        "cartan_norm" => 1e-10,
        "chern_symmetry" => 0.0,
        "compatibility" => 1e-7,
        "delta_f2" => 1e-9,
        "inverse" => 1e-10,
        "einstein_residual" => 1e-6,
        "scal_spread" => 1e-6,
        "scal_error" => 1e-5,
        "ee9_residual" => 1e-10,
        "ee9_cartan_term" => 1e-10,
        "hessian_residual" => 1e-6,
        "warped_block" => 1e-12,
        "warped_mixed_connection" | "warped_first_connection" => 1e-7,
        "warped_mixed_curvature" => 1e-8,
        "warped_first_curvature" => 1e-6,
        "oracle_christoffel" => 1e-6,
        "oracle_riemann" | "oracle_ricci" | "oracle_scal" => 1e-5,
        _ => return None,
    };
    Some(t)
}
