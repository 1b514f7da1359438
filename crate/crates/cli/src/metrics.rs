//! Builds zoo metrics, conformal factors and cylinder profiles from their
//! config names.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use finsler::conformal::{CylinderPoint, CylinderSetup};
use finsler::zoo::{
    make_euclidean, make_randers, make_riemannian, make_s5_example, make_warped, ConformalMetric, CosPlusConst, Factor,
    LinearProfile, NamedField, NamedProfile, WarpedDiagnostics,
};
use finsler::{FinslerMetric, MetricField, PointState, ScalarField};
use serde_json::Value;

use crate::config::{ConformalSpec, MetricSpec};
use crate::error::ConfigError;

pub type WarpedFn = dyn Fn(&PointState) -> finsler::Result<WarpedDiagnostics> + Send + Sync;
pub type CylinderFn = dyn Fn(&PointState) -> finsler::Result<Option<CylinderPoint>> + Send + Sync;

/// A metric ready to scan, plus the extra structure some checks need.
#[derive(Clone)]
pub struct BuiltMetric {
    pub metric: Arc<dyn FinslerMetric>,
    /// The same metric as a Riemannian field in the same chart, for the
    /// finite-difference oracle.
    pub field: Option<NamedField>,
    pub riemannian: bool,
    pub warped: Option<Arc<WarpedFn>>,
    pub cylinder: Option<Arc<CylinderFn>>,
}

impl std::fmt::Debug for BuiltMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BuiltMetric")
            .field("metric", &self.metric.label())
            .field("field", &self.field)
            .field("riemannian", &self.riemannian)
            .field("warped", &self.warped.is_some())
            .field("cylinder", &self.cylinder.is_some())
            .finish()
    }
}

impl BuiltMetric {
    fn plain(metric: Arc<dyn FinslerMetric>, riemannian: bool) -> Self {
        Self {
            metric,
            field: None,
            riemannian,
            warped: None,
            cylinder: None,
        }
    }

    fn riemannian_field(field: NamedField) -> Self {
        let metric: Arc<dyn FinslerMetric> = match field {
            NamedField::Euclidean(n) => Arc::new(make_euclidean(n).expect("parsed dimension is positive")),
            _ => Arc::new(make_riemannian(field)),
        };
        Self {
            field: Some(field),
            ..Self::plain(metric, true)
        }
    }
}

/// Names accepted by [`build_metric`] without parameters or with `n`.
pub const METRIC_KINDS: &[&str] = &[
    "euclidean",
    "euclidean<N>",
    "sphere2",
    "sphere3",
    "hyperbolic2",
    "randers",
    "s5_example",
    "warped",
    "conformal",
];

struct Params<'a> {
    kind: &'a str,
    map: &'a BTreeMap<String, Value>,
}

impl<'a> Params<'a> {
    fn only(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::Invalid(format!(
                "unknown parameter `{k}` for metric `{}` (allowed: {allowed:?})",
                self.kind
            ))),
            None => Ok(()),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| self.bad(key, "a number")),
        }
    }

    fn str(&self, key: &str) -> Result<&'a str, ConfigError> {
        self.map
            .get(key)
            .ok_or_else(|| self.missing(key))?
            .as_str()
            .ok_or_else(|| self.bad(key, "a string"))
    }

    fn vec(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.map
            .get(key)
            .ok_or_else(|| self.missing(key))?
            .as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| self.bad(key, "an array of numbers"))
    }

    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::Invalid(format!("metric `{}` needs parameter `{key}`", self.kind))
    }

    fn bad(&self, key: &str, what: &str) -> ConfigError {
        ConfigError::Invalid(format!("parameter `{key}` of metric `{}` must be {what}", self.kind))
    }
}

fn named_field(name: &str) -> Result<NamedField, ConfigError> {
    NamedField::parse(name).ok_or_else(|| ConfigError::UnknownMetric(name.to_string()))
}

pub fn build_metric(spec: &MetricSpec) -> Result<BuiltMetric, ConfigError> {
    let p = Params {
        kind: &spec.kind,
        map: &spec.params,
    };
    match spec.kind.as_str() {
        "euclidean" => {
            p.only(&["n"])?;
            let n = p.f64_or("n", 2.0)?;
            if n.fract() != 0.0 || n < 1.0 {
                return Err(p.bad("n", "a positive integer"));
            }
            Ok(BuiltMetric::riemannian_field(NamedField::Euclidean(n as usize)))
        }
        "randers" => {
            p.only(&["b"])?;
            Ok(BuiltMetric::plain(Arc::new(make_randers(p.vec("b")?)?), false))
        }
        "s5_example" => {
            p.only(&["c"])?;
            let (m, _) = make_s5_example(p.f64_or("c", 2.0)?)?;
            let m = Arc::new(m);
            let w = Arc::clone(&m);
            Ok(BuiltMetric {
                field: Some(NamedField::Sphere3),
                warped: Some(Arc::new(move |q: &PointState| w.diagnostics(q))),
                ..BuiltMetric::plain(m, true)
            })
        }
        "warped" => {
            p.only(&["m1", "m2", "warp"])?;
            let f1 = named_field(p.str("m1")?)?;
            let f2 = named_field(p.str("m2")?)?;
            let warp = parse_factor(p.str("warp")?, f1.dim())?;
            let m = Arc::new(make_warped(make_riemannian(f1), make_riemannian(f2), warp, 64)?);
            let w = Arc::clone(&m);
            Ok(BuiltMetric {
                warped: Some(Arc::new(move |q: &PointState| w.diagnostics(q))),
                ..BuiltMetric::plain(m, true)
            })
        }
        "conformal" => {
            p.only(&["base", "u"])?;
            let base_spec: MetricSpec = serde_json::from_value(p.map.get("base").cloned().ok_or_else(|| p.missing("base"))?)
                .map_err(ConfigError::Parse)?;
            let base = build_metric(&base_spec)?;
            let u = parse_factor(p.str("u")?, base.metric.dim())?;
            Ok(BuiltMetric::plain(
                Arc::new(ConformalMetric::new(Arc::clone(&base.metric), u)),
                base.riemannian,
            ))
        }
        other => {
            let field = named_field(other)?;
            p.only(&[])?;
            Ok(BuiltMetric::riemannian_field(field))
        }
    }
}

/// Builds the cylinder `((0, ε) × M₂, sqrt(y_t² + φ'² F₂²))` from the
/// conformal section of a config.
pub fn build_cylinder(spec: &ConformalSpec) -> Result<BuiltMetric, ConfigError> {
    let phi = parse_profile(spec.phi.as_deref().unwrap_or("cos+c"), spec.c)?;
    let field = named_field(spec.m2.as_deref().unwrap_or("sphere2"))?;
    let eps = spec.eps.unwrap_or(PI);
    let setup = Arc::new(CylinderSetup::new(make_riemannian(field), phi, eps)?);
    let s = Arc::clone(&setup);
    Ok(BuiltMetric {
        cylinder: Some(Arc::new(move |q: &PointState| s.check_point(q))),
        ..BuiltMetric::plain(setup, true)
    })
}

/// Conformal factors and warping functions:
///
/// `const:V`, `linear:c1,...,cn`, `sin:K`, `cosplus:K,C` (`cos x_K + C`),
/// `neglogcosplus:K,C` (`-ln(cos x_K + C)`), `shiftedcos:K,A` (`A + cos x_K`).
pub fn parse_factor(spec: &str, dim: usize) -> Result<Factor, ConfigError> {
    let bad = |why: &str| ConfigError::Invalid(format!("bad factor `{spec}`: {why}"));
    let (name, args) = spec.split_once(':').ok_or_else(|| bad("expected `name:args`"))?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|a| a.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("arguments must be numbers"))?;
    let coord = |v: f64| -> Result<usize, ConfigError> {
        if v.fract() == 0.0 && v >= 0.0 && (v as usize) < dim {
            Ok(v as usize)
        } else {
            Err(bad(&format!("coordinate index must be in 0..{dim}")))
        }
    };
    let factor = match (name, nums.as_slice()) {
        ("const", [v]) => Factor::Constant { dim, value: *v },
        ("linear", cs) if cs.len() == dim => Factor::Linear {
            coeffs: cs.to_vec(),
            offset: 0.0,
        },
        ("linear", _) => return Err(bad(&format!("needs {dim} coefficients"))),
        ("sin", [k]) => Factor::Sin { dim, coord: coord(*k)? },
        ("cosplus", [k, c]) => Factor::CosPlus {
            dim,
            coord: coord(*k)?,
            c: *c,
        },
        ("neglogcosplus", [k, c]) => Factor::NegLogCosPlus {
            dim,
            coord: coord(*k)?,
            c: *c,
        },
        ("shiftedcos", [k, a]) => Factor::ShiftedCos {
            dim,
            coord: coord(*k)?,
            a: *a,
        },
        _ => return Err(bad("unknown name or wrong number of arguments")),
    };
    debug_assert_eq!(factor.dim(), dim);
    Ok(factor)
}

/// Cylinder profiles: `cos+c` (with `c` given separately, default 2),
/// `cos+C`, or `linear:SLOPE,INTERCEPT`.
pub fn parse_profile(spec: &str, c: Option<f64>) -> Result<NamedProfile, ConfigError> {
    let bad = |why: &str| ConfigError::Invalid(format!("bad profile `{spec}`: {why}"));
    if let Some(rest) = spec.strip_prefix("cos+") {
        let c = if rest == "c" {
            c.unwrap_or(2.0)
        } else {
            rest.parse().map_err(|_| bad("expected `cos+c` or `cos+<number>`"))?
        };
        return Ok(NamedProfile::CosPlus(CosPlusConst { c }));
    }
    if let Some(rest) = spec.strip_prefix("linear:") {
        let nums: Vec<f64> = rest
            .split(',')
            .map(|a| a.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("arguments must be numbers"))?;
        if let [slope, intercept] = nums[..] {
            return Ok(NamedProfile::Linear(LinearProfile { slope, intercept }));
        }
        return Err(bad("expected `linear:SLOPE,INTERCEPT`"));
    }
    Err(bad("unknown profile"))
}
