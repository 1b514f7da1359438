//! Point scans: sample a metric, evaluate the requested checks at every
//! point in parallel, and summarize the residuals against tolerances.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use finsler::conformal::{conformal_diagnostics, degenerate_warning, eq122b_gap};
use finsler::curvature::{cartan_tensor, lower_curvature, property_diagnostics, ricci_scalar_einstein, Geometry, RicciData};
use finsler::oracle::riemann_ricci_fd;
use finsler::zoo::{make_conformal, ConformalPair, Factor};
use finsler::{Domain, FinslerMetric, PointState, SamplePlan};
use ndarray::{ArrayBase, Data, Dimension};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Check, ScanConfig};
use crate::error::ConfigError;
use crate::metrics::{build_cylinder, build_metric, parse_factor, BuiltMetric};

/// Bumped whenever a report field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Residuals of the property suite, in the order the pipeline reports them.
pub const PROPERTY_RESIDUALS: &[&str] = &[
    "homogeneity",
    "g_homogeneity",
    "euler",
    "g_symmetry",
    "inverse",
    "min_eigenvalue",
    "cartan_symmetry",
    "cartan_contraction",
    "chern_symmetry",
    "compatibility",
    "n_gamma",
    "delta_f2",
];

pub const WARPED_RESIDUALS: &[&str] = &[
    "warped_block",
    "warped_mixed_connection",
    "warped_first_connection",
    "warped_mixed_curvature",
    "warped_first_curvature",
];

pub const CYLINDER_RESIDUALS: &[&str] = &["hessian_residual", "phi_ddot", "einstein_cylinder", "einstein_base"];

pub const ORACLE_RESIDUALS: &[&str] = &["oracle_christoffel", "oracle_riemann", "oracle_ricci", "oracle_scal"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub tool: String,
    pub metric: String,
    pub config: ScanConfig,
    pub per_point: Vec<PointRecord>,
    pub failures: Vec<PointFailure>,
    pub warnings: Vec<String>,
    pub summary: BTreeMap<String, Summary>,
    pub pass: bool,
    /// Wall-clock time of the scan. The only field that varies between
    /// runs of the same config.
    pub timing_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(rename = "F")]
    pub f: f64,
    pub scal: Option<f64>,
    pub einstein_residual: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub error: String,
}

/// Statistics of one named quantity over the successful points.
/// `pass` is `max <= tolerance`; quantities without a tolerance always pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub check: Check,
    pub count: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

enum Outcome {
    Record(PointRecord),
    Excluded(String),
    Failed(PointFailure),
}

struct Scan<'a> {
    cfg: &'a ScanConfig,
    built: BuiltMetric,
    pair: Option<ConformalPair<Arc<dyn FinslerMetric>, Factor>>,
}

/// Builds the metric, samples it, and evaluates every check. Only config
/// problems are errors; geometric failures at single points end up in
/// [`ScanReport::failures`].
pub fn run_config(cfg: &ScanConfig) -> Result<ScanReport, ConfigError> {
    let start = Instant::now();
    cfg.validate()?;
    let built = match &cfg.metric {
        Some(spec) => build_metric(spec)?,
        None => build_cylinder(cfg.conformal.as_ref().expect("validated"))?,
    };
    let dim = built.metric.dim();
    let has = |c: Check| cfg.checks.contains(&c);
    if has(Check::Warped) && built.warped.is_none() {
        return Err(ConfigError::Invalid(format!(
            "warped check needs a warped metric, got `{}`",
            built.metric.label()
        )));
    }
    if has(Check::Oracle) && built.field.is_none() {
        return Err(ConfigError::Invalid(format!(
            "oracle check needs a Riemannian zoo field, got `{}`",
            built.metric.label()
        )));
    }
    let pair = if has(Check::Conformal) {
        if dim < 3 {
            return Err(ConfigError::Invalid(format!("conformal check needs dimension >= 3, got {dim}")));
        }
        let spec = cfg.conformal.as_ref().and_then(|c| c.u.as_deref()).expect("validated");
        Some(make_conformal(Arc::clone(&built.metric), parse_factor(spec, dim)?)?)
    } else {
        None
    };

    let mut plan = SamplePlan::new(cfg.samples.count, cfg.samples.seed);
    plan.y_scale = cfg.samples.y_scale;
    if let Some(d) = &cfg.samples.domain {
        if d.lower.len() != dim {
            return Err(ConfigError::Invalid(format!(
                "samples.domain has dimension {}, metric {dim}",
                d.lower.len()
            )));
        }
        plan.domain = Some(Domain::new(d.lower.clone(), d.upper.clone()));
    }
    let points = plan.points(&*built.metric);

    let scan = Scan { cfg, built, pair };
    let outcomes: Vec<Outcome> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| scan.point(i, p))
        .collect();

    let mut per_point = Vec::new();
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Record(r) => per_point.push(r),
            Outcome::Excluded(w) => warnings.push(w),
            Outcome::Failed(f) => failures.push(f),
        }
    }
    let summary = scan.summarize(&per_point);
    let pass = failures.is_empty() && summary.values().all(|s| s.pass);
    Ok(ScanReport {
        schema_version: SCHEMA_VERSION,
        tool: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        metric: scan.built.metric.label(),
        config: cfg.clone(),
        per_point,
        failures,
        warnings,
        summary,
        pass,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn max_abs<S: Data<Elem = f64>, D: Dimension>(a: &ArrayBase<S, D>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn max_dev<S: Data<Elem = f64>, T: Data<Elem = f64>, D: Dimension>(a: &ArrayBase<S, D>, b: &ArrayBase<T, D>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

impl Scan<'_> {
    fn point(&self, index: usize, p: &PointState) -> Outcome {
        let p = p.clone().with_order(self.cfg.order);
        match self.evaluate(index, &p) {
            Ok(Some(r)) => Outcome::Record(r),
            Ok(None) => Outcome::Excluded(degenerate_warning(&p)),
            Err(e) => Outcome::Failed(PointFailure {
                index,
                x: p.x().to_vec(),
                y: p.y().to_vec(),
                error: e.to_string(),
            }),
        }
    }

    /// `Ok(None)` marks a sample the cylinder check excludes.
    fn evaluate(&self, index: usize, p: &PointState) -> finsler::Result<Option<PointRecord>> {
        let m = &*self.built.metric;
        let mut rec = PointRecord {
            index,
            x: p.x().to_vec(),
            y: p.y().to_vec(),
            f: m.value_at(p.x(), p.y()),
            scal: None,
            einstein_residual: None,
            residuals: BTreeMap::new(),
        };
        let res = &mut rec.residuals;
        for check in &self.cfg.checks {
            match check {
                Check::Properties => {
                    res.extend(property_diagnostics(m, p)?);
                    if self.built.riemannian {
                        res.insert("cartan_norm".into(), max_abs(&cartan_tensor(m, p)?));
                    }
                }
                Check::Einstein => {
                    let ric = ricci_scalar_einstein(m, p)?;
                    rec.scal = Some(ric.scal);
                    rec.einstein_residual = Some(ric.einstein_residual);
                    if let Some(s) = self.expected_scal() {
                        res.insert("scal_error".into(), (ric.scal - s).abs());
                    }
                }
                Check::Conformal => {
                    let pair = self.pair.as_ref().expect("built with the scan");
                    let d = conformal_diagnostics(m, &pair.u, p)?;
                    let ee9 = d.ee9_residual.as_ref().expect("dimension checked");
                    res.insert("ee9_residual".into(), max_abs(ee9));
                    res.insert(self.cartan_term_name().into(), d.ee9_cartan_term.abs());
                    let gap = eq122b_gap(pair, p)?;
                    res.insert("eq122b_gap".into(), max_abs(&gap.gap));
                    res.insert("classical_gap".into(), max_abs(&gap.classical_gap));
                }
                Check::Cylinder => {
                    let check = self.built.cylinder.as_ref().expect("cylinder scans build one");
                    let Some(cp) = check(p)? else {
                        return Ok(None);
                    };
                    res.insert("hessian_residual".into(), cp.hessian_residual);
                    res.insert("phi_ddot".into(), cp.phi_ddot);
                    res.insert("einstein_cylinder".into(), cp.einstein_cylinder);
                    res.insert("einstein_base".into(), cp.einstein_base);
                }
                Check::Warped => {
                    let d = (self.built.warped.as_ref().expect("validated"))(p)?;
                    res.insert("warped_block".into(), d.block);
                    res.insert("warped_mixed_connection".into(), d.mixed_connection);
                    res.insert("warped_first_connection".into(), d.first_connection);
                    res.insert("warped_mixed_curvature".into(), d.mixed_curvature);
                    res.insert("warped_first_curvature".into(), d.first_curvature);
                }
                Check::Oracle => {
                    let field = self.built.field.as_ref().expect("validated");
                    let o = riemann_ricci_fd(field, p.x())?;
                    let geo = Geometry::at(m, p)?;
                    let r = geo.hh_curvature()?;
                    let ric = RicciData::from_curvature(&r, geo.g(), geo.g_inv());
                    res.insert("oracle_christoffel".into(), max_dev(&geo.chern()?, &o.christoffel));
                    res.insert(
                        "oracle_riemann".into(),
                        max_dev(&lower_curvature(&r, geo.g()), &o.riemann_lowered),
                    );
                    res.insert("oracle_ricci".into(), max_dev(&ric.ricci, &o.ricci));
                    res.insert("oracle_scal".into(), (ric.scal - o.scal).abs());
                }
            }
        }
        Ok(Some(rec))
    }

    fn expected_scal(&self) -> Option<f64> {
        self.cfg.expect.as_ref().and_then(|e| e.scal)
    }

    /// The Cartan term only has a tolerance when it must vanish, i.e. on
    /// Riemannian metrics.
    fn cartan_term_name(&self) -> &'static str {
        if self.built.riemannian {
            "ee9_cartan_term"
        } else {
            "ee9_cartan_term_finsler"
        }
    }

    /// Every quantity a check can produce, so the summary lists all of them
    /// even when no point succeeded.
    fn names(&self, check: Check) -> Vec<&'static str> {
        let mut names = match check {
            Check::Properties => PROPERTY_RESIDUALS.to_vec(),
            Check::Einstein => vec!["scal", "einstein_residual", "scal_spread"],
            Check::Conformal => vec!["ee9_residual", self.cartan_term_name(), "eq122b_gap", "classical_gap"],
            Check::Cylinder => CYLINDER_RESIDUALS.to_vec(),
            Check::Warped => WARPED_RESIDUALS.to_vec(),
            Check::Oracle => ORACLE_RESIDUALS.to_vec(),
        };
        if check == Check::Properties && self.built.riemannian {
            names.push("cartan_norm");
        }
        if check == Check::Einstein && self.expected_scal().is_some() {
            names.push("scal_error");
        }
        names
    }

    fn summarize(&self, records: &[PointRecord]) -> BTreeMap<String, Summary> {
        let mut out = BTreeMap::new();
        for &check in &self.cfg.checks {
            for name in self.names(check) {
                let values: Vec<f64> = match name {
                    "scal" => records.iter().filter_map(|r| r.scal).collect(),
                    "einstein_residual" => records.iter().filter_map(|r| r.einstein_residual).collect(),
                    "scal_spread" => {
                        let scal: Vec<f64> = records.iter().filter_map(|r| r.scal).collect();
                        if scal.is_empty() {
                            vec![]
                        } else {
                            let hi = scal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                            let lo = scal.iter().copied().fold(f64::INFINITY, f64::min);
                            vec![hi - lo]
                        }
                    }
                    _ => records.iter().filter_map(|r| r.residuals.get(name).copied()).collect(),
                };
                out.insert(name.to_string(), summary(check, &values, self.cfg.tolerance(name)));
            }
        }
        out
    }
}

fn summary(check: Check, values: &[f64], tolerance: Option<f64>) -> Summary {
    let count = values.len();
    let (min, max, mean) = if count == 0 {
        (None, None, None)
    } else {
        (
            Some(values.iter().copied().fold(f64::INFINITY, f64::min)),
            Some(values.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            Some(values.iter().sum::<f64>() / count as f64),
        )
    };
    let pass = match tolerance {
        Some(t) => values.iter().all(|v| *v <= t),
        None => true,
    };
    Summary {
        check,
        count,
        min,
        max,
        mean,
        tolerance,
        pass,
    }
}
