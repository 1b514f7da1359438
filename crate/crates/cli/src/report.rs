//! Report serialization and output placement.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::error::ConfigError;
use crate::run::ScanReport;

/// Directory for reports when neither the config nor the command line
/// names an output path.
pub const REPORT_DIR_ENV: &str = "FINSLER_REPORT_DIR";

pub fn to_json(report: &ScanReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Flattens `per_point`: `index, x0.., y0.., F, scal, einstein_residual`,
/// then every residual name in sorted order. Missing values are empty.
pub fn to_csv(report: &ScanReport) -> String {
    let dim = report.per_point.first().map_or(0, |r| r.x.len());
    let names: BTreeSet<&str> = report
        .per_point
        .iter()
        .flat_map(|r| r.residuals.keys().map(String::as_str))
        .collect();
    let mut header = vec!["index".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    header.extend((0..dim).map(|i| format!("y{i}")));
    header.extend(["F", "scal", "einstein_residual"].map(String::from));
    header.extend(names.iter().map(|s| s.to_string()));

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    let num = |v: f64| format!("{v:?}");
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for r in &report.per_point {
        let mut row = vec![r.index.to_string()];
        row.extend(r.x.iter().chain(&r.y).map(|v| num(*v)));
        row.push(num(r.f));
        row.push(opt(r.scal));
        row.push(opt(r.einstein_residual));
        row.extend(names.iter().map(|n| opt(r.residuals.get(*n).copied())));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn render(report: &ScanReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(report),
    }
}

/// Where a report goes: an explicit path, else a file in
/// `$FINSLER_REPORT_DIR`, else stdout (`None`).
pub fn resolve_path(explicit: Option<&Path>, format: Format) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    let dir = std::env::var_os(REPORT_DIR_ENV).filter(|d| !d.is_empty())?;
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    Some(PathBuf::from(dir).join(format!("finsler-report.{ext}")))
}

pub fn write(text: &str, path: Option<&Path>) -> Result<(), ConfigError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| ConfigError::Output {
            path: p.to_path_buf(),
            source: e,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| ConfigError::Output {
                path: PathBuf::from("<stdout>"),
                source: e,
            }),
    }
}
