//! Front end for scanning zoo metrics: JSON configs in, JSON or CSV reports
//! out, exit codes 0 (pass), 1 (a check failed), 2 (unusable config).

// `!(a > b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::Path;

pub mod config;
pub mod error;
pub mod metrics;
pub mod report;
pub mod run;

pub use config::{Check, Format, ScanConfig};
pub use error::ConfigError;
pub use run::{run_config, ScanReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Runs a scan and writes its report. `output` overrides `config.output.path`.
pub fn execute(cfg: &ScanConfig, output: Option<&Path>) -> Result<ScanReport, ConfigError> {
    let report = run_config(cfg)?;
    let format = cfg.output.format;
    let path = report::resolve_path(output.or(cfg.output.path.as_deref()), format);
    report::write(&report::render(&report, format), path.as_deref())?;
    Ok(report)
}

/// One line per failing quantity, for the terminal.
pub fn failure_lines(report: &ScanReport) -> Vec<String> {
    let mut out: Vec<String> = report
        .summary
        .iter()
        .filter(|(_, s)| !s.pass)
        .map(|(name, s)| {
            format!(
                "{} {name}: max {:e} > tolerance {:e}",
                s.check,
                s.max.unwrap_or(f64::NAN),
                s.tolerance.unwrap_or(f64::NAN)
            )
        })
        .collect();
    out.extend(report.failures.iter().map(|f| format!("point {}: {}", f.index, f.error)));
    out
}
