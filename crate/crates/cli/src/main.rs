use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finsler_cli::config::{ConformalSpec, Expect, MetricSpec, OutputSpec, SampleSpec};
use finsler_cli::{execute, failure_lines, Check, ConfigError, Format, ScanConfig, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "finsler", version, about = "Scan Finsler metrics for curvature identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scan config.
    #[command(alias = "run")]
    Scan {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Append the finite-difference oracle comparison.
        #[arg(long)]
        with_oracle: bool,
    },
    /// Horizontal Ricci, scalar curvature and Einstein residual.
    EinsteinCheck {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        expect_scal: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Residual of the conformal Einstein equation for a factor `u`.
    ConformalCheck {
        #[command(flatten)]
        metric: MetricArgs,
        /// Factor spec, e.g. `const:1.0` or `linear:0.1,0,0`.
        #[arg(long)]
        u: String,
        #[command(flatten)]
        common: Common,
    },
    /// Hessian identity of the profile on a warped cylinder.
    CylinderCheck {
        /// `cos+c`, `cos+<number>` or `linear:SLOPE,INTERCEPT`.
        #[arg(long)]
        phi: String,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value = "sphere2")]
        m2: String,
        #[command(flatten)]
        common: Common,
    },
    /// Structure of a warped product against its factors.
    WarpedCheck {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Pipeline curvature against the finite-difference oracle.
    OracleDiff {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct MetricArgs {
    /// Metric kind, e.g. sphere2, euclidean3, randers, s5_example.
    #[arg(long)]
    metric: String,
    /// Metric parameter `key=value`; the value is read as JSON when it parses.
    #[arg(long = "param", value_parser = parse_kv)]
    params: Vec<(String, String)>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = finsler_cli::config::DEFAULT_COUNT)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    y_scale: f64,
    #[arg(long, default_value_t = finsler::jets::DEFAULT_ORDER)]
    order: usize,
    /// Tolerance override `name=value`.
    #[arg(long = "tol", value_parser = parse_kv)]
    tolerances: Vec<(String, String)>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    with_oracle: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got `{s}`"))
}

impl MetricArgs {
    fn spec(&self) -> MetricSpec {
        let params = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.clone()))))
            .collect();
        MetricSpec {
            kind: self.metric.clone(),
            params,
        }
    }
}

impl Common {
    fn config(&self, metric: Option<MetricSpec>, mut checks: Vec<Check>) -> Result<ScanConfig, ConfigError> {
        let tolerances = self
            .tolerances
            .iter()
            .map(|(k, v)| {
                v.parse()
                    .map(|t| (k.clone(), t))
                    .map_err(|_| ConfigError::Invalid(format!("tolerance {k} must be a number, got `{v}`")))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        if self.with_oracle && !checks.contains(&Check::Oracle) {
            checks.push(Check::Oracle);
        }
        Ok(ScanConfig {
            metric,
            samples: SampleSpec {
                count: self.samples,
                seed: self.seed,
                y_scale: self.y_scale,
                domain: None,
            },
            order: self.order,
            tolerances,
            checks,
            conformal: None,
            expect: None,
            output: OutputSpec {
                format: self.format.into(),
                path: self.output.clone(),
            },
        })
    }
}

fn config_for(command: Command) -> Result<(ScanConfig, Option<PathBuf>), ConfigError> {
    let (cfg, output) = match command {
        Command::Scan {
            config,
            output,
            format,
            with_oracle,
        } => {
            let mut cfg = ScanConfig::from_path(&config)?;
            if let Some(f) = format {
                cfg.output.format = f.into();
            }
            if with_oracle && !cfg.checks.contains(&Check::Oracle) {
                cfg.checks.push(Check::Oracle);
            }
            (cfg, output)
        }
        Command::EinsteinCheck {
            metric,
            expect_scal,
            common,
        } => {
            let mut cfg = common.config(Some(metric.spec()), vec![Check::Einstein])?;
            cfg.expect = expect_scal.map(|s| Expect { scal: Some(s) });
            (cfg, None)
        }
        Command::ConformalCheck { metric, u, common } => {
            let mut cfg = common.config(Some(metric.spec()), vec![Check::Conformal])?;
            cfg.conformal = Some(ConformalSpec {
                u: Some(u),
                ..Default::default()
            });
            (cfg, None)
        }
        Command::CylinderCheck {
            phi,
            c,
            eps,
            m2,
            common,
        } => {
            let mut cfg = common.config(None, vec![Check::Cylinder])?;
            cfg.conformal = Some(ConformalSpec {
                phi: Some(phi),
                c,
                eps,
                m2: Some(m2),
                ..Default::default()
            });
            (cfg, None)
        }
        Command::WarpedCheck { metric, common } => (common.config(Some(metric.spec()), vec![Check::Warped])?, None),
        Command::OracleDiff { metric, common } => (common.config(Some(metric.spec()), vec![Check::Oracle])?, None),
    };
    cfg.validate()?;
    Ok((cfg, output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = config_for(cli.command).and_then(|(cfg, output)| execute(&cfg, output.as_deref()));
    let code = match outcome {
        Ok(report) if report.pass => EXIT_PASS,
        Ok(report) => {
            for line in failure_lines(&report) {
                eprintln!("fail: {line}");
            }
            EXIT_FAIL
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    };
    ExitCode::from(code as u8)
}
