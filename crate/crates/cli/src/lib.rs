//! Library side of the `airy` command: operator parsing, job configuration, and report
//! rendering. `main.rs` only maps command-line flags onto a [`JobConfig`].

pub mod parse;
pub mod render;
pub mod report;
pub mod selftest;

use airy_formal::config::{set_big_precision, with_eps};
use airy_formal::operator::AiryOperator;
use airy_formal::reduction::ReduceOptions;
use airy_formal::{AiryError, BigComplex, Complex64, Rational, Scalar};
use parse::{parse_operator, OperatorTextError, ParseError};
use report::*;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Factors,
    Monodromy,
    Canonical,
    Equiv,
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    /// Binary digits of the big-float mantissa.
    Big(usize),
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" => Ok(Precision::Double),
            _ => match s.strip_prefix("big:").map(str::parse::<usize>) {
                Some(Ok(bits)) if bits >= 64 => Ok(Precision::Big(bits)),
                Some(Ok(_)) => Err("big precision needs at least 64 bits".into()),
                _ => Err(format!("expected `double` or `big:<bits>`, got `{s}`")),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorSource {
    Text(String),
    /// JSON file holding one operator object `{"n","m","a","b"}` or an array of them.
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub operators: Vec<OperatorSource>,
    /// Reduction order for `canonical`; integer branch truncation for `factors` and `monodromy`.
    pub order: Option<Rational>,
    pub precision: Precision,
    pub eps: Option<f64>,
    pub format: Format,
    pub strict: bool,
}

impl JobConfig {
    pub fn new(command: Command) -> Self {
        JobConfig {
            command,
            operators: Vec::new(),
            order: None,
            precision: Precision::Double,
            eps: None,
            format: Format::Json,
            strict: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Domain(#[from] AiryError),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("self-test failed")]
    SelftestFailed(String),
}

impl CliError {
    /// 1 for mathematical failures, 2 for malformed invocations or input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::SelftestFailed(_) => 1,
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<OperatorTextError> for CliError {
    fn from(e: OperatorTextError) -> Self {
        match e {
            OperatorTextError::Parse(p) => CliError::Parse(p),
            OperatorTextError::Invalid(a) => CliError::Domain(a),
        }
    }
}

fn load(src: &OperatorSource) -> Result<Vec<AiryOperator>, CliError> {
    match src {
        OperatorSource::Text(t) => Ok(vec![parse_operator(t)?]),
        OperatorSource::File(p) => {
            let io = |msg: String| CliError::Io { path: p.display().to_string(), msg };
            let text = std::fs::read_to_string(p).map_err(|e| io(e.to_string()))?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| io(e.to_string()))?;
            let items = match value {
                serde_json::Value::Array(v) => v,
                v => vec![v],
            };
            items
                .into_iter()
                .map(|v| {
                    let repr: airy_formal::operator::OperatorRepr =
                        serde_json::from_value(v).map_err(|e| io(e.to_string()))?;
                    Ok(AiryOperator::try_from(repr)?)
                })
                .collect()
        }
    }
}

fn truncation(order: Option<Rational>) -> Result<Option<usize>, CliError> {
    match order {
        None => Ok(None),
        Some(o) if o.is_integer() && !o.is_negative() => Ok(Some(o.numer() as usize)),
        Some(o) => Err(CliError::Usage(format!("branch truncation must be a non-negative integer, got {o:?}"))),
    }
}

fn one(ops: &[AiryOperator]) -> Result<&AiryOperator, CliError> {
    match ops {
        [l] => Ok(l),
        _ => Err(CliError::Usage(format!("expected exactly one operator, got {}", ops.len()))),
    }
}

fn compute<S: Scalar>(cfg: &JobConfig, ops: &[AiryOperator]) -> Result<Report, CliError> {
    Ok(match cfg.command {
        Command::Factors => Report::Factors(factors_report::<S>(one(ops)?, truncation(cfg.order)?)?),
        Command::Monodromy => Report::Monodromy(monodromy_report::<S>(one(ops)?, truncation(cfg.order)?)?),
        Command::Canonical => {
            let opts = ReduceOptions { order: cfg.order, strict: cfg.strict, ..ReduceOptions::default() };
            Report::Canonical(canonical_report::<S>(one(ops)?, &opts)?)
        }
        Command::Equiv => match ops {
            [l1, l2] => Report::Equiv(equiv_report::<S>(l1, l2)?),
            _ => return Err(CliError::Usage(format!("equiv needs two operators, got {}", ops.len()))),
        },
        Command::Selftest => Report::Selftest(selftest::run_selftest::<S>()),
    })
}

/// Runs the job and returns the report.
pub fn execute(cfg: &JobConfig) -> Result<Report, CliError> {
    let mut ops = Vec::new();
    for src in &cfg.operators {
        ops.extend(load(src)?);
    }
    if cfg.command == Command::Selftest && !ops.is_empty() {
        return Err(CliError::Usage("selftest takes no operators".into()));
    }
    let job = || match cfg.precision {
        Precision::Double => compute::<Complex64>(cfg, &ops),
        Precision::Big(bits) => {
            set_big_precision(bits);
            compute::<BigComplex>(cfg, &ops)
        }
    };
    match cfg.eps {
        Some(e) if !(e > 0.0 && e < 1.0) => Err(CliError::Usage(format!("eps must lie in (0, 1), got {e}"))),
        Some(e) => with_eps(e, job),
        None => job(),
    }
}

/// Serializes a report; JSON keys are sorted so output is byte-stable.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let v = serde_json::to_value(report).expect("reports serialize");
            let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Text => render::render_text(report),
    }
}

/// Full run: the rendered report, or an error carrying its exit code. A failed self-test
/// still carries its rendered report.
pub fn run(cfg: &JobConfig) -> Result<String, CliError> {
    let report = execute(cfg)?;
    let out = render(&report, cfg.format);
    match &report {
        Report::Selftest(s) if !s.passed => Err(CliError::SelftestFailed(out)),
        _ => Ok(out),
    }
}
