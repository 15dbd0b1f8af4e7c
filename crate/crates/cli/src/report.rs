//! Serializable command reports. Every report round-trips through JSON.

use airy_formal::branches::{determining_factors, DeterminingFactor};
use airy_formal::linalg::ComplexRepr;
use airy_formal::monodromy::monodromy;
use airy_formal::operator::{AiryOperator, OperatorCase};
use airy_formal::reduction::{bv_reduce, formal_equivalence, EquivalenceReport, ReduceOptions, ReductionRepr};
use airy_formal::series::{SeriesRepr, TermRepr};
use airy_formal::{Rational, Result, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub source_branch: usize,
    pub multiplicity: usize,
    /// `Q` in `z = 1/x`.
    pub z: SeriesRepr,
    /// The same terms in `x`, highest power first.
    pub x: Vec<TermRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorsReport {
    pub operator: String,
    pub n: usize,
    pub m: usize,
    pub case: OperatorCase,
    pub truncation: usize,
    pub factors: Vec<FactorEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub branch: usize,
    pub lambda: Rational,
    pub sigma: ComplexRepr,
    pub linear: ComplexRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub operator: String,
    pub n: usize,
    pub m: usize,
    pub truncation: usize,
    pub lambda: Rational,
    pub eigenvalue: ComplexRepr,
    pub per_branch: Vec<BranchEntry>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub operator: String,
    #[serde(flatten)]
    pub reduction: ReductionRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivReport {
    pub left: String,
    pub right: String,
    #[serde(flatten)]
    pub report: EquivalenceReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<SelftestCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Factors(FactorsReport),
    Monodromy(MonodromyReport),
    Canonical(CanonicalReport),
    Equiv(EquivReport),
    Selftest(SelftestReport),
}

fn factor_entry<S: Scalar>(f: &DeterminingFactor<S>) -> FactorEntry {
    let z = f.series.to_repr();
    let x = z
        .terms
        .iter()
        .rev()
        .map(|t| TermRepr { exponent: -t.exponent, re: t.re, im: t.im })
        .collect();
    FactorEntry { source_branch: f.source_branch, multiplicity: f.multiplicity, z, x }
}

/// Branch truncation for the factor computation: everything below `z^0` by default.
pub fn factors_report<S: Scalar>(l: &AiryOperator, k: Option<usize>) -> Result<FactorsReport> {
    let (n, m) = (l.n(), l.m());
    let truncation = k.unwrap_or(m + n - 1).max(m + n - 1);
    let fs = determining_factors::<S>(l, Some(truncation))?;
    Ok(FactorsReport {
        operator: l.to_string(),
        n,
        m,
        case: l.case(),
        truncation,
        factors: fs.iter().map(factor_entry).collect(),
    })
}

pub fn monodromy_report<S: Scalar>(l: &AiryOperator, k: Option<usize>) -> Result<MonodromyReport> {
    let (n, m) = (l.n(), l.m());
    let truncation = k.unwrap_or(m + 2 * n).max(n + m);
    let data = monodromy::<S>(l, Some(truncation))?;
    Ok(MonodromyReport {
        operator: l.to_string(),
        n,
        m,
        truncation,
        lambda: data.lambda,
        eigenvalue: ComplexRepr::of(&data.eigenvalue),
        per_branch: data
            .per_branch
            .iter()
            .map(|b| BranchEntry {
                branch: b.branch,
                lambda: b.lambda,
                sigma: ComplexRepr::of(&b.sigma),
                linear: ComplexRepr::of(&b.linear),
            })
            .collect(),
        notes: data.notes,
    })
}

pub fn canonical_report<S: Scalar>(l: &AiryOperator, opts: &ReduceOptions) -> Result<CanonicalReport> {
    let red = bv_reduce::<S>(l, opts)?;
    Ok(CanonicalReport { operator: l.to_string(), reduction: red.to_repr() })
}

pub fn equiv_report<S: Scalar>(l1: &AiryOperator, l2: &AiryOperator) -> Result<EquivReport> {
    Ok(EquivReport { left: l1.to_string(), right: l2.to_string(), report: formal_equivalence::<S>(l1, l2)? })
}
