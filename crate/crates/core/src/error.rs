use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AiryError {
    #[error("leading coefficient is numerically zero")]
    ZeroLeadingCoefficient,
    #[error("inverse of an exact non-monomial series needs an explicit truncation order")]
    UnboundedInverse,
    #[error("coefficient requested at exponent {exponent} at or beyond truncation order {order}")]
    BeyondTruncation { exponent: Rational, order: Rational },
    #[error("integration would produce a logarithm (coefficient {re}+{im}i at the critical exponent)")]
    LogarithmicTerm { re: f64, im: f64 },
    #[error("exponential needs a series of positive valuation")]
    ExpOfPolarSeries,

    #[error("leading coefficient a_n must be 1, got {0}")]
    BadLeading(Rational),
    #[error("degree coefficient b_m must be nonzero")]
    DegenerateDegree,
    #[error("bidegree must satisfy n >= 1 and m >= 1 (got n={n}, m={m})")]
    BadDegree { n: i64, m: i64 },
    #[error("expected {expected} coefficients for {name}, got {found}")]
    CoefficientCount { name: &'static str, expected: usize, found: usize },
    #[error("Newton polygon slope {found} differs from (n+m)/n = {expected}")]
    InternalSlopeMismatch { expected: Rational, found: String },

    #[error("linearized coefficient n*alpha_0^(n-1) is numerically zero")]
    NonSimpleLinearization,
    #[error("branch truncation index {k} is below the required {required}")]
    InsufficientTruncation { k: usize, required: usize },
    #[error("root index {index} out of range for n = {n}")]
    RootIndex { index: usize, n: usize },
    #[error("operator of bidegree ({n},{m}) is not in case {expected}")]
    WrongCase { expected: &'static str, n: usize, m: usize },
    #[error("triangular system has a numerically zero pivot ({pivot:e})")]
    SingularSystem { pivot: f64 },
    #[error("cross-check failed for {what}: deviation {deviation:e}")]
    CrossCheckFailed { what: String, deviation: f64 },

    #[error("valuation mismatch: {0}")]
    ValuationMismatch(String),
    #[error("value {re}+{im}i is not within tolerance of a rational with denominator <= {max_den}")]
    RationalRoundingFailure { re: f64, im: f64, max_den: i64 },

    #[error("gauge matrix is not invertible as a series matrix")]
    NonInvertibleGauge,
    #[error("matrix is not semisimple with a stable eigenbasis: {0}")]
    NotSemisimple(String),
    #[error("reduction for bidegree ({n},{m}) is only available in permissive mode")]
    CaseNotImplemented { n: usize, m: usize },
    #[error("reduction order {order} must exceed {minimum}")]
    InsufficientOrder { order: Rational, minimum: Rational },
    #[error("matrix dimension mismatch")]
    Dimension,
}

pub type Result<T> = std::result::Result<T, AiryError>;
