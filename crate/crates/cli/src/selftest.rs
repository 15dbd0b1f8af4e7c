//! Built-in consistency battery over a fixed set of operators.

use crate::parse::parse_operator;
use crate::report::{SelftestCheck, SelftestReport};
use airy_formal::branches::determining_factors;
use airy_formal::monodromy::{lambda_closed_form, monodromy};
use airy_formal::operator::AiryOperator;
use airy_formal::reduction::{bv_reduce, formal_equivalence, ReduceOptions, Verdict};
use airy_formal::{Rational, Scalar};

pub const BATTERY: &[&str] = &[
    "d^2 - x",
    "d^3 - x^2",
    "d^2 + d - x^3 + 2*x - 1",
    "d^3 + 1/2*d^2 - 2*x^4 + x",
    "d^4 - 3*d - x^3 + 1/3",
    "d^2 - 5/2*x^5 + x^2",
];

type Outcome = std::result::Result<String, String>;

fn check(name: String, out: Outcome) -> SelftestCheck {
    match out {
        Ok(detail) => SelftestCheck { name, passed: true, detail },
        Err(detail) => SelftestCheck { name, passed: false, detail },
    }
}

fn round_trip(text: &str) -> Outcome {
    let l = parse_operator(text).map_err(|e| e.to_string())?;
    let back = parse_operator(&l.to_string()).map_err(|e| e.to_string())?;
    if back == l {
        Ok(format!("renders as `{l}`"))
    } else {
        Err(format!("`{l}` re-parses differently"))
    }
}

fn exponent_check<S: Scalar>(l: &AiryOperator) -> Outcome {
    let data = monodromy::<S>(l, None).map_err(|e| e.to_string())?;
    let want = lambda_closed_form(l.n(), l.m());
    for b in &data.per_branch {
        if b.lambda != want {
            return Err(format!("branch {} gives {:?}, closed form {:?}", b.branch, b.lambda, want));
        }
    }
    Ok(format!("lambda = {want:?} on {} branches", data.per_branch.len()))
}

fn factor_check<S: Scalar>(l: &AiryOperator) -> Outcome {
    let fs = determining_factors::<S>(l, None).map_err(|e| e.to_string())?;
    let total: usize = fs.iter().map(|f| f.multiplicity).sum();
    if total != l.n() {
        return Err(format!("multiplicities sum to {total}, expected {}", l.n()));
    }
    let lead = -Rational::new((l.n() + l.m()) as i64, l.n() as i64);
    for f in &fs {
        let v = f.series.valuation();
        if v != Some(lead) {
            return Err(format!("factor valuation {v:?}, expected {lead:?}"));
        }
    }
    Ok(format!("{} distinct factors", fs.len()))
}

/// Replays the gauge sequence and compares the diagonal below `z^{-1}` with `θQ`.
fn canonical_check<S: Scalar>(l: &AiryOperator) -> Outcome {
    let red = bv_reduce::<S>(l, &ReduceOptions::default()).map_err(|e| e.to_string())?;
    let back = red.replay().map_err(|e| e.to_string())?;
    let canon = red.model.matrix().truncate(red.truncation);
    let scale = canon.entries().iter().map(|e| e.max_abs()).fold(1.0, f64::max);
    let gap = back.distance(&canon) / scale;
    if gap > 1e-8 {
        return Err(format!("replay gap {gap:e}"));
    }
    let fs = determining_factors::<S>(l, None).map_err(|e| e.to_string())?;
    let thetas: Vec<_> = fs.iter().map(|f| f.series.theta_derive()).collect();
    let mut worst: f64 = 0.0;
    for (e, diag) in &red.model.d {
        if *e >= -Rational::ONE {
            continue;
        }
        for v in diag {
            let best = thetas
                .iter()
                .map(|t| (t.coeff_or_zero(*e + Rational::ONE) - v.clone()).abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    if worst > 1e-8 * scale {
        return Err(format!("diagonal differs from the factors by {worst:e}"));
    }
    Ok(format!("replay gap {gap:.1e}, factor gap {worst:.1e}"))
}

fn self_equivalence<S: Scalar>(l: &AiryOperator) -> Outcome {
    let rep = formal_equivalence::<S>(l, l).map_err(|e| e.to_string())?;
    match rep.verdict {
        Verdict::NotEquivalent => Err("operator is not equivalent to itself".into()),
        v => Ok(format!("{v:?}")),
    }
}

pub fn run_selftest<S: Scalar>() -> SelftestReport {
    let mut checks = Vec::new();
    for text in BATTERY {
        checks.push(check(format!("parse round trip `{text}`"), round_trip(text)));
        let Ok(l) = parse_operator(text) else { continue };
        checks.push(check(format!("monodromy exponent `{text}`"), exponent_check::<S>(&l)));
        checks.push(check(format!("determining factors `{text}`"), factor_check::<S>(&l)));
        checks.push(check(format!("canonical model `{text}`"), canonical_check::<S>(&l)));
        checks.push(check(format!("self equivalence `{text}`"), self_equivalence::<S>(&l)));
    }
    SelftestReport { passed: checks.iter().all(|c| c.passed), checks }
}
