//! Formal equivalence of two Airy operators: coefficient conditions, determining
//! factors, and a comparison of canonical models.

use super::canonical::{bv_reduce, CanonicalModel, ReduceOptions};
use crate::branches::{determining_factors, sensitive_coefficients, DeterminingFactor};
use crate::error::Result;
use crate::operator::{AiryOperator, OperatorCase};
use crate::rational::Rational;
use crate::scalar::Scalar;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    /// Every computed invariant agrees but they are not known to be sufficient.
    NecessaryConditionsOnly,
}

/// Equality of one coefficient between the two operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    pub name: String,
    pub left: Rational,
    pub right: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub same_bidegree: bool,
    pub case: Option<OperatorCase>,
    pub coefficient_checks: Vec<CoefficientCheck>,
    pub factors_match: Option<bool>,
    pub canonical_orbit_match: Option<bool>,
    pub notes: Vec<String>,
}

fn tol(scale: f64) -> f64 {
    10.0 * crate::config::eps() * scale.max(1.0)
}

fn check(name: String, left: Rational, right: Rational) -> CoefficientCheck {
    CoefficientCheck { name, left, right, holds: left == right }
}

fn coefficient_checks(l1: &AiryOperator, l2: &AiryOperator) -> Vec<CoefficientCheck> {
    let (n, m) = (l1.n(), l1.m());
    match sensitive_coefficients(n, m) {
        Some((a_idx, b_idx)) => {
            let mut out: Vec<_> = a_idx.iter().map(|i| check(format!("a_{i}"), l1.a(*i), l2.a(*i))).collect();
            out.extend(b_idx.iter().map(|j| check(format!("b_{j}"), l1.b(*j), l2.b(*j))));
            out
        }
        None => Vec::new(),
    }
}

fn factors_agree<S: Scalar>(f1: &[DeterminingFactor<S>], f2: &[DeterminingFactor<S>]) -> bool {
    if f1.len() != f2.len() {
        return false;
    }
    let mut used = vec![false; f2.len()];
    for a in f1 {
        let scale = a.series.max_abs();
        let hit = f2.iter().enumerate().find(|(j, b)| {
            !used[*j] && b.multiplicity == a.multiplicity && a.series.distance(&b.series) <= tol(scale)
        });
        match hit {
            Some((j, _)) => used[j] = true,
            None => return false,
        }
    }
    true
}

fn exp_2pi_i(c: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * c).exp()
}

/// Compares two canonical models up to a permutation of the diagonal; the residues are
/// compared through `exp(2πi k C)`, `k = 1..2n`.
pub fn canonical_models_match<S: Scalar>(c1: &CanonicalModel<S>, c2: &CanonicalModel<S>) -> bool {
    if c1.n != c2.n || c1.levels != c2.levels {
        return false;
    }
    let n = c1.n;
    let (l1, l2) = (c1.leading(), c2.leading());
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for v in &l1 {
        let best = (0..n)
            .filter(|j| !used[*j])
            .min_by(|a, b| (l2[*a].clone() - v.clone()).abs().total_cmp(&(l2[*b].clone() - v.clone()).abs()));
        match best {
            Some(j) => {
                used[j] = true;
                perm.push(j);
            }
            None => return false,
        }
    }
    for (e, d1) in &c1.d {
        let Some(d2) = c2.d.get(e) else { return false };
        let scale = d1.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (i, x) in d1.iter().enumerate() {
            if (x.clone() - d2[perm[i]].clone()).abs() > tol(scale) {
                return false;
            }
        }
    }
    for k in 1..=2 * n {
        for (i, x) in c1.c.iter().enumerate() {
            let kk = k as f64;
            let u = exp_2pi_i(x.to_c64() * kk);
            let w = exp_2pi_i(c2.c[perm[i]].to_c64() * kk);
            if (u - w).norm() > tol(1.0) {
                return false;
            }
        }
    }
    true
}

/// Decides formal equivalence of `l1` and `l2` as far as the computed invariants allow.
pub fn formal_equivalence<S: Scalar>(l1: &AiryOperator, l2: &AiryOperator) -> Result<EquivalenceReport> {
    let mut notes = Vec::new();
    if (l1.n(), l1.m()) != (l2.n(), l2.m()) {
        return Ok(EquivalenceReport {
            verdict: Verdict::NotEquivalent,
            same_bidegree: false,
            case: None,
            coefficient_checks: Vec::new(),
            factors_match: None,
            canonical_orbit_match: None,
            notes: vec!["bidegrees differ".into()],
        });
    }
    let case = l1.case();
    let coefficient_checks = coefficient_checks(l1, l2);
    match case {
        OperatorCase::MultipleOfN { .. } => {
            notes.push("conditions on b read as b_{m-k}, 0 <= k <= q".into());
        }
        OperatorCase::Boundary { .. } => {
            notes.push("no closed-form coefficient conditions on the boundary n = qm".into());
        }
        _ => {}
    }
    let f1 = determining_factors::<S>(l1, None)?;
    let f2 = determining_factors::<S>(l2, None)?;
    let factors_match = factors_agree(&f1, &f2);

    let opts = ReduceOptions::default();
    let canonical_orbit_match = match (bv_reduce::<S>(l1, &opts), bv_reduce::<S>(l2, &opts)) {
        (Ok(r1), Ok(r2)) => Some(canonical_models_match(&r1.model, &r2.model)),
        (Err(e), _) | (_, Err(e)) => {
            notes.push(format!("canonical models unavailable: {e}"));
            None
        }
    };

    let all_checks = coefficient_checks.iter().all(|c| c.holds);
    let verdict = if !all_checks || !factors_match || canonical_orbit_match == Some(false) {
        Verdict::NotEquivalent
    } else if case.is_analyzed() && canonical_orbit_match == Some(true) {
        Verdict::Equivalent
    } else {
        Verdict::NecessaryConditionsOnly
    };
    Ok(EquivalenceReport {
        verdict,
        same_bidegree: true,
        case: Some(case),
        coefficient_checks,
        factors_match: Some(factors_match),
        canonical_orbit_match,
        notes,
    })
}
