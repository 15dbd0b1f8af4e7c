//! Exponential shift `L^ξ = Σ c_k (D+ξ)^{n−k} = Σ h_k D^{n−k}` and the formal monodromy
//! exponent read off its degree-one indicial equation `−λ n α_0^{n−1} + σ = 0`.

use crate::branches::{branch_expand, Branch};
use crate::error::{AiryError, Result};
use crate::operator::{fuchs_form, AiryOperator};
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::series::PuiseuxSeries;

/// `ξ^{[0]} = 1`, `ξ^{[k+1]} = ξ ξ^{[k]} + D ξ^{[k]}`.
pub fn xi_bracket<S: Scalar>(xi: &PuiseuxSeries<S>, k: usize) -> PuiseuxSeries<S> {
    let mut acc = PuiseuxSeries::one();
    for _ in 0..k {
        acc = xi.mul(&acc).add(&acc.theta_derive());
    }
    acc
}

fn brackets<S: Scalar>(xi: &PuiseuxSeries<S>, kmax: usize) -> Vec<PuiseuxSeries<S>> {
    let mut out = vec![PuiseuxSeries::one()];
    for k in 0..kmax {
        let next = xi.mul(&out[k]).add(&out[k].theta_derive());
        out.push(next);
    }
    out
}

fn binom(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// Coefficients `h_0..h_n` of `L^ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedOperator<S: Scalar> {
    pub h: Vec<PuiseuxSeries<S>>,
    /// Common leading exponent of `h_{n−1}` and `h_n`.
    pub critical_exponent: Rational,
    /// Coefficient of `h_n` at the critical exponent.
    pub sigma: S,
    /// Coefficient of `h_{n−1}` at the critical exponent.
    pub linear: S,
}

/// `σ = ((1−n)/2)(n+m) α_0^{n−1}`.
pub fn sigma_closed_form<S: Scalar>(n: usize, m: usize, a0: &S) -> S {
    let w = Rational::new((1 - n as i64) * (n + m) as i64, 2);
    a0.powi(n as u32 - 1).scale(w)
}

fn tolerance(scale: f64) -> f64 {
    1e3 * crate::config::eps() * scale.max(1.0)
}

/// Builds `h_k = Σ_{i≤k} c_i C(n−i, k−i) ξ^{[k−i]}` and checks the valuation pattern.
pub fn shifted_operator<S: Scalar>(l: &AiryOperator, branch: &Branch<S>) -> Result<ShiftedOperator<S>> {
    let (n, m) = (l.n(), l.m());
    if branch.truncation_index() < n + m {
        return Err(AiryError::InsufficientTruncation { k: branch.truncation_index(), required: n + m });
    }
    let f = fuchs_form(l);
    let xi = branch.xi();
    let br = brackets(&xi, n);
    let mut h = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = PuiseuxSeries::<S>::zero();
        for i in 0..=k {
            let ci = f.series::<S>(i);
            let w = S::from_i64(binom(n - i, k - i));
            acc = acc.add(&ci.mul(&br[k - i]).scale(&w));
        }
        h.push(acc);
    }
    let a0 = branch.alpha[0].clone();
    let mu = Rational::new((n + m) as i64, n as i64);
    for (k, hk) in h.iter().enumerate().take(n) {
        let e = -mu * Rational::int(k as i64);
        let lead = S::from_i64(binom(n, k)) * a0.powi(k as u32);
        check_leading(hk, e, &lead, &format!("h_{k}"))?;
    }
    let crit = Rational::int(1 - (n + m) as i64) + Rational::new(m as i64, n as i64);
    let linear = h[n - 1].coeff(crit)?;
    let sigma = h[n].coeff(crit)?;
    let scale = h[n].max_abs();
    if let Some((v, c)) = h[n].leading() {
        if v < crit && c.abs() > tolerance(scale) {
            return Err(AiryError::ValuationMismatch(format!("h_{n} has a term at {v} below {crit}")));
        }
    }
    Ok(ShiftedOperator { h, critical_exponent: crit, sigma, linear })
}

fn check_leading<S: Scalar>(s: &PuiseuxSeries<S>, e: Rational, lead: &S, name: &str) -> Result<()> {
    let tol = tolerance(s.max_abs());
    for (k, c) in s.terms() {
        if *k >= e {
            break;
        }
        if c.abs() > tol {
            return Err(AiryError::ValuationMismatch(format!("{name} has a term at {k} below {e}")));
        }
    }
    let got = s.coeff(e)?;
    if (got.clone() - lead.clone()).abs() > tol {
        return Err(AiryError::ValuationMismatch(format!("{name} leading coefficient {got:?} at {e}")));
    }
    Ok(())
}

/// `λ = (1−n)(n+m)/(2n)`.
pub fn lambda_closed_form(n: usize, m: usize) -> Rational {
    Rational::new((1 - n as i64) * (n + m) as i64, 2 * n as i64)
}

/// Solves the indicial equation from the computed `h_{n−1}`, `h_n` and rounds to a rational.
pub fn indicial_exponent<S: Scalar>(l: &AiryOperator, branch: &Branch<S>) -> Result<Rational> {
    let sh = shifted_operator(l, branch)?;
    let lam = sh.sigma / sh.linear;
    let max_den = 2 * l.n() as i64;
    let tol = crate::config::eps();
    if lam.im().abs() > tol {
        return Err(AiryError::RationalRoundingFailure { re: lam.re(), im: lam.im(), max_den });
    }
    let r = Rational::round_from_f64(lam.re(), max_den, tol).ok_or(AiryError::RationalRoundingFailure {
        re: lam.re(),
        im: lam.im(),
        max_den,
    })?;
    let expected = lambda_closed_form(l.n(), l.m());
    if r != expected {
        return Err(AiryError::CrossCheckFailed {
            what: format!("indicial exponent {r} vs closed form {expected}"),
            deviation: (r - expected).to_f64().abs(),
        });
    }
    Ok(r)
}

/// `exp(2πi p/q)`.
pub fn exp_two_pi_i<S: Scalar>(r: Rational) -> S {
    S::root_of_unity(r.numer(), r.denom())
}

/// `(−1)^{m+n−1} exp(iπ m/n)`.
pub fn monodromy_eigenvalue<S: Scalar>(l: &AiryOperator) -> S {
    let (n, m) = (l.n() as i64, l.m() as i64);
    S::root_of_unity((m + n - 1) * n + m, 2 * n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchMonodromy<S: Scalar> {
    pub branch: usize,
    pub lambda: Rational,
    pub sigma: S,
    pub linear: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyData<S: Scalar> {
    pub lambda: Rational,
    pub eigenvalue: S,
    pub per_branch: Vec<BranchMonodromy<S>>,
    pub notes: Vec<String>,
}

/// Runs the indicial computation on every branch (truncation `K`, default `m+2n`).
pub fn monodromy<S: Scalar>(l: &AiryOperator, k: Option<usize>) -> Result<MonodromyData<S>> {
    let (n, m) = (l.n(), l.m());
    let k = k.unwrap_or(m + 2 * n).max(n + m);
    let mut per_branch = Vec::with_capacity(n);
    for idx in 0..n {
        let br = branch_expand::<S>(l, idx, k)?;
        let sh = shifted_operator(l, &br)?;
        let lambda = indicial_exponent(l, &br)?;
        per_branch.push(BranchMonodromy { branch: idx, lambda, sigma: sh.sigma, linear: sh.linear });
    }
    let lambda = lambda_closed_form(n, m);
    let eigenvalue = monodromy_eigenvalue::<S>(l);
    let from_lambda: S = exp_two_pi_i(lambda);
    let dev = (from_lambda - eigenvalue.clone()).abs();
    if dev > tolerance(1.0) {
        return Err(AiryError::CrossCheckFailed { what: "monodromy eigenvalue".into(), deviation: dev });
    }
    Ok(MonodromyData {
        lambda,
        eigenvalue,
        per_branch,
        notes: vec!["the same exponent is attached to every determining factor".into()],
    })
}
