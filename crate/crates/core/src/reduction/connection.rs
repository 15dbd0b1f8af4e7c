//! The Airy connection `d/dz − A(z)` of an operator and the gauge moves used to reduce it.
//!
//! The companion form uses the basis `u_j = (−∂)^{j−1} y`, so the displayed shape
//! (superdiagonal `z^{−2}`, bottom row `z^{−2}Q*(1/z), a*_1 z^{−2}, …`) holds with
//! `b*_j = (−1)^n b_j` and `a*_i = (−1)^{n+i+1} a_i`. Then `a*_{n−1} = a_{n−1}` and the
//! leading matrix after shearing has the branch leading coefficients `α_0` as eigenvalues.

use super::series_matrix::SeriesMatrix;
use crate::error::{AiryError, Result};
use crate::linalg::{Eigen, Matrix};
use crate::operator::AiryOperator;
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::series::PuiseuxSeries;
use std::collections::BTreeMap;

/// The standard `sl_2` triple: `X` superdiagonal ones, `Y` subdiagonal `j(n−j)`, `H = diag(n+1−2j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardTriple<S: Scalar> {
    pub x: Matrix<S>,
    pub y: Matrix<S>,
    pub h: Matrix<S>,
}

/// Diagonal of `H_n`.
pub fn h_diagonal(n: usize) -> Vec<Rational> {
    (1..=n).map(|j| Rational::int(n as i64 + 1 - 2 * j as i64)).collect()
}

pub fn standard_triple<S: Scalar>(n: usize) -> StandardTriple<S> {
    let x = Matrix::from_fn(n, |i, j| if j == i + 1 { S::one() } else { S::zero() });
    let y = Matrix::from_fn(n, |i, j| {
        if i == j + 1 {
            S::from_i64((i * (n - i)) as i64)
        } else {
            S::zero()
        }
    });
    let h = Matrix::diag(&h_diagonal(n).into_iter().map(S::from_rational).collect::<Vec<_>>());
    StandardTriple { x, y, h }
}

/// `b*_j = (−1)^n b_j`.
pub fn b_star(l: &AiryOperator, j: usize) -> Rational {
    if l.n().is_multiple_of(2) {
        l.b(j)
    } else {
        -l.b(j)
    }
}

/// `a*_i = (−1)^{n+i+1} a_i`.
pub fn a_star(l: &AiryOperator, i: usize) -> Rational {
    if (l.n() + i + 1).is_multiple_of(2) {
        l.a(i)
    } else {
        -l.a(i)
    }
}

/// Exact companion connection matrix `A(z)`.
pub fn companion_connection<S: Scalar>(l: &AiryOperator) -> SeriesMatrix<S> {
    let (n, m) = (l.n(), l.m());
    let mut a = SeriesMatrix::zeros(n);
    let zm2 = Rational::int(-2);
    for j in 0..n.saturating_sub(1) {
        a.set(j, j + 1, PuiseuxSeries::monomial(S::one(), zm2));
    }
    let q = PuiseuxSeries::from_terms(
        (0..=m).map(|j| (Rational::int(-2 - j as i64), S::from_rational(b_star(l, j)))),
        None,
    );
    let first = a.get(n - 1, 0).add(&q);
    a.set(n - 1, 0, first);
    for i in 1..n {
        let e = a.get(n - 1, i).add(&PuiseuxSeries::monomial(S::from_rational(a_star(l, i)), zm2));
        a.set(n - 1, i, e);
    }
    a
}

/// `P[A] = P A P^{−1} + P' P^{−1}`.
pub fn gauge<S: Scalar>(a: &SeriesMatrix<S>, p: &SeriesMatrix<S>) -> Result<SeriesMatrix<S>> {
    let rel = match (a.order(), a.valuation()) {
        (Some(o), Some(v)) => o - v,
        (Some(o), None) => o,
        (None, _) => Rational::int(64),
    };
    let inv = p.inverse(rel)?;
    if a.order().is_none() && inv.order().is_some() {
        return Err(AiryError::UnboundedInverse);
    }
    let main = if p.is_diagonal() {
        // p_i a_ij p_j^{−1}; on the diagonal p_i p_i^{−1} cancels exactly
        let n = a.dim();
        SeriesMatrix::from_fn(n, |i, j| {
            if i == j {
                a.get(i, i).clone()
            } else {
                p.get(i, i).mul(a.get(i, j)).mul(inv.get(j, j))
            }
        })
    } else {
        p.mul(a).mul(&inv)
    };
    let der = p.derive().mul(&inv);
    let out = main.add(&der);
    Ok(match a.order() {
        Some(o) => out.truncate(o),
        None => out,
    })
}

/// Gauge by `z^{(s/2)H}` for diagonal `H` with rational entries, computed exactly:
/// entry `(i,j)` gains `z^{(s/2)(h_i − h_j)}` and the diagonal gains `(s/2) h_i z^{−1}`.
pub fn shear<S: Scalar>(a: &SeriesMatrix<S>, s: Rational, h: &[Rational]) -> SeriesMatrix<S> {
    let n = a.dim();
    let half = s / Rational::int(2);
    let mut out = SeriesMatrix::from_fn(n, |i, j| a.get(i, j).shift(half * (h[i] - h[j])));
    for (i, hi) in h.iter().enumerate() {
        let c = half * *hi;
        if !c.is_zero() {
            let d = out.get(i, i).add(&PuiseuxSeries::monomial(S::from_rational(c), -Rational::ONE));
            out.set(i, i, d);
        }
    }
    out
}

/// Leading exponent `r = −m/n − 2` of the sheared connection.
pub fn principal_level(n: usize, m: usize) -> Rational {
    Rational::new(-(m as i64), n as i64) - Rational::int(2)
}

/// `A¹ = z^{−(m/(2n))H_n}[A]`.
pub fn sheared_connection<S: Scalar>(l: &AiryOperator) -> SeriesMatrix<S> {
    let s = Rational::new(-(l.m() as i64), l.n() as i64);
    shear(&companion_connection::<S>(l), s, &h_diagonal(l.n()))
}

/// How the commutant component of a gauge correction is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepNormalization {
    /// `T ∈ [A_r, 𝒢]` (no commutant component).
    Image,
    /// `T` shifted by a multiple of `I` so that its `(1,1)` entry vanishes.
    AnchoredFirst,
}

/// Matrix-coefficient form of a truncated connection.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeries<S: Scalar> {
    pub n: usize,
    pub coeffs: BTreeMap<Rational, Matrix<S>>,
    pub order: Rational,
}

impl<S: Scalar> CoeffSeries<S> {
    pub fn from_matrix(a: &SeriesMatrix<S>) -> Result<Self> {
        let order = a.order().ok_or(AiryError::UnboundedInverse)?;
        let coeffs = a.coefficients().into_iter().filter(|(e, _)| *e < order).collect();
        Ok(CoeffSeries { n: a.dim(), coeffs, order })
    }

    pub fn to_matrix(&self) -> SeriesMatrix<S> {
        SeriesMatrix::from_coefficients(self.n, &self.coeffs, Some(self.order))
    }

    pub fn get(&self, e: Rational) -> Matrix<S> {
        self.coeffs.get(&e).cloned().unwrap_or_else(|| Matrix::zeros(self.n))
    }

    pub fn leading_exponent(&self) -> Option<Rational> {
        self.coeffs.iter().find(|(_, m)| !m.is_negligible()).map(|(e, _)| *e)
    }

    fn grid_step(&self, k: Rational) -> Rational {
        let den = Rational::lcm_denom(self.coeffs.keys().chain([&k, &self.order]));
        Rational::new(1, den)
    }

    /// `(I + z^k T)[A]` by the recurrence
    /// `B_e = A_e + T A_{e−k} − B_{e−k} T + k T δ_{e,k−1}`.
    pub fn apply_unipotent(&self, k: Rational, t: &Matrix<S>) -> Self {
        let r = match self.leading_exponent() {
            Some(r) => r.min(k - Rational::ONE),
            None => k - Rational::ONE,
        };
        let step = self.grid_step(k);
        let mut out: BTreeMap<Rational, Matrix<S>> = BTreeMap::new();
        let mut e = r;
        let kt = t.scale(&S::from_rational(k));
        while e < self.order {
            let mut b = self.get(e);
            let prev = e - k;
            if let Some(a_prev) = self.coeffs.get(&prev) {
                b = &b + &t.matmul(a_prev);
            }
            if let Some(b_prev) = out.get(&prev) {
                b = &b - &b_prev.matmul(t);
            }
            if e == k - Rational::ONE {
                b = &b + &kt;
            }
            if !b.is_negligible() {
                out.insert(e, b);
            }
            e += step;
        }
        CoeffSeries { n: self.n, coeffs: out, order: self.order }
    }

    /// Constant gauge `U A U^{−1}`.
    pub fn conjugate(&self, u: &Matrix<S>, u_inv: &Matrix<S>) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, m)| (*e, u.matmul(m).matmul(u_inv)))
            .filter(|(_, m)| !m.is_negligible())
            .collect();
        CoeffSeries { n: self.n, coeffs, order: self.order }
    }
}

/// Computes `T_k` from the order-`(r+k)` coefficient and applies `I + z^k T_k`.
pub fn spectral_reduce_step_with<S: Scalar>(
    a: &CoeffSeries<S>,
    k: Rational,
    eig: &Eigen<S>,
    r: Rational,
    norm: StepNormalization,
) -> (Matrix<S>, CoeffSeries<S>) {
    let m = a.get(r + k);
    let (_, im) = eig.commutant_split(&m);
    let mut t = eig.solve_ad(&im);
    if norm == StepNormalization::AnchoredFirst {
        let t11 = t.get(0, 0).clone();
        for i in 0..t.dim() {
            t.set(i, i, t.get(i, i).clone() - t11.clone());
        }
    }
    if t.is_negligible() {
        return (Matrix::zeros(a.n), a.clone());
    }
    let next = a.apply_unipotent(k, &t);
    (t, next)
}

/// One reduction step on a truncated series matrix whose leading coefficient is `A_r`.
pub fn spectral_reduce_step<S: Scalar>(
    a: &SeriesMatrix<S>,
    k: Rational,
    a_r: &Matrix<S>,
    norm: StepNormalization,
) -> Result<(Matrix<S>, SeriesMatrix<S>)> {
    let cs = CoeffSeries::from_matrix(a)?;
    let r = cs.leading_exponent().ok_or(AiryError::ZeroLeadingCoefficient)?;
    let lead = cs.get(r);
    let scale = a_r.max_abs().max(1.0);
    if lead.distance(a_r) > 1e3 * crate::config::eps() * scale {
        return Err(AiryError::CrossCheckFailed {
            what: "leading coefficient differs from A_r".into(),
            deviation: lead.distance(a_r),
        });
    }
    let eig = Eigen::new(a_r)?;
    let (t, next) = spectral_reduce_step_with(&cs, k, &eig, r, norm);
    Ok((t, next.to_matrix()))
}

/// `c = b_{m−1}/(n b_m)`.
pub fn second_stage_ratio(l: &AiryOperator) -> Rational {
    l.b(l.m() - 1) / (Rational::int(l.n() as i64) * l.b(l.m()))
}

/// Closed-form diagonal `T_1 = c·diag(0, −1, …, −(n−1))` of the second stage.
pub fn explicit_t1<S: Scalar>(l: &AiryOperator) -> Matrix<S> {
    let c = second_stage_ratio(l);
    let d: Vec<S> = (0..l.n()).map(|j| S::from_rational(-c * Rational::int(j as i64))).collect();
    Matrix::diag(&d)
}

/// `A² = (I + z T_1)[A¹]` assembled from the closed-form entries `p_j`, `q_k`,
/// truncated at `r + order`.
pub fn explicit_second_stage<S: Scalar>(l: &AiryOperator, order: Rational) -> Result<SeriesMatrix<S>> {
    let (n, m) = (l.n(), l.m());
    for k in 1..n {
        if !l.a(k).is_zero() && m * (n - k) == n {
            return Err(AiryError::WrongCase { expected: "A¹_{r+1} = b*_{m−1} E_{n1}", n, m });
        }
    }
    let r = principal_level(n, m);
    let top = r + order;
    let c = S::from_rational(second_stage_ratio(l));
    let one = PuiseuxSeries::<S>::one();
    // d_j = 1 − (j−1) c z, j = 1..=n
    let d = |j: usize| -> PuiseuxSeries<S> {
        one.add(&PuiseuxSeries::monomial(-(c.clone() * S::from_i64(j as i64 - 1)), Rational::ONE))
    };
    let ratio = |num: usize, den: usize, shift: Rational| -> Result<PuiseuxSeries<S>> {
        let inv = d(den).invert_to((top - shift).max(Rational::ONE))?;
        Ok(d(num).mul(&inv).shift(shift).truncate(top))
    };
    let mnr = Rational::new(m as i64, n as i64);
    let mut out = SeriesMatrix::zeros(n);
    for j in 1..n {
        out.set(j - 1, j, ratio(j, j + 1, r)?);
    }
    // q_0 = z^{−2+(n−1)m/n} Q*(1/z) (1 − (n−1)cz)
    let qstar = PuiseuxSeries::from_terms(
        (0..=m).map(|j| (Rational::int(-(j as i64)), S::from_rational(b_star(l, j)))),
        None,
    );
    let e0 = Rational::int(-2) + mnr * Rational::int(n as i64 - 1);
    out.set(n - 1, 0, qstar.mul(&d(n)).shift(e0).truncate(top));
    for k in 1..n {
        let ak = a_star(l, k);
        if ak.is_zero() {
            out.set(n - 1, k, PuiseuxSeries::zero_to(top));
            continue;
        }
        let ek = Rational::int(-2) + mnr * Rational::int(n as i64 - 1 - k as i64);
        let qk = ratio(n, k + 1, ek)?.scale(&S::from_rational(ak));
        out.set(n - 1, k, qk);
    }
    let h = h_diagonal(n);
    for j in 1..=n {
        let res = -mnr / Rational::int(2) * h[j - 1];
        let mut e = PuiseuxSeries::monomial(S::from_rational(res), -Rational::ONE);
        if j > 1 {
            // d_j'/d_j = −(j−1)c / (1 − (j−1)cz)
            let num = PuiseuxSeries::constant(-(c.clone() * S::from_i64(j as i64 - 1)));
            e = e.add(&num.mul(&d(j).invert_to(top.max(Rational::ONE))?));
        }
        let cur = out.get(j - 1, j - 1).add(&e).truncate(top);
        out.set(j - 1, j - 1, cur);
    }
    Ok(out.truncate(top))
}
