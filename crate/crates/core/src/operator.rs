//! Airy operators `L = Σ_{i=1}^n a_i ∂^i − Σ_{j=0}^m b_j x^j` and their form at infinity.
//!
//! With `z = 1/x` and `D = z d/dz`, `(−1)^n x^n L` becomes `Σ c_k(z) D^{n−k}`, the
//! Frobenius–Fuchs form. Its symbol `P_L(z, X) = Σ c_k X^{n−k}` has a single Newton
//! slope `(n+m)/n`.

use crate::error::{AiryError, Result};
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::series::PuiseuxSeries;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct AiryOperator {
    n: usize,
    m: usize,
    a: Vec<Rational>,
    b: Vec<Rational>,
}

/// Unchecked wire form: `{"n", "m", "a": [a_1..a_n], "b": [b_0..b_m]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorRepr {
    pub n: i64,
    pub m: i64,
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
}

impl TryFrom<OperatorRepr> for AiryOperator {
    type Error = AiryError;
    fn try_from(r: OperatorRepr) -> Result<Self> {
        validate(r.n, r.m, r.a, r.b)
    }
}

impl From<AiryOperator> for OperatorRepr {
    fn from(l: AiryOperator) -> Self {
        OperatorRepr { n: l.n as i64, m: l.m as i64, a: l.a, b: l.b }
    }
}

/// Checks the operator invariants. `a` holds `a_1..a_n`, `b` holds `b_0..b_m`.
pub fn validate(n: i64, m: i64, a: Vec<Rational>, b: Vec<Rational>) -> Result<AiryOperator> {
    if n < 1 || m < 1 {
        return Err(AiryError::BadDegree { n, m });
    }
    let (n, m) = (n as usize, m as usize);
    if a.len() != n {
        return Err(AiryError::CoefficientCount { name: "a", expected: n, found: a.len() });
    }
    if b.len() != m + 1 {
        return Err(AiryError::CoefficientCount { name: "b", expected: m + 1, found: b.len() });
    }
    if a[n - 1] != Rational::ONE {
        return Err(AiryError::BadLeading(a[n - 1]));
    }
    if b[m].is_zero() {
        return Err(AiryError::DegenerateDegree);
    }
    Ok(AiryOperator { n, m, a, b })
}

/// Which of the analyzed bidegree regimes an operator falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorCase {
    /// `m = q n`.
    MultipleOfN { q: usize },
    /// `m = q n + r`, `0 < r < n`.
    RemainderN { q: usize, r: usize },
    /// `n = q m + r`, `0 < r < m`.
    SmallM { q: usize, r: usize },
    /// `n = q m` with `q ≥ 2`: not covered by the closed-form analysis.
    Boundary { q: usize },
}

impl OperatorCase {
    pub fn classify(n: usize, m: usize) -> Self {
        if m >= n {
            let (q, r) = (m / n, m % n);
            if r == 0 {
                OperatorCase::MultipleOfN { q }
            } else {
                OperatorCase::RemainderN { q, r }
            }
        } else {
            let (q, r) = (n / m, n % m);
            if r == 0 {
                OperatorCase::Boundary { q }
            } else {
                OperatorCase::SmallM { q, r }
            }
        }
    }

    pub fn is_analyzed(&self) -> bool {
        !matches!(self, OperatorCase::Boundary { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            OperatorCase::MultipleOfN { .. } => "m = qn",
            OperatorCase::RemainderN { .. } => "m = qn + r",
            OperatorCase::SmallM { .. } => "n = qm + r",
            OperatorCase::Boundary { .. } => "n = qm (boundary)",
        }
    }
}

impl AiryOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `a_i`; zero outside `1..=n`.
    pub fn a(&self, i: usize) -> Rational {
        if (1..=self.n).contains(&i) {
            self.a[i - 1]
        } else {
            Rational::ZERO
        }
    }

    /// `b_j`; zero outside `0..=m`.
    pub fn b(&self, j: usize) -> Rational {
        self.b.get(j).copied().unwrap_or(Rational::ZERO)
    }

    pub fn a_coeffs(&self) -> &[Rational] {
        &self.a
    }

    pub fn b_coeffs(&self) -> &[Rational] {
        &self.b
    }

    pub fn case(&self) -> OperatorCase {
        OperatorCase::classify(self.n, self.m)
    }

    /// Copy with `a_i` replaced (`1 <= i < n`).
    pub fn with_a(&self, i: usize, v: Rational) -> Result<Self> {
        let mut a = self.a.clone();
        a[i - 1] = v;
        validate(self.n as i64, self.m as i64, a, self.b.clone())
    }

    /// Copy with `b_j` replaced.
    pub fn with_b(&self, j: usize, v: Rational) -> Result<Self> {
        let mut b = self.b.clone();
        b[j] = v;
        validate(self.n as i64, self.m as i64, self.a.clone(), b)
    }

    /// Classical Airy operator `∂² − x`.
    pub fn classical() -> Self {
        validate(2, 1, vec![Rational::ZERO, Rational::ONE], vec![Rational::ZERO, Rational::ONE])
            .expect("classical Airy operator is valid")
    }
}

impl fmt::Display for AiryOperator {
    /// Renders in the `d^2 - x` text grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(Rational, String)> = Vec::new();
        for i in (1..=self.n).rev() {
            let c = self.a(i);
            if !c.is_zero() {
                let v = if i == 1 { "d".to_string() } else { format!("d^{i}") };
                parts.push((c, v));
            }
        }
        for j in (0..=self.m).rev() {
            let c = -self.b(j);
            if !c.is_zero() {
                let v = match j {
                    0 => String::new(),
                    1 => "x".to_string(),
                    _ => format!("x^{j}"),
                };
                parts.push((c, v));
            }
        }
        for (idx, (c, v)) in parts.iter().enumerate() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let coef = if mag.is_integer() { mag.numer().to_string() } else { mag.to_string() };
            match (v.is_empty(), mag == Rational::ONE) {
                (true, _) => write!(f, "{coef}")?,
                (false, true) => write!(f, "{v}")?,
                (false, false) => write!(f, "{coef}*{v}")?,
            }
        }
        Ok(())
    }
}

/// `σ_{h,j}`: coefficient of `T^h` in `∏_{r=1}^{j−1} (1 + rT)`.
pub fn sigma(h: usize, j: usize) -> u64 {
    if j == 0 {
        return u64::from(h == 0);
    }
    let mut e = vec![0u64; j];
    e[0] = 1;
    for r in 1..j {
        for t in (1..=r).rev() {
            e[t] += r as u64 * e[t - 1];
        }
    }
    e.get(h).copied().unwrap_or(0)
}

/// Laurent polynomial in `z` with exact rational coefficients.
pub type LaurentPoly = BTreeMap<i64, Rational>;

fn lp_to_series<S: Scalar>(p: &LaurentPoly) -> PuiseuxSeries<S> {
    PuiseuxSeries::from_terms(
        p.iter().map(|(e, c)| (Rational::int(*e), S::from_rational(*c))),
        None,
    )
}

/// `Σ c_k D^{n−k}` with `c_0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuchsForm {
    pub c: Vec<LaurentPoly>,
}

impl FuchsForm {
    pub fn n(&self) -> usize {
        self.c.len() - 1
    }

    pub fn series<S: Scalar>(&self, k: usize) -> PuiseuxSeries<S> {
        lp_to_series(&self.c[k])
    }

    /// Lowest exponent of `c_k`, `None` when `c_k = 0`.
    pub fn valuation(&self, k: usize) -> Option<i64> {
        self.c[k].iter().find(|(_, c)| !c.is_zero()).map(|(e, _)| *e)
    }
}

pub fn fuchs_form(l: &AiryOperator) -> FuchsForm {
    let n = l.n;
    let mut c: Vec<LaurentPoly> = Vec::with_capacity(n + 1);
    for k in 0..n {
        let mut p = LaurentPoly::new();
        for i in 0..=k {
            let coef = l.a(n - i) * Rational::int(sigma(k - i, n - i) as i64);
            let coef = if i % 2 == 1 { -coef } else { coef };
            if !coef.is_zero() {
                *p.entry(-(i as i64)).or_insert(Rational::ZERO) += coef;
            }
        }
        p.retain(|_, v| !v.is_zero());
        c.push(p);
    }
    // c_n = (−1)^{n−1} z^{−n} Q(1/z)
    let sign = if (n - 1).is_multiple_of(2) { Rational::ONE } else { -Rational::ONE };
    let mut cn = LaurentPoly::new();
    for j in 0..=l.m {
        let bj = l.b(j);
        if !bj.is_zero() {
            cn.insert(-(n as i64) - j as i64, sign * bj);
        }
    }
    c.push(cn);
    FuchsForm { c }
}

/// `P_L(z, X) = Σ c_k X^{n−k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPoly<S: Scalar> {
    pub c: Vec<PuiseuxSeries<S>>,
}

impl<S: Scalar> SymbolPoly<S> {
    /// Horner evaluation at a series root candidate.
    pub fn eval(&self, x: &PuiseuxSeries<S>) -> PuiseuxSeries<S> {
        let mut acc = self.c[0].clone();
        for ck in &self.c[1..] {
            acc = acc.mul(x).add(ck);
        }
        acc
    }
}

pub fn symbol<S: Scalar>(l: &AiryOperator) -> SymbolPoly<S> {
    let f = fuchs_form(l);
    SymbolPoly { c: (0..=l.n).map(|k| f.series(k)).collect() }
}

/// Slopes of the lower Newton polygon of `Σ_i p_i X^i` given points `(i, val p_i)`.
pub fn newton_polygon_slopes(points: &[(i64, Rational)]) -> Vec<Rational> {
    let mut pts: Vec<(i64, Rational)> = points.to_vec();
    pts.sort();
    let mut hull: Vec<(i64, Rational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            let cross = (y2 - y1) * Rational::int(p.0 - x1) - (p.1 - y1) * Rational::int(x2 - x1);
            if !cross.is_negative() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.windows(2)
        .map(|w| (w[1].1 - w[0].1) / Rational::int(w[1].0 - w[0].0))
        .collect()
}

/// The slope at infinity `(n+m)/n`, checked against the Newton polygon of the symbol.
pub fn newton_slope(l: &AiryOperator) -> Result<Rational> {
    let expected = Rational::new((l.n + l.m) as i64, l.n as i64);
    let f = fuchs_form(l);
    let points: Vec<(i64, Rational)> = (0..=l.n)
        .filter_map(|k| f.valuation(k).map(|v| ((l.n - k) as i64, Rational::int(v))))
        .collect();
    let slopes = newton_polygon_slopes(&points);
    if slopes.len() == 1 && slopes[0] == expected {
        Ok(expected)
    } else {
        Err(AiryError::InternalSlopeMismatch { expected, found: format!("{slopes:?}") })
    }
}
