//! Square matrices of Puiseux series, and the matrix-coefficient view `Σ A_e z^e`.

use crate::error::{AiryError, Result};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::series::PuiseuxSeries;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix<S: Scalar> {
    n: usize,
    entries: Vec<PuiseuxSeries<S>>,
}

impl<S: Scalar> SeriesMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        SeriesMatrix { n, entries: vec![PuiseuxSeries::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, PuiseuxSeries::one());
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> PuiseuxSeries<S>) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        SeriesMatrix { n, entries }
    }

    /// `Σ_e M_e z^e`, every entry truncated at `order`.
    pub fn from_coefficients(n: usize, coeffs: &BTreeMap<Rational, Matrix<S>>, order: Option<Rational>) -> Self {
        Self::from_fn(n, |i, j| {
            PuiseuxSeries::from_terms(coeffs.iter().map(|(e, m)| (*e, m.get(i, j).clone())), order)
        })
    }

    /// Constant matrix.
    pub fn constant(m: &Matrix<S>) -> Self {
        Self::from_coefficients(m.dim(), &BTreeMap::from([(Rational::ZERO, m.clone())]), None)
    }

    /// `I + z^k T`.
    pub fn unipotent(k: Rational, t: &Matrix<S>) -> Self {
        let n = t.dim();
        let coeffs = BTreeMap::from([(Rational::ZERO, Matrix::identity(n)), (k, t.clone())]);
        Self::from_coefficients(n, &coeffs, None)
    }

    /// `z^{(s/2) diag(h)}`.
    pub fn diagonal_power(s: Rational, h: &[Rational]) -> Self {
        let n = h.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                PuiseuxSeries::monomial(S::one(), s * h[i] / Rational::int(2))
            } else {
                PuiseuxSeries::zero()
            }
        })
    }

    pub fn diagonal_series(d: Vec<PuiseuxSeries<S>>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, s) in d.into_iter().enumerate() {
            m.set(i, i, s);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &PuiseuxSeries<S> {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PuiseuxSeries<S>) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[PuiseuxSeries<S>] {
        &self.entries
    }

    /// Least truncation order over the entries (`None` if all exact).
    pub fn order(&self) -> Option<Rational> {
        self.entries.iter().filter_map(|e| e.order()).min()
    }

    /// Least valuation over the entries.
    pub fn valuation(&self) -> Option<Rational> {
        self.entries.iter().filter_map(|e| e.valuation()).min()
    }

    pub fn ramification(&self) -> i64 {
        use num_integer::Integer;
        self.entries.iter().fold(1, |acc, e| acc.lcm(&e.ramification()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn truncate(&self, order: Rational) -> Self {
        SeriesMatrix { n: self.n, entries: self.entries.iter().map(|e| e.truncate(order)).collect() }
    }

    /// Coefficient matrix at `z^e`.
    pub fn coeff(&self, e: Rational) -> Matrix<S> {
        Matrix::from_fn(self.n, |i, j| self.get(i, j).coeff_or_zero(e))
    }

    /// All exponents carrying a nonzero coefficient somewhere.
    pub fn exponents(&self) -> BTreeSet<Rational> {
        self.entries.iter().flat_map(|e| e.terms().map(|(k, _)| *k)).collect()
    }

    pub fn coefficients(&self) -> BTreeMap<Rational, Matrix<S>> {
        self.exponents().into_iter().map(|e| (e, self.coeff(e))).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        SeriesMatrix { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SeriesMatrix { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut acc = PuiseuxSeries::zero();
            for k in 0..n {
                let a = self.get(i, k);
                let b = o.get(k, j);
                if (a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact()) {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            acc
        })
    }

    pub fn derive(&self) -> Self {
        SeriesMatrix { n: self.n, entries: self.entries.iter().map(|e| e.derive()).collect() }
    }

    /// Largest coefficientwise distance over the exponents known to both.
    pub fn distance(&self, o: &Self) -> f64 {
        self.entries.iter().zip(&o.entries).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    /// Inverse known to relative precision `rel` beyond its valuation.
    ///
    /// Diagonal matrices are inverted entrywise; otherwise `P = z^v (P_0 + R)` with `P_0`
    /// invertible and the Neumann series of `(I + P_0^{−1} z^{−v} R)^{−1}` is summed.
    pub fn inverse(&self, rel: Rational) -> Result<Self> {
        let n = self.n;
        if self.is_diagonal() {
            let mut out = Self::zeros(n);
            for i in 0..n {
                let d = self.get(i, i);
                let inv = if d.is_exact() && d.len() > 1 {
                    let v = d.valuation().ok_or(AiryError::NonInvertibleGauge)?;
                    d.invert_to(rel - v)
                } else {
                    d.invert()
                };
                out.set(i, i, inv.map_err(|_| AiryError::NonInvertibleGauge)?);
            }
            return Ok(out);
        }
        let v = self.valuation().ok_or(AiryError::NonInvertibleGauge)?;
        let p0 = self.coeff(v);
        let p0_inv = p0.inverse().ok_or(AiryError::NonInvertibleGauge)?;
        // N = P_0^{-1} z^{-v} (P - z^v P_0)
        let mut rest = self.clone();
        for i in 0..n {
            for j in 0..n {
                let e = rest.get(i, j);
                let t = e.sub(&PuiseuxSeries::monomial(p0.get(i, j).clone(), v));
                rest.set(i, j, t.shift(-v));
            }
        }
        let nmat = Self::constant(&p0_inv).mul(&rest);
        let step = nmat.valuation();
        let mut sum = Self::identity(n);
        if let Some(step) = step {
            sum = sum.truncate(rel);
            if !step.is_positive() {
                return Err(AiryError::NonInvertibleGauge);
            }
            let neg = nmat.scale(&-S::one()).truncate(rel);
            let mut term = Self::identity(n);
            let mut reached = Rational::ZERO;
            while reached + step < rel {
                term = term.mul(&neg).truncate(rel);
                sum = sum.add(&term);
                reached += step;
            }
        }
        let inv = sum.mul(&Self::constant(&p0_inv));
        Ok(SeriesMatrix { n, entries: inv.entries.iter().map(|e| e.shift(-v)).collect() })
    }

    pub fn scale(&self, c: &S) -> Self {
        SeriesMatrix { n: self.n, entries: self.entries.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn map_entries(&self, f: impl Fn(&PuiseuxSeries<S>) -> PuiseuxSeries<S>) -> Self {
        SeriesMatrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use num_complex::Complex64;

    type C = Complex64;

    #[test]
    fn unipotent_inverse() {
        let t = Matrix::from_fn(2, |i, j| C::new((i + 2 * j) as f64, 1.0));
        let p = SeriesMatrix::unipotent(q(1, 2), &t);
        let inv = p.inverse(q(4, 1)).unwrap();
        let prod = p.mul(&inv);
        let id = SeriesMatrix::identity(2).truncate(q(4, 1));
        assert!(prod.distance(&id) < 1e-12);
        assert_eq!(prod.order(), Some(q(4, 1)));
    }

    #[test]
    fn diagonal_power_inverse_is_exact() {
        let p = SeriesMatrix::<C>::diagonal_power(q(-1, 2), &[q(1, 1), q(-1, 1)]);
        let inv = p.inverse(q(3, 1)).unwrap();
        assert_eq!(p.mul(&inv), SeriesMatrix::identity(2));
    }
}
