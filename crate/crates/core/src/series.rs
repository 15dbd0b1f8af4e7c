//! Truncated Puiseux series in one variable `z`.
//!
//! A series stores the coefficients it knows in a sorted map keyed by exact rational
//! exponents, plus a truncation order: every exponent at or above it is unknown.
//! Exact series (polynomials, monomials) carry no truncation order.

use crate::error::{AiryError, Result};
use crate::rational::Rational;
use crate::scalar::Scalar;
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<S: Scalar = Complex64> {
    terms: BTreeMap<Rational, S>,
    order: Option<Rational>,
}

fn omin(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn oadd(a: Option<Rational>, b: Rational) -> Option<Rational> {
    a.map(|x| x + b)
}

impl<S: Scalar> PuiseuxSeries<S> {
    /// Exact zero.
    pub fn zero() -> Self {
        PuiseuxSeries { terms: BTreeMap::new(), order: None }
    }

    /// `O(z^order)`.
    pub fn zero_to(order: Rational) -> Self {
        PuiseuxSeries { terms: BTreeMap::new(), order: Some(order) }
    }

    pub fn one() -> Self {
        Self::monomial(S::one(), Rational::ZERO)
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(c, Rational::ZERO)
    }

    pub fn monomial(c: S, exponent: Rational) -> Self {
        Self::from_terms([(exponent, c)], None)
    }

    /// Builds a normalized series: negligible and out-of-range coefficients are dropped,
    /// repeated exponents are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, S)>, order: Option<Rational>) -> Self {
        let mut map: BTreeMap<Rational, S> = BTreeMap::new();
        for (e, c) in terms {
            if let Some(o) = order {
                if e >= o {
                    continue;
                }
            }
            match map.remove(&e) {
                Some(prev) => {
                    map.insert(e, prev + c);
                }
                None => {
                    map.insert(e, c);
                }
            }
        }
        map.retain(|_, c| !c.is_negligible());
        PuiseuxSeries { terms: map, order }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Rational, &S)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// No known nonzero coefficient.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> Option<Rational> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// Least stored exponent, `None` for a zero series.
    pub fn valuation(&self) -> Option<Rational> {
        self.terms.keys().next().copied()
    }

    pub fn leading(&self) -> Option<(Rational, &S)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    /// Valuation, or the truncation order when nothing is known to be nonzero.
    fn val_bound(&self) -> Option<Rational> {
        self.valuation().or(self.order)
    }

    /// Least common multiple of the exponent denominators.
    pub fn ramification(&self) -> i64 {
        Rational::lcm_denom(self.terms.keys())
    }

    /// Coefficient of `z^e`; refuses to read at or beyond the truncation order.
    pub fn coeff(&self, e: Rational) -> Result<S> {
        if let Some(o) = self.order {
            if e >= o {
                return Err(AiryError::BeyondTruncation { exponent: e, order: o });
            }
        }
        Ok(self.terms.get(&e).cloned().unwrap_or_else(S::zero))
    }

    /// Coefficient of `z^e` without the truncation guard (zero when not stored).
    pub fn coeff_or_zero(&self, e: Rational) -> S {
        self.terms.get(&e).cloned().unwrap_or_else(S::zero)
    }

    /// Lowers the truncation order to `order` (never raises it).
    pub fn truncate(&self, order: Rational) -> Self {
        let o = omin(self.order, Some(order));
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone())), o)
    }

    /// Keeps only exponents strictly below `bound`, marking the result as exact.
    /// Used to extract a known polar part.
    pub fn part_below(&self, bound: Rational) -> Self {
        PuiseuxSeries {
            terms: self.terms.range(..bound).map(|(e, c)| (*e, c.clone())).collect(),
            order: None,
        }
    }

    /// Forgets the truncation order. Only meaningful when the caller knows the tail is zero.
    pub fn into_exact(mut self) -> Self {
        self.order = None;
        self
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PuiseuxSeries<T> {
        PuiseuxSeries::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))), self.order)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, v)| (*e, v.clone() * c.clone())), self.order)
    }

    /// Multiplication by `z^e`.
    pub fn shift(&self, e: Rational) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(k, c)| (*k + e, c.clone())).collect(),
            order: oadd(self.order, e),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = omin(self.order, other.order);
        let it = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(e, c)| (*e, c.clone()));
        Self::from_terms(it, order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            order: self.order,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if (self.is_zero() && self.is_exact()) || (other.is_zero() && other.is_exact()) {
            return Self::zero();
        }
        let order = match (self.val_bound(), other.val_bound()) {
            (Some(va), Some(vb)) => omin(oadd(self.order, vb), oadd(other.order, va)),
            _ => unreachable!("non-exact or nonzero series always has a bound"),
        };
        let mut acc: BTreeMap<Rational, S> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = *ea + *eb;
                if order.is_some_and(|o| e >= o) {
                    continue;
                }
                let p = ca.clone() * cb.clone();
                match acc.remove(&e) {
                    Some(prev) => acc.insert(e, prev + p),
                    None => acc.insert(e, p),
                };
            }
        }
        Self::from_terms(acc, order)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse to the precision implied by the truncation order.
    pub fn invert(&self) -> Result<Self> {
        let (v, c0) = match self.leading() {
            Some((v, c)) if !c.is_negligible() => (v, c.clone()),
            _ => return Err(AiryError::ZeroLeadingCoefficient),
        };
        let order = match self.order {
            Some(o) => o,
            None if self.terms.len() == 1 => {
                return Ok(Self::monomial(c0.recip(), -v));
            }
            None => return Err(AiryError::UnboundedInverse),
        };
        // a = c0 z^v (1 + u), u of positive valuation
        let inv_c0 = c0.recip();
        let rel_order = order - v;
        let u: Vec<(Rational, S)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(e, c)| (*e - v, c.clone() * inv_c0.clone()))
            .collect();
        let ram = Rational::lcm_denom(u.iter().map(|(e, _)| e)).lcm(&rel_order.denom());
        let step = Rational::new(1, ram);
        let mut r: BTreeMap<Rational, S> = BTreeMap::new();
        r.insert(Rational::ZERO, S::one());
        let mut e = step;
        while e < rel_order {
            let mut acc = S::zero();
            let mut any = false;
            for (f, uf) in &u {
                if *f > e {
                    break;
                }
                if let Some(prev) = r.get(&(e - *f)) {
                    acc = acc + uf.clone() * prev.clone();
                    any = true;
                }
            }
            if any && !acc.is_negligible() {
                r.insert(e, -acc);
            }
            e += step;
        }
        let out = r.into_iter().map(|(e, c)| (e - v, c * inv_c0.clone()));
        Ok(Self::from_terms(out, Some(rel_order - v)))
    }

    /// Inverse known up to the absolute order `target`.
    pub fn invert_to(&self, target: Rational) -> Result<Self> {
        let v = self.valuation().ok_or(AiryError::ZeroLeadingCoefficient)?;
        let inv = self.truncate(target + v + v).invert()?;
        Ok(inv.truncate(target))
    }

    /// `d/dz`.
    pub fn derive(&self) -> Self {
        let it = self
            .terms
            .iter()
            .filter(|(e, _)| !e.is_zero())
            .map(|(e, c)| (*e - Rational::ONE, c.scale(*e)));
        Self::from_terms(it, oadd(self.order, -Rational::ONE))
    }

    /// `D = z d/dz`.
    pub fn theta_derive(&self) -> Self {
        let it = self
            .terms
            .iter()
            .filter(|(e, _)| !e.is_zero())
            .map(|(e, c)| (*e, c.scale(*e)));
        Self::from_terms(it, self.order)
    }

    /// Solves `z dQ/dz = self` with zero integration constant.
    pub fn antiderive_theta(&self) -> Result<Self> {
        if let Some(c) = self.terms.get(&Rational::ZERO) {
            return Err(AiryError::LogarithmicTerm { re: c.re(), im: c.im() });
        }
        let it = self.terms.iter().map(|(e, c)| (*e, c.scale(e.recip())));
        Ok(Self::from_terms(it, self.order))
    }

    /// Solves `dQ/dz = self` with zero integration constant.
    pub fn antiderive(&self) -> Result<Self> {
        if let Some(c) = self.terms.get(&(-Rational::ONE)) {
            return Err(AiryError::LogarithmicTerm { re: c.re(), im: c.im() });
        }
        let it = self.terms.iter().map(|(e, c)| {
            let k = *e + Rational::ONE;
            (k, c.scale(k.recip()))
        });
        Ok(Self::from_terms(it, oadd(self.order, Rational::ONE)))
    }

    /// `exp(self)` for a series of positive valuation, known up to `min(order, target)`.
    pub fn exp_to(&self, target: Rational) -> Result<Self> {
        let u = self.truncate(target);
        let v = match u.valuation() {
            None => return Ok(Self::one().truncate(u.order.unwrap_or(target))),
            Some(v) if v.is_positive() => v,
            Some(_) => return Err(AiryError::ExpOfPolarSeries),
        };
        let order = u.order.unwrap_or(target);
        let mut acc = Self::one().truncate(order);
        let mut term = Self::one();
        let mut k = 1i64;
        while v * Rational::int(k) < order {
            term = term.mul(&u).scale(&S::from_rational(Rational::new(1, k)));
            acc = acc.add(&term);
            k += 1;
        }
        Ok(acc.truncate(order))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficientwise distance over the exponents known to both series.
    pub fn distance(&self, other: &Self) -> f64 {
        let bound = omin(self.order, other.order);
        let keys: std::collections::BTreeSet<Rational> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter()
            .filter(|e| bound.is_none_or(|o| *e < o))
            .map(|e| (self.coeff_or_zero(e) - other.coeff_or_zero(e)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_repr(&self) -> SeriesRepr {
        SeriesRepr {
            terms: self.terms.iter().map(|(e, c)| TermRepr::new(*e, c)).collect(),
            truncation_order: self.order,
        }
    }

    pub fn from_repr(r: &SeriesRepr) -> Self {
        Self::from_terms(
            r.terms.iter().map(|t| (t.exponent, S::from_parts(t.re, t.im))),
            r.truncation_order,
        )
    }
}

impl<S: Scalar> Default for PuiseuxSeries<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Add for &PuiseuxSeries<S> {
    type Output = PuiseuxSeries<S>;
    fn add(self, rhs: Self) -> PuiseuxSeries<S> {
        PuiseuxSeries::add(self, rhs)
    }
}

impl<S: Scalar> Sub for &PuiseuxSeries<S> {
    type Output = PuiseuxSeries<S>;
    fn sub(self, rhs: Self) -> PuiseuxSeries<S> {
        PuiseuxSeries::sub(self, rhs)
    }
}

impl<S: Scalar> Mul for &PuiseuxSeries<S> {
    type Output = PuiseuxSeries<S>;
    fn mul(self, rhs: Self) -> PuiseuxSeries<S> {
        PuiseuxSeries::mul(self, rhs)
    }
}

impl<S: Scalar> Neg for &PuiseuxSeries<S> {
    type Output = PuiseuxSeries<S>;
    fn neg(self) -> PuiseuxSeries<S> {
        PuiseuxSeries::neg(self)
    }
}

/// One coefficient in serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRepr {
    pub exponent: Rational,
    pub re: f64,
    pub im: f64,
}

impl TermRepr {
    pub fn new<S: Scalar>(exponent: Rational, c: &S) -> Self {
        TermRepr { exponent, re: clean(c.re()), im: clean(c.im()) }
    }
}

/// Negative zero prints as `-0.0`; normalize it so output is stable.
pub(crate) fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRepr {
    pub terms: Vec<TermRepr>,
    pub truncation_order: Option<Rational>,
}
