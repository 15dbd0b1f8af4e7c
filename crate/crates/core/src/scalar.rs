//! Complex scalars at a configurable working precision.
//!
//! [`Scalar`] is implemented for `Complex64` (the default) and for
//! [`BigComplex`], whose parts are binary floats at [`config::big_precision`] bits.
//! All algorithms are written against the trait and only need field operations,
//! a modulus, and principal roots (obtained by Newton refinement from a double guess).

use crate::config;
use crate::rational::Rational;
use dashu_float::FBig;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_parts(re: f64, im: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn re(&self) -> f64;
    fn im(&self) -> f64;
    fn abs(&self) -> f64;
    /// Relative accuracy of the representation, used to stop Newton refinement.
    fn unit_roundoff() -> f64;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn from_f64(x: f64) -> Self {
        Self::from_parts(x, 0.0)
    }

    fn from_c64(z: Complex64) -> Self {
        Self::from_parts(z.re, z.im)
    }

    fn from_rational(r: Rational) -> Self {
        Self::from_i64(r.numer()) / Self::from_i64(r.denom())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re(), self.im())
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= config::eps()
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    fn scale(&self, r: Rational) -> Self {
        if r == Rational::ONE {
            self.clone()
        } else {
            self.clone() * Self::from_rational(r)
        }
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Principal argument in (−π, π], with values on the negative real axis snapped to π.
    fn arg(&self) -> f64 {
        principal_arg(self.to_c64())
    }

    /// Principal `n`-th root.
    fn nth_root(&self, n: u32) -> Self {
        let c = self.to_c64();
        let guess = if c.norm() == 0.0 {
            return Self::zero();
        } else {
            Complex64::from_polar(c.norm().powf(1.0 / n as f64), principal_arg(c) / n as f64)
        };
        newton_root(self, n, Self::from_c64(guess))
    }

    /// `exp(2πi·k/n)`.
    fn root_of_unity(k: i64, n: i64) -> Self {
        assert!(n > 0);
        let k = k.rem_euclid(n);
        let t = 2.0 * PI * k as f64 / n as f64;
        let guess = Self::from_parts(t.cos(), t.sin());
        newton_root(&Self::one(), n as u32, guess)
    }
}

/// Newton iteration for `x^n = c` from `x0`.
fn newton_root<S: Scalar>(c: &S, n: u32, x0: S) -> S {
    if n == 1 {
        return c.clone();
    }
    let nn = S::from_i64(n as i64);
    let tol = S::unit_roundoff() * 4.0;
    let mut x = x0;
    for _ in 0..60 {
        let xn1 = x.powi(n - 1);
        let step = (xn1.clone() * x.clone() - c.clone()) / (nn.clone() * xn1);
        let rel = step.abs() / x.abs().max(f64::MIN_POSITIVE);
        x = x - step;
        if rel <= tol {
            break;
        }
    }
    x
}

/// Principal argument with the negative real axis mapped to +π.
pub fn principal_arg(z: Complex64) -> f64 {
    let r = z.norm();
    if r > 0.0 && z.re < 0.0 && z.im.abs() <= 1e-12 * r {
        PI
    } else {
        z.im.atan2(z.re)
    }
}

impl Scalar for Complex64 {
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
    fn abs(&self) -> f64 {
        self.norm()
    }
    fn unit_roundoff() -> f64 {
        f64::EPSILON
    }
    fn from_rational(r: Rational) -> Self {
        Complex64::new(r.numer() as f64 / r.denom() as f64, 0.0)
    }
}

/// Complex number with arbitrary-precision binary float parts.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: FBig,
    pub im: FBig,
}

fn big_from_f64(x: f64) -> FBig {
    let v = FBig::try_from(x).unwrap_or(FBig::ZERO);
    v.with_precision(config::big_precision()).value()
}

fn big_from_i64(x: i64) -> FBig {
    FBig::from(x).with_precision(config::big_precision()).value()
}

fn big_to_f64(x: &FBig) -> f64 {
    x.to_f64().value()
}

impl BigComplex {
    pub fn new(re: FBig, im: FBig) -> Self {
        BigComplex { re, im }
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl Add for BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: BigComplex) -> BigComplex {
        BigComplex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: BigComplex) -> BigComplex {
        BigComplex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: BigComplex) -> BigComplex {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        BigComplex::new(re, im)
    }
}

impl Div for BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: BigComplex) -> BigComplex {
        let den = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &den;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &den;
        BigComplex::new(re, im)
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-self.re, -self.im)
    }
}

impl Scalar for BigComplex {
    fn from_parts(re: f64, im: f64) -> Self {
        BigComplex::new(big_from_f64(re), big_from_f64(im))
    }
    fn from_i64(v: i64) -> Self {
        BigComplex::new(big_from_i64(v), big_from_i64(0))
    }
    fn re(&self) -> f64 {
        big_to_f64(&self.re)
    }
    fn im(&self) -> f64 {
        big_to_f64(&self.im)
    }
    fn abs(&self) -> f64 {
        self.re().hypot(self.im())
    }
    fn unit_roundoff() -> f64 {
        2f64.powi(-(config::big_precision().min(1000) as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_roots_double() {
        let r = Complex64::from_i64(-8).nth_root(3);
        let expect = Complex64::from_polar(2.0, PI / 3.0);
        assert!((r - expect).norm() < 1e-14);
        assert!((Complex64::root_of_unity(1, 4) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((Complex64::root_of_unity(-1, 4) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn big_roots_are_accurate_beyond_double() {
        let two = BigComplex::from_i64(2);
        let r = two.nth_root(2);
        let err = (r.clone() * r - two).abs();
        assert!(err < 1e-40, "err = {err}");
        let w = BigComplex::root_of_unity(1, 3);
        let err = (w.powi(3) - BigComplex::one()).abs();
        assert!(err < 1e-40, "err = {err}");
    }

    #[test]
    fn big_division() {
        let a = BigComplex::from_parts(1.0, 2.0);
        let b = BigComplex::from_parts(3.0, -1.0);
        let c = (a.clone() / b.clone()) * b;
        assert!((c - a).abs() < 1e-50);
    }

    #[test]
    fn arg_snaps_negative_axis() {
        assert_eq!(principal_arg(Complex64::new(-1.0, -1e-17)), PI);
        assert!(principal_arg(Complex64::new(0.0, -1.0)) < 0.0);
    }
}
