//! Small dense square matrices over a [`Scalar`], with the eigen machinery needed for
//! semisimple matrices with distinct eigenvalues.

use crate::error::{AiryError, Result};
use crate::scalar::Scalar;
use crate::series::clean;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S: Scalar> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn diag(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    /// Elementary matrix `E_{ij}` (zero-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.set(i, j, S::one());
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn trace(&self) -> S {
        self.diagonal().into_iter().fold(S::zero(), |a, b| a + b)
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix { n: self.n, data: self.data.iter().map(|v| v.clone() * c.clone()).collect() }
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.abs() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * o.data[k * n + j].clone();
                }
            }
        }
        out
    }

    pub fn commutator(&self, o: &Self) -> Self {
        &self.matmul(o) - &o.matmul(self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_negligible(&self) -> bool {
        self.data.iter().all(|v| v.is_negligible())
    }

    pub fn off_diagonal_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.get(i, j).abs());
                }
            }
        }
        m
    }

    pub fn distance(&self, o: &Self) -> f64 {
        (self - o).max_abs()
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a.get(x, col).abs().total_cmp(&a.get(y, col).abs()))?;
            if a.get(piv, col).abs() <= 1e-14 * scale {
                return None;
            }
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a.get(col, col).recip();
            for j in 0..n {
                a.set(col, j, a.get(col, j).clone() * p.clone());
                inv.set(col, j, inv.get(col, j).clone() * p.clone());
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.abs() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j).clone() - f.clone() * a.get(col, j).clone());
                    inv.set(r, j, inv.get(r, j).clone() - f.clone() * inv.get(col, j).clone());
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }

    /// Monic characteristic polynomial, coefficients ascending (Faddeev–LeVerrier).
    pub fn charpoly(&self) -> Vec<S> {
        let n = self.n;
        let mut c = vec![S::zero(); n + 1];
        c[n] = S::one();
        let mut mk = Self::zeros(n);
        for k in 1..=n {
            let mut next = self.matmul(&mk);
            for i in 0..n {
                next.set(i, i, next.get(i, i).clone() + c[n - k + 1].clone());
            }
            mk = next;
            let t = self.matmul(&mk).trace();
            c[n - k] = -(t / S::from_i64(k as i64));
        }
        c
    }

    /// A nonzero vector in the kernel of a matrix of corank one (complete pivoting).
    pub fn null_vector(&self) -> Vec<S> {
        let n = self.n;
        let mut a = self.clone();
        let mut cols: Vec<usize> = (0..n).collect();
        for step in 0..n.saturating_sub(1) {
            let mut best = (step, step, -1.0);
            for i in step..n {
                #[allow(clippy::needless_range_loop)]
                for j in step..n {
                    let v = a.get(i, cols[j]).abs();
                    if v > best.2 {
                        best = (i, j, v);
                    }
                }
            }
            a.swap_rows(step, best.0);
            cols.swap(step, best.1);
            let p = a.get(step, cols[step]).clone();
            for r in step + 1..n {
                let f = a.get(r, cols[step]).clone() / p.clone();
                for &c in &cols[step..] {
                    a.set(r, c, a.get(r, c).clone() - f.clone() * a.get(step, c).clone());
                }
            }
        }
        let mut x = vec![S::zero(); n];
        x[cols[n - 1]] = S::one();
        for step in (0..n.saturating_sub(1)).rev() {
            let mut acc = S::zero();
            for &c in &cols[step + 1..] {
                acc = acc + a.get(step, c).clone() * x[c].clone();
            }
            x[cols[step]] = -(acc / a.get(step, cols[step]).clone());
        }
        let norm = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let inv = S::from_f64(1.0 / norm);
        x.into_iter().map(|v| v * inv.clone()).collect()
    }

    pub fn to_repr(&self) -> Vec<Vec<ComplexRepr>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| ComplexRepr::of(self.get(i, j))).collect())
            .collect()
    }

    pub fn from_repr(rows: &[Vec<ComplexRepr>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AiryError::Dimension);
        }
        Ok(Self::from_fn(n, |i, j| S::from_parts(rows[i][j].re, rows[i][j].im)))
    }
}

impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, o: &Matrix<S>) -> Matrix<S> {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, o: &Matrix<S>) -> Matrix<S> {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, o: &Matrix<S>) -> Matrix<S> {
        self.matmul(o)
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        Matrix { n: self.n, data: self.data.iter().map(|a| -a.clone()).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl ComplexRepr {
    pub fn of<S: Scalar>(v: &S) -> Self {
        ComplexRepr { re: clean(v.re()), im: clean(v.im()) }
    }
}

/// Roots of a polynomial (ascending coefficients, nonzero leading term) by Aberth
/// iteration in double precision followed by Newton polishing at full precision.
pub fn poly_roots<S: Scalar>(coeffs: &[S]) -> Vec<S> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return vec![];
    }
    let lead = coeffs[deg].to_c64();
    let c: Vec<Complex64> = coeffs.iter().map(|v| v.to_c64() / lead).collect();
    let bound = 1.0 + c[..deg].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * bound, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    s += Complex64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z.into_iter().map(|z0| polish(coeffs, S::from_c64(z0))).collect()
}

fn polish<S: Scalar>(coeffs: &[S], mut x: S) -> S {
    let tol = S::unit_roundoff() * 4.0;
    for _ in 0..50 {
        let mut p = S::zero();
        let mut dp = S::zero();
        for a in coeffs.iter().rev() {
            dp = dp * x.clone() + p.clone();
            p = p * x.clone() + a.clone();
        }
        if dp.abs() == 0.0 {
            break;
        }
        let step = p / dp;
        let rel = step.abs() / x.abs().max(f64::MIN_POSITIVE);
        x = x - step;
        if rel <= tol {
            break;
        }
    }
    x
}

/// Eigendecomposition `S = V Λ V^{−1}` of a matrix with pairwise distinct eigenvalues,
/// eigenvalues ordered by ascending principal argument.
#[derive(Clone, Debug)]
pub struct Eigen<S: Scalar> {
    pub values: Vec<S>,
    pub vectors: Matrix<S>,
    pub inverse: Matrix<S>,
}

impl<S: Scalar> Eigen<S> {
    pub fn new(a: &Matrix<S>) -> Result<Self> {
        let n = a.dim();
        let mut values = poly_roots(&a.charpoly());
        values.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
        let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for i in 0..n {
            for j in i + 1..n {
                if (values[i].clone() - values[j].clone()).abs() <= crate::config::eps() * scale {
                    return Err(AiryError::NotSemisimple(format!("eigenvalues {i} and {j} coincide")));
                }
            }
        }
        let mut vectors = Matrix::zeros(n);
        for (j, lam) in values.iter().enumerate() {
            let shifted = Matrix::from_fn(n, |r, c| {
                let v = a.get(r, c).clone();
                if r == c {
                    v - lam.clone()
                } else {
                    v
                }
            });
            for (r, v) in shifted.null_vector().into_iter().enumerate() {
                vectors.set(r, j, v);
            }
        }
        let inverse = vectors
            .inverse()
            .ok_or_else(|| AiryError::NotSemisimple("eigenvector matrix is singular".into()))?;
        let resid = (&a.matmul(&vectors) - &vectors.matmul(&Matrix::diag(&values))).max_abs();
        if resid > 1e-8 * scale.max(a.max_abs()) {
            return Err(AiryError::NotSemisimple(format!("eigen residual {resid:e}")));
        }
        Ok(Eigen { values, vectors, inverse })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V^{−1} M V`.
    pub fn to_eigenbasis(&self, m: &Matrix<S>) -> Matrix<S> {
        self.inverse.matmul(m).matmul(&self.vectors)
    }

    /// `V M V^{−1}`.
    pub fn from_eigenbasis(&self, m: &Matrix<S>) -> Matrix<S> {
        self.vectors.matmul(m).matmul(&self.inverse)
    }

    /// Spectral projection onto the `i`-th eigenline.
    pub fn projection(&self, i: usize) -> Matrix<S> {
        let n = self.dim();
        Matrix::from_fn(n, |r, c| self.vectors.get(r, i).clone() * self.inverse.get(i, c).clone())
    }

    /// Splits `M` into its commutant part and its part in the image of `ad_S`.
    pub fn commutant_split(&self, m: &Matrix<S>) -> (Matrix<S>, Matrix<S>) {
        let p = self.to_eigenbasis(m);
        let d = Matrix::diag(&p.diagonal());
        let comm = self.from_eigenbasis(&d);
        let im = m - &comm;
        (comm, im)
    }

    /// The unique `T` in the image of `ad_S` with `[S, T] = M` (the commutant part of `M` is ignored).
    pub fn solve_ad(&self, m: &Matrix<S>) -> Matrix<S> {
        let p = self.to_eigenbasis(m);
        let n = self.dim();
        let t = Matrix::from_fn(n, |i, j| {
            if i == j {
                S::zero()
            } else {
                p.get(i, j).clone() / (self.values[i].clone() - self.values[j].clone())
            }
        });
        self.from_eigenbasis(&t)
    }
}

/// Commutant split of `m` relative to the semisimple matrix `s`.
pub fn commutant_split<S: Scalar>(m: &Matrix<S>, s: &Matrix<S>) -> Result<(Matrix<S>, Matrix<S>)> {
    Ok(Eigen::new(s)?.commutant_split(m))
}
