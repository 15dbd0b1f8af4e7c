//! Reduction of the Airy connection to a diagonal canonical model and replay of the
//! recorded gauge sequence.

use super::connection::{
    companion_connection, gauge, h_diagonal, principal_level, shear, spectral_reduce_step_with, CoeffSeries,
    StepNormalization,
};
use super::series_matrix::SeriesMatrix;
use crate::error::{AiryError, Result};
use crate::linalg::{ComplexRepr, Eigen, Matrix};
use crate::monodromy::lambda_closed_form;
use crate::operator::{AiryOperator, OperatorCase};
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::series::{PuiseuxSeries, SeriesRepr};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One gauge transformation `A ↦ P A P^{−1} + P' P^{−1}`.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeStep<S: Scalar> {
    /// `P = z^{(s/2) diag(h)}`.
    Shear { s: Rational, h: Vec<Rational> },
    /// `P = I + z^k T`, `k` a positive integer.
    Unipotent { k: Rational, t: Matrix<S> },
    /// `P = I + z^k T`, `k` a positive non-integer.
    Ramified { k: Rational, t: Matrix<S> },
    /// Constant invertible `P`.
    Constant { p: Matrix<S> },
    /// `P = diag(exp(g_i))` with `g_i` of positive valuation.
    Holomorphic { g: Vec<PuiseuxSeries<S>> },
}

impl<S: Scalar> GaugeStep<S> {
    pub fn kind(&self) -> &'static str {
        match self {
            GaugeStep::Shear { .. } => "shear",
            GaugeStep::Unipotent { .. } => "unipotent",
            GaugeStep::Ramified { .. } => "ramified",
            GaugeStep::Constant { .. } => "constant",
            GaugeStep::Holomorphic { .. } => "holomorphic",
        }
    }

    /// `P[A]`. Holomorphic steps use `P' P^{−1} = diag(g_i')` directly, since expanding
    /// `exp(g_i)` loses all precision once the `g_i` have large coefficients.
    pub fn apply(&self, a: &SeriesMatrix<S>, precision: Rational) -> Result<SeriesMatrix<S>> {
        match self {
            GaugeStep::Holomorphic { g } => {
                let p = self.matrix(precision)?;
                let inv = SeriesMatrix::diagonal_series(
                    g.iter().map(|gi| gi.neg().exp_to(precision)).collect::<Result<Vec<_>>>()?,
                );
                let n = a.dim();
                let out = SeriesMatrix::from_fn(n, |i, j| {
                    if i == j {
                        a.get(i, i).add(&g[i].derive())
                    } else {
                        p.get(i, i).mul(a.get(i, j)).mul(inv.get(j, j))
                    }
                });
                Ok(match a.order() {
                    Some(o) => out.truncate(o),
                    None => out,
                })
            }
            _ => gauge(a, &self.matrix(precision)?),
        }
    }

    /// The gauge matrix; `precision` bounds the expansion of `exp(g_i)`.
    pub fn matrix(&self, precision: Rational) -> Result<SeriesMatrix<S>> {
        Ok(match self {
            GaugeStep::Shear { s, h } => SeriesMatrix::diagonal_power(*s, h),
            GaugeStep::Unipotent { k, t } | GaugeStep::Ramified { k, t } => SeriesMatrix::unipotent(*k, t),
            GaugeStep::Constant { p } => SeriesMatrix::constant(p),
            GaugeStep::Holomorphic { g } => {
                let d = g.iter().map(|gi| gi.exp_to(precision)).collect::<Result<Vec<_>>>()?;
                SeriesMatrix::diagonal_series(d)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReduceOptions {
    /// Working order above the leading exponent `r = −m/n − 2`.
    pub order: Option<Rational>,
    /// Refuse bidegrees outside `m = nq + s`, `0 < s < n`.
    pub strict: bool,
    pub normalization: StepNormalization,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { order: None, strict: false, normalization: StepNormalization::Image }
    }
}

/// `2m/n + 4`: enough to see every exponent up to `z^{m/n+2}`.
pub fn default_order(n: usize, m: usize) -> Rational {
    Rational::new(2 * m as i64, n as i64) + Rational::int(4)
}

/// `m/n + 1`: the order must strictly exceed this to reach the residue.
pub fn minimum_order(n: usize, m: usize) -> Rational {
    Rational::new(m as i64, n as i64) + Rational::ONE
}

/// `d/dz − (Σ_e D_e z^e + C z^{−1})`, diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalModel<S: Scalar> {
    pub n: usize,
    pub m: usize,
    /// Exponents `< −1` carrying a nonzero diagonal coefficient.
    pub levels: Vec<Rational>,
    pub d: BTreeMap<Rational, Vec<S>>,
    pub c: Vec<S>,
    pub raw_residues: Vec<S>,
    pub twisted: bool,
    pub case: OperatorCase,
    pub notes: Vec<String>,
}

impl<S: Scalar> CanonicalModel<S> {
    /// The diagonal connection as a series matrix.
    pub fn matrix(&self) -> SeriesMatrix<S> {
        let mut diag: Vec<PuiseuxSeries<S>> = vec![PuiseuxSeries::zero(); self.n];
        for (e, row) in &self.d {
            for (i, v) in row.iter().enumerate() {
                diag[i] = diag[i].add(&PuiseuxSeries::monomial(v.clone(), *e));
            }
        }
        for (i, v) in self.c.iter().enumerate() {
            diag[i] = diag[i].add(&PuiseuxSeries::monomial(v.clone(), -Rational::ONE));
        }
        SeriesMatrix::diagonal_series(diag)
    }

    /// Leading diagonal `D_r`.
    pub fn leading(&self) -> Vec<S> {
        self.levels.first().and_then(|e| self.d.get(e)).cloned().unwrap_or_default()
    }

    pub fn to_repr(&self) -> CanonicalRepr {
        let n = self.n;
        let c = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ComplexRepr::of(&self.c[i]) } else { ComplexRepr::of(&S::zero()) }).collect())
            .collect();
        CanonicalRepr {
            n,
            m: self.m,
            case: self.case,
            levels: self.levels.clone(),
            d: self.levels.iter().map(|e| self.d[e].iter().map(ComplexRepr::of).collect()).collect(),
            c,
            raw_residues: self.raw_residues.iter().map(ComplexRepr::of).collect(),
            twisted: self.twisted,
            notes: self.notes.clone(),
        }
    }

    pub fn from_repr(r: &CanonicalRepr) -> Result<Self> {
        let n = r.n;
        let cvec = |v: &[ComplexRepr]| v.iter().map(|c| S::from_parts(c.re, c.im)).collect::<Vec<S>>();
        if r.d.len() != r.levels.len() || r.d.iter().any(|v| v.len() != n) {
            return Err(AiryError::Dimension);
        }
        if r.c.len() != n || r.c.iter().any(|row| row.len() != n) || r.raw_residues.len() != n {
            return Err(AiryError::Dimension);
        }
        let d = r.levels.iter().copied().zip(r.d.iter().map(|v| cvec(v))).collect();
        Ok(CanonicalModel {
            n,
            m: r.m,
            levels: r.levels.clone(),
            d,
            c: (0..n).map(|i| S::from_parts(r.c[i][i].re, r.c[i][i].im)).collect(),
            raw_residues: cvec(&r.raw_residues),
            twisted: r.twisted,
            case: r.case,
            notes: r.notes.clone(),
        })
    }
}

/// Serialized canonical model: `D` lists the diagonal of each level matrix, `C` is the residue matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalRepr {
    pub n: usize,
    pub m: usize,
    pub case: OperatorCase,
    pub levels: Vec<Rational>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<ComplexRepr>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<ComplexRepr>>,
    pub raw_residues: Vec<ComplexRepr>,
    pub twisted: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeStepRepr {
    Shear { s: Rational, h: Vec<Rational> },
    Unipotent { k: Rational, t: Vec<Vec<ComplexRepr>> },
    Ramified { k: Rational, t: Vec<Vec<ComplexRepr>> },
    Constant { p: Vec<Vec<ComplexRepr>> },
    Holomorphic { g: Vec<SeriesRepr> },
}

impl<S: Scalar> GaugeStep<S> {
    pub fn to_repr(&self) -> GaugeStepRepr {
        match self {
            GaugeStep::Shear { s, h } => GaugeStepRepr::Shear { s: *s, h: h.clone() },
            GaugeStep::Unipotent { k, t } => GaugeStepRepr::Unipotent { k: *k, t: t.to_repr() },
            GaugeStep::Ramified { k, t } => GaugeStepRepr::Ramified { k: *k, t: t.to_repr() },
            GaugeStep::Constant { p } => GaugeStepRepr::Constant { p: p.to_repr() },
            GaugeStep::Holomorphic { g } => GaugeStepRepr::Holomorphic { g: g.iter().map(|x| x.to_repr()).collect() },
        }
    }

    pub fn from_repr(r: &GaugeStepRepr) -> Result<Self> {
        Ok(match r {
            GaugeStepRepr::Shear { s, h } => GaugeStep::Shear { s: *s, h: h.clone() },
            GaugeStepRepr::Unipotent { k, t } => GaugeStep::Unipotent { k: *k, t: Matrix::from_repr(t)? },
            GaugeStepRepr::Ramified { k, t } => GaugeStep::Ramified { k: *k, t: Matrix::from_repr(t)? },
            GaugeStepRepr::Constant { p } => GaugeStep::Constant { p: Matrix::from_repr(p)? },
            GaugeStepRepr::Holomorphic { g } => {
                GaugeStep::Holomorphic { g: g.iter().map(PuiseuxSeries::from_repr).collect() }
            }
        })
    }
}

/// Canonical model together with the gauge sequence that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionRepr {
    #[serde(flatten)]
    pub canonical: CanonicalRepr,
    pub gauge_steps: Vec<GaugeStepRepr>,
    pub truncation: Rational,
    pub order: Rational,
}

/// Result of [`bv_reduce`].
#[derive(Clone, Debug)]
pub struct Reduction<S: Scalar> {
    pub model: CanonicalModel<S>,
    pub steps: Vec<GaugeStep<S>>,
    /// Companion connection the steps start from.
    pub initial: SeriesMatrix<S>,
    /// Connection after every step, truncated at `truncation`.
    pub reduced: SeriesMatrix<S>,
    pub truncation: Rational,
    pub order: Rational,
    /// Eigenvalues of the leading matrix, in the order of the final basis.
    pub eigenvalues: Vec<S>,
}

fn tolerance(scale: f64) -> f64 {
    1e3 * crate::config::eps() * scale.max(1.0)
}

fn round_residue<S: Scalar>(rho: &S, max_den: i64) -> Option<Rational> {
    let tol = tolerance(rho.abs());
    if rho.im().abs() > tol {
        return None;
    }
    Rational::round_from_f64(rho.re(), max_den, tol)
}

/// Reduces `d/dz − A(z)` of `l` to diagonal form up to `z^{r+order}`.
pub fn bv_reduce<S: Scalar>(l: &AiryOperator, opts: &ReduceOptions) -> Result<Reduction<S>> {
    let (n, m) = (l.n(), l.m());
    let case = l.case();
    let covered = matches!(case, OperatorCase::RemainderN { .. });
    if opts.strict && !covered {
        return Err(AiryError::CaseNotImplemented { n, m });
    }
    let order = opts.order.unwrap_or_else(|| default_order(n, m));
    if order <= minimum_order(n, m) {
        return Err(AiryError::InsufficientOrder { order, minimum: minimum_order(n, m) });
    }
    let r = principal_level(n, m);
    let top = r + order;
    let mut notes = Vec::new();
    if !covered {
        notes.push(format!("bidegree ({n}, {m}) is outside m = nq + s, 0 < s < n; generic reduction loop"));
    }

    let initial = companion_connection::<S>(l);
    let s = Rational::new(-(m as i64), n as i64);
    let h = h_diagonal(n);
    let mut steps = vec![GaugeStep::Shear { s, h: h.clone() }];
    let sheared = shear(&initial, s, &h).truncate(top);

    let mut cs = CoeffSeries::from_matrix(&sheared)?;
    let a_r = cs.get(r);
    let eig = Eigen::new(&a_r)?;
    let step = Rational::new(1, n as i64);
    let mut k = step;
    while r + k < top {
        let (t, next) = spectral_reduce_step_with(&cs, k, &eig, r, opts.normalization);
        if !t.is_negligible() {
            steps.push(if k.is_integer() { GaugeStep::Unipotent { k, t } } else { GaugeStep::Ramified { k, t } });
            cs = next;
        }
        k += step;
    }

    steps.push(GaugeStep::Constant { p: eig.inverse.clone() });
    cs = cs.conjugate(&eig.inverse, &eig.vectors);
    let scale = cs.coeffs.values().map(|c| c.max_abs()).fold(1.0, f64::max);
    let off = cs.coeffs.values().map(|c| c.off_diagonal_max()).fold(0.0, f64::max);
    if off > tolerance(scale) {
        return Err(AiryError::CrossCheckFailed { what: "off-diagonal remainder after reduction".into(), deviation: off });
    }
    let mut a = cs.to_matrix();
    // the commutant of A_r is diagonal in this basis; drop rounding noise off the diagonal
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a.set(i, j, PuiseuxSeries::zero_to(top));
            }
        }
    }

    let raw: Vec<S> = (0..n).map(|i| a.get(i, i).coeff_or_zero(-Rational::ONE)).collect();
    let lambda = lambda_closed_form(n, m);
    let max_den = 2 * n as i64;
    let rounded: Option<Vec<Rational>> = raw.iter().map(|rho| round_residue(rho, max_den)).collect();
    let twisted = rounded.is_some();
    match rounded {
        Some(rho) => {
            let hs: Vec<Rational> = rho.iter().map(|p| lambda - *p).collect();
            if hs.iter().any(|x| !x.is_zero()) {
                steps.push(GaugeStep::Shear { s: Rational::int(2), h: hs.clone() });
                a = shear(&a, Rational::int(2), &hs).truncate(top);
            }
        }
        None => notes.push("residues are not rational with denominator at most 2n; kept untwisted".into()),
    }

    let precision = top - r;
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let upper = PuiseuxSeries::from_terms(a.get(i, i).terms().filter(|(e, _)| **e > -Rational::ONE).map(|(e, c)| (*e, c.clone())), Some(top));
        g.push(upper.antiderive()?.neg());
    }
    if g.iter().any(|gi| !gi.is_zero()) {
        let hol = GaugeStep::Holomorphic { g };
        a = hol.apply(&a, precision)?;
        steps.push(hol);
    }

    let mut d: BTreeMap<Rational, Vec<S>> = BTreeMap::new();
    for e in a.exponents().into_iter().filter(|e| *e < -Rational::ONE) {
        let row: Vec<S> = (0..n).map(|i| a.get(i, i).coeff_or_zero(e)).collect();
        if row.iter().any(|v| !v.is_negligible()) {
            d.insert(e, row);
        }
    }
    let c: Vec<S> = (0..n).map(|i| a.get(i, i).coeff_or_zero(-Rational::ONE)).collect();
    let model = CanonicalModel {
        n,
        m,
        levels: d.keys().copied().collect(),
        d,
        c,
        raw_residues: raw,
        twisted,
        case,
        notes,
    };
    Ok(Reduction { model, steps, initial, reduced: a, truncation: top, order, eigenvalues: eig.values })
}

/// Applies `steps` to `initial` with the generic gauge action, truncating at `truncation`.
pub fn replay<S: Scalar>(
    initial: &SeriesMatrix<S>,
    steps: &[GaugeStep<S>],
    truncation: Rational,
    precision: Rational,
) -> Result<SeriesMatrix<S>> {
    let mut a = initial.clone();
    for s in steps {
        a = s.apply(&a, precision)?.truncate(truncation);
    }
    Ok(a)
}

impl<S: Scalar> Reduction<S> {
    /// Replays the recorded steps on the companion connection.
    pub fn replay(&self) -> Result<SeriesMatrix<S>> {
        replay(&self.initial, &self.steps, self.truncation, self.order)
    }

    pub fn to_repr(&self) -> ReductionRepr {
        ReductionRepr {
            canonical: self.model.to_repr(),
            gauge_steps: self.steps.iter().map(|s| s.to_repr()).collect(),
            truncation: self.truncation,
            order: self.order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use num_complex::Complex64;

    type C = Complex64;

    #[test]
    fn classical_model() {
        let red = bv_reduce::<C>(&AiryOperator::classical(), &ReduceOptions::default()).unwrap();
        let mdl = &red.model;
        assert_eq!(mdl.levels, vec![q(-5, 2)]);
        for c in &mdl.c {
            assert!((c - C::new(-0.75, 0.0)).norm() < 1e-10, "{c}");
        }
        for rho in &mdl.raw_residues {
            assert!(rho.norm() < 1e-10);
        }
        let back = red.replay().unwrap();
        assert!(back.distance(&red.reduced) < 1e-9, "{}", back.distance(&red.reduced));
    }

    #[test]
    fn order_guard() {
        let err = bv_reduce::<C>(&AiryOperator::classical(), &ReduceOptions { order: Some(q(3, 2)), ..Default::default() });
        assert!(matches!(err, Err(AiryError::InsufficientOrder { .. })));
        let err = bv_reduce::<C>(&AiryOperator::classical(), &ReduceOptions { strict: true, ..Default::default() });
        assert!(matches!(err, Err(AiryError::CaseNotImplemented { .. })));
    }
}
