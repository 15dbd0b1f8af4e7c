//! Puiseux roots of the symbol and the determining factors they induce.
//!
//! Every root of `P_L(z, X)` at `z = 0` has the shape
//! `ξ(z) = Σ_k α_k z^{−1−(m−k)/n}`. Writing `w = z^{1/n}` and `X = z^{−1−m/n} Y`
//! turns `z^{n+m} P_L` into a polynomial `F(w, Y)` whose roots `Y = Σ α_k w^k` are
//! solved order by order; the linear coefficient is `n α_0^{n−1}`.

use crate::error::{AiryError, Result};
use crate::operator::{sigma, symbol, AiryOperator, OperatorCase};
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::series::PuiseuxSeries;
use std::collections::BTreeMap;

/// One Puiseux root: `α_0..α_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch<S: Scalar> {
    pub alpha: Vec<S>,
    pub root_index: usize,
    pub n: usize,
    pub m: usize,
}

impl<S: Scalar> Branch<S> {
    pub fn truncation_index(&self) -> usize {
        self.alpha.len() - 1
    }

    /// Exponent carried by `α_k`.
    pub fn exponent(n: usize, m: usize, k: usize) -> Rational {
        Rational::new(k as i64 - m as i64, n as i64) - Rational::ONE
    }

    /// `ξ_K` with its truncation order `−1 − m/n + (K+1)/n`.
    pub fn xi(&self) -> PuiseuxSeries<S> {
        let k = self.truncation_index();
        let order = Self::exponent(self.n, self.m, k + 1);
        PuiseuxSeries::from_terms(
            self.alpha.iter().enumerate().map(|(i, a)| (Self::exponent(self.n, self.m, i), a.clone())),
            Some(order),
        )
    }

    /// Polar part `ξ_{<0}` (indices `k < m+n`), as an exact series.
    pub fn xi_polar(&self) -> PuiseuxSeries<S> {
        let top = (self.n + self.m).min(self.alpha.len());
        PuiseuxSeries::from_terms(
            self.alpha[..top].iter().enumerate().map(|(i, a)| (Self::exponent(self.n, self.m, i), a.clone())),
            None,
        )
    }
}

/// The `n` roots of `α_0^n = (−1)^n b_m`, ordered by ascending principal argument.
pub fn leading_coefficients<S: Scalar>(l: &AiryOperator) -> Vec<S> {
    let n = l.n();
    let bm = S::from_rational(l.b(l.m()));
    let c = if n.is_multiple_of(2) { bm } else { -bm };
    let rho = c.nth_root(n as u32);
    let mut roots: Vec<S> = (0..n as i64).map(|k| rho.clone() * S::root_of_unity(k, n as i64)).collect();
    roots.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    roots
}

/// `β_{j,k}` for `j ≤ J`, `k ≤ n`, stored as `table[k][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaTable<S: Scalar> {
    table: Vec<Vec<S>>,
}

impl<S: Scalar> BetaTable<S> {
    pub fn get(&self, j: usize, k: usize) -> S {
        self.table[k][j].clone()
    }

    pub fn depth(&self) -> usize {
        self.table[0].len() - 1
    }
}

/// Fills `β_{j,k+1} = Σ_{s≤j} α_s β_{j−s,k}` from `β_{j,0} = δ_{j0}`.
pub fn beta_table<S: Scalar>(alpha: &[S], n: usize) -> BetaTable<S> {
    let jmax = alpha.len();
    let mut table: Vec<Vec<S>> = Vec::with_capacity(n + 1);
    let mut base = vec![S::zero(); jmax];
    base[0] = S::one();
    table.push(base);
    for k in 0..n {
        let prev = &table[k];
        let mut row = Vec::with_capacity(jmax);
        for j in 0..jmax {
            let mut acc = S::zero();
            for s in 0..=j {
                acc = acc + alpha[s].clone() * prev[j - s].clone();
            }
            row.push(acc);
        }
        table.push(row);
    }
    BetaTable { table }
}

fn poly_mul_trunc<S: Scalar>(a: &[S], b: &[S], len: usize) -> Vec<S> {
    let mut out = vec![S::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// Coefficient tables of `F(w, Y)`: `F = Σ_p f[p](w) Y^p`.
fn w_polynomial<S: Scalar>(l: &AiryOperator, len: usize) -> Vec<Vec<S>> {
    let (n, m) = (l.n(), l.m());
    let mut f: Vec<Vec<S>> = vec![vec![S::zero(); len]; n + 1];
    for k in 0..n {
        for i in 0..=k {
            let coef = l.a(n - i) * Rational::int(sigma(k - i, n - i) as i64);
            if coef.is_zero() {
                continue;
            }
            let coef = if i % 2 == 1 { -coef } else { coef };
            let pw = n * (k - i) + k * m;
            if pw < len {
                f[n - k][pw] = f[n - k][pw].clone() + S::from_rational(coef);
            }
        }
    }
    let sign = if (n - 1) % 2 == 0 { Rational::ONE } else { -Rational::ONE };
    for j in 0..=m {
        let pw = n * (m - j);
        if pw < len && !l.b(j).is_zero() {
            f[0][pw] = f[0][pw].clone() + S::from_rational(sign * l.b(j));
        }
    }
    f
}

/// `F(w, Y(w))` truncated to `len` coefficients.
fn eval_w<S: Scalar>(f: &[Vec<S>], y: &[S], len: usize) -> Vec<S> {
    let mut acc = f[f.len() - 1].clone();
    acc.truncate(len);
    for p in (0..f.len() - 1).rev() {
        acc = poly_mul_trunc(&acc, y, len);
        for (t, c) in f[p].iter().enumerate().take(len) {
            acc[t] = acc[t].clone() + c.clone();
        }
    }
    acc
}

/// Expands the root with leading coefficient `leading_coefficients(l)[root_index]` to `α_K`.
pub fn branch_expand<S: Scalar>(l: &AiryOperator, root_index: usize, k: usize) -> Result<Branch<S>> {
    let (n, m) = (l.n(), l.m());
    if k + 1 < m + n {
        return Err(AiryError::InsufficientTruncation { k, required: m + n - 1 });
    }
    let roots = leading_coefficients::<S>(l);
    let a0 = roots.get(root_index).cloned().ok_or(AiryError::RootIndex { index: root_index, n })?;
    let lin = S::from_i64(n as i64) * a0.powi(n as u32 - 1);
    if lin.is_negligible() {
        return Err(AiryError::NonSimpleLinearization);
    }
    let f = w_polynomial::<S>(l, k + 1);
    let mut alpha = vec![S::zero(); k + 1];
    alpha[0] = a0;
    for t in 1..=k {
        let r = eval_w(&f, &alpha[..t], t + 1);
        alpha[t] = -(r[t].clone() / lin.clone());
    }
    Ok(Branch { alpha, root_index, n, m })
}

/// `P_L(z, ξ_K(z))`, computed through the series module.
pub fn residual<S: Scalar>(l: &AiryOperator, branch: &Branch<S>) -> PuiseuxSeries<S> {
    symbol::<S>(l).eval(&branch.xi())
}

/// A sparse set of solved `α_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialAlpha<S: Scalar> {
    pub root_index: usize,
    pub values: BTreeMap<usize, S>,
}

impl<S: Scalar> PartialAlpha<S> {
    pub fn get(&self, k: usize) -> S {
        self.values.get(&k).cloned().unwrap_or_else(S::zero)
    }

    fn dense(&self, len: usize) -> Vec<S> {
        (0..len).map(|k| self.get(k)).collect()
    }
}

fn sign_pow(e: usize) -> Rational {
    if e.is_multiple_of(2) {
        Rational::ONE
    } else {
        -Rational::ONE
    }
}

/// One row of a triangular system: target index and right-hand side in `α_0`.
type Row<'a, S> = (usize, Box<dyn Fn(&S) -> S + 'a>);

/// Solves `β_{t,n} = rhs_t` in ascending `t`, treating every other index as zero.
fn triangular_solve<S: Scalar>(
    n: usize,
    root_index: usize,
    a0: S,
    rows: &[Row<'_, S>],
) -> PartialAlpha<S> {
    let mut sol = PartialAlpha { root_index, values: BTreeMap::from([(0usize, a0.clone())]) };
    let lin = S::from_i64(n as i64) * a0.powi(n as u32 - 1);
    for (t, rhs) in rows {
        let beta = beta_table(&sol.dense(t + 1), n).get(*t, n);
        let v = (rhs(&a0) - beta) / lin.clone();
        sol.values.insert(*t, v);
    }
    sol
}

/// System (A) for `m = qn`: the `α_{sn}`, `0 ≤ s ≤ q`.
pub fn solve_system_a<S: Scalar>(l: &AiryOperator, root_index: usize) -> Result<PartialAlpha<S>> {
    let (n, m) = (l.n(), l.m());
    let q = match l.case() {
        OperatorCase::MultipleOfN { q } => q,
        _ => return Err(AiryError::WrongCase { expected: "m = qn", n, m }),
    };
    let a0 = leading_coefficients::<S>(l)
        .get(root_index)
        .cloned()
        .ok_or(AiryError::RootIndex { index: root_index, n })?;
    let sn = S::from_rational(sign_pow(n));
    let mut rows: Vec<Row<'static, S>> = Vec::new();
    for s in 1..=q {
        let b = S::from_rational(l.b(m - s));
        let sn = sn.clone();
        if s < q {
            rows.push((s * n, Box::new(move |_| sn.clone() * b.clone())));
        } else {
            let an1 = S::from_rational(l.a(n - 1));
            rows.push((
                s * n,
                Box::new(move |a0: &S| an1.clone() * a0.powi(n as u32 - 1) + sn.clone() * b.clone()),
            ));
        }
    }
    Ok(triangular_solve(n, root_index, a0, &rows))
}

/// System (B) for `m = qn + r`: the `α_{sn}` for `0 ≤ s ≤ q+1` and `α_m`.
pub fn solve_system_b<S: Scalar>(l: &AiryOperator, root_index: usize) -> Result<PartialAlpha<S>> {
    let (n, m) = (l.n(), l.m());
    let q = match l.case() {
        OperatorCase::RemainderN { q, .. } => q,
        _ => return Err(AiryError::WrongCase { expected: "m = qn + r", n, m }),
    };
    let a0 = leading_coefficients::<S>(l)
        .get(root_index)
        .cloned()
        .ok_or(AiryError::RootIndex { index: root_index, n })?;
    let sn = S::from_rational(sign_pow(n));
    let mut rows: Vec<Row<'static, S>> = Vec::new();
    for s in 1..=q + 1 {
        let b = S::from_rational(l.b(m - s));
        let sn = sn.clone();
        rows.push((s * n, Box::new(move |_| sn.clone() * b.clone())));
    }
    let an1 = S::from_rational(l.a(n - 1));
    rows.push((m, Box::new(move |a0: &S| an1.clone() * a0.powi(n as u32 - 1))));
    rows.sort_by_key(|(t, _)| *t);
    Ok(triangular_solve(n, root_index, a0, &rows))
}

/// `α_n = (−1)^n b_{m−1} / (n α_0^{n−1})`.
pub fn closed_form_alpha_n<S: Scalar>(l: &AiryOperator, a0: &S) -> S {
    let n = l.n();
    S::from_rational(sign_pow(n) * l.b(l.m() - 1)) / (S::from_i64(n as i64) * a0.powi(n as u32 - 1))
}

/// `α_{2n} = (−1)^n b_{m−2}/(n α_0^{n−1}) − ((n−1)/(2n²)) b_{m−1}² / α_0^{2n−1}`.
pub fn closed_form_alpha_2n<S: Scalar>(l: &AiryOperator, a0: &S) -> S {
    let (n, m) = (l.n(), l.m());
    let first = S::from_rational(sign_pow(n) * l.b(m - 2)) / (S::from_i64(n as i64) * a0.powi(n as u32 - 1));
    let bm1 = S::from_rational(l.b(m - 1));
    let w = S::from_rational(Rational::new(n as i64 - 1, 2 * (n * n) as i64));
    first - w * bm1.clone() * bm1 / a0.powi(2 * n as u32 - 1)
}

/// Inverse problem for `n = qm + r`: recovers `a_{n−1}, …, a_{n−(q+1)}` from a branch.
pub fn recover_coefficients_s<S: Scalar>(l: &AiryOperator, branch: &Branch<S>) -> Result<Vec<(usize, S)>> {
    let (n, m) = (l.n(), l.m());
    let q = match l.case() {
        OperatorCase::SmallM { q, .. } => q,
        _ => return Err(AiryError::WrongCase { expected: "n = qm + r", n, m }),
    };
    let need = (q + 1) * m;
    if branch.truncation_index() < need {
        return Err(AiryError::InsufficientTruncation { k: branch.truncation_index(), required: need });
    }
    let beta = beta_table(&branch.alpha[..=need], n);
    // a[k] holds a_{n−k}; a_n = 1
    let mut a: Vec<S> = vec![S::one()];
    for j in 1..=q + 1 {
        let mut acc = S::zero();
        for (k, ak) in a.iter().enumerate() {
            let term = ak.clone() * beta.get((j - k) * m, n - k);
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        let pivot = beta.get(0, n - j);
        if pivot.is_negligible() {
            return Err(AiryError::SingularSystem { pivot: pivot.abs() });
        }
        // (−1)^j a_{n−j} β_{0,n−j} = −acc
        let v = -acc / pivot;
        a.push(if j % 2 == 0 { v } else { -v });
    }
    Ok(a.into_iter().enumerate().skip(1).map(|(k, v)| (n - k, v)).collect())
}

/// One exponential part `Q(z)`: `z Q' = ξ_{<0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingFactor<S: Scalar> {
    pub series: PuiseuxSeries<S>,
    pub multiplicity: usize,
    pub source_branch: usize,
}

/// `Q(z) = −z^{−1−m/n} Σ_k (n α_k/(n+m−k)) z^{k/n}` from a sparse α list.
pub fn factor_from_alpha<S: Scalar>(n: usize, m: usize, alpha: impl IntoIterator<Item = (usize, S)>) -> PuiseuxSeries<S> {
    let terms = alpha.into_iter().filter(|(k, _)| *k < n + m).map(|(k, a)| {
        let w = Rational::new(-(n as i64), (n + m - k) as i64);
        (Branch::<S>::exponent(n, m, k), a.scale(w))
    });
    PuiseuxSeries::from_terms(terms, None)
}

fn cross_check<S: Scalar>(what: &str, general: &PuiseuxSeries<S>, fast: &PuiseuxSeries<S>) -> Result<()> {
    let scale = general.max_abs().max(1.0);
    let d = general.distance(fast);
    if d > 1e-6 * scale {
        return Err(AiryError::CrossCheckFailed { what: what.to_string(), deviation: d });
    }
    Ok(())
}

/// One factor per branch, with closed-form cross-checks where available, grouped by equality.
pub fn determining_factors<S: Scalar>(l: &AiryOperator, k: Option<usize>) -> Result<Vec<DeterminingFactor<S>>> {
    let (n, m) = (l.n(), l.m());
    let k = k.unwrap_or(m + n - 1).max(m + n - 1);
    let mut raw: Vec<(usize, PuiseuxSeries<S>)> = Vec::with_capacity(n);
    for idx in 0..n {
        let br = branch_expand::<S>(l, idx, k)?;
        let qz = br.xi_polar().antiderive_theta()?;
        let fast = match l.case() {
            OperatorCase::MultipleOfN { .. } => Some(solve_system_a::<S>(l, idx)?),
            OperatorCase::RemainderN { .. } => Some(solve_system_b::<S>(l, idx)?),
            _ => None,
        };
        if let Some(p) = fast {
            let fq = factor_from_alpha(n, m, p.values);
            cross_check(&format!("closed-form factor of branch {idx}"), &qz, &fq)?;
        }
        raw.push((idx, qz));
    }
    Ok(group_factors(raw))
}

fn group_factors<S: Scalar>(raw: Vec<(usize, PuiseuxSeries<S>)>) -> Vec<DeterminingFactor<S>> {
    let tol = 10.0 * crate::config::eps();
    let mut out: Vec<DeterminingFactor<S>> = Vec::new();
    for (idx, s) in raw {
        match out.iter_mut().find(|f| f.series.distance(&s) <= tol) {
            Some(f) => f.multiplicity += 1,
            None => out.push(DeterminingFactor { series: s, multiplicity: 1, source_branch: idx }),
        }
    }
    out
}

/// Indices of the coefficients the factors depend on, per the closed-form analysis:
/// `(a-indices, b-indices)`. `None` for the boundary configuration.
pub fn sensitive_coefficients(n: usize, m: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let a_top = |k: usize| -> Vec<usize> { (1..=k).filter(|i| *i < n).map(|i| n - i).collect() };
    match OperatorCase::classify(n, m) {
        OperatorCase::MultipleOfN { q } => Some((a_top(1), (0..=q).map(|s| m - s).collect())),
        OperatorCase::RemainderN { q, .. } => Some((a_top(1), (0..=q + 1).map(|s| m - s).collect())),
        OperatorCase::SmallM { q, .. } => Some((a_top(q + 1), vec![m, m - 1])),
        OperatorCase::Boundary { .. } => None,
    }
}
