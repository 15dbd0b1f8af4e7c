mod common;

use airy_formal::branches::leading_coefficients;
use airy_formal::linalg::{Eigen, Matrix};
use airy_formal::operator::{validate, AiryOperator};
use airy_formal::reduction::canonical::{ReductionRepr, CanonicalModel};
use airy_formal::reduction::connection::{
    b_star, explicit_t1, principal_level, second_stage_ratio, sheared_connection, spectral_reduce_step_with, CoeffSeries,
};
use airy_formal::reduction::*;
use airy_formal::{q, AiryError, Complex64 as C, PuiseuxSeries, Rational, Scalar};
use common::{ints, random_bidegree, random_operator, rng};
use proptest::prelude::*;

fn cm(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn random_matrix(seed: u64, n: usize) -> Matrix<C> {
    use rand::Rng;
    let r = std::cell::RefCell::new(rng(seed));
    Matrix::from_fn(n, |_, _| {
        let mut r = r.borrow_mut();
        cm(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))
    })
}

fn random_connection(seed: u64, n: usize) -> SeriesMatrix<C> {
    use rand::Rng;
    let r = std::cell::RefCell::new(rng(seed));
    SeriesMatrix::from_fn(n, |_, _| {
        let mut r = r.borrow_mut();
        PuiseuxSeries::from_terms(
            (0..10).map(|k| (q(k - 6, 2), cm(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))),
            Some(q(2, 1)),
        )
    })
}

#[test]
fn sl2_relations() {
    for n in 1..=5 {
        let t = standard_triple::<C>(n);
        assert!(t.h.commutator(&t.x).distance(&t.x.scale(&cm(2.0, 0.0))) < 1e-14);
        assert!(t.h.commutator(&t.y).distance(&t.y.scale(&cm(-2.0, 0.0))) < 1e-14);
        assert!(t.x.commutator(&t.y).distance(&t.h) < 1e-14);
    }
}

#[test]
fn sheared_leading_eigenvalues_are_branch_leads() {
    let mut r = rng(3);
    for n in 1..=5 {
        for m in 1..=6 {
            let l = random_operator(&mut r, n, m);
            let a1 = sheared_connection::<C>(&l);
            let rr = principal_level(n, m);
            assert_eq!(a1.valuation(), Some(rr));
            let eig = Eigen::new(&a1.coeff(rr)).unwrap();
            let lead = leading_coefficients::<C>(&l);
            for v in &eig.values {
                assert!(lead.iter().any(|a| (a - v).norm() < 1e-9), "{v} not in {lead:?}");
            }
        }
    }
}

#[test]
fn commutant_split_examples() {
    let s = Matrix::diag(&[cm(1.0, 0.0), cm(-1.0, 0.0), cm(0.0, 2.0)]);
    let u = random_matrix(1, 3);
    let u_inv = u.inverse().unwrap();
    let s = u.matmul(&s).matmul(&u_inv);
    let eig = Eigen::new(&s).unwrap();
    let comm = u.matmul(&Matrix::diag(&[cm(3.0, 1.0), cm(0.5, 0.0), cm(-1.0, 0.0)])).matmul(&u_inv);
    let (c, i) = eig.commutant_split(&comm);
    assert!(c.distance(&comm) < 1e-12 && i.max_abs() < 1e-12);
    let img = s.commutator(&random_matrix(2, 3));
    let (c, i) = eig.commutant_split(&img);
    assert!(c.max_abs() < 1e-12 && i.distance(&img) < 1e-12);
    let t = eig.solve_ad(&img);
    assert!(s.commutator(&t).distance(&img) < 1e-11);
}

#[test]
fn identity_and_commuting_constant_gauges() {
    let a = random_connection(4, 3);
    assert!(gauge(&a, &SeriesMatrix::identity(3)).unwrap().distance(&a) < 1e-15);
    let d = SeriesMatrix::diagonal_series(vec![
        PuiseuxSeries::monomial(cm(1.0, 1.0), Rational::ZERO).add(&PuiseuxSeries::monomial(cm(0.5, 0.0), q(-3, 2))),
        PuiseuxSeries::monomial(cm(2.0, 0.0), q(-1, 1)),
    ])
    .truncate(q(1, 1));
    let p = SeriesMatrix::constant(&Matrix::diag(&[cm(2.0, -1.0), cm(0.0, 3.0)]));
    assert!(gauge(&d, &p).unwrap().distance(&d) < 1e-14);
}

#[test]
fn exact_connection_rejects_non_monomial_inverse() {
    let a = companion_connection::<C>(&AiryOperator::classical());
    let p = SeriesMatrix::unipotent(q(1, 1), &random_matrix(9, 2));
    assert!(matches!(gauge(&a, &p), Err(AiryError::UnboundedInverse)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_cocycle(seed in 0u64..10_000, k1 in 1i64..4, k2 in 1i64..4) {
        let a = random_connection(seed, 3);
        let p = SeriesMatrix::unipotent(q(k1, 2), &random_matrix(seed + 1, 3));
        let qq = SeriesMatrix::unipotent(q(k2, 3), &random_matrix(seed + 2, 3));
        let two = gauge(&gauge(&a, &qq).unwrap(), &p).unwrap();
        let one = gauge(&a, &p.mul(&qq)).unwrap();
        let scale = one.entries().iter().map(|e| e.max_abs()).fold(1.0, f64::max);
        prop_assert!(two.distance(&one) < 1e-12 * scale, "{} at scale {}", two.distance(&one), scale);
    }

    #[test]
    fn shear_is_a_gauge(seed in 0u64..10_000, num in -4i64..4) {
        let a = random_connection(seed, 3);
        let s = q(num, 3);
        let h = [q(2, 1), q(0, 1), q(-2, 1)];
        let direct = shear(&a, s, &h);
        let generic = gauge(&a, &SeriesMatrix::diagonal_power(s, &h)).unwrap();
        prop_assert!(direct.distance(&generic) < 1e-13);
    }
}

/// After the loop, every coefficient above the leading one commutes with `A_r`.
#[test]
fn reduction_loop_contract() {
    let mut r = rng(21);
    for _ in 0..8 {
        let (n, m) = random_bidegree(&mut r, 2..=4, 1..=7, |_, _| true);
        let l = random_operator(&mut r, n, m);
        let rr = principal_level(n, m);
        let top = rr + q(3, 1);
        let mut cs = CoeffSeries::from_matrix(&sheared_connection::<C>(&l).truncate(top)).unwrap();
        let a_r = cs.get(rr);
        let eig = Eigen::new(&a_r).unwrap();
        let mut k = q(1, n as i64);
        while rr + k < top {
            cs = spectral_reduce_step_with(&cs, k, &eig, rr, StepNormalization::Image).1;
            k += q(1, n as i64);
        }
        for (e, coef) in &cs.coeffs {
            for i in 0..n {
                let p = eig.projection(i);
                let c = p.commutator(coef).max_abs();
                assert!(c < 1e-9 * coef.max_abs().max(1.0), "exponent {e}: {c}");
            }
        }
    }
}

#[test]
fn second_stage_closed_forms() {
    let l = validate(3, 4, vec![q(1, 2), q(-2, 1), q(1, 1)], ints(&[1, -3, 2, 5, 1])).unwrap();
    let n = 3;
    let rr = principal_level(3, 4);
    let a1 = sheared_connection::<C>(&l).truncate(rr + q(3, 1));
    let (t, a2) = spectral_reduce_step(&a1, Rational::ONE, &a1.coeff(rr), StepNormalization::AnchoredFirst).unwrap();
    assert!(t.distance(&explicit_t1(&l)) < 1e-12);
    // A²_{r+1} = c (X + b_m E_{n1})
    let c = second_stage_ratio(&l).to_f64();
    let mut want = standard_triple::<C>(n).x;
    want.set(n - 1, 0, cm(b_star(&l, 4).to_f64(), 0.0));
    let got = a2.coeff(rr + Rational::ONE);
    assert!(got.distance(&want.scale(&cm(c, 0.0))) < 1e-12, "{got:?}");
    let ex = explicit_second_stage::<C>(&l, q(3, 1)).unwrap();
    assert_eq!(ex.get(2, 2).coeff(q(-2, 1)).unwrap(), cm(-2.0, 0.0));
    for j in 0..n - 1 {
        assert_eq!(ex.get(j, j + 1).valuation(), Some(rr));
    }
}

#[test]
fn second_stage_refuses_colliding_a_term() {
    // m (n − k) = n with n = 2, m = 2, k = 1
    let l = validate(2, 2, ints(&[1, 1]), ints(&[1, 1, 1])).unwrap();
    assert!(matches!(explicit_second_stage::<C>(&l, q(3, 1)), Err(AiryError::WrongCase { .. })));
}

#[test]
fn level_preservation() {
    let mut r = rng(8);
    for _ in 0..10 {
        let (n, m) = random_bidegree(&mut r, 2..=4, 2..=7, |n, m| m % n != 0 && m > n);
        let l = random_operator(&mut r, n, m);
        let l = if l.b(m - 1).is_zero() { l.with_b(m - 1, q(1, 1)).unwrap() } else { l };
        let red = bv_reduce::<C>(&l, &ReduceOptions::default()).unwrap();
        assert!(red.model.levels.contains(&(principal_level(n, m) + Rational::ONE)));
    }
}

#[test]
fn minus_two_coefficient_is_scalar() {
    let mut r = rng(12);
    for _ in 0..10 {
        let (n, m) = random_bidegree(&mut r, 2..=4, 2..=9, |n, m| m % n != 0 && m > n);
        let l = random_operator(&mut r, n, m);
        let red = bv_reduce::<C>(&l, &ReduceOptions::default()).unwrap();
        let want = (l.a(n - 1) / Rational::int(n as i64)).to_f64();
        let d = red.model.d.get(&q(-2, 1)).cloned().unwrap_or_else(|| vec![cm(0.0, 0.0); n]);
        for v in d {
            assert!((v - cm(want, 0.0)).norm() < 1e-9, "{l}: {v} vs {want}");
        }
    }
}

#[test]
fn model_does_not_depend_on_normalization() {
    let mut r = rng(13);
    for _ in 0..6 {
        let (n, m) = random_bidegree(&mut r, 2..=4, 1..=7, |_, _| true);
        let l = random_operator(&mut r, n, m);
        let a = bv_reduce::<C>(&l, &ReduceOptions::default()).unwrap();
        let opts = ReduceOptions { normalization: StepNormalization::AnchoredFirst, ..Default::default() };
        let b = bv_reduce::<C>(&l, &opts).unwrap();
        assert_eq!(a.model.levels, b.model.levels);
        assert!(a.model.matrix().distance(&b.model.matrix()) < 1e-9);
    }
}

#[test]
fn strict_mode_and_order_guard() {
    let strict = ReduceOptions { strict: true, ..Default::default() };
    let b_case = validate(2, 3, ints(&[0, 1]), ints(&[0, 0, 0, 1])).unwrap();
    assert!(bv_reduce::<C>(&b_case, &strict).is_ok());
    let a_case = validate(2, 4, ints(&[0, 1]), ints(&[0, 0, 0, 0, 1])).unwrap();
    assert!(matches!(bv_reduce::<C>(&a_case, &strict), Err(AiryError::CaseNotImplemented { n: 2, m: 4 })));
    let loose = bv_reduce::<C>(&a_case, &ReduceOptions::default()).unwrap();
    assert!(!loose.model.notes.is_empty());
    let low = ReduceOptions { order: Some(q(5, 2)), ..Default::default() };
    assert!(matches!(bv_reduce::<C>(&b_case, &low), Err(AiryError::InsufficientOrder { .. })));
}

#[test]
fn json_round_trip() {
    let l = validate(3, 4, vec![q(1, 2), q(-2, 1), q(1, 1)], ints(&[1, -3, 2, 5, 1])).unwrap();
    let red = bv_reduce::<C>(&l, &ReduceOptions::default()).unwrap();
    let repr = red.to_repr();
    let text = serde_json::to_string(&repr).unwrap();
    let back: ReductionRepr = serde_json::from_str(&text).unwrap();
    assert_eq!(back, repr);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["levels", "D", "C", "gauge_steps"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let model = CanonicalModel::<C>::from_repr(&back.canonical).unwrap();
    assert!(model.matrix().distance(&red.model.matrix()) < 1e-15);
    let steps: Vec<GaugeStep<C>> = back.gauge_steps.iter().map(GaugeStep::from_repr).collect::<Result<_, _>>().unwrap();
    let again = replay(&red.initial, &steps, red.truncation, red.order).unwrap();
    assert!(again.distance(&red.reduced) < 1e-8);
}

#[test]
fn equivalence_examples() {
    let l = AiryOperator::classical();
    assert_eq!(formal_equivalence::<C>(&l, &l).unwrap().verdict, Verdict::NecessaryConditionsOnly);
    let l22 = validate(2, 2, ints(&[0, 1]), ints(&[0, 0, 1])).unwrap();
    let rep = formal_equivalence::<C>(&l, &l22).unwrap();
    assert_eq!(rep.verdict, Verdict::NotEquivalent);
    assert!(!rep.same_bidegree);
    // m = qn: b_{m−q−1} is outside the conditions and the factors
    let l1 = validate(2, 4, ints(&[1, 1]), ints(&[1, 2, -1, 3, 2])).unwrap();
    let l2 = l1.with_b(1, q(7, 1)).unwrap();
    let rep = formal_equivalence::<C>(&l1, &l2).unwrap();
    assert!(rep.coefficient_checks.iter().all(|c| c.holds));
    assert_eq!(rep.factors_match, Some(true));
    let rep = formal_equivalence::<C>(&l1, &l1).unwrap();
    assert_eq!(rep.verdict, Verdict::Equivalent);
}

#[test]
fn big_precision_reduction() {
    let l = validate(2, 3, ints(&[1, 1]), ints(&[1, 0, 2, 1])).unwrap();
    let d = bv_reduce::<C>(&l, &ReduceOptions::default()).unwrap();
    let b = bv_reduce::<airy_formal::BigComplex>(&l, &ReduceOptions::default()).unwrap();
    assert_eq!(d.model.levels, b.model.levels);
    for (e, row) in &d.model.d {
        for (x, y) in row.iter().zip(&b.model.d[e]) {
            assert!((x - y.to_c64()).norm() < 1e-10);
        }
    }
}
