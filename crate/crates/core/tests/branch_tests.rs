mod common;

use airy_formal::branches::{branch_expand, determining_factors, residual, sensitive_coefficients};
use airy_formal::monodromy::{exp_two_pi_i, lambda_closed_form, monodromy, monodromy_eigenvalue};
use airy_formal::operator::validate;
use airy_formal::{q, BigComplex, Complex64 as C, Rational, Scalar};
use common::{ints, random_operator, rng};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Rotating `z^{1/n}` by `ζ = e^{2πi/n}` permutes the branches: `α'_k = ζ^{k−m} α_k`.
    #[test]
    fn branches_are_galois_conjugate(n in 1usize..5, m in 1usize..6, seed in 0u64..500) {
        let l = random_operator(&mut rng(seed), n, m);
        let k = m + n;
        let brs: Vec<_> = (0..n).map(|i| branch_expand::<C>(&l, i, k).unwrap()).collect();
        for b in &brs {
            let target = b.alpha[0] * C::root_of_unity(-(m as i64), n as i64);
            let other = brs.iter().find(|o| (o.alpha[0] - target).norm() < 1e-9).unwrap();
            for j in 0..=k {
                let z = C::root_of_unity(j as i64 - m as i64, n as i64);
                let want = b.alpha[j] * z;
                let scale = b.alpha[j].norm().max(1.0);
                prop_assert!((other.alpha[j] - want).norm() < 1e-8 * scale, "k={} {:?} vs {:?}", j, other.alpha[j], want);
            }
        }
    }

    #[test]
    fn residual_order_grows(n in 1usize..5, m in 1usize..5, seed in 0u64..500, extra in 0usize..4) {
        let l = random_operator(&mut rng(seed), n, m);
        let k = m + n + extra;
        let br = branch_expand::<C>(&l, 0, k).unwrap();
        let res = residual(&l, &br);
        let bound = Rational::int(-((n + m) as i64)) + Rational::new(k as i64, n as i64);
        let scale = br.alpha.iter().map(|a| a.norm()).fold(1.0, f64::max).powi(n as i32);
        for (e, c) in res.terms() {
            if *e <= bound {
                prop_assert!(c.norm() < 1e-8 * scale, "term {} at {}", c, e);
            }
        }
    }

    #[test]
    fn eigenvalue_is_exp_of_lambda(n in 1usize..8, m in 1usize..10) {
        let l = random_operator(&mut rng((n * 31 + m) as u64), n, m);
        let e: C = monodromy_eigenvalue(&l);
        let f: C = exp_two_pi_i(lambda_closed_form(n, m));
        prop_assert!((e - f).norm() < 1e-12);
    }
}

#[test]
fn factor_multiplicities_sum_to_n() {
    let mut r = rng(5);
    for n in 1..=4 {
        for m in 1..=5 {
            let l = random_operator(&mut r, n, m);
            let fs = determining_factors::<C>(&l, None).unwrap();
            assert_eq!(fs.iter().map(|f| f.multiplicity).sum::<usize>(), n);
        }
    }
}

#[test]
fn classical_factors_in_big_precision() {
    let l = airy_formal::operator::AiryOperator::classical();
    let fs = determining_factors::<BigComplex>(&l, None).unwrap();
    let mut lead: Vec<f64> = fs.iter().map(|f| f.series.coeff(q(-3, 2)).unwrap().re()).collect();
    lead.sort_by(f64::total_cmp);
    assert!((lead[0] + 2.0 / 3.0).abs() < 1e-15);
    assert!((lead[1] - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn big_and_double_agree() {
    let l = validate(3, 4, vec![q(1, 2), q(-2, 1), q(1, 1)], ints(&[1, -3, 2, 5, 1])).unwrap();
    for i in 0..3 {
        let d = branch_expand::<C>(&l, i, 9).unwrap();
        let b = branch_expand::<BigComplex>(&l, i, 9).unwrap();
        for (x, y) in d.alpha.iter().zip(&b.alpha) {
            assert!((x - y.to_c64()).norm() < 1e-10 * x.norm().max(1.0));
        }
    }
}

#[test]
fn monodromy_on_each_branch() {
    let l = validate(4, 3, ints(&[1, 0, -2, 1]), ints(&[2, 0, 1, 3])).unwrap();
    let data = monodromy::<C>(&l, None).unwrap();
    assert_eq!(data.lambda, q(-21, 8));
    assert_eq!(data.per_branch.len(), 4);
}

#[test]
fn sensitive_sets() {
    assert_eq!(sensitive_coefficients(2, 4), Some((vec![1], vec![4, 3, 2])));
    assert_eq!(sensitive_coefficients(3, 4), Some((vec![2], vec![4, 3, 2])));
    assert_eq!(sensitive_coefficients(5, 2), Some((vec![4, 3, 2], vec![2, 1])));
    assert_eq!(sensitive_coefficients(2, 1), None);
    assert_eq!(sensitive_coefficients(1, 3), Some((vec![], vec![3, 2, 1, 0])));
}
