mod common;

use airy_formal::operator::{
    fuchs_form, newton_slope, sigma, symbol, validate, AiryOperator, OperatorCase,
};
use airy_formal::{q, AiryError, Complex64 as C, Rational};
use common::{ints, random_operator, rng};
use proptest::prelude::*;
use std::collections::BTreeMap;

/// Unsigned Stirling numbers of the first kind by their own recurrence.
fn stirling1(j: usize, k: usize) -> u64 {
    let mut t = vec![vec![0u64; j + 1]; j + 1];
    t[0][0] = 1;
    for a in 1..=j {
        for b in 1..=a {
            t[a][b] = t[a - 1][b - 1] + (a as u64 - 1) * t[a - 1][b];
        }
    }
    t[j][k]
}

fn falling(p: Rational, i: usize) -> Rational {
    (0..i).fold(Rational::ONE, |acc, r| acc * (p - Rational::int(r as i64)))
}

/// `(−1)^n x^n L[x^p] x^{−p}` as a Laurent polynomial in `z = 1/x`.
fn action_on_power(l: &AiryOperator, p: Rational) -> BTreeMap<i64, Rational> {
    let n = l.n();
    let sign = if n.is_multiple_of(2) { Rational::ONE } else { -Rational::ONE };
    let mut out = BTreeMap::new();
    for i in 1..=n {
        *out.entry(i as i64 - n as i64).or_insert(Rational::ZERO) += sign * l.a(i) * falling(p, i);
    }
    for j in 0..=l.m() {
        *out.entry(-(n as i64) - j as i64).or_insert(Rational::ZERO) -= sign * l.b(j);
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `Σ c_k(z) (−p)^{n−k}`, using `D z^{−p} = −p z^{−p}`.
fn fuchs_on_power(l: &AiryOperator, p: Rational) -> BTreeMap<i64, Rational> {
    let f = fuchs_form(l);
    let n = l.n();
    let mut out = BTreeMap::new();
    for (k, ck) in f.c.iter().enumerate() {
        let w = (0..n - k).fold(Rational::ONE, |acc, _| acc * -p);
        for (e, c) in ck {
            *out.entry(*e).or_insert(Rational::ZERO) += *c * w;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

#[test]
fn sigma_is_stirling() {
    for j in 0..9 {
        for h in 0..j.max(1) {
            assert_eq!(sigma(h, j), stirling1(j, j - h), "h={h} j={j}");
        }
    }
    assert_eq!(sigma(1, 3), 3);
    assert_eq!(sigma(2, 3), 2);
}

#[test]
fn fuchs_form_acts_like_operator() {
    let mut r = rng(11);
    for n in 1..=5 {
        for m in 1..=5 {
            let l = random_operator(&mut r, n, m);
            for p in [q(0, 1), q(3, 1), q(-7, 2), q(5, 3)] {
                assert_eq!(fuchs_on_power(&l, p), action_on_power(&l, p), "{l} at p={p}");
            }
        }
    }
}

#[test]
fn classical_fuchs_form() {
    let f = fuchs_form(&AiryOperator::classical());
    assert_eq!(f.c[0], BTreeMap::from([(0, q(1, 1))]));
    assert_eq!(f.c[1], BTreeMap::from([(0, q(1, 1))]));
    assert_eq!(f.c[2], BTreeMap::from([(-3, q(-1, 1))]));
}

#[test]
fn validation_errors() {
    assert!(matches!(validate(0, 1, vec![], ints(&[0, 1])), Err(AiryError::BadDegree { .. })));
    assert!(matches!(validate(2, 1, ints(&[1]), ints(&[0, 1])), Err(AiryError::CoefficientCount { .. })));
    assert!(matches!(validate(2, 1, ints(&[0, 2]), ints(&[0, 1])), Err(AiryError::BadLeading(_))));
    assert!(matches!(validate(2, 1, ints(&[0, 1]), ints(&[1, 0])), Err(AiryError::DegenerateDegree)));
}

#[test]
fn case_classification() {
    assert_eq!(OperatorCase::classify(2, 4), OperatorCase::MultipleOfN { q: 2 });
    assert_eq!(OperatorCase::classify(3, 4), OperatorCase::RemainderN { q: 1, r: 1 });
    assert_eq!(OperatorCase::classify(5, 2), OperatorCase::SmallM { q: 2, r: 1 });
    assert_eq!(OperatorCase::classify(2, 1), OperatorCase::Boundary { q: 2 });
    assert_eq!(OperatorCase::classify(1, 1), OperatorCase::MultipleOfN { q: 1 });
}

#[test]
fn json_round_trip() {
    let l = validate(3, 2, vec![q(1, 2), q(-2, 1), q(1, 1)], ints(&[1, -3, 2])).unwrap();
    let s = serde_json::to_string(&l).unwrap();
    let back: AiryOperator = serde_json::from_str(&s).unwrap();
    assert_eq!(back, l);
    let bad = r#"{"n":2,"m":1,"a":["0","3"],"b":["0","1"]}"#;
    assert!(serde_json::from_str::<AiryOperator>(bad).is_err());
}

#[test]
fn display_grammar() {
    assert_eq!(AiryOperator::classical().to_string(), "d^2 - x");
    let l = validate(3, 2, ints(&[2, 0, 1]), ints(&[1, 0, 1])).unwrap();
    assert_eq!(l.to_string(), "d^3 + 2*d - x^2 - 1");
}

proptest! {
    #[test]
    fn single_newton_slope(n in 1usize..6, m in 1usize..8, seed in 0u64..1000) {
        let l = random_operator(&mut rng(seed), n, m);
        prop_assert_eq!(newton_slope(&l).unwrap(), Rational::new((n + m) as i64, n as i64));
    }

    #[test]
    fn symbol_has_monic_top(n in 1usize..6, m in 1usize..6, seed in 0u64..1000) {
        let l = random_operator(&mut rng(seed), n, m);
        let s = symbol::<C>(&l);
        prop_assert_eq!(s.c.len(), n + 1);
        prop_assert_eq!(s.c[0].coeff(Rational::ZERO).unwrap(), C::new(1.0, 0.0));
        let v = s.c[n].valuation().unwrap();
        prop_assert_eq!(v, Rational::int(-((n + m) as i64)));
    }
}
