#![allow(dead_code)]

use airy_formal::operator::{validate, AiryOperator};
use airy_formal::{q, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    q(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// Nonzero, and stays nonzero after adding or subtracting one.
pub fn safe_nonzero<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let v = small_rational(rng);
        if !v.is_zero() && v != Rational::ONE && v != -Rational::ONE {
            return v;
        }
    }
}

pub fn random_operator<R: Rng>(rng: &mut R, n: usize, m: usize) -> AiryOperator {
    let mut a: Vec<Rational> = (1..n).map(|_| small_rational(rng)).collect();
    a.push(Rational::ONE);
    let mut b: Vec<Rational> = (0..m).map(|_| small_rational(rng)).collect();
    b.push(safe_nonzero(rng));
    validate(n as i64, m as i64, a, b).unwrap()
}

/// Random bidegree with `n, m` in the given ranges and `case` accepting `(n, m)`.
pub fn random_bidegree<R: Rng>(
    rng: &mut R,
    ns: std::ops::RangeInclusive<usize>,
    ms: std::ops::RangeInclusive<usize>,
    accept: impl Fn(usize, usize) -> bool,
) -> (usize, usize) {
    loop {
        let n = rng.gen_range(ns.clone());
        let m = rng.gen_range(ms.clone());
        if accept(n, m) {
            return (n, m);
        }
    }
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|x| Rational::int(*x)).collect()
}
