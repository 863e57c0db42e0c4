//! Independent oracles shared by the integration test targets.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use stickel_core::linalg::{rat, rat_int, Rational};
use stickel_core::quadfield::{Place, RationalExtension};
use stickel_core::stickring::{GroupRing, GroupRingElem};

pub fn primes_of(n: u64) -> Vec<u64> {
    (2..=n).filter(|p| n.is_multiple_of(*p) && (2..*p).all(|q| p % q != 0)).collect()
}

pub fn places(ps: &[u64]) -> Vec<Place> {
    ps.iter().map(|&p| Place::Rational(p)).collect()
}

// ---------------------------------------------------------------------------
// Independent oracle for the rational path
// ---------------------------------------------------------------------------

/// Bernoulli numbers from `Σ_{j≤m} C(m+1, j) B_j = 0` (so `B₁ = −1/2`).
pub fn oracle_bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        let mut acc = Rational::zero();
        let mut c = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += rat_int(c.clone()) * bj;
            c = c * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / rat_int(m as i64 + 1));
    }
    b
}

pub fn oracle_bernoulli_poly(n: usize, x: &Rational, b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    let mut c = BigInt::one();
    for (j, bj) in b.iter().enumerate().take(n + 1) {
        let mut xp = Rational::one();
        for _ in 0..n - j {
            xp *= x;
        }
        acc += rat_int(c.clone()) * bj * xp;
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Smallest `d | f` such that the Galois class of `a` depends on `a mod d`.
pub fn oracle_conductor(ext: &RationalExtension) -> u64 {
    let f = ext.conductor();
    let units: Vec<u64> = (1..=f).filter(|a| a.gcd(&f) == 1).collect();
    (1..=f)
        .filter(|d| f.is_multiple_of(*d))
        .find(|&d| {
            units
                .iter()
                .all(|&a| a % d != 1 % d || ext.gal_of_residue(a as i64).unwrap() == ext.galois_group().identity())
        })
        .unwrap()
}

/// `Θ_S(−k) = Σ_{a mod M} ζ(M, a, −k)[σ_a⁻¹]` with `M` the conductor times
/// the remaining primes of `S`.
pub fn oracle_theta(ext: &RationalExtension, s: &[u64], k: u32) -> GroupRingElem {
    let ring = GroupRing::new(ext.galois_group());
    let f = ext.conductor();
    let d = oracle_conductor(ext);
    let m: u64 = d * s.iter().filter(|p| !d.is_multiple_of(**p)).product::<u64>();
    let b = oracle_bernoulli(k as usize + 2);
    let mut out = GroupRingElem::zero(&ring);
    for a in (1..=m).filter(|a| a.gcd(&m) == 1) {
        let lift = (0..f).map(|t| a % d + t * d).find(|x| x.gcd(&f) == 1).unwrap();
        let sigma = ext.gal_of_residue(lift as i64).unwrap();
        let mk = rat_int(BigInt::from(m).pow(k));
        let z = -mk * oracle_bernoulli_poly(k as usize + 1, &rat(a as i64, m as i64), &b) / rat_int(k as i64 + 1);
        let sinv = ext.galois_group().neg(&sigma);
        out = out.add(&GroupRingElem::basis(&ring, &sinv).scale(&z));
    }
    out
}

pub fn smallest_prime_not_dividing(f: u64, skip: &[u64]) -> u64 {
    (2..).find(|&p| primes_of(p) == vec![p] && !f.is_multiple_of(p) && !skip.contains(&p)).unwrap()
}

/// Valid smoothing/annihilator primes: outside `S`, the conductor and `w`.
pub fn valid_primes(f: u64, w: u64, s: &[u64], count: usize, skip: &[u64]) -> Vec<u64> {
    (2u64..)
        .filter(|&p| {
            primes_of(p) == vec![p]
                && !f.is_multiple_of(p)
                && !w.is_multiple_of(p)
                && !s.contains(&p)
                && !skip.contains(&p)
        })
        .take(count)
        .collect()
}
