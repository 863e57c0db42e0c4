//! The real-quadratic verification suite: a deterministic family of
//! `(K/F, S, T)` triples together with the per-case integrality and
//! membership checks shared by the test suite and the command-line driver.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::groups::Elem;
use crate::quadfield::{Ideal, Place, QuadExtension, QuadField, RayClassGroup};
use crate::stickring::{
    injectivity_check, smooth, stickelberger, theorem_ideal_with, AbelianExtension, FrobeniusSide, GroupRingElem,
    Injectivity,
};
use crate::Result;

/// Squarefree `D ≤ 17` with `F = ℚ(√D)` real quadratic.
pub const SUITE_FIELDS: [i64; 11] = [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17];

/// Largest modulus norm used by the default suite.
pub const SUITE_MAX_NORM: u64 = 30;

/// One `(K/F, S, T)` triple of the suite.
#[derive(Clone, Debug)]
pub struct SuiteCase {
    pub d: i64,
    pub modulus: Ideal,
    pub kernel: Vec<Elem>,
    pub ext: QuadExtension,
    pub s: Vec<Place>,
    pub t: Vec<Place>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..p).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q))
}

/// Moduli: products of the first primes above 2, 3 and 5 (each used at most
/// once) with norm at most `max_norm`, including the unit ideal.
fn suite_moduli(f: &QuadField, max_norm: u64) -> Vec<Ideal> {
    let primes: Vec<Ideal> = [2u64, 3, 5].iter().map(|&p| f.prime_split(p)[0].ideal.clone()).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let m = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .fold(Ideal::unit(), |acc, (_, p)| f.ideal_mul(&acc, p));
        if m.int_norm() <= BigInt::from(max_norm) {
            out.push(m);
        }
    }
    out
}

/// `S`: the primes dividing the modulus plus the first prime above the
/// smallest rational prime not yet represented. `T`: the first primes above
/// the two smallest rational primes coprime to `N𝔪` and not under `S`.
fn suite_places(f: &QuadField, ext: &QuadExtension, modulus: &Ideal) -> (Vec<Place>, Vec<Place>) {
    let mut s: Vec<Place> = ext.modulus_primes().into_iter().map(|(p, _)| Place::Prime(p)).collect();
    let chars = |s: &[Place]| -> BTreeSet<u64> { s.iter().filter_map(|v| v.residue_characteristic()).collect() };
    let extra = (2u64..).find(|&p| is_prime(p) && !chars(&s).contains(&p)).expect("infinitely many primes");
    s.push(Place::Prime(f.prime_split(extra)[0].ideal.clone()));
    let used = chars(&s);
    let norm = modulus.int_norm();
    let t = (2u64..)
        .filter(|&p| is_prime(p) && !used.contains(&p) && !(&norm % BigInt::from(p)).is_zero())
        .take(2)
        .map(|p| Place::Prime(f.prime_split(p)[0].ideal.clone()))
        .collect();
    (s, t)
}

/// Every `K ⊆ F^𝔪` (one case per subgroup of the narrow ray class group)
/// for the given fields and moduli of norm at most `max_norm`.
pub fn quadratic_suite(fields: &[i64], max_norm: u64) -> Result<Vec<SuiteCase>> {
    let mut out = Vec::new();
    for &d in fields {
        let f = QuadField::new(d)?;
        for modulus in suite_moduli(&f, max_norm) {
            let ray = RayClassGroup::new(&f, &modulus)?;
            for kernel in ray.group().all_subgroups() {
                let ext = QuadExtension::new(ray.clone(), kernel.clone());
                let (s, t) = suite_places(&f, &ext, &modulus);
                out.push(SuiteCase { d, modulus: modulus.clone(), kernel, ext, s, t });
            }
        }
    }
    Ok(out)
}

/// The shape of the product ideal `∏_{v ≠ 𝔭} I_v^(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealShape {
    Zero,
    Whole,
    Proper,
}

impl IdealShape {
    pub fn as_str(self) -> &'static str {
        match self {
            IdealShape::Zero => "zero",
            IdealShape::Whole => "whole",
            IdealShape::Proper => "proper",
        }
    }
}

/// Membership verdict for one excluded place `𝔭 ∈ S`.
#[derive(Clone, Debug)]
pub struct Membership {
    pub place: Place,
    pub shape: IdealShape,
    pub member: bool,
}

/// Outcome of the checks for one `(K/F, S, T, k)`.
#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub k: u32,
    pub theta_s: GroupRingElem,
    pub theta_st: GroupRingElem,
    pub injectivity: Injectivity,
    pub integral: bool,
    pub memberships: Vec<Membership>,
}

impl CaseOutcome {
    /// True iff the element is integral and lies in every product ideal.
    pub fn passes(&self) -> bool {
        self.integral && self.memberships.iter().all(|m| m.member)
    }
}

/// Membership of `theta` in `∏_{v ≠ 𝔭} I_v^(k)` for every `𝔭 ∈ S`.
pub fn memberships<E: AbelianExtension>(
    ext: &E,
    s: &[Place],
    k: u32,
    theta: &GroupRingElem,
    side: FrobeniusSide,
) -> Result<Vec<Membership>> {
    let integral = theta.is_integral();
    let mut out = Vec::with_capacity(s.len());
    for p in s {
        let ideal = theorem_ideal_with(ext, s, p, k, side)?;
        let shape = if ideal.is_zero() {
            IdealShape::Zero
        } else if ideal.index() == Some(BigInt::one()) {
            IdealShape::Whole
        } else {
            IdealShape::Proper
        };
        let member = integral && ideal.contains(theta, &BTreeSet::new())?;
        out.push(Membership { place: p.clone(), shape, member });
    }
    Ok(out)
}

/// Compute `Θ_S`, `Θ_{S,T}` and the membership verdict for every `𝔭 ∈ S`.
pub fn verify_case<E: AbelianExtension>(
    ext: &E,
    s: &[Place],
    t: &[Place],
    k: u32,
    side: FrobeniusSide,
) -> Result<CaseOutcome> {
    let theta_s = stickelberger(ext, s, k)?;
    let theta_st = smooth(&theta_s, ext, s, t, k)?;
    Ok(CaseOutcome {
        k,
        memberships: memberships(ext, s, k, &theta_st, side)?,
        injectivity: injectivity_check(t, k, ext.base_degree()),
        integral: theta_st.is_integral(),
        theta_s,
        theta_st,
    })
}
