use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stickel_core::linalg::{rat, rat_int, Rational};
use stickel_core::quadfield::{Ideal, Place, QElem, QuadExtension, QuadField, RayClassGroup};
use stickel_core::suite::SUITE_FIELDS;

/// Narrow class numbers `h⁺` of `ℚ(√D)`.
const NARROW_CLASS_NUMBERS: [(i64, u64); 11] =
    [(2, 1), (3, 2), (5, 1), (6, 2), (7, 2), (10, 2), (11, 2), (13, 1), (14, 2), (15, 4), (17, 1)];

/// Fundamental units in `ω`-coordinates with their norms.
const FUNDAMENTAL_UNITS: [(i64, i64, i64, i64); 11] = [
    (2, 1, 1, -1),
    (3, 2, 1, 1),
    (5, 0, 1, -1),
    (6, 5, 2, 1),
    (7, 8, 3, 1),
    (10, 3, 1, -1),
    (11, 10, 3, 1),
    (13, 1, 1, -1),
    (14, 15, 4, 1),
    (15, 4, 1, 1),
    (17, 3, 2, -1),
];

fn omega(f: &QuadField) -> (i64, i64) {
    f.omega_relation()
}

/// `N(a + bω) = a² + abt − b²n₀`.
fn oracle_norm(f: &QuadField, a: &Rational, b: &Rational) -> Rational {
    let (t, n0) = omega(f);
    a * a + a * b * rat_int(t) - b * b * rat_int(n0)
}

/// Integral `(u, v) = u + vω` lies in the lattice `[[a, b], [0, c]]`.
fn in_hnf(a: i64, b: i64, c: i64, u: i64, v: i64) -> bool {
    u % a == 0 && (v - (u / a) * b) % c == 0
}

/// `[[a, b], [0, c]]` is closed under multiplication by `ω`.
fn oracle_is_ideal(f: &QuadField, a: i64, b: i64, c: i64) -> bool {
    let (t, n0) = omega(f);
    in_hnf(a, b, c, b * n0, a + b * t) && in_hnf(a, b, c, c * n0, c * t)
}

fn mul_mod(f: &QuadField, x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    let (t, n0) = omega(f);
    (x.0 * y.0 + x.1 * y.1 * n0, x.0 * y.1 + x.1 * y.0 + x.1 * y.1 * t)
}

/// `x ≡ y` modulo the lattice.
fn congruent(h: (i64, i64, i64), x: (i64, i64), y: (i64, i64)) -> bool {
    in_hnf(h.0, h.1, h.2, x.0 - y.0, x.1 - y.1)
}

fn hnf_i64(m: &Ideal) -> (i64, i64, i64) {
    let (a, b, c) = m.hnf_entries();
    (i64::try_from(a).unwrap(), i64::try_from(b).unwrap(), i64::try_from(c).unwrap())
}

/// `φ(𝔪)` by counting residues with an inverse, and the order of `ε₊` in
/// `(𝒪/𝔪)*`, both by brute force.
fn oracle_phi_and_unit_order(f: &QuadField, m: &Ideal) -> (u64, u64) {
    let h = hnf_i64(m);
    let residues: Vec<(i64, i64)> = (0..h.0).flat_map(|x| (0..h.2).map(move |y| (x, y))).collect();
    let one = (1, 0);
    let phi =
        residues.iter().filter(|&&x| residues.iter().any(|&y| congruent(h, mul_mod(f, x, y), one))).count() as u64;
    let (e0, e1) = f.eps_plus().int_coords().unwrap();
    let e = (i64::try_from(e0).unwrap(), i64::try_from(e1).unwrap());
    let reduce = |x: (i64, i64)| {
        let k = x.0.div_euclid(h.0);
        let y = (x.0 - k * h.0, x.1 - k * h.1);
        (y.0, y.1.rem_euclid(h.2))
    };
    let e = reduce(e);
    let mut power = e;
    let mut order = 1;
    while !congruent(h, power, one) {
        power = reduce(mul_mod(f, power, e));
        order += 1;
    }
    (phi, order)
}

fn small_moduli(f: &QuadField, max_norm: u64) -> Vec<Ideal> {
    (1..=max_norm).flat_map(|n| f.ideals_of_norm(n)).collect()
}

#[test]
fn fundamental_units_and_class_numbers() {
    for (d, a, b, n) in FUNDAMENTAL_UNITS {
        let f = QuadField::new(d).unwrap();
        assert_eq!(f.eps0(), &QElem::int(a, b), "D={d}");
        assert_eq!(f.eps0_norm(), n, "D={d}");
        assert_eq!(oracle_norm(&f, &rat_int(a), &rat_int(b)), rat_int(n));
        let ep = f.eps_plus();
        assert!(f.is_totally_positive(&ep) && f.norm(&ep).is_one());
    }
    for (d, h) in NARROW_CLASS_NUMBERS {
        assert_eq!(QuadField::new(d).unwrap().narrow_class_number(), h, "D={d}");
    }
    assert!(QuadField::new(12).is_err());
    assert!(QuadField::new(1).is_err());
}

#[test]
fn ray_class_group_orders_follow_the_index_formula() {
    for (d, h_plus) in NARROW_CLASS_NUMBERS {
        let f = QuadField::new(d).unwrap();
        for m in small_moduli(&f, 20) {
            let ray = RayClassGroup::new(&f, &m).unwrap();
            let (phi, unit_order) = oracle_phi_and_unit_order(&f, &m);
            assert_eq!(ray.order() * unit_order, h_plus * phi, "D={d} 𝔪={m}");
            assert_eq!(ray.cyclic_orders().iter().product::<u64>(), ray.order());
        }
    }
}

#[test]
fn ideals_of_norm_match_enumeration() {
    for d in SUITE_FIELDS {
        let f = QuadField::new(d).unwrap();
        for n in 1..=60i64 {
            let mut brute: Vec<(i64, i64, i64)> = Vec::new();
            for c in (1..=n).filter(|c| n % c == 0) {
                let a = n / c;
                for b in 0..c {
                    if oracle_is_ideal(&f, a, b, c) {
                        brute.push((a, b, c));
                    }
                }
            }
            let mut got: Vec<(i64, i64, i64)> = f.ideals_of_norm(n as u64).iter().map(hnf_i64).collect();
            got.sort();
            brute.sort();
            assert_eq!(got, brute, "D={d} n={n}");
            for &(a, b, c) in &brute {
                assert!(f.ideal_from_hnf(a, b, c).is_ok());
            }
        }
    }
}

#[test]
fn kronecker_symbol_counts_roots() {
    let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    for d in SUITE_FIELDS {
        let f = QuadField::new(d).unwrap();
        let disc = f.disc();
        for p in primes {
            let want = if p == 2 {
                match disc.rem_euclid(8) {
                    1 => 1,
                    5 => -1,
                    _ => 0,
                }
            } else if disc.rem_euclid(p as i64) == 0 {
                0
            } else {
                (0..p as i64).filter(|r| (r * r - disc).rem_euclid(p as i64) == 0).count() as i32 - 1
            };
            assert_eq!(f.kronecker(p), want, "D={d} p={p}");
            let split = f.prime_split(p);
            let efg: u32 = split.iter().map(|q| q.residue_degree * q.ramification).sum();
            assert_eq!(efg, 2);
            assert_eq!(split.len(), if want == 1 { 2 } else { 1 });
            for q in &split {
                assert_eq!(q.ideal.int_norm(), BigInt::from(p).pow(q.residue_degree));
            }
        }
    }
}

#[test]
fn local_data_is_consistent() {
    for d in [2i64, 5, 6, 13] {
        let f = QuadField::new(d).unwrap();
        for m in small_moduli(&f, 15) {
            let ray = RayClassGroup::new(&f, &m).unwrap();
            let ext = QuadExtension::full(ray.clone());
            let g = ext.galois_group().clone();
            for p in [2u64, 3, 5, 7, 11, 13] {
                for q in f.prime_split(p) {
                    let data = ext.place_data(&Place::Prime(q.ideal.clone())).unwrap();
                    let inertia: BTreeSet<_> = data.inertia.iter().cloned().collect();
                    let mut x = data.frobenius.clone();
                    let mut f_order = 1;
                    while !inertia.contains(&x) {
                        x = g.add(&x, &data.frobenius);
                        f_order += 1;
                    }
                    assert_eq!(data.decomposition.len(), data.inertia.len() * f_order, "D={d} 𝔪={m} 𝔭={}", q.ideal);
                    assert_eq!(g.order() as usize % data.decomposition.len(), 0);
                    if f.coprime(&q.ideal, &m) {
                        assert_eq!(data.inertia.len(), 1);
                        assert_eq!(data.frobenius, ext.artin(&q.ideal).unwrap());
                    } else {
                        // the inertia group is the kernel of Cl⁺_𝔪 → Cl⁺_{𝔪'}
                        let e = f.factor(&m).into_iter().find(|(r, _)| r == &q.ideal).unwrap().1;
                        let smaller = RayClassGroup::new(&f, &f.ideal_div(&m, &f.ideal_pow(&q.ideal, e))).unwrap();
                        assert_eq!(data.inertia.len() as u64 * smaller.order(), ray.order());
                    }
                }
            }
            for i in 0..2 {
                let data = ext.place_data(&Place::Infinite(i)).unwrap();
                assert!(g.elem_order(&data.frobenius) <= 2);
            }
        }
    }
}

fn random_elem(rng: &mut ChaCha8Rng) -> QElem {
    QElem::new(rat(rng.gen_range(-40..=40), rng.gen_range(1..=6)), rat(rng.gen_range(-40..=40), rng.gen_range(1..=6)))
}

#[test]
fn norm_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a7d_0001);
    for _ in 0..500 {
        let f = QuadField::new(SUITE_FIELDS[rng.gen_range(0..SUITE_FIELDS.len())]).unwrap();
        let (x, y) = (random_elem(&mut rng), random_elem(&mut rng));
        let xy = f.mul(&x, &y);
        assert_eq!(f.norm(&xy), f.norm(&x) * f.norm(&y));
        assert_eq!(f.norm(&x), oracle_norm(&f, &x.a, &x.b));
        assert_eq!(f.mul(&x, &f.conj(&x)), QElem::rational(f.norm(&x)));
        if !x.is_zero() {
            assert_eq!(f.mul(&x, &f.inv(&x)), QElem::one());
        }
        let [x1, x2] = f.embed(&x);
        assert!((x1 * x2 - f.norm(&x).to_f64().unwrap()).abs() < 1e-6 * (1.0 + (x1 * x2).abs()));
    }
}

#[test]
fn artin_map_is_trivial_on_the_ray() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a7d_0002);
    for d in SUITE_FIELDS {
        let f = QuadField::new(d).unwrap();
        for m in small_moduli(&f, 12).into_iter().filter(|m| !m.is_unit()) {
            let ray = RayClassGroup::new(&f, &m).unwrap();
            let [m1, m2] = m.basis();
            let nm = rat_int(m.int_norm());
            for _ in 0..50 {
                let mut x = QElem::one()
                    .add(&m1.scale(&rat_int(rng.gen_range(-20..=20))))
                    .add(&m2.scale(&rat_int(rng.gen_range(-20..=20))));
                while !f.is_totally_positive(&x) {
                    x = x.add(&QElem::rational(nm.clone() * rat_int(rng.gen_range(1..=50))));
                }
                if x.is_zero() {
                    continue;
                }
                assert_eq!(ray.class_of_element(&x).unwrap(), ray.group().identity(), "D={d} 𝔪={m} x={x}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn class_map_is_a_homomorphism(di in 0usize..SUITE_FIELDS.len(), mi in 0usize..6, seed in any::<u64>()) {
        let f = QuadField::new(SUITE_FIELDS[di]).unwrap();
        let moduli = small_moduli(&f, 10);
        let m = &moduli[mi % moduli.len()];
        let ray = RayClassGroup::new(&f, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coprime: Vec<Ideal> = [7u64, 11, 13, 17, 19, 23]
            .iter()
            .flat_map(|&p| f.prime_split(p))
            .map(|q| q.ideal)
            .filter(|q| f.coprime(q, m))
            .collect();
        let a = &coprime[rng.gen_range(0..coprime.len())];
        let b = &coprime[rng.gen_range(0..coprime.len())];
        let ab = f.ideal_mul(a, b);
        prop_assert_eq!(ray.class_of(&ab).unwrap(), ray.group().add(&ray.class_of(a).unwrap(), &ray.class_of(b).unwrap()));
        prop_assert_eq!(ab.int_norm(), a.int_norm() * b.int_norm());
        let n = f.ideal_mul(a, &f.ideal_conj(a));
        prop_assert_eq!(n, f.principal_ideal(&QElem::rational(rat_int(a.int_norm()))));
        prop_assert!(ab.is_integral());
    }
}
