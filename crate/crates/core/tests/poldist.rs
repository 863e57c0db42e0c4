use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stickel_core::intpoly::{binom_basis, binom_multi, CoeffRing, Lattice};
use stickel_core::linalg::{rat, rat_int, RatMatrix, Rational};
use stickel_core::poldist::{
    change_lattice_iso, convolve, dirac, dirac_coords, dist_to_formal_sum, dist_to_groupring, from_moments,
    groupring_to_dist, moment, ChangeOfLattice, GroupRingTrunc, LocPolDist, TruncDist,
};
use stickel_core::Error;

fn random_lattice(rng: &mut ChaCha8Rng, n: usize) -> Lattice {
    loop {
        let rows: Vec<Vec<Rational>> =
            (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=2))).collect()).collect();
        if let Ok(l) = Lattice::new(RatMatrix::from_rows(rows)) {
            return l;
        }
    }
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, m: u32) -> BTreeMap<Vec<u32>, Rational> {
    binom_basis(n, m).into_iter().map(|k| (k, rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)))).collect()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigInt> {
    (0..n).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect()
}

/// Linear forms `ξᵢ` (rows, in lattice coordinates) forming a basis of the dual.
fn random_forms(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
    loop {
        let rows: Vec<Vec<Rational>> =
            (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect()).collect();
        if !RatMatrix::from_rows(rows.clone()).det().is_zero() {
            return rows;
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    (0..n).map(|j| (i == j) as u32).collect()
}

/// Solve `μ(C(X,l)) = Σ_k a_k C(k,l)` by inverting the dense matrix.
fn dense_formal_sum(mu: &TruncDist) -> BTreeMap<Vec<u32>, Rational> {
    let grid = binom_basis(mu.lattice().dim(), mu.truncation());
    let rows: Vec<Vec<Rational>> = grid
        .iter()
        .map(|l| {
            grid.iter()
                .map(|k| rat_int(binom_multi(&k.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(), l)))
                .collect()
        })
        .collect();
    let inv = RatMatrix::from_rows(rows).inverse().unwrap();
    let b: Vec<Rational> = grid.iter().map(|l| mu.value(l)).collect();
    let mut out = BTreeMap::new();
    for (i, k) in grid.iter().enumerate() {
        let v = (0..grid.len()).fold(Rational::zero(), |acc, j| acc + &inv[(i, j)] * &b[j]);
        if !v.is_zero() {
            out.insert(k.clone(), v);
        }
    }
    out
}

#[test]
fn back_substitution_matches_dense_solve() {
    let z = Lattice::standard(1);
    let mu = TruncDist::new(z, 2, BTreeMap::from([(vec![0], rat(1, 1)), (vec![1], rat(1, 2))])).unwrap();
    assert_eq!(dist_to_formal_sum(&mu), dense_formal_sum(&mu));
    let g = dist_to_groupring(&mu);
    assert_eq!(g.coeff(&[0]), rat(1, 1));
    assert_eq!(g.coeff(&[1]), rat(1, 2));
    assert_eq!(g.coeff(&[2]), rat(0, 1));
}

#[test]
fn group_ring_examples() {
    let z = Lattice::standard(1);
    let sq =
        GroupRingTrunc::new(1, 2, BTreeMap::from([(vec![0], rat(1, 1)), (vec![1], rat(2, 1)), (vec![2], rat(1, 1))]))
            .unwrap();
    assert_eq!(groupring_to_dist(&sq, &z).unwrap(), dirac(&[rat(2, 1)], &z, 2).unwrap());
    let t = GroupRingTrunc::new(1, 2, BTreeMap::from([(vec![1], rat(1, 1))])).unwrap();
    let diff =
        dirac(&[rat(1, 1)], &z, 2).unwrap().add(&dirac(&[rat(0, 1)], &z, 2).unwrap().scale(&rat(-1, 1))).unwrap();
    assert_eq!(groupring_to_dist(&t, &z).unwrap(), diff);
    let other = Lattice::scaled(1, rat(2, 1));
    let a = dirac(&[rat(0, 1)], &z, 2).unwrap();
    let b = dirac(&[rat(0, 1)], &other, 2).unwrap();
    assert!(convolve(&a, &b).is_err());
    assert_eq!(dirac(&[rat(1, 2)], &z, 1), Err(Error::NotInLattice));
}

#[test]
fn moment_examples() {
    let z = Lattice::standard(1);
    let xi = vec![vec![rat(1, 1)]];
    assert_eq!(moment(&from_moments(&z, 2, &[1], &xi).unwrap(), &[1], &xi).unwrap(), rat(1, 1));
    assert_eq!(moment(&from_moments(&z, 3, &[2], &xi).unwrap(), &[2], &xi).unwrap(), rat(2, 1));
    let d = dirac(&[rat(-2, 1)], &z, 3).unwrap();
    assert_eq!(moment(&d, &[3], &xi).unwrap(), rat(-8, 1));
    assert_eq!(moment(&d, &[4], &xi), Err(Error::MomentBeyondTruncation));
}

#[test]
fn change_of_lattice_levels() {
    let z = Lattice::standard(1);
    let s = |q: i64| Lattice::scaled(1, rat_int(q));
    let zero = [Rational::zero()];
    let id = ChangeOfLattice::new(&z, &z, &zero, &z, &z, 3).unwrap();
    assert_eq!(id.matrix, RatMatrix::identity(4));
    // L₂ = 2ℤ, L₁' = 4ℤ do not generate ℤ
    assert!(matches!(ChangeOfLattice::new(&s(8), &s(2), &zero, &s(4), &z, 2), Err(Error::NotSublattice(_))));
    // L₁ = ℤ, L₂ = 2ℤ, L₁' = 3ℤ, L₂' = 6ℤ
    let c = ChangeOfLattice::new(&s(6), &s(2), &zero, &s(3), &z, 2).unwrap();
    let det = c.determinant();
    assert!(det.is_integer() && !det.is_zero());
    let d = det.to_integer();
    assert_eq!(stickel_core::linalg::prime_factors(&d).into_iter().collect::<Vec<_>>(), vec![BigInt::from(2)]);
    let mu = LocPolDist::new(
        s(6),
        2,
        c.source_reps
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BTreeMap::from([(vec![0], rat_int(i as i64 + 1))])))
            .collect(),
    )
    .unwrap();
    assert_eq!(
        change_lattice_iso(&mu, &s(2), &zero, &s(3), &z, &CoeffRing::integers()),
        Err(Error::IndexNotInvertible)
    );
    let ring = CoeffRing::inverting(&[2]);
    let nu = change_lattice_iso(&mu, &s(2), &zero, &s(3), &z, &ring).unwrap();
    assert_eq!(c.apply_inverse(&nu, &ring).unwrap(), mu);
    // total mass is preserved
    let mass = |d: &LocPolDist| d.cosets().values().fold(Rational::zero(), |acc, v| acc + &v[&vec![0]]);
    assert_eq!(mass(&nu), mass(&mu));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isomorphism_round_trips(seed in any::<u64>(), n in 1usize..=3, m in 0u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lattice(&mut rng, n);
        let mu = TruncDist::new(l.clone(), m, random_values(&mut rng, n, m)).unwrap();
        let g = GroupRingTrunc::new(n, m, random_values(&mut rng, n, m)).unwrap();
        prop_assert_eq!(groupring_to_dist(&dist_to_groupring(&mu), &l).unwrap(), mu.clone());
        prop_assert_eq!(dist_to_groupring(&groupring_to_dist(&g, &l).unwrap()), g);
        prop_assert_eq!(dist_to_formal_sum(&mu), dense_formal_sum(&mu));
    }

    #[test]
    fn convolution_is_the_group_ring_product(seed in any::<u64>(), n in 1usize..=3, m in 0u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lattice(&mut rng, n);
        let a = TruncDist::new(l.clone(), m, random_values(&mut rng, n, m)).unwrap();
        let b = TruncDist::new(l.clone(), m, random_values(&mut rng, n, m)).unwrap();
        let c = TruncDist::new(l.clone(), m, random_values(&mut rng, n, m)).unwrap();
        let ab = convolve(&a, &b).unwrap();
        prop_assert_eq!(dist_to_groupring(&ab), dist_to_groupring(&a).mul(&dist_to_groupring(&b)).unwrap());
        prop_assert_eq!(ab.clone(), convolve(&b, &a).unwrap());
        prop_assert_eq!(convolve(&ab, &c).unwrap(), convolve(&a, &convolve(&b, &c).unwrap()).unwrap());
        let (x, y) = (random_point(&mut rng, n), random_point(&mut rng, n));
        let xy: Vec<BigInt> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        prop_assert_eq!(convolve(&dirac_coords(&x, &l, m), &dirac_coords(&y, &l, m)).unwrap(), dirac_coords(&xy, &l, m));
    }

    #[test]
    fn truncation_commutes_with_the_isomorphism(seed in any::<u64>(), n in 1usize..=3, m in 0u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lattice(&mut rng, n);
        let a = TruncDist::new(l.clone(), m + 1, random_values(&mut rng, n, m + 1)).unwrap();
        let b = TruncDist::new(l.clone(), m + 1, random_values(&mut rng, n, m + 1)).unwrap();
        prop_assert_eq!(dist_to_groupring(&a).truncate(m), dist_to_groupring(&a.truncate(m)));
        prop_assert_eq!(convolve(&a, &b).unwrap().truncate(m), convolve(&a.truncate(m), &b.truncate(m)).unwrap());
    }

    #[test]
    fn augmentation_powers_vanish(seed in any::<u64>(), n in 1usize..=3, m in 0u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lattice(&mut rng, n);
        let origin = dirac_coords(&vec![BigInt::zero(); n], &l, m);
        let mut product = origin.clone();
        for _ in 0..=m {
            let gen = dirac_coords(&random_point(&mut rng, n), &l, m).add(&origin.scale(&rat(-1, 1))).unwrap();
            product = convolve(&product, &gen).unwrap();
        }
        prop_assert!(product.is_zero());
    }

    #[test]
    fn moments_of_the_dual_basis(seed in any::<u64>(), n in 1usize..=2, m in 1u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lattice(&mut rng, n);
        let xi = random_forms(&mut rng, n);
        let grid = binom_basis(n, m);
        for a in &grid {
            let z = from_moments(&l, m, a, &xi).unwrap();
            for j in &grid {
                let fact: BigInt = a.iter().map(|&x| (1..=x).map(BigInt::from).product::<BigInt>()).product();
                let want = if a == j { rat_int(fact) } else { Rational::zero() };
                prop_assert_eq!(moment(&z, j, &xi).unwrap(), want);
            }
        }
        // the z_i commute and multiply to z^a
        let zs: Vec<TruncDist> = (0..n).map(|i| from_moments(&l, m, &unit(n, i), &xi).unwrap()).collect();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(convolve(&zs[i], &zs[j]).unwrap(), convolve(&zs[j], &zs[i]).unwrap());
            }
        }
        let a = grid[rng.gen_range(0..grid.len())].clone();
        let mut power = dirac_coords(&vec![BigInt::zero(); n], &l, m);
        for (i, &ai) in a.iter().enumerate() {
            for _ in 0..ai {
                power = convolve(&power, &zs[i]).unwrap();
            }
        }
        prop_assert_eq!(power, from_moments(&l, m, &a, &xi).unwrap());
        // Dirac moments are evaluations
        let x = random_point(&mut rng, n);
        let d = dirac_coords(&x, &l, m);
        let expected = a.iter().enumerate().fold(Rational::one(), |acc, (i, &ai)| {
            let v = xi[i].iter().zip(&x).fold(Rational::zero(), |s, (c, t)| s + c * rat_int(t.clone()));
            (0..ai).fold(acc, |p, _| p * &v)
        });
        prop_assert_eq!(moment(&d, &a, &xi).unwrap(), expected);
    }
}
