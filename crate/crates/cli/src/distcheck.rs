//! Seeded randomized checks of the distribution ↔ group-ring isomorphism.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};
use stickel_core::intpoly::{binom_basis, IntPolyFn, Lattice};
use stickel_core::linalg::{fmt_rational, rat, RatMatrix, Rational};
use stickel_core::poldist::{
    convolve, dirac_coords, dist_to_groupring, from_moments, groupring_to_dist, moment, TruncDist,
};

use crate::commands::{CommandError, Flags, Outcome};
use crate::config::ConfigError;
use crate::report;

pub const CHECKS: [&str; 6] = ["round_trip", "homomorphism", "truncation", "kernel", "integration", "moments"];

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

fn random_forms(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
    loop {
        let rows: Vec<Vec<Rational>> =
            (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect()).collect();
        if !num_traits::Zero::is_zero(&RatMatrix::from_rows(rows.clone()).det()) {
            return rows;
        }
    }
}

/// Verdicts for one trial, in [`CHECKS`] order, plus a transcript of the
/// random inputs for the report hash.
fn trial(n: usize, m: u32, seed: u64, index: u64) -> (Vec<bool>, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let l = random_lattice(&mut rng, n);
    let dist = |rng: &mut ChaCha8Rng| TruncDist::new(l.clone(), m, random_values(rng, n, m)).expect("valid values");
    let (a, b) = (dist(&mut rng), dist(&mut rng));
    let mut transcript = format!("{index}:");
    for v in a.values().values().chain(b.values().values()) {
        transcript.push_str(&fmt_rational(v));
        transcript.push(',');
    }
    let ga = dist_to_groupring(&a);
    let round_trip = groupring_to_dist(&ga, &l).as_ref() == Ok(&a);
    let homomorphism = convolve(&a, &b).map(|ab| dist_to_groupring(&ab)).ok() == ga.mul(&dist_to_groupring(&b)).ok();
    let truncation = m == 0 || ga.truncate(m - 1) == dist_to_groupring(&a.truncate(m - 1));
    let origin = dirac_coords(&vec![BigInt::from(0); n], &l, m);
    let mut power = origin.clone();
    for _ in 0..=m {
        let x = random_point(&mut rng, n);
        let aug = dirac_coords(&x, &l, m).add(&origin.scale(&rat(-1, 1))).expect("same lattice");
        power = convolve(&power, &aug).expect("same lattice");
    }
    let kernel = power.is_zero();
    let f = IntPolyFn::on_lattice(l.clone(), random_values(&mut rng, n, m), m).expect("valid coefficients");
    let x = random_point(&mut rng, n);
    let integration = dirac_coords(&x, &l, m).integrate(&f).ok() == Some(f.evaluate(&l.point(&x)));
    let xi = random_forms(&mut rng, n);
    let grid = binom_basis(n, m);
    let e = &grid[rng.gen_range(0..grid.len())];
    let factorial: BigInt = e.iter().map(|&x| (1..=x).map(BigInt::from).product::<BigInt>()).product();
    let moments = from_moments(&l, m, e, &xi)
        .and_then(|z| grid.iter().map(|j| moment(&z, j, &xi).map(|v| (j, v))).collect::<Result<Vec<_>, _>>())
        .map(|vals| vals.iter().all(|(j, v)| *v == if *j == e { Rational::from(factorial.clone()) } else { rat(0, 1) }))
        .unwrap_or(false);
    (vec![round_trip, homomorphism, truncation, kernel, integration, moments], transcript)
}

pub fn distcheck(n: usize, m: u32, trials: u32, flags: &Flags) -> Result<Outcome, CommandError> {
    if !(1..=3).contains(&n) {
        return Err(ConfigError::new("distcheck.n", format!("{n} outside 1..=3")).into());
    }
    if m > 6 {
        return Err(ConfigError::new("distcheck.m", format!("{m} exceeds 6")).into());
    }
    let results: Vec<(Vec<bool>, String)> =
        (0..trials as u64).into_par_iter().map(|i| trial(n, m, flags.seed, i)).collect();
    let mut hasher = Sha256::new();
    let mut counts = serde_json::Map::new();
    for (c, name) in CHECKS.iter().enumerate() {
        let passed = results.iter().filter(|(v, _)| v[c]).count();
        counts.insert((*name).into(), json!({ "pass": passed, "fail": results.len() - passed }));
    }
    for (verdicts, transcript) in &results {
        hasher.update(transcript.as_bytes());
        for v in verdicts {
            hasher.update(if *v { b"P" } else { b"F" });
        }
        hasher.update(b"\n");
    }
    let hash: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let failed = results.iter().any(|(v, _)| v.iter().any(|ok| !ok));
    let report = json!({
        "schema": report::SCHEMA,
        "command": "distcheck",
        "seed": flags.seed,
        "n": n,
        "m": m,
        "trials": trials,
        "checks": counts,
        "hash": hash,
    });
    Ok(Outcome { report, failed, search_error: false })
}
