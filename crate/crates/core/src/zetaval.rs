//! Exact values of partial zeta functions at non-positive integers: Hurwitz
//! values through Bernoulli polynomials for `ℚ`, and Shintani cone
//! decompositions for real quadratic fields, plus the divisor-sum value of
//! `ζ_F(−1)` used as an independent check.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::groups::Elem;
use crate::linalg::{rat, rat_int, Rational};
use crate::quadfield::{Ideal, QElem, QuadField, RayClassGroup};

/// Largest ideal norm scanned for the auxiliary ideal `𝔠`.
const AUX_IDEAL_LIMIT: u64 = 20_000;

// ---------------------------------------------------------------------------
// Bernoulli numbers and polynomials
// ---------------------------------------------------------------------------

fn bernoulli_cache() -> &'static Mutex<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// Akiyama–Tanigawa table `B₀, …, B_n` (with `B₁ = +1/2`).
fn akiyama_tanigawa(n: usize) -> Vec<Rational> {
    let mut a: Vec<Rational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(rat(1, m as i64 + 1));
        for j in (1..=m).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = d * rat_int(j as i64);
        }
        out.push(a[0].clone());
    }
    out
}

/// Bernoulli number `B_n` with the convention `B₁ = −1/2`.
pub fn bernoulli(n: u32) -> Rational {
    let n = n as usize;
    let mut cache = bernoulli_cache().lock().expect("bernoulli cache poisoned");
    if cache.len() <= n {
        *cache = akiyama_tanigawa((2 * n).max(16));
    }
    if n == 1 {
        -cache[1].clone()
    } else {
        cache[n].clone()
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Bernoulli polynomial `B_n(x) = Σ C(n, j) B_j x^{n−j}`.
pub fn bernoulli_poly(n: u32, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    // accumulate from j = n down to 0 so that xp = x^{n−j}
    for j in (0..=n).rev() {
        acc += rat_int(binomial(n, j)) * bernoulli(j) * &xp;
        xp *= x;
    }
    acc
}

/// Hurwitz value `ζ(−k, x) = −B_{k+1}(x)/(k+1)`.
pub fn hurwitz_neg(k: u32, x: &Rational) -> Rational {
    -bernoulli_poly(k + 1, x) / rat_int(k as i64 + 1)
}

fn rat_pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

// ---------------------------------------------------------------------------
// The rational path
// ---------------------------------------------------------------------------

/// `Σ_{n>0, n≡a mod f} n^{−s}` at `s = −k`, i.e. `f^k ζ(−k, a/f)`.
pub fn partial_zeta_q(f: u64, a: u64, k: u32) -> Result<Rational> {
    if f == 0 || a == 0 || a > f || a.gcd(&f) != 1 {
        return Err(Error::InvalidArgument(format!("need 0 < a ≤ f and gcd(a, f) = 1 (a={a}, f={f})")));
    }
    let fq = rat_int(f as i64);
    Ok(rat_pow(&fq, k) * hurwitz_neg(k, &(rat_int(a as i64) / &fq)))
}

// ---------------------------------------------------------------------------
// Divisor-sum oracle for ζ_F(−1)
// ---------------------------------------------------------------------------

fn sigma1(n: u64) -> u64 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).sum()
}

/// `ζ_F(−1) = (1/60) Σ_{b² < disc, b ≡ disc mod 2} σ₁((disc − b²)/4)`.
pub fn dedekind_minus1(d: i64) -> Result<Rational> {
    let f = QuadField::new(d)?;
    let disc = f.disc();
    let mut total = 0u64;
    let r = (disc as f64).sqrt() as i64 + 1;
    for b in -r..=r {
        if b * b < disc && (disc - b * b) % 4 == 0 {
            total += sigma1(((disc - b * b) / 4) as u64);
        }
    }
    Ok(rat(total as i64, 60))
}

// ---------------------------------------------------------------------------
// Shintani cones
// ---------------------------------------------------------------------------

/// A simplicial cone spanned by one or two totally positive elements. Rays
/// are open (the apex is excluded); two-dimensional cones are open as well.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShintaniCone {
    pub generators: Vec<QElem>,
}

/// Truncated power series in `u` with field coefficients.
type Series = Vec<QElem>;

fn series_mul(f: &QuadField, x: &Series, y: &Series, n: usize) -> Series {
    let mut out = vec![QElem::zero(); n + 1];
    for (i, xi) in x.iter().enumerate().take(n + 1) {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate().take(n + 1 - i) {
            out[i + j] = out[i + j].add(&f.mul(xi, yj));
        }
    }
    out
}

/// `ℓ(u)^e` for `ℓ(u) = g + u·ḡ`, with `e = −1` expanded as a power series.
fn linear_powers(f: &QuadField, g: &QElem, top: usize, n: usize) -> Vec<Series> {
    let gc = f.conj(g);
    let mut ell = vec![QElem::zero(); n + 1];
    ell[0] = g.clone();
    if n >= 1 {
        ell[1] = gc.clone();
    }
    // index 0 holds ℓ^{−1}, index p holds ℓ^{p−1}
    let ginv = f.inv(g);
    let ratio = f.mul(&gc, &ginv).neg();
    let mut inv = Vec::with_capacity(n + 1);
    let mut term = ginv;
    for _ in 0..=n {
        inv.push(term.clone());
        term = f.mul(&term, &ratio);
    }
    let mut out = vec![inv];
    let mut pw = vec![QElem::zero(); n + 1];
    pw[0] = QElem::one();
    for _ in 1..=top {
        out.push(pw.clone());
        pw = series_mul(f, &pw, &ell, n);
    }
    out
}

/// `Σ_{n ∈ ℤ²_{≥0}} N((x₁+n₁)g₁ + (x₂+n₂)g₂)^{−s}` at `s = −k`, for
/// `x ∈ (0,1]²`:
///
/// `(k!)²/2 · Tr [u^k] Σ_{p+q=2k+2} B_p(1−x₁)B_q(1−x₂)/(p!q!) ℓ₁^{p−1} ℓ₂^{q−1}`
/// with `ℓᵢ(u) = gᵢ + u·ḡᵢ`.
pub fn cone_zeta_2d(f: &QuadField, g1: &QElem, g2: &QElem, x1: &Rational, x2: &Rational, k: u32) -> Rational {
    let n = k as usize;
    let top = 2 * n + 2;
    let p1 = linear_powers(f, g1, top, n);
    let p2 = linear_powers(f, g2, top, n);
    let y1 = Rational::one() - x1;
    let y2 = Rational::one() - x2;
    let mut acc = QElem::zero();
    for p in 0..=top {
        let q = top - p;
        let c = bernoulli_poly(p as u32, &y1) * bernoulli_poly(q as u32, &y2)
            / rat_int(factorial(p as u32) * factorial(q as u32));
        if c.is_zero() {
            continue;
        }
        let mut coeff = QElem::zero();
        for i in 0..=n {
            coeff = coeff.add(&f.mul(&p1[p][i], &p2[q][n - i]));
        }
        acc = acc.add(&coeff.scale(&c));
    }
    let kf = rat_int(factorial(k));
    f.trace(&acc) * &kf * &kf / rat_int(2)
}

/// `Σ_{n ≥ 0} N((x+n)g)^{−s}` at `s = −k` for `x ∈ (0,1]`.
pub fn cone_zeta_1d(f: &QuadField, g: &QElem, x: &Rational, k: u32) -> Rational {
    rat_pow(&f.norm(g), k) * hurwitz_neg(2 * k, x)
}

/// Value of a cone's zeta function at `s = −k` at the shift `x` (given in
/// the coordinates of the cone's generators, each in `(0,1]`).
pub fn cone_zeta(f: &QuadField, cone: &ShintaniCone, x: &[Rational], k: u32) -> Rational {
    match cone.generators.as_slice() {
        [g] => cone_zeta_1d(f, g, &x[0], k),
        [g1, g2] => cone_zeta_2d(f, g1, g2, &x[0], &x[1], k),
        _ => panic!("Shintani cones have one or two generators"),
    }
}

/// Representative of `x mod 1` in `(0, 1]`.
fn frac_up(x: &Rational) -> Rational {
    x - x.ceil() + Rational::one()
}

fn det2(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> BigInt {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn primitive(x: &Rational, y: &Rational) -> (BigInt, BigInt) {
    let l = x.denom().lcm(y.denom());
    let u = (x * rat_int(l.clone())).to_integer();
    let v = (y * rat_int(l)).to_integer();
    let g = u.gcd(&v);
    (u / &g, v / &g)
}

/// Unimodular subdivision of the cone spanned by primitive `a`, `b` with
/// `det(a, b) > 0`: rays `a = w₀, w₁, …, w_r = b` with every consecutive pair
/// a basis of `ℤ²` (Hirzebruch–Jung).
pub fn unimodular_rays(a: (BigInt, BigInt), b: (BigInt, BigInt)) -> Vec<(BigInt, BigInt)> {
    let mut rays = vec![a.clone()];
    let mut cur = a;
    loop {
        let d = det2(&cur, &b);
        assert!(d.is_positive(), "cone must be positively oriented");
        if d.is_one() {
            rays.push(b);
            return rays;
        }
        // complete cur to a basis (cur, c) with det = 1
        let eg = cur.0.extended_gcd(&cur.1);
        let c = (-eg.y.clone(), eg.x.clone());
        debug_assert!(det2(&cur, &c).is_one());
        let alpha = det2(&b, &c);
        let k = (-alpha).mod_floor(&d);
        let w = ((&b.0 + &k * &cur.0) / &d, (&b.1 + &k * &cur.1) / &d);
        rays.push(w.clone());
        cur = w;
    }
}

/// Everything the Shintani evaluation needs for one ray class: the auxiliary
/// ideal `𝔠` (integral, coprime to `𝔪`, in the class of `𝔄⁻¹`), the shift
/// `x₀ ∈ 𝔠` with `x₀ ≡ 1 mod 𝔪`, the lattice `Λ = 𝔠𝔪`, and the unit `ε`
/// generating `E_{𝔪,+}` (possibly raised to a power).
#[derive(Clone, Debug)]
pub struct ShintaniSetup {
    pub aux: Ideal,
    pub x0: QElem,
    pub lattice: Ideal,
    pub eps: QElem,
}

/// Knobs that must not change the value; exposed for invariance checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShintaniOptions {
    /// Use `ε^t` in place of the generator of `E_{𝔪,+}`.
    pub eps_power: u64,
    /// Move `x₀` by this vector of `Λ`-coordinates.
    pub shift: (i64, i64),
}

impl Default for ShintaniOptions {
    fn default() -> Self {
        ShintaniOptions { eps_power: 1, shift: (0, 0) }
    }
}

/// Builds the [`ShintaniSetup`] for ray class `class`.
pub fn shintani_setup(ray: &RayClassGroup, class: &Elem, opts: ShintaniOptions) -> Result<ShintaniSetup> {
    let f = ray.field();
    let m = ray.modulus();
    let target = ray.group().neg(class);
    let mut aux = None;
    'search: for n in 1..=AUX_IDEAL_LIMIT {
        for c in f.ideals_of_norm(n) {
            if f.coprime(&c, m) && ray.class_of(&c)? == target {
                aux = Some(c);
                break 'search;
            }
        }
    }
    let aux = aux.ok_or_else(|| Error::SearchIncomplete(format!("auxiliary ideal below norm {AUX_IDEAL_LIMIT}")))?;
    let nm = m.int_norm().to_i64().unwrap();
    let [c1, c2] = aux.basis();
    let mut x0 = None;
    'x0: for s in 0..nm {
        for t in 0..nm {
            let z = c1.scale(&rat_int(s)).add(&c2.scale(&rat_int(t)));
            if m.contains(&z.sub(&QElem::one())) {
                x0 = Some(z);
                break 'x0;
            }
        }
    }
    let x0 = x0.expect("𝔠 + 𝔪 = 𝒪 gives a lift of 1");
    let lattice = f.ideal_mul(&aux, m);
    let [l1, l2] = lattice.basis();
    let x0 = x0.add(&l1.scale(&rat_int(opts.shift.0))).add(&l2.scale(&rat_int(opts.shift.1)));
    let eps = f.pow(ray.eps_m().0, opts.eps_power.max(1));
    Ok(ShintaniSetup { aux, x0, lattice, eps })
}

/// Coordinates of `z` in the basis `(λ₁, λ₂)` of an integral ideal.
fn lattice_coords(lattice: &Ideal, z: &QElem) -> (Rational, Rational) {
    let (a, b, c) = lattice.hnf_entries();
    let u = &z.a / rat_int(a.clone());
    let v = (&z.b - &u * rat_int(b.clone())) / rat_int(c.clone());
    (u, v)
}

/// The cones (with shifts) whose zeta values sum to `Σ N(z)^{−s}` over
/// `z ∈ (x₀ + Λ) ∩ C(1, ε)`, with `C(1, ε)` the half-open cone containing the
/// ray through `1` and not the ray through `ε`.
pub fn shintani_cones(setup: &ShintaniSetup) -> Vec<(ShintaniCone, Vec<Rational>)> {
    let [l1, l2] = setup.lattice.basis();
    let one = lattice_coords(&setup.lattice, &QElem::one());
    let eps = lattice_coords(&setup.lattice, &setup.eps);
    let y = lattice_coords(&setup.lattice, &setup.x0);
    let mut a = primitive(&one.0, &one.1);
    let mut b = primitive(&eps.0, &eps.1);
    let mut y = y;
    let (mut e1, mut e2) = (l1, l2);
    if det2(&a, &b).is_negative() {
        // reverse the orientation by swapping the lattice basis
        a = (a.1, a.0);
        b = (b.1, b.0);
        y = (y.1, y.0);
        std::mem::swap(&mut e1, &mut e2);
    }
    let elem = |w: &(BigInt, BigInt)| e1.scale(&rat_int(w.0.clone())).add(&e2.scale(&rat_int(w.1.clone())));
    let rays = unimodular_rays(a, b);
    let mut out = Vec::new();
    for pair in rays.windows(2) {
        let (w1, w2) = (&pair[0], &pair[1]);
        let yv = (rat_int(1) * &y.0, y.1.clone());
        // y = α w₁ + β w₂ with det(w₁, w₂) = 1
        let alpha = &yv.0 * rat_int(w2.1.clone()) - &yv.1 * rat_int(w2.0.clone());
        let beta = rat_int(w1.0.clone()) * &yv.1 - rat_int(w1.1.clone()) * &yv.0;
        let g1 = elem(w1);
        let g2 = elem(w2);
        if beta.is_integer() {
            out.push((ShintaniCone { generators: vec![g1.clone()] }, vec![frac_up(&alpha)]));
        }
        out.push((ShintaniCone { generators: vec![g1, g2] }, vec![frac_up(&alpha), frac_up(&beta)]));
    }
    out
}

/// `ζ(𝔪, 𝔄, −k)` for a narrow ray class `𝔄` of a real quadratic field.
pub fn partial_zeta_quad(ray: &RayClassGroup, class: &Elem, k: u32) -> Result<Rational> {
    partial_zeta_quad_with(ray, class, k, ShintaniOptions::default())
}

/// [`partial_zeta_quad`] with explicit decomposition choices.
pub fn partial_zeta_quad_with(ray: &RayClassGroup, class: &Elem, k: u32, opts: ShintaniOptions) -> Result<Rational> {
    let f = ray.field();
    let setup = shintani_setup(ray, class, opts)?;
    let mut total = Rational::zero();
    for (cone, x) in shintani_cones(&setup) {
        total += cone_zeta(f, &cone, &x, k);
    }
    // each orbit of E_{𝔪,+} is counted eps_power times
    total /= rat_int(opts.eps_power.max(1) as i64);
    Ok(total / rat_pow(&setup.aux.norm(), k))
}

type ZetaKey = (i64, [BigInt; 3], u32);

/// Values already computed, keyed by field, modulus HNF and `k`; the ray
/// class group and its element order are determined by the first two.
fn zeta_cache() -> &'static Mutex<HashMap<ZetaKey, Vec<(Elem, Rational)>>> {
    static CACHE: OnceLock<Mutex<HashMap<ZetaKey, Vec<(Elem, Rational)>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All partial zeta values of `Cl⁺_𝔪` at `s = −k`, in element order.
pub fn all_partial_zetas(ray: &RayClassGroup, k: u32) -> Result<Vec<(Elem, Rational)>> {
    let (a, b, c) = ray.modulus().hnf_entries();
    let key = (ray.field().d(), [a.clone(), b.clone(), c.clone()], k);
    if let Some(hit) = zeta_cache().lock().expect("zeta cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let values: Vec<(Elem, Rational)> = ray
        .group()
        .elements()
        .into_iter()
        .map(|c| partial_zeta_quad(ray, &c, k).map(|z| (c, z)))
        .collect::<Result<_>>()?;
    zeta_cache().lock().expect("zeta cache poisoned").insert(key, values.clone());
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat(0, 1));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn rational_partial_zetas() {
        assert_eq!(partial_zeta_q(4, 1, 0).unwrap(), rat(1, 4));
        assert_eq!(partial_zeta_q(4, 3, 0).unwrap(), rat(-1, 4));
        assert_eq!(partial_zeta_q(1, 1, 0).unwrap(), rat(-1, 2));
        assert!(partial_zeta_q(4, 2, 0).is_err());
    }

    #[test]
    fn divisor_sum_values() {
        assert_eq!(dedekind_minus1(5).unwrap(), rat(1, 30));
        assert_eq!(dedekind_minus1(2).unwrap(), rat(1, 12));
        assert_eq!(dedekind_minus1(3).unwrap(), rat(1, 6));
    }

    #[test]
    fn golden_field_zeta_minus_one() {
        let f = QuadField::new(5).unwrap();
        let ray = RayClassGroup::new(&f, &Ideal::unit()).unwrap();
        let z = partial_zeta_quad(&ray, &ray.group().identity(), 1).unwrap();
        assert_eq!(z, rat(1, 30));
    }

    #[test]
    fn unimodular_rays_are_bases() {
        let rays = unimodular_rays((BigInt::from(1), BigInt::from(0)), (BigInt::from(3), BigInt::from(7)));
        for w in rays.windows(2) {
            assert!(det2(&w[0], &w[1]).is_one());
        }
    }
}
