//! Real quadratic fields `ℚ(√D)`: integers over the basis `{1, ω}`, ideals in
//! Hermite form, prime splitting, units, narrow ray class groups with Artin
//! labels, and local data of abelian extensions presented as quotients of a
//! narrow ray class group. A much smaller parallel path handles abelian
//! extensions of `ℚ` inside cyclotomic fields.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::groups::{AbelianGroup, Elem, Presentation};
use crate::linalg::{hnf_only, rat_int, IntMatrix, Rational};

/// Largest ideal norm scanned when looking for class representatives.
const IDEAL_SEARCH_LIMIT: u64 = 20_000;
/// Largest half-width of the box scanned for sign-prescribed elements.
const SIGN_SEARCH_LIMIT: i64 = 1 << 12;

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// Field element `a + b·ω` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QElem {
    pub a: Rational,
    pub b: Rational,
}

impl QElem {
    pub fn new(a: Rational, b: Rational) -> Self {
        QElem { a, b }
    }

    pub fn int(a: i64, b: i64) -> Self {
        QElem { a: rat_int(a), b: rat_int(b) }
    }

    pub fn from_ints(a: BigInt, b: BigInt) -> Self {
        QElem { a: rat_int(a), b: rat_int(b) }
    }

    pub fn rational(q: Rational) -> Self {
        QElem { a: q, b: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::int(0, 0)
    }

    pub fn one() -> Self {
        Self::int(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &QElem) -> QElem {
        QElem { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &QElem) -> QElem {
        QElem { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> QElem {
        QElem { a: -&self.a, b: -&self.b }
    }

    pub fn scale(&self, q: &Rational) -> QElem {
        QElem { a: &self.a * q, b: &self.b * q }
    }

    /// Integer coordinates, if the element lies in `ℤ + ℤω`.
    pub fn int_coords(&self) -> Option<(BigInt, BigInt)> {
        if self.a.is_integer() && self.b.is_integer() {
            Some((self.a.to_integer(), self.b.to_integer()))
        } else {
            None
        }
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }
}

impl fmt::Display for QElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·ω", self.a, self.b)
    }
}

// ---------------------------------------------------------------------------
// Ideals
// ---------------------------------------------------------------------------

/// Fractional ideal `(1/den)·J` with `J` the integral ideal whose ℤ-basis in
/// coordinates over `{1, ω}` is the Hermite form `[[a, b], [0, c]]`
/// (`0 ≤ b < c`) and `gcd(a, b, c, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    den: BigInt,
}

impl Ideal {
    pub fn unit() -> Self {
        Ideal { a: BigInt::one(), b: BigInt::zero(), c: BigInt::one(), den: BigInt::one() }
    }

    /// Hermite form rows `[[a, b], [0, c]]` of the integral part.
    pub fn hnf(&self) -> IntMatrix {
        IntMatrix::from_rows(vec![vec![self.a.clone(), self.b.clone()], vec![BigInt::zero(), self.c.clone()]], 2)
    }

    pub fn hnf_entries(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_unit(&self) -> bool {
        *self == Ideal::unit()
    }

    pub fn norm(&self) -> Rational {
        Rational::new(&self.a * &self.c, &self.den * &self.den)
    }

    /// Norm of an integral ideal.
    pub fn int_norm(&self) -> BigInt {
        assert!(self.is_integral(), "integral ideal expected");
        &self.a * &self.c
    }

    /// The ℤ-basis `(a + bω)/den, cω/den`.
    pub fn basis(&self) -> [QElem; 2] {
        let d = rat_int(self.den.clone());
        [
            QElem::new(rat_int(self.a.clone()) / &d, rat_int(self.b.clone()) / &d),
            QElem::new(Rational::zero(), rat_int(self.c.clone()) / &d),
        ]
    }

    fn contains_coords(&self, x: &BigInt, y: &BigInt) -> bool {
        if !x.is_multiple_of(&self.a) {
            return false;
        }
        let q = x / &self.a;
        (y - q * &self.b).is_multiple_of(&self.c)
    }

    /// Membership of a field element.
    pub fn contains(&self, x: &QElem) -> bool {
        let d = rat_int(self.den.clone());
        match x.scale(&d).int_coords() {
            Some((u, v)) => self.contains_coords(&u, &v),
            None => false,
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Ideal) -> bool {
        self.basis().iter().all(|g| other.contains(g))
    }

    /// Smallest rational prime dividing the norm (for prime ideals: the
    /// residue characteristic).
    pub fn residue_characteristic(&self) -> Option<u64> {
        let n = self.norm();
        let n = n.numer().to_u64()?;
        (2..=n).find(|p| n % p == 0)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[0,{}]]", self.a, self.b, self.c)?;
        if !self.den.is_one() {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

/// A prime ideal above `p` with its residue degree and ramification index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeData {
    pub ideal: Ideal,
    pub p: u64,
    pub residue_degree: u32,
    pub ramification: u32,
}

// ---------------------------------------------------------------------------
// The field
// ---------------------------------------------------------------------------

/// `F = ℚ(√D)` with `ω² = t·ω + n₀`, where `(t, n₀) = (1, (D−1)/4)` for
/// `D ≡ 1 mod 4` and `(0, D)` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadField {
    d: i64,
    disc: i64,
    t: i64,
    n0: i64,
    eps0: QElem,
    eps0_norm: i64,
}

fn is_squarefree(d: i64) -> bool {
    let mut q = 2i64;
    while q * q <= d {
        if d % (q * q) == 0 {
            return false;
        }
        q += 1;
    }
    true
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d <= 1 || !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        let (t, n0, disc) = if d.rem_euclid(4) == 1 { (1, (d - 1) / 4, d) } else { (0, d, 4 * d) };
        let mut f = QuadField { d, disc, t, n0, eps0: QElem::one(), eps0_norm: 1 };
        let (eps, n) = f.fundamental_unit_cf();
        f.eps0 = eps;
        f.eps0_norm = n;
        Ok(f)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// `(t, n₀)` with `ω² = tω + n₀`.
    pub fn omega_relation(&self) -> (i64, i64) {
        (self.t, self.n0)
    }

    /// Fundamental unit `ε₀ > 1`.
    pub fn eps0(&self) -> &QElem {
        &self.eps0
    }

    pub fn eps0_norm(&self) -> i64 {
        self.eps0_norm
    }

    /// Continued fraction of `ω`, stopping at the first convergent `h/k`
    /// whose companion `(h − kt) + kω` has norm `±1`.
    fn fundamental_unit_cf(&self) -> (QElem, i64) {
        let d = BigInt::from(self.d);
        let sd = d.sqrt();
        // ω = (P + √D)/Q
        let (mut p, mut q) =
            if self.t == 1 { (BigInt::one(), BigInt::from(2)) } else { (BigInt::zero(), BigInt::one()) };
        let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
        let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
        loop {
            let a = (&p + &sd).div_floor(&q);
            let h2 = &a * &h1 + &h0;
            let k2 = &a * &k1 + &k0;
            h0 = std::mem::replace(&mut h1, h2);
            k0 = std::mem::replace(&mut k1, k2);
            let cand = QElem::from_ints(&h1 - &k1 * self.t, k1.clone());
            let n = self.norm(&cand);
            if n.abs().is_one() {
                return (cand, n.to_integer().to_i64().unwrap());
            }
            p = &a * &q - &p;
            q = (&d - &p * &p) / &q;
        }
    }

    // -- element arithmetic ------------------------------------------------

    pub fn mul(&self, x: &QElem, y: &QElem) -> QElem {
        let bd = &x.b * &y.b;
        QElem { a: &x.a * &y.a + &bd * rat_int(self.n0), b: &x.a * &y.b + &x.b * &y.a + &bd * rat_int(self.t) }
    }

    pub fn conj(&self, x: &QElem) -> QElem {
        QElem { a: &x.a + &x.b * rat_int(self.t), b: -&x.b }
    }

    pub fn norm(&self, x: &QElem) -> Rational {
        &x.a * &x.a + &x.a * &x.b * rat_int(self.t) - &x.b * &x.b * rat_int(self.n0)
    }

    pub fn trace(&self, x: &QElem) -> Rational {
        &x.a * rat_int(2) + &x.b * rat_int(self.t)
    }

    pub fn inv(&self, x: &QElem) -> QElem {
        let n = self.norm(x);
        assert!(!n.is_zero(), "inverse of zero");
        self.conj(x).scale(&n.recip())
    }

    pub fn pow(&self, x: &QElem, e: u64) -> QElem {
        let mut r = QElem::one();
        let mut b = x.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Exact sign of `x` under real embedding `place ∈ {0, 1}`; embedding 0
    /// sends `√D` to the positive root.
    pub fn sign(&self, x: &QElem, place: usize) -> Ordering {
        // x = p + q√D
        let (p, q) = if self.t == 1 {
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            (&x.a + &x.b * &half, &x.b * &half)
        } else {
            (x.a.clone(), x.b.clone())
        };
        let q = if place == 0 { q } else { -q };
        let sp = p.cmp(&Rational::zero());
        let sq = q.cmp(&Rational::zero());
        if sq == Ordering::Equal || sp == sq {
            return sp;
        }
        if sp == Ordering::Equal {
            return sq;
        }
        let lhs = &p * &p;
        let rhs = &q * &q * rat_int(self.d);
        if lhs > rhs {
            sp
        } else {
            sq
        }
    }

    pub fn is_totally_positive(&self, x: &QElem) -> bool {
        self.sign(x, 0) == Ordering::Greater && self.sign(x, 1) == Ordering::Greater
    }

    fn omega_embeddings(&self) -> [f64; 2] {
        let s = (self.d as f64).sqrt();
        let w = if self.t == 1 { (1.0 + s) / 2.0 } else { s };
        [w, self.t as f64 - w]
    }

    /// Floating-point images under both embeddings (search bounds only).
    pub fn embed(&self, x: &QElem) -> [f64; 2] {
        let w = self.omega_embeddings();
        let a = x.a.to_f64().unwrap_or(f64::NAN);
        let b = x.b.to_f64().unwrap_or(f64::NAN);
        [a + b * w[0], a + b * w[1]]
    }

    // -- primes --------------------------------------------------------------

    /// Kronecker symbol `(disc | p)` for a rational prime `p`.
    pub fn kronecker(&self, p: u64) -> i32 {
        let disc = self.disc;
        if p == 2 {
            return match disc.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            };
        }
        let a = disc.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        let mut r = 1u64;
        let mut base = a % p;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = (r as u128 * base as u128 % p as u128) as u64;
            }
            base = (base as u128 * base as u128 % p as u128) as u64;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    /// Roots of `X² − tX − n₀` modulo `p`.
    fn min_poly_roots(&self, p: u64) -> Vec<i64> {
        let p = p as i64;
        (0..p).filter(|&r| (r * r - self.t * r - self.n0).rem_euclid(p) == 0).collect()
    }

    /// Decomposition of the rational prime `p`.
    pub fn prime_split(&self, p: u64) -> Vec<PrimeData> {
        let roots = self.min_poly_roots(p);
        let pe = QElem::int(p as i64, 0);
        let mk = |r: i64| self.ideal_from_generators(&[pe.clone(), QElem::int(-r, 1)]).unwrap();
        match self.kronecker(p) {
            1 => roots.iter().map(|&r| PrimeData { ideal: mk(r), p, residue_degree: 1, ramification: 1 }).collect(),
            0 => vec![PrimeData { ideal: mk(roots[0]), p, residue_degree: 1, ramification: 2 }],
            _ => vec![PrimeData { ideal: self.principal_ideal(&pe), p, residue_degree: 2, ramification: 1 }],
        }
    }

    // -- ideals --------------------------------------------------------------

    /// The ideal generated (as an `𝒪`-module) by the given elements.
    pub fn ideal_from_generators(&self, gens: &[QElem]) -> Result<Ideal> {
        let l = gens.iter().fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator()));
        let lq = rat_int(l.clone());
        let omega = QElem::int(0, 1);
        let mut rows = Vec::new();
        for g in gens {
            for x in [g.scale(&lq), self.mul(&g.scale(&lq), &omega)] {
                let (u, v) = x.int_coords().expect("cleared denominators");
                rows.push(vec![u, v]);
            }
        }
        if rows.is_empty() {
            return Err(Error::InvalidArgument("zero ideal".into()));
        }
        let h = hnf_only(&IntMatrix::from_rows(rows, 2));
        if h.rows() < 2 || h[(0, 0)].is_zero() || h[(1, 1)].is_zero() {
            return Err(Error::InvalidArgument("zero ideal".into()));
        }
        let (a, b, c) = (h[(0, 0)].clone(), h[(0, 1)].clone(), h[(1, 1)].clone());
        let g = a.gcd(&b).gcd(&c).gcd(&l);
        Ok(Ideal { a: a / &g, b: b / &g, c: c / &g, den: l / &g })
    }

    pub fn principal_ideal(&self, x: &QElem) -> Ideal {
        self.ideal_from_generators(std::slice::from_ref(x)).expect("nonzero generator")
    }

    /// The lattice `[[a, b], [0, c]]` as an ideal, if it is one.
    pub fn ideal_from_hnf(&self, a: i64, b: i64, c: i64) -> Result<Ideal> {
        if a <= 0 || c <= 0 || b < 0 || b >= c {
            return Err(Error::InvalidArgument(format!("not a Hermite form: [[{a},{b}],[0,{c}]]")));
        }
        let cand = Ideal { a: a.into(), b: b.into(), c: c.into(), den: BigInt::one() };
        if self.is_ideal(&cand) {
            Ok(cand)
        } else {
            Err(Error::InvalidArgument(format!("[[{a},{b}],[0,{c}]] is not an ideal")))
        }
    }

    fn is_ideal(&self, cand: &Ideal) -> bool {
        let omega = QElem::int(0, 1);
        cand.basis().iter().all(|g| cand.contains(&self.mul(g, &omega)))
    }

    pub fn ideal_mul(&self, x: &Ideal, y: &Ideal) -> Ideal {
        let mut gens = Vec::with_capacity(4);
        for g in x.basis() {
            for h in y.basis() {
                gens.push(self.mul(&g, &h));
            }
        }
        self.ideal_from_generators(&gens).expect("product of nonzero ideals")
    }

    pub fn ideal_pow(&self, x: &Ideal, e: u32) -> Ideal {
        (0..e).fold(Ideal::unit(), |acc, _| self.ideal_mul(&acc, x))
    }

    pub fn ideal_conj(&self, x: &Ideal) -> Ideal {
        let gens: Vec<QElem> = x.basis().iter().map(|g| self.conj(g)).collect();
        self.ideal_from_generators(&gens).expect("nonzero ideal")
    }

    /// `x · y⁻¹ = x · ȳ / N(y)`.
    pub fn ideal_div(&self, x: &Ideal, y: &Ideal) -> Ideal {
        let n = y.norm().recip();
        let prod = self.ideal_mul(x, &self.ideal_conj(y));
        let gens: Vec<QElem> = prod.basis().iter().map(|g| g.scale(&n)).collect();
        self.ideal_from_generators(&gens).expect("nonzero ideal")
    }

    pub fn ideal_add(&self, x: &Ideal, y: &Ideal) -> Ideal {
        let mut gens = x.basis().to_vec();
        gens.extend(y.basis());
        self.ideal_from_generators(&gens).expect("nonzero ideal")
    }

    pub fn coprime(&self, x: &Ideal, y: &Ideal) -> bool {
        self.ideal_add(x, y).is_unit()
    }

    /// All integral ideals of norm `n`, in Hermite-lexicographic order. Built
    /// from the splitting of the primes dividing `n`.
    pub fn ideals_of_norm(&self, n: u64) -> Vec<Ideal> {
        let mut out = vec![Ideal::unit()];
        for (p, e) in prime_power_factors(n) {
            let primes = self.prime_split(p);
            let local: Vec<Ideal> = match primes.as_slice() {
                [q1, q2] => (0..=e)
                    .map(|i| self.ideal_mul(&self.ideal_pow(&q1.ideal, i), &self.ideal_pow(&q2.ideal, e - i)))
                    .collect(),
                [q] if q.residue_degree == 2 => {
                    if e % 2 == 0 {
                        vec![self.ideal_pow(&q.ideal, e / 2)]
                    } else {
                        Vec::new()
                    }
                }
                [q] => vec![self.ideal_pow(&q.ideal, e)],
                _ => unreachable!("a rational prime has one or two primes above it"),
            };
            out = out.iter().flat_map(|x| local.iter().map(move |y| self.ideal_mul(x, y))).collect();
        }
        out.sort();
        out
    }

    /// Prime factorisation of an integral ideal, primes sorted.
    pub fn factor(&self, x: &Ideal) -> Vec<(Ideal, u32)> {
        assert!(x.is_integral(), "integral ideal expected");
        let n = x.int_norm().to_u64().expect("norm fits in u64");
        let mut out = Vec::new();
        let mut rest = x.clone();
        let mut m = n;
        let mut p = 2u64;
        while m > 1 {
            if m.is_multiple_of(p) {
                while m.is_multiple_of(p) {
                    m /= p;
                }
                for pd in self.prime_split(p) {
                    let mut e = 0;
                    while rest.is_subset_of(&pd.ideal) {
                        rest = self.ideal_div(&rest, &pd.ideal);
                        e += 1;
                    }
                    if e > 0 {
                        out.push((pd.ideal, e));
                    }
                }
            }
            p += 1;
        }
        out.sort();
        out
    }

    // -- principal ideals and class numbers -----------------------------------

    /// Some generator of a principal ideal, or `None`. The search runs over the
    /// fundamental box `√N ≤ y₁ ≤ ε₀√N`, `|y₂| ≤ √N` of the embedded ideal
    /// lattice; every candidate is confirmed by an exact norm comparison.
    pub fn principal_generator(&self, x: &Ideal) -> Option<QElem> {
        let den = rat_int(x.den.clone());
        let xi = if x.is_integral() {
            x.clone()
        } else {
            let gens: Vec<QElem> = x.basis().iter().map(|g| g.scale(&den)).collect();
            self.ideal_from_generators(&gens).ok()?
        };
        let n = xi.int_norm();
        let nf = n.to_f64()?;
        let sn = nf.sqrt();
        let e0 = self.embed(&self.eps0)[0];
        let [b1, b2] = xi.basis();
        let g1 = self.embed(&b1);
        let g2 = self.embed(&b2);
        let slack = 1e-7;
        let (lo1, hi1) = (sn * (1.0 - slack) - slack, e0 * sn * (1.0 + slack) + slack);
        let (lo2, hi2) = (-sn * (1.0 + slack) - slack, sn * (1.0 + slack) + slack);
        let det = g1[0] * g2[1] - g2[0] * g1[1];
        let s_of = |y1: f64, y2: f64| (y1 * g2[1] - y2 * g2[0]) / det;
        let corners = [s_of(lo1, lo2), s_of(lo1, hi2), s_of(hi1, lo2), s_of(hi1, hi2)];
        let smin = corners.iter().cloned().fold(f64::INFINITY, f64::min).floor() as i64 - 1;
        let smax = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;
        let t_range = |s: f64, coef_s: f64, coef_t: f64, lo: f64, hi: f64| {
            let u = (lo - s * coef_s) / coef_t;
            let v = (hi - s * coef_s) / coef_t;
            (u.min(v), u.max(v))
        };
        for s in smin..=smax {
            let sf = s as f64;
            let (a1, a2) = t_range(sf, g1[0], g2[0], lo1, hi1);
            let (c1, c2) = t_range(sf, g1[1], g2[1], lo2, hi2);
            let tlo = a1.max(c1).floor() as i64 - 1;
            let thi = a2.min(c2).ceil() as i64 + 1;
            for t in tlo..=thi {
                let y = b1.scale(&rat_int(s)).add(&b2.scale(&rat_int(t)));
                if self.norm(&y).abs() == rat_int(n.clone()) {
                    return Some(y.scale(&den.recip()));
                }
            }
        }
        None
    }

    /// A totally positive generator, if the ideal is narrowly principal.
    pub fn totally_positive_generator(&self, x: &Ideal) -> Option<QElem> {
        let y = self.principal_generator(x)?;
        let cands = [y.clone(), y.neg(), self.mul(&y, &self.eps0), self.mul(&y, &self.eps0).neg()];
        let limit = if self.eps0_norm == -1 { 4 } else { 2 };
        cands.into_iter().take(limit).find(|c| self.is_totally_positive(c))
    }

    /// Wide class number, by enumerating integral ideals up to the Minkowski
    /// bound `√disc / 2` and sorting them into classes.
    pub fn class_number(&self) -> u64 {
        let bound = ((self.disc as f64).sqrt() / 2.0).floor() as u64;
        let mut reps: Vec<Ideal> = Vec::new();
        for n in 1..=bound.max(1) {
            for i in self.ideals_of_norm(n) {
                let fresh =
                    reps.iter().all(|r| self.principal_generator(&self.ideal_mul(&i, &self.ideal_conj(r))).is_none());
                if fresh {
                    reps.push(i);
                }
            }
        }
        reps.len() as u64
    }

    /// Narrow class number `h⁺ = h · [E : E₊] / 2`.
    pub fn narrow_class_number(&self) -> u64 {
        let h = self.class_number();
        if self.eps0_norm == -1 {
            h
        } else {
            2 * h
        }
    }

    /// Generator of the totally positive units `E₊`.
    pub fn eps_plus(&self) -> QElem {
        if self.eps0_norm == 1 {
            self.eps0.clone()
        } else {
            self.mul(&self.eps0, &self.eps0)
        }
    }
}

// ---------------------------------------------------------------------------
// Residues modulo an integral ideal
// ---------------------------------------------------------------------------

/// Canonical residue `(x, y)` with `0 ≤ x < a`, `0 ≤ y < c` for the modulus
/// `[[a, b], [0, c]]`.
pub type Residue = (u64, u64);

#[derive(Clone, Debug)]
pub struct ResidueRing {
    field: QuadField,
    modulus: Ideal,
}

impl ResidueRing {
    pub fn new(field: &QuadField, modulus: &Ideal) -> Self {
        assert!(modulus.is_integral(), "integral modulus expected");
        ResidueRing { field: field.clone(), modulus: modulus.clone() }
    }

    pub fn size(&self) -> u64 {
        self.modulus.int_norm().to_u64().unwrap()
    }

    fn reduce_coords(&self, x: &BigInt, y: &BigInt) -> Residue {
        let (a, b, c) = (&self.modulus.a, &self.modulus.b, &self.modulus.c);
        let (q, r) = x.div_mod_floor(a);
        let y = (y - q * b).mod_floor(c);
        (r.to_u64().unwrap(), y.to_u64().unwrap())
    }

    /// Residue of an integral element.
    pub fn reduce(&self, x: &QElem) -> Residue {
        let (u, v) = x.int_coords().expect("integral element");
        self.reduce_coords(&u, &v)
    }

    pub fn elem(&self, r: &Residue) -> QElem {
        QElem::int(r.0 as i64, r.1 as i64)
    }

    pub fn mul(&self, r: &Residue, s: &Residue) -> Residue {
        self.reduce(&self.field.mul(&self.elem(r), &self.elem(s)))
    }

    pub fn elements(&self) -> Vec<Residue> {
        let a = self.modulus.a.to_u64().unwrap();
        let c = self.modulus.c.to_u64().unwrap();
        (0..a).flat_map(|x| (0..c).map(move |y| (x, y))).collect()
    }

    pub fn is_unit(&self, r: &Residue) -> bool {
        let x = self.elem(r);
        if x.is_zero() {
            return self.modulus.is_unit();
        }
        self.field.coprime(&self.field.principal_ideal(&x), &self.modulus)
    }

    pub fn units(&self) -> Vec<Residue> {
        self.elements().into_iter().filter(|r| self.is_unit(r)).collect()
    }

    pub fn one(&self) -> Residue {
        self.reduce(&QElem::one())
    }
}

// ---------------------------------------------------------------------------
// Narrow ray class groups
// ---------------------------------------------------------------------------

/// Narrow ray class group `Cl⁺_𝔪 = I^𝔪 / P^𝔪`.
///
/// Presentation generators are the classes of fixed narrow class
/// representatives `r_C` (coprime to `𝔪`, with norm prime to `N𝔪`) followed
/// by generators of `(𝒪/𝔪)^*`, mapped through `u ↦ (x)` for a totally positive
/// lift `x`. Relations: those of `(𝒪/𝔪)^*`, the class of `𝒪`, the totally
/// positive fundamental unit, and the multiplication table
/// `r_C·r_D = β·r_E` with `β ≫ 0`. The order is certified against the exact
/// sequence `|Cl⁺_𝔪| = h⁺ · |(𝒪/𝔪)^*| / |image of E₊|`.
#[derive(Clone, Debug)]
pub struct RayClassGroup {
    field: QuadField,
    modulus: Ideal,
    residue: ResidueRing,
    units: Presentation<Residue>,
    reps: Vec<Ideal>,
    h_plus: u64,
    eps_m: QElem,
    eps_m_exponent: u64,
    group: AbelianGroup,
}

impl RayClassGroup {
    pub fn new(field: &QuadField, modulus: &Ideal) -> Result<Self> {
        if !modulus.is_integral() {
            return Err(Error::InvalidArgument("modulus must be integral".into()));
        }
        let residue = ResidueRing::new(field, modulus);
        let unit_list = residue.units();
        let one = residue.one();
        let units = Presentation::build(&unit_list, &one, |x, y| residue.mul(x, y));
        let h_plus = field.narrow_class_number();
        let nm = modulus.int_norm().to_u64().unwrap();

        let mut reps: Vec<Ideal> = Vec::new();
        'outer: for n in 1..=IDEAL_SEARCH_LIMIT {
            if n.gcd(&nm) != 1 {
                continue;
            }
            for i in field.ideals_of_norm(n) {
                let fresh = reps
                    .iter()
                    .all(|r| field.totally_positive_generator(&field.ideal_mul(&i, &field.ideal_conj(r))).is_none());
                if fresh {
                    reps.push(i);
                    if reps.len() as u64 == h_plus {
                        break 'outer;
                    }
                }
            }
        }
        if (reps.len() as u64) < h_plus {
            return Err(Error::SearchIncomplete(format!(
                "found {} of {} narrow classes below norm {}",
                reps.len(),
                h_plus,
                IDEAL_SEARCH_LIMIT
            )));
        }

        let eps_plus = field.eps_plus();
        let mut ray = RayClassGroup {
            field: field.clone(),
            modulus: modulus.clone(),
            residue,
            units,
            reps,
            h_plus,
            eps_m: QElem::one(),
            eps_m_exponent: 1,
            group: AbelianGroup::trivial(),
        };
        // E_{𝔪,+} = ⟨ε₊^j⟩ with j the order of ε₊ modulo 𝔪
        let mut j = 1u64;
        let mut pw = eps_plus.clone();
        while ray.residue.reduce(&pw) != one {
            pw = field.mul(&pw, &eps_plus);
            j += 1;
        }
        ray.eps_m = pw;
        ray.eps_m_exponent = j;

        let hp = h_plus as usize;
        let r = ray.units.gens.len();
        let ngens = hp + r;
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for row in ray.units.relations.row_vecs() {
            let mut v = vec![BigInt::zero(); hp];
            v.extend(row);
            rows.push(v);
        }
        let mut e0 = vec![BigInt::zero(); ngens];
        e0[0] = BigInt::one();
        rows.push(e0);
        rows.push(ray.unit_vector(&ray.residue.reduce(&eps_plus)));
        for c in 0..hp {
            for d in c..hp {
                let prod = field.ideal_mul(&ray.reps[c], &ray.reps[d]);
                let mut v = ray.class_vector(&prod)?;
                for x in v.iter_mut() {
                    *x = -x.clone();
                }
                v[c] += 1;
                v[d] += 1;
                rows.push(v);
            }
        }
        ray.group = AbelianGroup::from_relations(ngens, &IntMatrix::from_rows(rows, ngens))?;
        let expected = h_plus * unit_list.len() as u64 / j;
        if ray.group.order() != expected {
            return Err(Error::SearchIncomplete(format!(
                "ray class group order {} disagrees with the exact sequence value {}",
                ray.group.order(),
                expected
            )));
        }
        Ok(ray)
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn modulus(&self) -> &Ideal {
        &self.modulus
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        self.group.invariants()
    }

    pub fn narrow_class_number(&self) -> u64 {
        self.h_plus
    }

    /// Narrow class representatives used as presentation generators.
    pub fn class_reps(&self) -> &[Ideal] {
        &self.reps
    }

    pub fn unit_count(&self) -> u64 {
        self.units.words.len() as u64
    }

    /// Generator `ε` of `E_{𝔪,+}` and its exponent over `ε₊`.
    pub fn eps_m(&self) -> (&QElem, u64) {
        (&self.eps_m, self.eps_m_exponent)
    }

    pub fn residue_ring(&self) -> &ResidueRing {
        &self.residue
    }

    fn unit_vector(&self, u: &Residue) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.h_plus as usize];
        v.extend(self.units.word(u).iter().map(|&x| BigInt::from(x)));
        v
    }

    fn residue_inverse(&self, u: &Residue) -> Residue {
        let one = self.residue.one();
        *self.units.words.keys().find(|v| self.residue.mul(u, v) == one).expect("unit residue")
    }

    /// Narrow class index `E` and `y ≫ 0` with `𝔟 · r̄_E = (y)`.
    fn narrow_class(&self, b: &Ideal) -> Result<(usize, QElem)> {
        for (e, r) in self.reps.iter().enumerate() {
            let prod = self.field.ideal_mul(b, &self.field.ideal_conj(r));
            if let Some(y) = self.field.totally_positive_generator(&prod) {
                return Ok((e, y));
            }
        }
        Err(Error::SearchIncomplete(format!("no narrow class found for {b}")))
    }

    fn class_vector(&self, b: &Ideal) -> Result<Vec<BigInt>> {
        let (e, y) = self.narrow_class(b)?;
        // 𝔟 = (y / N r_E) · r_E with y / N r_E totally positive
        let nr = self.reps[e].int_norm();
        let ry = self.residue.reduce(&y);
        let rn = self.residue.reduce(&QElem::from_ints(nr, BigInt::zero()));
        let x = self.residue.mul(&ry, &self.residue_inverse(&rn));
        let mut v = self.unit_vector(&x);
        v[e] += 1;
        Ok(v)
    }

    /// Class of an integral ideal coprime to the modulus.
    pub fn class_of(&self, b: &Ideal) -> Result<Elem> {
        if !b.is_integral() || !self.field.coprime(b, &self.modulus) {
            return Err(Error::InvalidArgument(format!("{b} is not integral and coprime to the modulus")));
        }
        Ok(self.group.reduce(&self.class_vector(b)?))
    }

    /// Class of `(x)` for an integral element `x`, any signs.
    pub fn class_of_element(&self, x: &QElem) -> Result<Elem> {
        self.class_of(&self.field.principal_ideal(x))
    }

    /// Class of `(x)` for an integral totally positive `x` prime to `𝔪`.
    fn class_of_totally_positive(&self, x: &QElem) -> Elem {
        let mut v = vec![BigInt::zero(); self.h_plus as usize];
        v.extend(self.units.word(&self.residue.reduce(x)).iter().map(|&t| BigInt::from(t)));
        self.group.reduce(&v)
    }

    /// A totally positive integral element congruent to `u` modulo `𝔪`.
    fn positive_lift(&self, u: &Residue) -> QElem {
        let x = self.residue.elem(u);
        let nm = rat_int(self.modulus.int_norm());
        let mut n = Rational::one();
        loop {
            let y = x.add(&QElem::rational(&nm * &n));
            if self.field.is_totally_positive(&y) {
                return y;
            }
            n *= rat_int(2);
        }
    }

    /// Images of this group's presentation generators in `other`, whose
    /// modulus must divide this one.
    pub fn map_to(&self, other: &RayClassGroup) -> Result<Vec<Elem>> {
        if !self.modulus.is_subset_of(&other.modulus) {
            return Err(Error::InvalidArgument("target modulus does not divide source modulus".into()));
        }
        let mut images = Vec::new();
        for r in &self.reps {
            images.push(other.class_of(r)?);
        }
        for u in &self.units.gens {
            images.push(other.class_of_totally_positive(&self.positive_lift(u)));
        }
        Ok(images)
    }

    /// Pushes an element through a map given by generator images.
    pub fn apply_map(&self, target: &AbelianGroup, images: &[Elem], e: &Elem) -> Elem {
        let lift = self.group.lift(e);
        let ord = BigInt::from(target.order().max(1));
        let mut out = target.identity();
        for (c, img) in lift.iter().zip(images) {
            let c = c.mod_floor(&ord).to_i64().unwrap();
            out = target.add(&out, &target.scale(img, c));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Places and abelian extensions
// ---------------------------------------------------------------------------

/// A place of the base field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    /// A rational prime (base field `ℚ`).
    Rational(u64),
    /// A prime ideal of a quadratic field.
    Prime(Ideal),
    /// A real place: embedding index (always 0 over `ℚ`).
    Infinite(usize),
}

impl Place {
    pub fn is_finite(&self) -> bool {
        !matches!(self, Place::Infinite(_))
    }

    pub fn norm(&self) -> BigInt {
        match self {
            Place::Rational(p) => BigInt::from(*p),
            Place::Prime(i) => i.int_norm(),
            Place::Infinite(_) => BigInt::one(),
        }
    }

    pub fn residue_characteristic(&self) -> Option<u64> {
        match self {
            Place::Rational(p) => Some(*p),
            Place::Prime(i) => i.residue_characteristic(),
            Place::Infinite(_) => None,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Rational(p) => write!(f, "{p}"),
            Place::Prime(i) => write!(f, "{i}"),
            Place::Infinite(i) => write!(f, "inf{}", i + 1),
        }
    }
}

/// Local Galois data of an abelian extension at a place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceData {
    pub place: Place,
    pub norm: BigInt,
    /// Inertia subgroup (all elements; trivial for infinite places).
    pub inertia: Vec<Elem>,
    /// A representative in `G` of the Frobenius in `G/I_v`, or the generator
    /// of the decomposition group at a real place.
    pub frobenius: Elem,
    /// Decomposition group (all elements).
    pub decomposition: Vec<Elem>,
}

impl PlaceData {
    fn new(g: &AbelianGroup, place: Place, inertia: Vec<Elem>, frobenius: Elem) -> Self {
        let mut gens = inertia.clone();
        gens.push(frobenius.clone());
        let decomposition = g.closure(&gens);
        PlaceData { norm: place.norm(), place, inertia, frobenius, decomposition }
    }

    pub fn is_unramified(&self) -> bool {
        self.inertia.len() <= 1
    }
}

/// Abelian extension `K/F` of a real quadratic field, the fixed field of the
/// subgroup `H` of `Cl⁺_𝔪`; `G = Cl⁺_𝔪 / H`.
#[derive(Clone, Debug)]
pub struct QuadExtension {
    ray: RayClassGroup,
    kernel: Vec<Elem>,
    gal: AbelianGroup,
}

impl QuadExtension {
    pub fn new(ray: RayClassGroup, kernel: Vec<Elem>) -> Self {
        let gal = ray.group().quotient(&kernel);
        QuadExtension { ray, kernel, gal }
    }

    /// The full narrow ray class field.
    pub fn full(ray: RayClassGroup) -> Self {
        Self::new(ray, Vec::new())
    }

    pub fn ray(&self) -> &RayClassGroup {
        &self.ray
    }

    pub fn field(&self) -> &QuadField {
        self.ray.field()
    }

    pub fn kernel(&self) -> &[Elem] {
        &self.kernel
    }

    pub fn galois_group(&self) -> &AbelianGroup {
        &self.gal
    }

    pub fn to_gal(&self, e: &Elem) -> Elem {
        self.ray.group().project(&self.gal, e)
    }

    /// Artin symbol of an integral ideal coprime to the modulus.
    pub fn artin(&self, b: &Ideal) -> Result<Elem> {
        Ok(self.to_gal(&self.ray.class_of(b)?))
    }

    /// Prime ideals dividing the modulus with their exponents.
    pub fn modulus_primes(&self) -> Vec<(Ideal, u32)> {
        self.field().factor(self.ray.modulus())
    }

    /// The ray class group of `𝔪` with `v` removed, and the map to it.
    fn without_prime(&self, p: &Ideal) -> Result<(RayClassGroup, Vec<Elem>)> {
        let f = self.field();
        let e = self
            .modulus_primes()
            .into_iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| e)
            .ok_or_else(|| Error::InvalidArgument(format!("{p} does not divide the modulus")))?;
        let m0 = f.ideal_div(self.ray.modulus(), &f.ideal_pow(p, e));
        let ray0 = RayClassGroup::new(f, &m0)?;
        let images = self.ray.map_to(&ray0)?;
        Ok((ray0, images))
    }

    pub fn place_data(&self, v: &Place) -> Result<PlaceData> {
        let f = self.field();
        match v {
            Place::Prime(p) => {
                if f.coprime(p, self.ray.modulus()) {
                    let fr = self.artin(p)?;
                    return Ok(PlaceData::new(&self.gal, v.clone(), vec![self.gal.identity()], fr));
                }
                let (ray0, images) = self.without_prime(p)?;
                let target = ray0.class_of(p)?;
                let mut inertia_gens = Vec::new();
                let mut frob = None;
                for z in self.ray.group().elements() {
                    let img = self.ray.apply_map(ray0.group(), &images, &z);
                    if img == ray0.group().identity() {
                        inertia_gens.push(self.to_gal(&z));
                    }
                    if frob.is_none() && img == target {
                        frob = Some(self.to_gal(&z));
                    }
                }
                let inertia = self.gal.closure(&inertia_gens);
                Ok(PlaceData::new(&self.gal, v.clone(), inertia, frob.expect("surjective map")))
            }
            Place::Infinite(i) => {
                let x = self.sign_element(*i)?;
                let s = self.to_gal(&self.ray.class_of_element(&x)?);
                Ok(PlaceData::new(&self.gal, v.clone(), vec![self.gal.identity()], s))
            }
            Place::Rational(_) => Err(Error::InvalidArgument("rational prime over a quadratic field".into())),
        }
    }

    /// `x ≡ 1 mod 𝔪`, negative at embedding `i` and positive at the other.
    fn sign_element(&self, i: usize) -> Result<QElem> {
        let f = self.field();
        let [m1, m2] = self.ray.modulus().basis();
        let mut r = 2i64;
        while r <= SIGN_SEARCH_LIMIT {
            for s in -r..=r {
                for t in -r..=r {
                    let x = QElem::one().add(&m1.scale(&rat_int(s))).add(&m2.scale(&rat_int(t)));
                    if f.sign(&x, i) == Ordering::Less && f.sign(&x, 1 - i) == Ordering::Greater {
                        return Ok(x);
                    }
                }
            }
            r *= 2;
        }
        Err(Error::SearchIncomplete(format!("sign search up to box {SIGN_SEARCH_LIMIT}")))
    }

    /// The same extension presented with `v` removed from the modulus, and
    /// for each element of the new Galois group its label in the old one.
    /// Fails if `v` ramifies.
    pub fn drop_prime(&self, p: &Ideal) -> Result<(QuadExtension, Vec<Elem>)> {
        let (ray0, images) = self.without_prime(p)?;
        let mut kernel0 = Vec::new();
        for h in &self.kernel {
            kernel0.push(self.ray.apply_map(ray0.group(), &images, h));
        }
        let elems = self.ray.group().elements();
        let imgs: Vec<Elem> = elems.iter().map(|z| self.ray.apply_map(ray0.group(), &images, z)).collect();
        for (z, img) in elems.iter().zip(&imgs) {
            if *img == ray0.group().identity() && self.to_gal(z) != self.gal.identity() {
                return Err(Error::RamifiedNotInS);
            }
        }
        let ext0 = QuadExtension::new(ray0, kernel0);
        let mut relabel = vec![None; ext0.gal.order() as usize];
        for (z, img) in elems.iter().zip(&imgs) {
            let g0 = ext0.to_gal(img);
            let idx = ext0.gal.index_of(&g0);
            if relabel[idx].is_none() {
                relabel[idx] = Some(self.to_gal(z));
            }
        }
        Ok((ext0, relabel.into_iter().map(|x| x.expect("surjective map")).collect()))
    }
}

// ---------------------------------------------------------------------------
// Abelian extensions of ℚ
// ---------------------------------------------------------------------------

/// Subfield `K` of `ℚ(μ_f)` cut out by a subgroup `H ⊆ (ℤ/f)^*`; the ray class
/// group of `f·∞` is `(ℤ/f)^*`, with `(n)`, `n > 0`, in the class of `n mod f`.
#[derive(Clone, Debug)]
pub struct RationalExtension {
    f: u64,
    pres: Presentation<u64>,
    kernel: Vec<Elem>,
    gal: AbelianGroup,
}

fn mul_mod_rep(f: u64, a: u64, b: u64) -> u64 {
    // representatives live in [1, f]
    ((a as u128 * b as u128 - 1) % f as u128) as u64 + 1
}

impl RationalExtension {
    /// `K = ℚ(μ_f)^H` with `H` generated by the given residues.
    pub fn new(f: u64, kernel_residues: &[u64]) -> Result<Self> {
        if f == 0 {
            return Err(Error::InvalidArgument("conductor must be positive".into()));
        }
        let pres = Self::units_presentation(f);
        let mut kernel = Vec::new();
        for &a in kernel_residues {
            let r = (a + f - 1) % f + 1;
            if r.gcd(&f) != 1 {
                return Err(Error::InvalidArgument(format!("{a} is not a unit mod {f}")));
            }
            kernel.push(pres.label(&r));
        }
        Ok(Self::from_labels(f, pres, kernel))
    }

    /// All subfields of `ℚ(μ_f)`, one per subgroup of `(ℤ/f)^*`.
    pub fn all_subfields(f: u64) -> Vec<Self> {
        let pres = Self::units_presentation(f);
        pres.group.all_subgroups().into_iter().map(|h| Self::from_labels(f, pres.clone(), h)).collect()
    }

    fn units_presentation(f: u64) -> Presentation<u64> {
        let units: Vec<u64> = (1..=f).filter(|a| a.gcd(&f) == 1).collect();
        Presentation::build(&units, &1, |a, b| mul_mod_rep(f, *a, *b))
    }

    fn from_labels(f: u64, pres: Presentation<u64>, kernel: Vec<Elem>) -> Self {
        let gal = pres.group.quotient(&kernel);
        RationalExtension { f, pres, kernel, gal }
    }

    pub fn conductor(&self) -> u64 {
        self.f
    }

    pub fn ray_group(&self) -> &AbelianGroup {
        &self.pres.group
    }

    pub fn kernel(&self) -> &[Elem] {
        &self.kernel
    }

    pub fn galois_group(&self) -> &AbelianGroup {
        &self.gal
    }

    /// Representatives `a ∈ [1, f]` of `(ℤ/f)^*`.
    pub fn residues(&self) -> Vec<u64> {
        self.pres.words.keys().cloned().collect()
    }

    /// Ray class of a nonzero integer coprime to `f` (sign ignored: classes of
    /// the positive generator of the ideal).
    pub fn class_of(&self, a: i64) -> Result<Elem> {
        let r = (a.unsigned_abs() + self.f - 1) % self.f + 1;
        if r.gcd(&self.f) != 1 {
            return Err(Error::InvalidArgument(format!("{a} is not prime to {}", self.f)));
        }
        Ok(self.pres.label(&r))
    }

    /// Ray class of the residue `a mod f` (signed residues allowed).
    pub fn class_of_residue(&self, a: i64) -> Result<Elem> {
        let f = self.f as i64;
        let r = (a - 1).rem_euclid(f) as u64 + 1;
        if r.gcd(&self.f) != 1 {
            return Err(Error::InvalidArgument(format!("{a} is not prime to {}", self.f)));
        }
        Ok(self.pres.label(&r))
    }

    pub fn to_gal(&self, e: &Elem) -> Elem {
        self.pres.group.project(&self.gal, e)
    }

    /// Galois image of the residue `a mod f`.
    pub fn gal_of_residue(&self, a: i64) -> Result<Elem> {
        Ok(self.to_gal(&self.class_of_residue(a)?))
    }

    /// Prime factors of the conductor with exponents.
    pub fn modulus_primes(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut m = self.f;
        let mut p = 2;
        while m > 1 {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        out
    }

    /// `K` is totally real iff `−1 ∈ H`.
    pub fn is_totally_real(&self) -> bool {
        self.f <= 2 || self.gal_of_residue(-1).map(|g| g == self.gal.identity()).unwrap_or(false)
    }

    fn split_off(&self, p: u64) -> (u64, u64) {
        let mut pe = 1;
        let mut f0 = self.f;
        while f0.is_multiple_of(p) {
            f0 /= p;
            pe *= p;
        }
        (pe, f0)
    }

    /// CRT: the residue mod `f` that is `x mod f₀` and `y mod pᵉ`.
    fn crt(&self, pe: u64, f0: u64, x: u64, y: u64) -> u64 {
        (1..=self.f).find(|a| a % f0 == x % f0 && a % pe == y % pe).expect("coprime moduli")
    }

    pub fn place_data(&self, v: &Place) -> Result<PlaceData> {
        match v {
            Place::Rational(p) => {
                let p = *p;
                if !self.f.is_multiple_of(p) {
                    let fr = self.to_gal(&self.class_of(p as i64)?);
                    return Ok(PlaceData::new(&self.gal, v.clone(), vec![self.gal.identity()], fr));
                }
                let (pe, f0) = self.split_off(p);
                let mut gens = Vec::new();
                for a in self.residues() {
                    if a % f0 == 1 % f0 {
                        gens.push(self.to_gal(&self.pres.label(&a)));
                    }
                }
                let inertia = self.gal.closure(&gens);
                let a = self.crt(pe, f0, p % f0, 1);
                let fr = self.to_gal(&self.pres.label(&a));
                Ok(PlaceData::new(&self.gal, v.clone(), inertia, fr))
            }
            Place::Infinite(0) => {
                let s = self.gal_of_residue(-1)?;
                Ok(PlaceData::new(&self.gal, v.clone(), vec![self.gal.identity()], s))
            }
            _ => Err(Error::InvalidArgument(format!("{v} is not a place of ℚ"))),
        }
    }

    /// Same field with `p` removed from the conductor, plus the relabelling
    /// of the new Galois group into the old one. Fails if `p` ramifies.
    pub fn drop_prime(&self, p: u64) -> Result<(RationalExtension, Vec<Elem>)> {
        if !self.f.is_multiple_of(p) {
            return Err(Error::InvalidArgument(format!("{p} does not divide {}", self.f)));
        }
        let (_, f0) = self.split_off(p);
        let small = Self::units_presentation(f0);
        let reduce = |a: u64| (a - 1) % f0 + 1;
        for a in self.residues() {
            if a % f0 == 1 % f0 && self.to_gal(&self.pres.label(&a)) != self.gal.identity() {
                return Err(Error::RamifiedNotInS);
            }
        }
        let mut kernel0 = Vec::new();
        for a in self.residues() {
            if self.to_gal(&self.pres.label(&a)) == self.gal.identity() {
                kernel0.push(small.label(&reduce(a)));
            }
        }
        let ext0 = Self::from_labels(f0, small, kernel0);
        let mut relabel = vec![None; ext0.gal.order() as usize];
        for a in self.residues() {
            let g0 = ext0.to_gal(&ext0.pres.label(&reduce(a)));
            let idx = ext0.gal.index_of(&g0);
            if relabel[idx].is_none() {
                relabel[idx] = Some(self.to_gal(&self.pres.label(&a)));
            }
        }
        Ok((ext0, relabel.into_iter().map(|x| x.expect("surjective reduction")).collect()))
    }
}

/// `n = ∏ p^e` by trial division, primes increasing.
fn prime_power_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_units() {
        let f5 = QuadField::new(5).unwrap();
        assert_eq!(f5.eps0(), &QElem::int(0, 1));
        assert_eq!(f5.eps0_norm(), -1);
        let f3 = QuadField::new(3).unwrap();
        assert_eq!(f3.eps0(), &QElem::int(2, 1));
        assert_eq!(f3.eps0_norm(), 1);
        let f2 = QuadField::new(2).unwrap();
        assert_eq!(f2.eps0(), &QElem::int(1, 1));
        assert_eq!(f2.eps0_norm(), -1);
        assert!(matches!(QuadField::new(12), Err(Error::NotSquarefree(12))));
    }

    #[test]
    fn prime_split_examples() {
        let f = QuadField::new(5).unwrap();
        let s = f.prime_split(11);
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|p| p.ideal.norm() == rat_int(11)));
        let s = f.prime_split(2);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].ideal.norm(), rat_int(4));
        let s = f.prime_split(5);
        assert_eq!((s.len(), s[0].ramification), (1, 2));
        assert_eq!(s[0].ideal.norm(), rat_int(5));
    }

    #[test]
    fn ray_class_examples() {
        let f5 = QuadField::new(5).unwrap();
        assert_eq!(RayClassGroup::new(&f5, &Ideal::unit()).unwrap().order(), 1);
        let f3 = QuadField::new(3).unwrap();
        let r = RayClassGroup::new(&f3, &Ideal::unit()).unwrap();
        assert_eq!(r.cyclic_orders(), &[2]);
        let p5 = f5.prime_split(5)[0].ideal.clone();
        let r = RayClassGroup::new(&f5, &p5).unwrap();
        // (𝒪/√5)^* ≅ 𝔽₅^*, and ε₊ = ω² ≡ 3² = 4 has order 2 there
        assert_eq!(r.eps_m().1, 2);
        assert_eq!(r.order(), 2);
    }

    #[test]
    fn factor_round_trip() {
        let f = QuadField::new(7).unwrap();
        let m = f.principal_ideal(&QElem::int(12, 0));
        let fac = f.factor(&m);
        let back = fac.iter().fold(Ideal::unit(), |acc, (p, e)| f.ideal_mul(&acc, &f.ideal_pow(p, *e)));
        assert_eq!(back, m);
    }

    #[test]
    fn gaussian_places() {
        let k = RationalExtension::new(4, &[]).unwrap();
        assert_eq!(k.galois_group().order(), 2);
        let inf = k.place_data(&Place::Infinite(0)).unwrap();
        assert_ne!(inf.frobenius, k.galois_group().identity());
        let two = k.place_data(&Place::Rational(2)).unwrap();
        assert_eq!(two.inertia.len(), 2);
        let five = k.place_data(&Place::Rational(5)).unwrap();
        assert_eq!(five.frobenius, k.galois_group().identity());
        assert!(matches!(k.drop_prime(2), Err(Error::RamifiedNotInS)));
    }
}
