//! Group rings `ℚ[G]` of finite abelian Galois groups: Stickelberger elements
//! at `s = −k`, smoothing factors, the local ideals `𝓘_v^(k)`, their products,
//! exact (localised) membership, and annihilator ideals of cyclotomic twists.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groups::{fmt_elem, AbelianGroup, Elem};
use crate::linalg::{
    fmt_rational, hnf_only, lattice_intersection, rat_int, span_contains_localized, supported_on, IntMatrix, Rational,
};
use crate::quadfield::{Place, PlaceData, QuadExtension, RationalExtension};
use crate::zetaval::{all_partial_zetas, partial_zeta_q};

// ---------------------------------------------------------------------------
// Abelian extensions, uniformly
// ---------------------------------------------------------------------------

/// What the group-ring constructions need from an abelian extension `K/F`
/// presented as a quotient of a narrow ray class group.
pub trait AbelianExtension: Sized {
    fn galois_group(&self) -> &AbelianGroup;
    /// `[F : ℚ]`.
    fn base_degree(&self) -> u32;
    fn infinite_places(&self) -> Vec<Place>;
    /// Finite primes dividing the modulus.
    fn modulus_places(&self) -> Vec<Place>;
    fn place_data(&self, v: &Place) -> Result<PlaceData>;
    /// `ζ_{S_𝔪}(σ, −k)` for every `σ ∈ G` in element order, where `S_𝔪` is
    /// the set of primes dividing the modulus.
    fn partial_zetas(&self, k: u32) -> Result<Vec<Rational>>;
    /// The same field with `v` removed from the modulus, plus the label in
    /// `G` of every element of the new Galois group.
    fn drop_place(&self, v: &Place) -> Result<(Self, Vec<Elem>)>;
}

impl AbelianExtension for RationalExtension {
    fn galois_group(&self) -> &AbelianGroup {
        RationalExtension::galois_group(self)
    }

    fn base_degree(&self) -> u32 {
        1
    }

    fn infinite_places(&self) -> Vec<Place> {
        vec![Place::Infinite(0)]
    }

    fn modulus_places(&self) -> Vec<Place> {
        self.modulus_primes().into_iter().map(|(p, _)| Place::Rational(p)).collect()
    }

    fn place_data(&self, v: &Place) -> Result<PlaceData> {
        RationalExtension::place_data(self, v)
    }

    fn partial_zetas(&self, k: u32) -> Result<Vec<Rational>> {
        let g = self.galois_group();
        let mut out = vec![Rational::zero(); g.order() as usize];
        for a in self.residues() {
            let sigma = self.gal_of_residue(a as i64)?;
            out[g.index_of(&sigma)] += partial_zeta_q(self.conductor(), a, k)?;
        }
        Ok(out)
    }

    fn drop_place(&self, v: &Place) -> Result<(Self, Vec<Elem>)> {
        match v {
            Place::Rational(p) => self.drop_prime(*p),
            _ => Err(Error::InvalidArgument(format!("{v} is not a finite place of ℚ"))),
        }
    }
}

impl AbelianExtension for QuadExtension {
    fn galois_group(&self) -> &AbelianGroup {
        QuadExtension::galois_group(self)
    }

    fn base_degree(&self) -> u32 {
        2
    }

    fn infinite_places(&self) -> Vec<Place> {
        vec![Place::Infinite(0), Place::Infinite(1)]
    }

    fn modulus_places(&self) -> Vec<Place> {
        self.modulus_primes().into_iter().map(|(p, _)| Place::Prime(p)).collect()
    }

    fn place_data(&self, v: &Place) -> Result<PlaceData> {
        QuadExtension::place_data(self, v)
    }

    fn partial_zetas(&self, k: u32) -> Result<Vec<Rational>> {
        let g = self.galois_group();
        let mut out = vec![Rational::zero(); g.order() as usize];
        for (class, z) in all_partial_zetas(self.ray(), k)? {
            out[g.index_of(&self.to_gal(&class))] += z;
        }
        Ok(out)
    }

    fn drop_place(&self, v: &Place) -> Result<(Self, Vec<Elem>)> {
        match v {
            Place::Prime(p) => self.drop_prime(p),
            _ => Err(Error::InvalidArgument(format!("{v} is not a prime ideal"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Group rings
// ---------------------------------------------------------------------------

/// Multiplication data of `ℤ[G]` in the element order of `G`.
#[derive(Debug)]
pub struct GroupRing {
    group: AbelianGroup,
    elements: Vec<Elem>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl GroupRing {
    pub fn new(group: &AbelianGroup) -> Arc<Self> {
        let elements = group.elements();
        let table =
            elements.iter().map(|a| elements.iter().map(|b| group.index_of(&group.add(a, b))).collect()).collect();
        let inverse = elements.iter().map(|a| group.index_of(&group.neg(a))).collect();
        Arc::new(GroupRing { group: group.clone(), elements, table, inverse })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn index_of(&self, g: &Elem) -> usize {
        self.group.index_of(g)
    }
}

fn same_ring(a: &Arc<GroupRing>, b: &Arc<GroupRing>) -> bool {
    Arc::ptr_eq(a, b) || a.group == b.group
}

/// An element of `ℚ[G]`, stored densely in the element order of `G`.
#[derive(Clone, Debug)]
pub struct GroupRingElem {
    ring: Arc<GroupRing>,
    coeffs: Vec<Rational>,
}

impl PartialEq for GroupRingElem {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.coeffs == other.coeffs
    }
}

impl Eq for GroupRingElem {}

impl GroupRingElem {
    pub fn zero(ring: &Arc<GroupRing>) -> Self {
        GroupRingElem { ring: ring.clone(), coeffs: vec![Rational::zero(); ring.size()] }
    }

    /// `c·[1]`.
    pub fn scalar(ring: &Arc<GroupRing>, c: Rational) -> Self {
        let mut x = Self::zero(ring);
        x.coeffs[0] = c;
        x
    }

    pub fn one(ring: &Arc<GroupRing>) -> Self {
        Self::scalar(ring, Rational::one())
    }

    /// The basis element `[g]`.
    pub fn basis(ring: &Arc<GroupRing>, g: &Elem) -> Self {
        let mut x = Self::zero(ring);
        x.coeffs[ring.index_of(g)] = Rational::one();
        x
    }

    pub fn from_coeffs(ring: &Arc<GroupRing>, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != ring.size() {
            return Err(Error::DimensionMismatch(format!("{} coefficients for |G| = {}", coeffs.len(), ring.size())));
        }
        Ok(GroupRingElem { ring: ring.clone(), coeffs })
    }

    fn from_ints(ring: &Arc<GroupRing>, v: &[BigInt]) -> Self {
        GroupRingElem { ring: ring.clone(), coeffs: v.iter().map(|x| rat_int(x.clone())).collect() }
    }

    pub fn ring(&self) -> &Arc<GroupRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, g: &Elem) -> &Rational {
        &self.coeffs[self.ring.index_of(g)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients, if integral.
    pub fn int_coeffs(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.coeffs.iter().map(|c| c.to_integer()).collect())
    }

    /// Least common denominator of the coefficients.
    pub fn denominator(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    fn check(&self, other: &Self) {
        assert!(same_ring(&self.ring, &other.ring), "elements of different group rings");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        GroupRingElem { ring: self.ring.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        GroupRingElem { ring: self.ring.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        GroupRingElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        GroupRingElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = vec![Rational::zero(); self.ring.size()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[self.ring.table[i][j]] += a * b;
                }
            }
        }
        GroupRingElem { ring: self.ring.clone(), coeffs: out }
    }

    /// `[g]·x`.
    pub fn shift(&self, g: &Elem) -> Self {
        let gi = self.ring.index_of(g);
        let mut out = vec![Rational::zero(); self.ring.size()];
        for (j, b) in self.coeffs.iter().enumerate() {
            out[self.ring.table[gi][j]] = b.clone();
        }
        GroupRingElem { ring: self.ring.clone(), coeffs: out }
    }

    /// The involution `[g] ↦ [g⁻¹]` (a ring automorphism, `G` being abelian).
    pub fn inv(&self) -> Self {
        let mut out = vec![Rational::zero(); self.ring.size()];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[self.ring.inverse[i]] = a.clone();
        }
        GroupRingElem { ring: self.ring.clone(), coeffs: out }
    }

    /// Image under the relabelling `idx ↦ map[idx]` into another group ring.
    fn transport(&self, target: &Arc<GroupRing>, map: &[Elem]) -> Self {
        let mut out = GroupRingElem::zero(target);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[target.index_of(&map[i])] += c;
        }
        out
    }

    /// `(label, "p/q")` pairs for the nonzero coefficients, in element order.
    pub fn labelled(&self) -> Vec<(String, String)> {
        self.ring
            .elements
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| (fmt_elem(g), fmt_rational(c)))
            .collect()
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.labelled();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = terms.into_iter().map(|(g, c)| format!("{c}·[{g}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An ideal of `ℤ[G]` given by generators, with its ℤ-basis computed once.
#[derive(Debug)]
pub struct GroupRingIdeal {
    ring: Arc<GroupRing>,
    generators: Vec<GroupRingElem>,
    basis: OnceLock<IntMatrix>,
}

impl Clone for GroupRingIdeal {
    fn clone(&self) -> Self {
        let basis = OnceLock::new();
        if let Some(b) = self.basis.get() {
            let _ = basis.set(b.clone());
        }
        GroupRingIdeal { ring: self.ring.clone(), generators: self.generators.clone(), basis }
    }
}

impl PartialEq for GroupRingIdeal {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.basis() == other.basis()
    }
}

impl Eq for GroupRingIdeal {}

impl GroupRingIdeal {
    /// The ideal generated by integral elements.
    pub fn new(ring: &Arc<GroupRing>, generators: Vec<GroupRingElem>) -> Result<Self> {
        if let Some(x) = generators.iter().find(|x| !x.is_integral()) {
            return Err(Error::InvalidArgument(format!("generator {x} is not integral")));
        }
        Ok(GroupRingIdeal { ring: ring.clone(), generators, basis: OnceLock::new() })
    }

    pub fn principal(x: &GroupRingElem) -> Result<Self> {
        Self::new(&x.ring, vec![x.clone()])
    }

    pub fn unit(ring: &Arc<GroupRing>) -> Self {
        GroupRingIdeal::new(ring, vec![GroupRingElem::one(ring)]).expect("integral")
    }

    pub fn zero(ring: &Arc<GroupRing>) -> Self {
        GroupRingIdeal::new(ring, Vec::new()).expect("integral")
    }

    /// Ideal with a known ℤ-basis (rows stable under `G`).
    fn from_basis(ring: &Arc<GroupRing>, rows: IntMatrix) -> Self {
        let generators = rows.row_vecs().iter().map(|r| GroupRingElem::from_ints(ring, r)).collect();
        let basis = OnceLock::new();
        let _ = basis.set(rows);
        GroupRingIdeal { ring: ring.clone(), generators, basis }
    }

    pub fn ring(&self) -> &Arc<GroupRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[GroupRingElem] {
        &self.generators
    }

    /// Hermite basis of the ideal as a ℤ-lattice in `ℤ^|G|`.
    pub fn basis(&self) -> &IntMatrix {
        self.basis.get_or_init(|| {
            let n = self.ring.size();
            let mut rows = Vec::new();
            for x in &self.generators {
                for g in &self.ring.elements {
                    rows.push(x.shift(g).int_coeffs().expect("integral generators"));
                }
            }
            hnf_only(&IntMatrix::from_rows(rows, n)).nonzero_rows()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.basis().rows() == 0
    }

    /// Rank of the ideal as a ℤ-module.
    pub fn rank(&self) -> usize {
        self.basis().rows()
    }

    /// `[ℤ[G] : I]` when finite.
    pub fn index(&self) -> Option<BigInt> {
        (self.rank() == self.ring.size()).then(|| self.basis().det().abs())
    }

    /// Generator of `I ∩ ℤ·[1]` (zero if trivial).
    pub fn integer_part(&self) -> BigInt {
        let n = self.ring.size();
        if self.is_zero() {
            return BigInt::zero();
        }
        let mut e = vec![BigInt::zero(); n];
        e[0] = BigInt::one();
        let line = IntMatrix::from_rows(vec![e], n);
        let meet = lattice_intersection(self.basis(), &line);
        if meet.rows() == 0 {
            BigInt::zero()
        } else {
            meet[(0, 0)].abs()
        }
    }

    /// The product ideal: the ℤ-span of `bᵢ·cₗ` over a ℤ-basis `bᵢ` of `self`
    /// and the generators `cₗ` of `other`.
    pub fn product(&self, other: &GroupRingIdeal) -> GroupRingIdeal {
        assert!(same_ring(&self.ring, &other.ring), "ideals of different group rings");
        let n = self.ring.size();
        let mut rows = Vec::new();
        for b in self.basis().row_vecs() {
            let b = GroupRingElem::from_ints(&self.ring, &b);
            for c in &other.generators {
                rows.push(b.mul(c).int_coeffs().expect("integral"));
            }
        }
        GroupRingIdeal::from_basis(&self.ring, hnf_only(&IntMatrix::from_rows(rows, n)).nonzero_rows())
    }

    /// `x ∈ I ⊗ ℤ[1/ℓ : ℓ ∈ allowance]`; `x` may only have denominators
    /// supported on the allowance.
    pub fn contains(&self, x: &GroupRingElem, allowance: &BTreeSet<u64>) -> Result<bool> {
        assert!(same_ring(&self.ring, &x.ring), "element of a different group ring");
        let allowed: BTreeSet<BigInt> = allowance.iter().map(|&p| BigInt::from(p)).collect();
        if !supported_on(&x.denominator(), &allowed) {
            return Err(Error::NonIntegralOutsideAllowance);
        }
        Ok(span_contains_localized(self.basis(), &x.coeffs, &allowed))
    }

    /// Containment of ideals.
    pub fn is_subset_of(&self, other: &GroupRingIdeal) -> bool {
        let none = BTreeSet::new();
        self.basis()
            .row_vecs()
            .iter()
            .all(|r| other.contains(&GroupRingElem::from_ints(&self.ring, r), &none).expect("integral"))
    }
}

/// Product of a sequence of ideals (the unit ideal when empty).
pub fn ideal_product(ring: &Arc<GroupRing>, ideals: &[GroupRingIdeal]) -> GroupRingIdeal {
    ideals.iter().fold(GroupRingIdeal::unit(ring), |acc, i| acc.product(i))
}

// ---------------------------------------------------------------------------
// Stickelberger elements
// ---------------------------------------------------------------------------

fn pow_big(b: &BigInt, e: u32) -> BigInt {
    num_traits::pow(b.clone(), e as usize)
}

/// `1 − c·[g⁻¹]`.
fn euler_factor(ring: &Arc<GroupRing>, c: BigInt, g: &Elem) -> GroupRingElem {
    let ginv = ring.group().neg(g);
    GroupRingElem::one(ring).sub(&GroupRingElem::basis(ring, &ginv).scale(&rat_int(c)))
}

/// `Θ_S(K/F, −k) = Σ_σ ζ_S(σ, −k)[σ⁻¹]`. The modulus is first shrunk to
/// the primes of `S` (each dropped prime must be unramified); the remaining
/// primes of `S` contribute Euler factors `1 − N(v)^k [σ_v⁻¹]`.
pub fn stickelberger<E: AbelianExtension>(ext: &E, s: &[Place], k: u32) -> Result<GroupRingElem> {
    if let Some(v) = s.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{v} is not a finite place")));
    }
    let ring = GroupRing::new(ext.galois_group());
    if let Some(v) = ext.modulus_places().into_iter().find(|v| !s.contains(v)) {
        let (small, relabel) = ext.drop_place(&v)?;
        let theta = stickelberger(&small, s, k)?;
        return Ok(theta.transport(&ring, &relabel));
    }
    let zetas = ext.partial_zetas(k)?;
    let mut theta = GroupRingElem::zero(&ring);
    for (i, z) in zetas.into_iter().enumerate() {
        theta.coeffs[ring.inverse[i]] += z;
    }
    let modulus = ext.modulus_places();
    for v in s.iter().filter(|v| !modulus.contains(v)) {
        let pd = ext.place_data(v)?;
        theta = euler_factor(&ring, pow_big(&pd.norm, k), &pd.frobenius).mul(&theta);
    }
    Ok(theta)
}

/// `δ_T(−k) = ∏_{𝔮 ∈ T} (1 − N(𝔮)^{1+k}[σ_𝔮⁻¹])`.
pub fn delta_t<E: AbelianExtension>(ext: &E, t: &[Place], k: u32) -> Result<GroupRingElem> {
    let ring = GroupRing::new(ext.galois_group());
    let mut out = GroupRingElem::one(&ring);
    for q in t {
        if !q.is_finite() {
            return Err(Error::InvalidArgument(format!("{q} is not a finite place")));
        }
        let pd = ext.place_data(q)?;
        if !pd.is_unramified() {
            return Err(Error::InvalidArgument(format!("{q} ramifies in K")));
        }
        out = out.mul(&euler_factor(&ring, pow_big(&pd.norm, k + 1), &pd.frobenius));
    }
    Ok(out)
}

/// `δ_T(−k)·θ`; `T` must avoid `S` and consist of unramified primes.
pub fn smooth<E: AbelianExtension>(
    theta: &GroupRingElem,
    ext: &E,
    s: &[Place],
    t: &[Place],
    k: u32,
) -> Result<GroupRingElem> {
    if t.iter().any(|q| s.contains(q)) {
        return Err(Error::TMeetsS);
    }
    let delta = delta_t(ext, t, k)?;
    Ok(delta.mul(&GroupRingElem { ring: delta.ring.clone(), coeffs: theta.coeffs.clone() }))
}

/// `Θ_{S,T}(K/F, −k)`.
pub fn stickelberger_smoothed<E: AbelianExtension>(ext: &E, s: &[Place], t: &[Place], k: u32) -> Result<GroupRingElem> {
    let theta = stickelberger(ext, s, k)?;
    smooth(&theta, ext, s, t, k)
}

/// `(−1)^n N(𝔮)^{−k} [σ_𝔮] Θ_{S,𝔮}(−k)`, the zeta side of the cap-product
/// identity for a single smoothing prime.
pub fn stick_rhs_cor53<E: AbelianExtension>(ext: &E, s: &[Place], q: &Place, k: u32) -> Result<GroupRingElem> {
    let theta = stickelberger_smoothed(ext, s, std::slice::from_ref(q), k)?;
    let pd = ext.place_data(q)?;
    let sign = if ext.base_degree().is_multiple_of(2) { 1 } else { -1 };
    let c = Rational::new(BigInt::from(sign), pow_big(&pd.norm, k));
    Ok(theta.shift(&pd.frobenius).scale(&c))
}

// ---------------------------------------------------------------------------
// The ideals 𝓘_v^(k)
// ---------------------------------------------------------------------------

/// Which Frobenius power enters the finite-place ideals `𝓘_v^(k)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FrobeniusSide {
    /// `[σ_v⁻¹] − N(v)^k`, the defining formula.
    #[default]
    Inverse,
    /// `[σ_v] − N(v)^k`, the image of the defining formula under the
    /// involution `[g] ↦ [g⁻¹]`; reported alongside for comparison.
    Direct,
}

/// `𝓘_v^(k)`: for finite `v` the kernel of
/// `ℤ[G] → ℤ[G/I_v]/([σ_v⁻¹] − N(v)^k)`, generated by `[i] − 1` (`i ∈ I_v`)
/// and `[σ̃_v⁻¹] − N(v)^k` for any lift `σ̃_v`; for real `v` the principal
/// ideal `([σ_v] + (−1)^{k+1})`.
pub fn ideal_iv<E: AbelianExtension>(ext: &E, v: &Place, k: u32) -> Result<GroupRingIdeal> {
    ideal_iv_with(ext, v, k, FrobeniusSide::Inverse)
}

/// [`ideal_iv`] with an explicit choice of Frobenius power.
pub fn ideal_iv_with<E: AbelianExtension>(ext: &E, v: &Place, k: u32, side: FrobeniusSide) -> Result<GroupRingIdeal> {
    let ring = GroupRing::new(ext.galois_group());
    let pd = ext.place_data(v)?;
    let one = GroupRingElem::one(&ring);
    if v.is_finite() {
        let mut gens: Vec<GroupRingElem> =
            pd.inertia.iter().map(|i| GroupRingElem::basis(&ring, i).sub(&one)).collect();
        let fr = match side {
            FrobeniusSide::Inverse => ring.group().neg(&pd.frobenius),
            FrobeniusSide::Direct => pd.frobenius.clone(),
        };
        gens.push(GroupRingElem::basis(&ring, &fr).sub(&one.scale(&rat_int(pow_big(&pd.norm, k)))));
        GroupRingIdeal::new(&ring, gens)
    } else {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        GroupRingIdeal::principal(&GroupRingElem::basis(&ring, &pd.frobenius).add(&one.scale(&rat_int(sign))))
    }
}

/// `∏ 𝓘_v^(k)` over `v ∈ S ∪ S_∞`, `v ≠ 𝔭`.
pub fn theorem_ideal<E: AbelianExtension>(ext: &E, s: &[Place], p: &Place, k: u32) -> Result<GroupRingIdeal> {
    theorem_ideal_with(ext, s, p, k, FrobeniusSide::Inverse)
}

/// [`theorem_ideal`] with an explicit choice of Frobenius power.
pub fn theorem_ideal_with<E: AbelianExtension>(
    ext: &E,
    s: &[Place],
    p: &Place,
    k: u32,
    side: FrobeniusSide,
) -> Result<GroupRingIdeal> {
    let ring = GroupRing::new(ext.galois_group());
    let mut ideals = Vec::new();
    for v in s.iter().chain(ext.infinite_places().iter()) {
        if v != p {
            ideals.push(ideal_iv_with(ext, v, k, side)?);
        }
    }
    Ok(ideal_product(&ring, &ideals))
}

/// Whether the comparison map on Galois cohomology is known to be injective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Injectivity {
    Proven,
    Unknown,
}

impl fmt::Display for Injectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Injectivity::Proven => "proven",
            Injectivity::Unknown => "unknown",
        })
    }
}

/// Sufficient conditions only: two primes of different residue
/// characteristic in `T`, or `k = 0` and a prime of residue characteristic
/// exceeding `n + 1`, `n = [F : ℚ]`.
pub fn injectivity_check(t: &[Place], k: u32, base_degree: u32) -> Injectivity {
    let chars: BTreeSet<u64> = t.iter().filter_map(|q| q.residue_characteristic()).collect();
    if chars.len() >= 2 || (k == 0 && chars.iter().any(|&p| p > base_degree as u64 + 1)) {
        Injectivity::Proven
    } else {
        Injectivity::Unknown
    }
}

// ---------------------------------------------------------------------------
// Annihilators of ℚ/ℤ(k+1)^{G_K} for abelian K/ℚ
// ---------------------------------------------------------------------------

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn pow_mod(a: u64, e: u32, m: u64) -> u64 {
    (0..e).fold(1u64 % m, |acc, _| (acc as u128 * a as u128 % m as u128) as u64)
}

/// Residues `a mod lcm(f, m)`, prime to it, whose reduction mod `f` lies in
/// the Galois class `g` (all of `Gal(ℚ(μ_lcm)/K)` when `g` is the identity).
fn lifts(ext: &RationalExtension, g: &Elem, m: u64) -> Vec<u64> {
    let f = ext.conductor();
    let l = f.lcm(&m);
    (1..=l)
        .filter(|a| a.gcd(&l) == 1)
        .filter(|&a| ext.gal_of_residue(a as i64).map(|h| &h == g).unwrap_or(false))
        .collect()
}

/// `w_{k+1}(K) = #H⁰(K, ℚ/ℤ(k+1))`: the largest `m` with `a^{k+1} ≡ 1 mod m`
/// for every `a` fixing `K`.
pub fn w_k1(ext: &RationalExtension, k: u32) -> u64 {
    let f = ext.conductor();
    let id = ext.galois_group().identity();
    let mut w = 1u64;
    for l in (2..=(k as u64 + 2).max(f)).filter(|&l| is_prime(l)) {
        let mut le = l;
        while lifts(ext, &id, le).iter().all(|&a| pow_mod(a, k + 1, le) == 1) {
            le *= l;
        }
        w *= le / l;
    }
    w
}

/// `Ann_{ℤ[G]}(ℤ/w(k+1))`, with `σ_a` acting by `a^{k+1}`: spanned by
/// `[g] − ψ(g)` and `w`.
pub fn twist_annihilator(ext: &RationalExtension, k: u32) -> GroupRingIdeal {
    let ring = GroupRing::new(ext.galois_group());
    let w = w_k1(ext, k);
    let one = GroupRingElem::one(&ring);
    let mut gens = vec![one.scale(&rat_int(w))];
    for g in ring.elements().to_vec() {
        let a = lifts(ext, &g, w)[0];
        let psi = pow_mod(a % w, k + 1, w);
        gens.push(GroupRingElem::basis(&ring, &g).sub(&one.scale(&rat_int(psi))));
    }
    GroupRingIdeal::new(&ring, gens).expect("integral")
}

/// The ideal `𝒥(X)` generated by `1 − q^{k+1}[σ_q⁻¹]`, `q ∈ X`, with `w`.
#[derive(Clone, Debug)]
pub struct Annihilator {
    pub ideal: GroupRingIdeal,
    pub w: u64,
}

/// `𝒥(X)` for `K/ℚ` abelian; `X` must avoid `S`, the conductor and `w`.
pub fn annihilator_jx(ext: &RationalExtension, s: &[u64], x: &[u64], k: u32) -> Result<Annihilator> {
    let w = w_k1(ext, k);
    let f = ext.conductor();
    let bad: Vec<String> = x
        .iter()
        .filter(|&&q| !is_prime(q) || s.contains(&q) || f.is_multiple_of(q) || w.is_multiple_of(q))
        .map(|q| q.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(Error::ForbiddenPrimes(bad.join(",")));
    }
    let ring = GroupRing::new(ext.galois_group());
    let mut gens = Vec::new();
    for &q in x {
        let pd = ext.place_data(&Place::Rational(q))?;
        gens.push(euler_factor(&ring, BigInt::from(q).pow(k + 1), &pd.frobenius));
    }
    Ok(Annihilator { ideal: GroupRingIdeal::new(&ring, gens)?, w })
}
