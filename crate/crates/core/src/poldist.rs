//! Truncated polynomial distributions `Hom(Int^m(L,ℤ), R)`, their identification
//! with `R[L]/I(L)^{m+1}`, convolution, moments, and finite-level
//! change-of-lattice maps for locally polynomial distributions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::intpoly::{
    binom_basis, binom_multi, interpolate, precedes, sub_indices, total_degree, CoeffRing, IntPolyFn, Lattice,
    MultiIndex, Piece,
};
use crate::linalg::{hnf_only, rat_int, IntMatrix, RatMatrix, Rational};

/// A distribution truncated to degree ≤ m, stored by its values on the
/// binomial basis `C(X, k)`, `|k| ≤ m`, of `Int^m(L, ℤ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncDist {
    lattice: Lattice,
    m: u32,
    values: BTreeMap<MultiIndex, Rational>,
}

/// A class in `R[t₁,…,tₙ]/(t)^{m+1} ≅ R[L]/I(L)^{m+1}`, with `tᵢ = [eᵢ] − 1`
/// for the ordered basis `eᵢ` of `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingTrunc {
    n: usize,
    m: u32,
    coeffs: BTreeMap<MultiIndex, Rational>,
}

fn full_map(n: usize, m: u32, sparse: &BTreeMap<MultiIndex, Rational>) -> BTreeMap<MultiIndex, Rational> {
    binom_basis(n, m)
        .into_iter()
        .map(|k| {
            let v = sparse.get(&k).cloned().unwrap_or_else(Rational::zero);
            (k, v)
        })
        .collect()
}

impl TruncDist {
    /// Build from basis values; missing indices are zero, extra ones rejected.
    pub fn new(lattice: Lattice, m: u32, values: BTreeMap<MultiIndex, Rational>) -> Result<Self> {
        let n = lattice.dim();
        if values.keys().any(|k| k.len() != n || total_degree(k) > m) {
            return Err(Error::InvalidArgument("distribution value beyond truncation".into()));
        }
        Ok(TruncDist { values: full_map(n, m, &values), lattice, m })
    }

    pub fn zero(lattice: Lattice, m: u32) -> Self {
        Self::new(lattice, m, BTreeMap::new()).expect("empty values")
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn truncation(&self) -> u32 {
        self.m
    }

    pub fn values(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.values
    }

    /// Value on the basis function `C(X, k)`.
    pub fn value(&self, k: &[u32]) -> Rational {
        self.values.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }

    /// Pair with a polynomial function on `L` (single piece at the origin).
    pub fn integrate(&self, f: &IntPolyFn) -> Result<Rational> {
        if f.lattice() != &self.lattice || f.degree() > self.m {
            return Err(Error::DimensionMismatch("function does not pair with distribution".into()));
        }
        let zero = vec![Rational::zero(); self.lattice.dim()];
        let mut out = Rational::zero();
        for p in f.pieces() {
            if p.rep != zero {
                return Err(Error::InvalidArgument("function is not supported on L".into()));
            }
            for (k, c) in &p.coeffs {
                out += c * self.value(k);
            }
        }
        Ok(out)
    }

    /// The same functional restricted to `Int^{m'}` for `m' ≤ m`.
    pub fn truncate(&self, m: u32) -> Self {
        assert!(m <= self.m, "cannot raise truncation");
        let values =
            self.values.iter().filter(|(k, _)| total_degree(k) <= m).map(|(k, v)| (k.clone(), v.clone())).collect();
        TruncDist { lattice: self.lattice.clone(), m, values }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let values = self.values.iter().map(|(k, v)| (k.clone(), v + other.value(k))).collect();
        Ok(TruncDist { lattice: self.lattice.clone(), m: self.m, values })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let values = self.values.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        TruncDist { lattice: self.lattice.clone(), m: self.m, values }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice || self.m != other.m {
            return Err(Error::DimensionMismatch("distributions on different lattices or truncations".into()));
        }
        Ok(())
    }
}

/// Dirac distribution `δ_λ`.
pub fn dirac(lambda: &[Rational], lattice: &Lattice, m: u32) -> Result<TruncDist> {
    let z = lattice.int_coords(lambda).ok_or(Error::NotInLattice)?;
    Ok(dirac_coords(&z, lattice, m))
}

/// Dirac distribution at the lattice point with the given coordinates.
pub fn dirac_coords(z: &[BigInt], lattice: &Lattice, m: u32) -> TruncDist {
    let values = binom_basis(lattice.dim(), m)
        .into_iter()
        .map(|k| {
            let v = rat_int(binom_multi(z, &k));
            (k, v)
        })
        .collect();
    TruncDist { lattice: lattice.clone(), m, values }
}

impl GroupRingTrunc {
    pub fn new(n: usize, m: u32, coeffs: BTreeMap<MultiIndex, Rational>) -> Result<Self> {
        if coeffs.keys().any(|k| k.len() != n) {
            return Err(Error::DimensionMismatch("monomial arity".into()));
        }
        let mut coeffs = coeffs;
        coeffs.retain(|k, v| total_degree(k) <= m && !v.is_zero());
        Ok(GroupRingTrunc { n, m, coeffs })
    }

    pub fn one(n: usize, m: u32) -> Self {
        Self::new(n, m, BTreeMap::from([(vec![0; n], Rational::one())])).unwrap()
    }

    /// The class of `[λ]` for `λ` with the given coordinates:
    /// `∏(1 + tᵢ)^{λᵢ} = Σ_j C(λ, j) t^j`.
    pub fn point(z: &[BigInt], m: u32) -> Self {
        let coeffs = binom_basis(z.len(), m)
            .into_iter()
            .map(|j| {
                let v = rat_int(binom_multi(z, &j));
                (j, v)
            })
            .collect();
        Self::new(z.len(), m, coeffs).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, j: &[u32]) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::DimensionMismatch("group-ring classes at different levels".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut c = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            *c.entry(k.clone()).or_insert_with(Rational::zero) += v;
        }
        Self::new(self.n, self.m, c)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let c = self.coeffs.iter().map(|(k, v)| (k.clone(), v * s)).collect();
        Self::new(self.n, self.m, c).unwrap()
    }

    /// Product, truncating monomials of total degree > m.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut c: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (a, x) in &self.coeffs {
            let da = total_degree(a);
            for (b, y) in &other.coeffs {
                if da + total_degree(b) > self.m {
                    continue;
                }
                let k: Vec<u32> = a.iter().zip(b).map(|(s, t)| s + t).collect();
                *c.entry(k).or_insert_with(Rational::zero) += x * y;
            }
        }
        Self::new(self.n, self.m, c)
    }

    /// Reduce to a lower truncation level.
    pub fn truncate(&self, m: u32) -> Self {
        Self::new(self.n, m, self.coeffs.clone()).unwrap()
    }
}

/// Solve `μ(C(X,l)) = Σ_k a_k C(k,l)` for the coefficients `a_k` of
/// `Σ a_k [k]`, `k ∈ Ξ`, by back-substitution (the matrix `C(k,l)` is
/// unitriangular in lexicographic order).
pub fn dist_to_formal_sum(mu: &TruncDist) -> BTreeMap<MultiIndex, Rational> {
    let grid = binom_basis(mu.lattice.dim(), mu.m);
    let mut a: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
    for l in grid.iter().rev() {
        let mut v = mu.value(l);
        for (k, ak) in &a {
            if precedes(l, k) {
                let kb: Vec<BigInt> = k.iter().map(|&x| BigInt::from(x)).collect();
                v -= ak * rat_int(binom_multi(&kb, l));
            }
        }
        a.insert(l.clone(), v);
    }
    a.retain(|_, v| !v.is_zero());
    a
}

/// The Iwasawa-type isomorphism `𝒟_{pol,m}(L,R) → R[L]/I(L)^{m+1}`.
pub fn dist_to_groupring(mu: &TruncDist) -> GroupRingTrunc {
    let n = mu.lattice.dim();
    let a = dist_to_formal_sum(mu);
    let mut out: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
    for (k, ak) in &a {
        let kb: Vec<BigInt> = k.iter().map(|&x| BigInt::from(x)).collect();
        for j in sub_indices(k) {
            if total_degree(&j) > mu.m {
                continue;
            }
            let c = binom_multi(&kb, &j);
            *out.entry(j).or_insert_with(Rational::zero) += ak * rat_int(c);
        }
    }
    GroupRingTrunc::new(n, mu.m, out).unwrap()
}

/// Inverse isomorphism: expand `t^j = Σ_{k⪯j} (−1)^{|j−k|} C(j,k) [k]` and map
/// `[k] ↦ δ_k`.
pub fn groupring_to_dist(g: &GroupRingTrunc, lattice: &Lattice) -> Result<TruncDist> {
    if lattice.dim() != g.n {
        return Err(Error::DimensionMismatch("lattice rank".into()));
    }
    let mut formal: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
    for (j, c) in &g.coeffs {
        let jb: Vec<BigInt> = j.iter().map(|&x| BigInt::from(x)).collect();
        let dj = total_degree(j);
        for k in sub_indices(j) {
            let sign = if (dj - total_degree(&k)).is_multiple_of(2) { 1 } else { -1 };
            let v = rat_int(binom_multi(&jb, &k) * sign);
            *formal.entry(k).or_insert_with(Rational::zero) += c * v;
        }
    }
    let mut out = TruncDist::zero(lattice.clone(), g.m);
    for (k, a) in formal {
        if a.is_zero() {
            continue;
        }
        let kb: Vec<BigInt> = k.iter().map(|&x| BigInt::from(x)).collect();
        out = out.add(&dirac_coords(&kb, lattice, g.m).scale(&a))?;
    }
    Ok(out)
}

/// Convolution `μ₁ ⋆ μ₂`, computed through the group-ring side.
pub fn convolve(a: &TruncDist, b: &TruncDist) -> Result<TruncDist> {
    a.compatible(b)?;
    let p = dist_to_groupring(a).mul(&dist_to_groupring(b))?;
    groupring_to_dist(&p, &a.lattice)
}

/// Binomial-basis expansion of `ξ^a`, where `xi[i]` holds the coefficients
/// of the linear form `ξᵢ` on the lattice coordinates.
pub fn monomial_in_binomials(xi: &[Vec<Rational>], a: &[u32]) -> BTreeMap<MultiIndex, Rational> {
    let n = xi.len();
    let d = total_degree(a);
    let mut vals = BTreeMap::new();
    for x in binom_basis(n, d) {
        let mut v = Rational::one();
        for (i, &ai) in a.iter().enumerate() {
            let form: Rational = xi[i].iter().zip(&x).fold(Rational::zero(), |acc, (c, &t)| acc + c * rat_int(t));
            for _ in 0..ai {
                v *= &form;
            }
        }
        vals.insert(x, v);
    }
    interpolate(n, d, &vals)
}

fn check_forms(xi: &[Vec<Rational>], n: usize) -> Result<()> {
    if xi.len() != n || xi.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("linear forms".into()));
    }
    if RatMatrix::from_rows(xi.to_vec()).det().is_zero() {
        return Err(Error::InvalidArgument("linear forms are not a basis".into()));
    }
    Ok(())
}

/// `μ(ξ^a)`.
pub fn moment(mu: &TruncDist, a: &[u32], xi: &[Vec<Rational>]) -> Result<Rational> {
    let n = mu.lattice.dim();
    check_forms(xi, n)?;
    if a.len() != n {
        return Err(Error::DimensionMismatch("moment index".into()));
    }
    if total_degree(a) > mu.m {
        return Err(Error::MomentBeyondTruncation);
    }
    Ok(monomial_in_binomials(xi, a).iter().fold(Rational::zero(), |acc, (k, c)| acc + c * mu.value(k)))
}

/// The distribution `z^a` characterised by `z^a(ξ^j) = a!·[j = a]` for all
/// `|j| ≤ m`.
pub fn from_moments(lattice: &Lattice, m: u32, a: &[u32], xi: &[Vec<Rational>]) -> Result<TruncDist> {
    let n = lattice.dim();
    check_forms(xi, n)?;
    if total_degree(a) > m {
        return Err(Error::MomentBeyondTruncation);
    }
    let grid = binom_basis(n, m);
    // rows: ξ^j in the binomial basis
    let rows: Vec<Vec<Rational>> = grid
        .iter()
        .map(|j| {
            let e = monomial_in_binomials(xi, j);
            grid.iter().map(|k| e.get(k).cloned().unwrap_or_else(Rational::zero)).collect()
        })
        .collect();
    let inv = RatMatrix::from_rows(rows).inverse().expect("monomials form a basis");
    let fact: BigInt = a.iter().map(|&x| (1..=x).map(BigInt::from).product::<BigInt>()).product();
    // μ values satisfy A·μ = y with y = a!·e_a, so μ = A⁻¹·y (column a of A⁻¹)
    let col = grid.iter().position(|j| j.as_slice() == a).unwrap();
    let values = grid.iter().enumerate().map(|(i, k)| (k.clone(), &inv[(i, col)] * rat_int(fact.clone()))).collect();
    TruncDist::new(lattice.clone(), m, values)
}

/// A locally polynomial distribution at a finite level: a functional on
/// functions on the cosets `c + L'` (listed by representative) that are
/// polynomial of degree ≤ m on each coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocPolDist {
    inner: Lattice,
    m: u32,
    /// canonical coset representative ↦ values on the `L'`-binomial basis
    cosets: BTreeMap<Vec<Rational>, BTreeMap<MultiIndex, Rational>>,
}

impl LocPolDist {
    pub fn new(inner: Lattice, m: u32, cosets: Vec<(Vec<Rational>, BTreeMap<MultiIndex, Rational>)>) -> Result<Self> {
        let n = inner.dim();
        let mut map = BTreeMap::new();
        for (rep, vals) in cosets {
            if vals.keys().any(|k| k.len() != n || total_degree(k) > m) {
                return Err(Error::InvalidArgument("value beyond truncation".into()));
            }
            let (canon, shift) = inner.canonical_rep(&rep);
            // re-centre: with X' = X + shift, μ(C(X',k)) = Σ_{j⪯k} C(shift, k−j) μ(C(X,j))
            let full = full_map(n, m, &vals);
            let recentred = full
                .keys()
                .map(|k| {
                    let v = sub_indices(k).iter().fold(Rational::zero(), |acc, j| {
                        let diff: Vec<u32> = k.iter().zip(j).map(|(a, b)| a - b).collect();
                        acc + rat_int(binom_multi(&shift, &diff)) * &full[j]
                    });
                    (k.clone(), v)
                })
                .collect();
            if map.insert(canon, recentred).is_some() {
                return Err(Error::InvalidArgument("coset listed twice".into()));
            }
        }
        Ok(LocPolDist { inner, m, cosets: map })
    }

    /// Cosets of `inner` inside `shift + outer`.
    pub fn coset_reps(outer: &Lattice, inner: &Lattice, shift: &[Rational]) -> Result<Vec<Vec<Rational>>> {
        Ok(outer
            .coset_coords(inner)?
            .iter()
            .map(|c| {
                let p = outer.point(c);
                let r: Vec<Rational> = p.iter().zip(shift).map(|(a, b)| a + b).collect();
                inner.canonical_rep(&r).0
            })
            .collect())
    }

    pub fn inner(&self) -> &Lattice {
        &self.inner
    }

    pub fn truncation(&self) -> u32 {
        self.m
    }

    pub fn cosets(&self) -> &BTreeMap<Vec<Rational>, BTreeMap<MultiIndex, Rational>> {
        &self.cosets
    }

    /// Flattened values in (coset, basis index) order.
    pub fn flat_values(&self) -> Vec<Rational> {
        self.cosets.values().flat_map(|v| v.values().cloned()).collect()
    }

    /// Pair with a function whose pieces live on cosets of `inner`; pieces
    /// off the support pair to zero.
    pub fn integrate(&self, f: &IntPolyFn) -> Result<Rational> {
        if f.lattice() != &self.inner || f.degree() > self.m {
            return Err(Error::DimensionMismatch("function does not pair with distribution".into()));
        }
        let mut out = Rational::zero();
        for p in f.pieces() {
            if let Some(vals) = self.cosets.get(&p.rep) {
                for (k, c) in &p.coeffs {
                    out += c * vals.get(k).cloned().unwrap_or_else(Rational::zero);
                }
            }
        }
        Ok(out)
    }
}

/// Finite-level data for the change-of-lattice map
/// `𝒟_{pol,L₂'}(v + L₂) → 𝒟_{pol,L₁'}(L₁)`, `μ ↦ μ_!`.
#[derive(Clone, Debug)]
pub struct ChangeOfLattice {
    pub source_inner: Lattice,
    pub target_inner: Lattice,
    pub source_reps: Vec<Vec<Rational>>,
    pub target_reps: Vec<Vec<Rational>>,
    pub m: u32,
    /// `target_values = matrix · source_values` (flattened).
    pub matrix: RatMatrix,
    pub index: BigInt,
}

fn generates(outer: &Lattice, parts: &[&Lattice]) -> bool {
    let n = outer.dim();
    let mut rows = Vec::new();
    for p in parts {
        match outer.sub_coords(p) {
            Some(a) => rows.extend(a.row_vecs()),
            None => return false,
        }
    }
    let h = hnf_only(&IntMatrix::from_rows(rows, n));
    (0..n).all(|i| h[(i, i)].is_one())
}

impl ChangeOfLattice {
    /// Validate the finite-level hypotheses and build the matrix of `μ ↦ μ_!`:
    /// `L₂ ⊆ L₁`, `L₂' = L₂ ∩ L₁'`, `L₂ + L₁' = L₁`, `v ∈ L₁`.
    pub fn new(l2p: &Lattice, l2: &Lattice, v: &[Rational], l1p: &Lattice, l1: &Lattice, m: u32) -> Result<Self> {
        if !l1.contains_lattice(l2) {
            return Err(Error::NotSublattice("L₂ ⊄ L₁".into()));
        }
        if !l2.contains_lattice(l2p) || !l1.contains_lattice(l1p) {
            return Err(Error::NotSublattice("level lattice not inside its lattice".into()));
        }
        if !l1p.contains_lattice(l2p) {
            return Err(Error::NotSublattice("L₂' ⊄ L₁'".into()));
        }
        if !generates(l1, &[l2, l1p]) {
            return Err(Error::NotSublattice("L₂ + L₁' ≠ L₁".into()));
        }
        let d2 = l2.index_of(l2p)?;
        let d1 = l1.index_of(l1p)?;
        if d1 != d2 {
            return Err(Error::NotSublattice("L₂' ≠ L₂ ∩ L₁'".into()));
        }
        if !l1.contains(v) {
            return Err(Error::NotSublattice("v + L₂ is not inside L₁".into()));
        }
        let index = l1.index_of(l2)?;
        let source_reps = LocPolDist::coset_reps(l2, l2p, v)?;
        let zero = vec![Rational::zero(); l1.dim()];
        let target_reps = LocPolDist::coset_reps(l1, l1p, &zero)?;
        let n = l1.dim();
        let basis = binom_basis(n, m);
        let nb = basis.len();
        let src_index: BTreeMap<Vec<Rational>, usize> =
            source_reps.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let mut mat = RatMatrix::zeros(target_reps.len() * nb, source_reps.len() * nb);
        for (ti, rep) in target_reps.iter().enumerate() {
            for (li, l) in basis.iter().enumerate() {
                let f = IntPolyFn::new(
                    l1p.clone(),
                    vec![Piece { rep: rep.clone(), coeffs: BTreeMap::from([(l.clone(), Rational::one())]) }],
                    m,
                )?;
                let g = f.restrict_to_sublattice(l2p)?;
                for p in g.pieces() {
                    let Some(&si) = src_index.get(&p.rep) else { continue };
                    for (k, c) in &p.coeffs {
                        let ki = basis.iter().position(|b| b == k).unwrap();
                        mat[(ti * nb + li, si * nb + ki)] += c;
                    }
                }
            }
        }
        Ok(ChangeOfLattice {
            source_inner: l2p.clone(),
            target_inner: l1p.clone(),
            source_reps,
            target_reps,
            m,
            matrix: mat,
            index,
        })
    }

    pub fn determinant(&self) -> Rational {
        if self.matrix.rows != self.matrix.cols {
            return Rational::zero();
        }
        self.matrix.det()
    }

    fn invertible_over(&self, ring: &CoeffRing) -> bool {
        let d = self.determinant();
        !d.is_zero() && d.is_integer() && ring.is_unit(&d.to_integer())
    }

    fn flatten(&self, mu: &LocPolDist, reps: &[Vec<Rational>]) -> Result<Vec<Rational>> {
        let mut out = Vec::new();
        for r in reps {
            let vals = mu.cosets.get(r).ok_or_else(|| {
                Error::InvalidArgument("distribution support does not match the source cosets".into())
            })?;
            out.extend(vals.values().cloned());
        }
        Ok(out)
    }

    fn unflatten(&self, inner: &Lattice, reps: &[Vec<Rational>], v: Vec<Rational>) -> LocPolDist {
        let basis = binom_basis(inner.dim(), self.m);
        let nb = basis.len();
        let cosets = reps
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let vals = basis.iter().cloned().zip(v[i * nb..(i + 1) * nb].iter().cloned()).collect();
                (r.clone(), vals)
            })
            .collect();
        LocPolDist { inner: inner.clone(), m: self.m, cosets }
    }

    /// `μ ↦ μ_!`, provided the map is an isomorphism over `ring`.
    pub fn apply(&self, mu: &LocPolDist, ring: &CoeffRing) -> Result<LocPolDist> {
        if !self.invertible_over(ring) {
            return Err(Error::IndexNotInvertible);
        }
        let src = self.flatten(mu, &self.source_reps)?;
        let out = mat_vec(&self.matrix, &src);
        Ok(self.unflatten(&self.target_inner, &self.target_reps, out))
    }

    /// The inverse map; entries have denominators that are units of `ring`.
    pub fn apply_inverse(&self, nu: &LocPolDist, ring: &CoeffRing) -> Result<LocPolDist> {
        if !self.invertible_over(ring) {
            return Err(Error::IndexNotInvertible);
        }
        let inv = self.matrix.inverse().ok_or(Error::IndexNotInvertible)?;
        let tgt = self.flatten(nu, &self.target_reps)?;
        let out = mat_vec(&inv, &tgt);
        Ok(self.unflatten(&self.source_inner, &self.source_reps, out))
    }
}

fn mat_vec(m: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    (0..m.rows).map(|i| m.row(i).iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b)).collect()
}

/// Convenience wrapper: transport `μ` on `(L₂', v + L₂)` to `(L₁', L₁)`.
pub fn change_lattice_iso(
    mu: &LocPolDist,
    l2: &Lattice,
    v: &[Rational],
    l1p: &Lattice,
    l1: &Lattice,
    ring: &CoeffRing,
) -> Result<LocPolDist> {
    let c = ChangeOfLattice::new(&mu.inner, l2, v, l1p, l1, mu.m)?;
    c.apply(mu, ring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn z() -> Lattice {
        Lattice::standard(1)
    }

    fn vals(v: &[(Vec<u32>, Rational)]) -> BTreeMap<MultiIndex, Rational> {
        v.iter().cloned().collect()
    }

    #[test]
    fn dirac_examples() {
        let d0 = dirac(&[rat(0, 1)], &z(), 2).unwrap();
        assert_eq!(d0.values().values().cloned().collect::<Vec<_>>(), vec![rat(1, 1), rat(0, 1), rat(0, 1)]);
        let d2 = dirac(&[rat(2, 1)], &z(), 2).unwrap();
        assert_eq!(d2.values().values().cloned().collect::<Vec<_>>(), vec![rat(1, 1), rat(2, 1), rat(1, 1)]);
        let l2 = Lattice::standard(2);
        let d = dirac(&[rat(1, 1), rat(1, 1)], &l2, 1).unwrap();
        assert!(d.values().values().all(|v| v == &rat(1, 1)));
        assert_eq!(dirac(&[rat(1, 2)], &z(), 1), Err(Error::NotInLattice));
    }

    #[test]
    fn to_groupring_examples() {
        let g = dist_to_groupring(&dirac(&[rat(2, 1)], &z(), 2).unwrap());
        assert_eq!(
            g,
            GroupRingTrunc::new(1, 2, vals(&[(vec![0], rat(1, 1)), (vec![1], rat(2, 1)), (vec![2], rat(1, 1))]))
                .unwrap()
        );
        let g = dist_to_groupring(&dirac(&[rat(1, 1)], &z(), 2).unwrap());
        assert_eq!(g.coeff(&[2]), rat(0, 1));
        assert_eq!(g.coeff(&[1]), rat(1, 1));
    }

    #[test]
    fn from_groupring_examples() {
        let one = GroupRingTrunc::one(1, 2);
        assert_eq!(groupring_to_dist(&one, &z()).unwrap(), dirac(&[rat(0, 1)], &z(), 2).unwrap());
        let t = GroupRingTrunc::new(1, 2, vals(&[(vec![1], rat(1, 1))])).unwrap();
        let mu = groupring_to_dist(&t, &z()).unwrap();
        assert_eq!(mu.values().values().cloned().collect::<Vec<_>>(), vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn convolution_of_diracs() {
        let a = dirac(&[rat(1, 1)], &z(), 3).unwrap();
        let b = dirac(&[rat(2, 1)], &z(), 3).unwrap();
        assert_eq!(convolve(&a, &b).unwrap(), dirac(&[rat(3, 1)], &z(), 3).unwrap());
        let d0 = dirac(&[rat(0, 1)], &z(), 3).unwrap();
        assert_eq!(convolve(&d0, &a).unwrap(), a);
    }

    #[test]
    fn augmentation_power_vanishes() {
        let m = 2;
        let step = dirac(&[rat(1, 1)], &z(), m)
            .unwrap()
            .add(&dirac(&[rat(0, 1)], &z(), m).unwrap().scale(&rat(-1, 1)))
            .unwrap();
        let mut acc = step.clone();
        for _ in 0..m {
            acc = convolve(&acc, &step).unwrap();
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn moment_examples() {
        let xi = vec![vec![rat(1, 1)]];
        let z1 = from_moments(&z(), 3, &[1], &xi).unwrap();
        assert_eq!(moment(&z1, &[1], &xi).unwrap(), rat(1, 1));
        let z2 = from_moments(&z(), 3, &[2], &xi).unwrap();
        assert_eq!(moment(&z2, &[2], &xi).unwrap(), rat(2, 1));
        let d = dirac(&[rat(3, 1)], &z(), 3).unwrap();
        assert_eq!(moment(&d, &[2], &xi).unwrap(), rat(9, 1));
        assert_eq!(moment(&d, &[4], &xi), Err(Error::MomentBeyondTruncation));
    }

    #[test]
    fn change_of_lattice_identity_and_index_two() {
        let l = z();
        let c = ChangeOfLattice::new(&l, &l, &[rat(0, 1)], &l, &l, 2).unwrap();
        assert_eq!(c.matrix, RatMatrix::identity(3));
        let l2 = Lattice::scaled(1, rat(2, 1));
        let l1p = Lattice::scaled(1, rat(3, 1));
        let l2p = Lattice::scaled(1, rat(6, 1));
        let c = ChangeOfLattice::new(&l2p, &l2, &[rat(0, 1)], &l1p, &l, 2).unwrap();
        let det = c.determinant();
        assert!(det.is_integer());
        assert_eq!(
            crate::linalg::prime_factors(&det.to_integer()).into_iter().collect::<Vec<_>>(),
            vec![BigInt::from(2)]
        );
        let reps = c.source_reps.clone();
        let mu =
            LocPolDist::new(l2p.clone(), 2, reps.iter().map(|r| (r.clone(), vals(&[(vec![1], rat(1, 1))]))).collect())
                .unwrap();
        assert_eq!(c.apply(&mu, &CoeffRing::integers()), Err(Error::IndexNotInvertible));
        let ring = CoeffRing::inverting(&[2]);
        let nu = c.apply(&mu, &ring).unwrap();
        assert_eq!(c.apply_inverse(&nu, &ring).unwrap(), mu);
    }

    #[test]
    fn inconsistent_levels_are_rejected() {
        let l1 = z();
        let l2 = Lattice::scaled(1, rat(2, 1));
        let l1p = Lattice::scaled(1, rat(4, 1));
        let l2p = Lattice::scaled(1, rat(8, 1));
        assert!(matches!(ChangeOfLattice::new(&l2p, &l2, &[rat(0, 1)], &l1p, &l1, 2), Err(Error::NotSublattice(_))));
    }
}
