//! Integer-valued polynomial functions on lattices and on finite unions of
//! lattice cosets, stored in the binomial basis `C(X, m) = ∏ C(Xᵢ, mᵢ)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{hnf_only, rat_int, supported_on, IntMatrix, RatMatrix, Rational};

/// Exponent multi-index `(m₁, …, mₙ)`.
pub type MultiIndex = Vec<u32>;

pub fn total_degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Componentwise order `k ⪯ m`.
pub fn precedes(k: &[u32], m: &[u32]) -> bool {
    k.iter().zip(m).all(|(a, b)| a <= b)
}

/// All multi-indices of total degree ≤ m in lexicographic order.
pub fn binom_basis(n: usize, m: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..=budget {
            prefix.push(x);
            rec(n, budget - x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Generalised binomial coefficient `C(x, k)` for an integer `x`.
pub fn binom(x: &BigInt, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= x - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `∏ C(xᵢ, mᵢ)`.
pub fn binom_multi(x: &[BigInt], m: &[u32]) -> BigInt {
    x.iter().zip(m).map(|(a, &k)| binom(a, k)).product()
}

/// Coefficients of `P(X + l)` given those of `P(X)` (Vandermonde):
/// `b_k = Σ_{m ⪰ k} a_m C(l, m − k)`.
pub fn shift_coeffs(a: &BTreeMap<MultiIndex, Rational>, l: &[BigInt]) -> BTreeMap<MultiIndex, Rational> {
    let mut out: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
    for (m, am) in a {
        if am.is_zero() {
            continue;
        }
        for k in sub_indices(m) {
            let diff: Vec<u32> = m.iter().zip(&k).map(|(x, y)| x - y).collect();
            let c = binom_multi(l, &diff);
            if c.is_zero() {
                continue;
            }
            *out.entry(k).or_insert_with(Rational::zero) += am * rat_int(c);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// All `k ⪯ m`.
pub fn sub_indices(m: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &x in m {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..=x).map(move |y| {
                    let mut q = p.clone();
                    q.push(y);
                    q
                })
            })
            .collect();
    }
    out
}

/// Interpolate a polynomial of total degree ≤ m from its values on the grid
/// `Ξ = binom_basis(n, m)`, returning binomial-basis coefficients. Uses the
/// unitriangular system `v_l = Σ_{k ⪯ l} c_k C(l, k)`.
pub fn interpolate(n: usize, m: u32, values: &BTreeMap<MultiIndex, Rational>) -> BTreeMap<MultiIndex, Rational> {
    let grid = binom_basis(n, m);
    let mut c: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
    for l in &grid {
        let lb: Vec<BigInt> = l.iter().map(|&x| BigInt::from(x)).collect();
        let mut v = values.get(l).cloned().unwrap_or_else(Rational::zero);
        for k in sub_indices(l) {
            if &k == l {
                continue;
            }
            if let Some(ck) = c.get(&k) {
                v -= ck * rat_int(binom_multi(&lb, &k));
            }
        }
        c.insert(l.clone(), v);
    }
    c.retain(|_, v| !v.is_zero());
    c
}

/// Evaluate binomial-basis coefficients at integer coordinates.
pub fn eval_coeffs(a: &BTreeMap<MultiIndex, Rational>, x: &[BigInt]) -> Rational {
    a.iter().fold(Rational::zero(), |acc, (m, c)| acc + c * rat_int(binom_multi(x, m)))
}

/// Coefficient ring `R ⊆ ℚ`: either ℚ itself or `ℤ[1/p : p ∈ allowed]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffRing {
    Rationals,
    Localized(BTreeSet<BigInt>),
}

impl CoeffRing {
    pub fn integers() -> Self {
        CoeffRing::Localized(BTreeSet::new())
    }

    pub fn inverting(primes: &[i64]) -> Self {
        CoeffRing::Localized(primes.iter().map(|&p| BigInt::from(p)).collect())
    }

    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            CoeffRing::Rationals => true,
            CoeffRing::Localized(s) => supported_on(q.denom(), s),
        }
    }

    /// True iff the nonzero integer `d` is a unit of the ring.
    pub fn is_unit(&self, d: &BigInt) -> bool {
        match self {
            CoeffRing::Rationals => !d.is_zero(),
            CoeffRing::Localized(s) => supported_on(d, s),
        }
    }
}

/// Full-rank lattice in ℚⁿ given by an ordered basis (rows).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: RatMatrix,
    inv: RatMatrix,
}

impl Lattice {
    pub fn new(basis: RatMatrix) -> Result<Self> {
        if basis.rows != basis.cols {
            return Err(Error::DimensionMismatch("lattice basis must be square".into()));
        }
        let inv = basis.inverse().ok_or(Error::DegenerateLattice)?;
        Ok(Lattice { basis, inv })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()))
    }

    /// `q · ℤⁿ`.
    pub fn scaled(n: usize, q: Rational) -> Self {
        let mut b = RatMatrix::zeros(n, n);
        for i in 0..n {
            b[(i, i)] = q.clone();
        }
        Self::new(b).expect("nonzero scale")
    }

    pub fn standard(n: usize) -> Self {
        Self::scaled(n, Rational::one())
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    /// Coordinates of `x` in the lattice basis.
    pub fn coords(&self, x: &[Rational]) -> Vec<Rational> {
        self.inv.vec_mul(x)
    }

    /// Integer coordinates of `x`, or `None` if `x ∉ L`.
    pub fn int_coords(&self, x: &[Rational]) -> Option<Vec<BigInt>> {
        self.coords(x).into_iter().map(|c| if c.is_integer() { Some(c.to_integer()) } else { None }).collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.int_coords(x).is_some()
    }

    pub fn point(&self, c: &[BigInt]) -> Vec<Rational> {
        let r: Vec<Rational> = c.iter().map(|x| rat_int(x.clone())).collect();
        self.basis.vec_mul(&r)
    }

    /// Integer matrix whose rows are the coordinates of `other`'s basis in
    /// this lattice, or `None` if `other ⊄ self`.
    pub fn sub_coords(&self, other: &Lattice) -> Option<IntMatrix> {
        let n = self.dim();
        let mut rows = Vec::with_capacity(n);
        for i in 0..other.dim() {
            rows.push(self.int_coords(other.basis.row(i))?);
        }
        Some(IntMatrix::from_rows(rows, n))
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        self.sub_coords(other).is_some()
    }

    /// Index `[self : other]` for a sublattice.
    pub fn index_of(&self, other: &Lattice) -> Result<BigInt> {
        let a = self.sub_coords(other).ok_or_else(|| Error::NotSublattice("index of a non-sublattice".into()))?;
        Ok(a.det().abs())
    }

    /// Canonical coset representative of `x + L`: coordinates in `[0,1)ⁿ`.
    pub fn canonical_rep(&self, x: &[Rational]) -> (Vec<Rational>, Vec<BigInt>) {
        let c = self.coords(x);
        let fl: Vec<BigInt> = c.iter().map(|t| t.floor().to_integer()).collect();
        let frac: Vec<Rational> = c.iter().zip(&fl).map(|(t, f)| t - rat_int(f.clone())).collect();
        (self.basis.vec_mul(&frac), fl)
    }

    /// Representatives of the cosets of a sublattice inside this lattice, as
    /// integer coordinate vectors (in this lattice's basis), in lexicographic
    /// order.
    pub fn coset_coords(&self, sub: &Lattice) -> Result<Vec<Vec<BigInt>>> {
        let a = self.sub_coords(sub).ok_or_else(|| Error::NotSublattice("sublattice expected".into()))?;
        let h = hnf_only(&a);
        let n = self.dim();
        let mut out: Vec<Vec<BigInt>> = vec![Vec::new()];
        for i in 0..n {
            let d = h[(i, i)].clone();
            let mut next = Vec::new();
            for p in &out {
                let mut x = BigInt::zero();
                while x < d {
                    let mut q = p.clone();
                    q.push(x.clone());
                    next.push(q);
                    x += 1;
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// One polynomial piece on the coset `rep + L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub rep: Vec<Rational>,
    pub coeffs: BTreeMap<MultiIndex, Rational>,
}

/// A function on a finite union of cosets of `L`, polynomial on each coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolyFn {
    lattice: Lattice,
    pieces: Vec<Piece>,
    degree: u32,
}

impl IntPolyFn {
    /// Build from pieces; representatives are canonicalised (with the
    /// coefficients re-centred) and pieces on the same coset are added.
    pub fn new(lattice: Lattice, pieces: Vec<Piece>, degree: u32) -> Result<Self> {
        let n = lattice.dim();
        let mut merged: BTreeMap<Vec<Rational>, BTreeMap<MultiIndex, Rational>> = BTreeMap::new();
        for p in pieces {
            if p.rep.len() != n {
                return Err(Error::DimensionMismatch("coset representative".into()));
            }
            for m in p.coeffs.keys() {
                if m.len() != n || total_degree(m) > degree {
                    return Err(Error::InvalidArgument("coefficient index beyond degree bound".into()));
                }
            }
            let (rep, fl) = lattice.canonical_rep(&p.rep);
            // f(rep + X) with the old rep = new rep + fl, so P_new(X) = P_old(X - fl)
            let neg: Vec<BigInt> = fl.iter().map(|x| -x).collect();
            let shifted = shift_coeffs(&p.coeffs, &neg);
            let e = merged.entry(rep).or_default();
            for (m, c) in shifted {
                *e.entry(m).or_insert_with(Rational::zero) += c;
            }
        }
        let pieces = merged
            .into_iter()
            .map(|(rep, mut coeffs)| {
                coeffs.retain(|_, v| !v.is_zero());
                Piece { rep, coeffs }
            })
            .collect();
        Ok(IntPolyFn { lattice, pieces, degree })
    }

    /// A single polynomial on `L` itself.
    pub fn on_lattice(lattice: Lattice, coeffs: BTreeMap<MultiIndex, Rational>, degree: u32) -> Result<Self> {
        let n = lattice.dim();
        Self::new(lattice, vec![Piece { rep: vec![Rational::zero(); n], coeffs }], degree)
    }

    /// The binomial basis element `C(X, m)` on `L`.
    pub fn basis_element(lattice: Lattice, m: &[u32]) -> Self {
        let d = total_degree(m);
        let coeffs = BTreeMap::from([(m.to_vec(), Rational::one())]);
        Self::on_lattice(lattice, coeffs, d).expect("valid basis element")
    }

    pub fn zero(lattice: Lattice, degree: u32) -> Self {
        IntPolyFn { lattice, pieces: Vec::new(), degree }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.coeffs.is_empty())
    }

    /// True iff every coefficient lies in `r`.
    pub fn has_coeffs_in(&self, r: &CoeffRing) -> bool {
        self.pieces.iter().all(|p| p.coeffs.values().all(|c| r.contains(c)))
    }

    /// Value at `x`; zero outside the listed cosets.
    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        for p in &self.pieces {
            let d: Vec<Rational> = x.iter().zip(&p.rep).map(|(a, b)| a - b).collect();
            if let Some(c) = self.lattice.int_coords(&d) {
                return eval_coeffs(&p.coeffs, &c);
            }
        }
        Rational::zero()
    }

    /// `(τ_λ f)(v) = f(v + λ)` for `λ ∈ L`.
    pub fn translate(&self, lambda: &[Rational]) -> Result<Self> {
        let z = self.lattice.int_coords(lambda).ok_or(Error::NotInLattice)?;
        let pieces =
            self.pieces.iter().map(|p| Piece { rep: p.rep.clone(), coeffs: shift_coeffs(&p.coeffs, &z) }).collect();
        Ok(IntPolyFn { lattice: self.lattice.clone(), pieces, degree: self.degree })
    }

    fn same_lattice(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::DimensionMismatch("functions on different lattices".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Self::new(self.lattice.clone(), pieces, self.degree.max(other.degree))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                rep: p.rep.clone(),
                coeffs: p.coeffs.iter().map(|(m, a)| (m.clone(), a * c)).filter(|(_, a)| !a.is_zero()).collect(),
            })
            .collect();
        IntPolyFn { lattice: self.lattice.clone(), pieces, degree: self.degree }
    }

    /// Pointwise product, by evaluation on `Ξ` and re-interpolation at the
    /// combined degree bound.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        let n = self.lattice.dim();
        let deg = self.degree + other.degree;
        let grid = binom_basis(n, deg);
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let Some(q) = other.pieces.iter().find(|q| q.rep == p.rep) else { continue };
            let mut vals = BTreeMap::new();
            for l in &grid {
                let x: Vec<BigInt> = l.iter().map(|&t| BigInt::from(t)).collect();
                vals.insert(l.clone(), eval_coeffs(&p.coeffs, &x) * eval_coeffs(&q.coeffs, &x));
            }
            pieces.push(Piece { rep: p.rep.clone(), coeffs: interpolate(n, deg, &vals) });
        }
        Self::new(self.lattice.clone(), pieces, deg)
    }

    /// The same function, re-expressed on cosets of a sublattice `L' ⊆ L`.
    pub fn restrict_to_sublattice(&self, sub: &Lattice) -> Result<Self> {
        let a = self
            .lattice
            .sub_coords(sub)
            .ok_or_else(|| Error::NotSublattice("restriction target is not a sublattice".into()))?;
        let n = self.lattice.dim();
        let reps = self.lattice.coset_coords(sub)?;
        let grid = binom_basis(n, self.degree);
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for r in &reps {
                // points p + r·B + Y·B' have L-coordinates r + Y·A
                let mut vals = BTreeMap::new();
                for y in &grid {
                    let yb: Vec<BigInt> = y.iter().map(|&t| BigInt::from(t)).collect();
                    let ya = a.vec_mul(&yb);
                    let x: Vec<BigInt> = ya.iter().zip(r).map(|(s, t)| s + t).collect();
                    vals.insert(y.clone(), eval_coeffs(&p.coeffs, &x));
                }
                let off = self.lattice.point(r);
                let rep: Vec<Rational> = p.rep.iter().zip(&off).map(|(s, t)| s + t).collect();
                pieces.push(Piece { rep, coeffs: interpolate(n, self.degree, &vals) });
            }
        }
        Self::new(sub.clone(), pieces, self.degree)
    }

    /// Keep only the pieces on the given cosets (restriction to an L-subset).
    pub fn restrict_to_cosets(&self, reps: &[Vec<Rational>]) -> Self {
        let canon: BTreeSet<Vec<Rational>> = reps.iter().map(|r| self.lattice.canonical_rep(r).0).collect();
        let pieces = self.pieces.iter().filter(|p| canon.contains(&p.rep)).cloned().collect();
        IntPolyFn { lattice: self.lattice.clone(), pieces, degree: self.degree }
    }

    /// Extension by zero from a sub-collection of cosets to the ambient
    /// collection `ambient`; fails if a piece lies outside the ambient set.
    pub fn extend_by_zero(&self, ambient: &[Vec<Rational>]) -> Result<Self> {
        let canon: BTreeSet<Vec<Rational>> = ambient.iter().map(|r| self.lattice.canonical_rep(r).0).collect();
        if let Some(p) = self.pieces.iter().find(|p| !canon.contains(&p.rep)) {
            return Err(Error::InvalidArgument(format!(
                "piece on coset {:?} is outside the ambient set",
                p.rep.iter().map(|x| x.to_string()).collect::<Vec<_>>()
            )));
        }
        Ok(self.clone())
    }
}

/// Matrix of the restriction `Int^m(L) → Int^m(L')` onto the coset `L'`
/// itself, in the binomial bases of both sides (row `i` = image of the
/// `i`-th basis function).
pub fn restriction_matrix(l: &Lattice, sub: &Lattice, m: u32) -> Result<RatMatrix> {
    let basis = binom_basis(l.dim(), m);
    let zero = vec![Rational::zero(); l.dim()];
    let mut rows = Vec::with_capacity(basis.len());
    for k in &basis {
        let f = IntPolyFn::basis_element(l.clone(), k);
        let f = IntPolyFn { degree: m, ..f };
        let g = f.restrict_to_sublattice(sub)?.restrict_to_cosets(std::slice::from_ref(&zero));
        let coeffs = g.pieces.first().map(|p| p.coeffs.clone()).unwrap_or_default();
        rows.push(basis.iter().map(|j| coeffs.get(j).cloned().unwrap_or_else(Rational::zero)).collect());
    }
    Ok(RatMatrix::from_rows(rows))
}

/// Binomial expansion sanity helper: value of `C(x, k)` for rational `x`.
pub fn binom_rational(x: &Rational, k: u32) -> Rational {
    let mut out = Rational::one();
    for i in 0..k {
        out *= x - rat_int(i);
        out /= rat_int(i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn z() -> Lattice {
        Lattice::standard(1)
    }

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(binom_basis(2, 2).len(), 6);
        assert_eq!(binom_basis(1, 0), vec![vec![0]]);
        assert_eq!(binom_basis(3, 1), vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn evaluate_examples() {
        let f = IntPolyFn::basis_element(z(), &[2]);
        assert_eq!(f.evaluate(&[rat(4, 1)]), rat(6, 1));
        assert_eq!(f.evaluate(&[rat(-1, 1)]), rat(1, 1));
        let g = IntPolyFn::new(
            z(),
            vec![Piece { rep: vec![rat(1, 2)], coeffs: BTreeMap::from([(vec![1], rat(1, 1))]) }],
            1,
        )
        .unwrap();
        assert_eq!(g.evaluate(&[rat(5, 2)]), rat(2, 1));
        assert_eq!(g.evaluate(&[rat(2, 1)]), rat(0, 1));
    }

    #[test]
    fn translate_examples() {
        let f = IntPolyFn::basis_element(z(), &[2]);
        let t = f.translate(&[rat(1, 1)]).unwrap();
        let want = BTreeMap::from([(vec![1], rat(1, 1)), (vec![2], rat(1, 1))]);
        assert_eq!(t.pieces()[0].coeffs, want);
        assert_eq!(f.translate(&[rat(0, 1)]).unwrap(), f);
        let g = IntPolyFn::basis_element(z(), &[1]);
        let t = g.translate(&[rat(-1, 1)]).unwrap();
        let want = BTreeMap::from([(vec![0], rat(-1, 1)), (vec![1], rat(1, 1))]);
        assert_eq!(t.pieces()[0].coeffs, want);
        let half = Lattice::scaled(1, rat(2, 1));
        let h = IntPolyFn::basis_element(half, &[1]);
        assert_eq!(h.translate(&[rat(1, 1)]), Err(Error::NotInLattice));
    }

    #[test]
    fn restriction_to_even_integers() {
        let f = IntPolyFn::basis_element(z(), &[1]);
        let two = Lattice::scaled(1, rat(2, 1));
        let r = f.restrict_to_sublattice(&two).unwrap();
        assert_eq!(r.pieces().len(), 2);
        for x in -4..=4 {
            assert_eq!(r.evaluate(&[rat(x, 1)]), f.evaluate(&[rat(x, 1)]));
        }
        // coset 1 + 2ℤ: 1 + 2·C(Y,1)
        let want = BTreeMap::from([(vec![0], rat(1, 1)), (vec![1], rat(2, 1))]);
        assert_eq!(r.pieces()[1].coeffs, want);
        assert_eq!(f.restrict_to_sublattice(&z()).unwrap(), f);
    }

    #[test]
    fn extension_by_zero_section() {
        let f = IntPolyFn::basis_element(z(), &[1]);
        let amb = vec![vec![rat(0, 1)], vec![rat(1, 2)]];
        let e = f.extend_by_zero(&amb).unwrap();
        assert_eq!(e.evaluate(&[rat(3, 1)]), rat(3, 1));
        assert_eq!(e.evaluate(&[rat(3, 2)]), rat(0, 1));
        assert_eq!(e.restrict_to_cosets(&[vec![rat(0, 1)]]), f);
        let zf = IntPolyFn::zero(z(), 2);
        assert!(zf.extend_by_zero(&amb).unwrap().is_zero());
    }

    #[test]
    fn restriction_matrix_for_index_two() {
        let m = restriction_matrix(&z(), &Lattice::scaled(1, rat(2, 1)), 2).unwrap();
        // C(2Y,2) = 2Y² - Y = 4C(Y,2) + C(Y,1)
        assert_eq!(m.det(), rat(8, 1));
        assert_eq!(m[(2, 1)], rat(1, 1));
        assert_eq!(m[(2, 2)], rat(4, 1));
    }

    #[test]
    fn binomials_of_negative_integers() {
        assert_eq!(binom(&BigInt::from(-1), 2), BigInt::from(1));
        assert_eq!(binom_multi(&bi(&[3, 4]), &[1, 2]), BigInt::from(18));
        assert_eq!(binom_rational(&rat(1, 2), 2), rat(-1, 8));
    }
}
