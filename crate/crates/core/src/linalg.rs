//! Exact integer and rational linear algebra: Hermite and Smith normal forms,
//! lattice membership and small dense rational matrix routines.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always stored reduced with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Format a rational as `p/q` (or `p` when integral).
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Distinct prime factors of |n| (n ≠ 0), by trial division.
pub fn prime_factors(n: &BigInt) -> BTreeSet<BigInt> {
    let mut out = BTreeSet::new();
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            out.insert(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.insert(n);
    }
    out
}

/// True iff every prime factor of the (nonzero) integer lies in `allowed`.
pub fn supported_on(n: &BigInt, allowed: &BTreeSet<BigInt>) -> bool {
    let mut n = n.abs();
    if n.is_zero() {
        return false;
    }
    for p in allowed {
        while (&n % p).is_zero() {
            n /= p;
        }
    }
    n.is_one()
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "IntMatrix{:?}", rows)
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Build from rows; all rows must share a length. `cols` is needed for the
    /// empty case.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        IntMatrix { rows: r, cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), cols)
    }

    pub fn diagonal(d: &[BigInt]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += a * &self[(i, j)];
            }
        }
        out
    }

    /// Remove all-zero rows.
    pub fn nonzero_rows(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = self.row_vecs().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        Self::from_rows(rows, self.cols)
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let r = RatMatrix::from_int(self);
        let d = r.det();
        d.to_integer()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] -= q * row[b]
    fn row_axpy(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self.data[b * self.cols + j] * q;
            self.data[a * self.cols + j] -= t;
        }
    }

    /// col[a] -= q * col[b]
    fn col_axpy(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = &self.data[i * self.cols + b] * q;
            self.data[i * self.cols + a] -= t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[a * self.cols + j];
            *x = -std::mem::take(x);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-style Hermite normal form. Returns `(h, u)` with `h = u · m`, `u`
/// unimodular, `h` upper-echelon with positive pivots, entries above each
/// pivot reduced into `[0, pivot)`, and zero rows at the bottom.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    hnf_impl(m, true)
}

/// Hermite normal form without the transform.
pub fn hnf_only(m: &IntMatrix) -> IntMatrix {
    hnf_impl(m, false).0
}

fn hnf_impl(m: &IntMatrix, track: bool) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = if track { IntMatrix::identity(m.rows) } else { IntMatrix::zeros(0, 0) };
    let mut r = 0;
    for c in 0..h.cols {
        if r == h.rows {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c among rows r..
            let mut best: Option<usize> = None;
            for i in r..h.rows {
                if !h[(i, c)].is_zero() && best.is_none_or(|b| h[(i, c)].abs() < h[(b, c)].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            if track {
                u.swap_rows(r, b);
            }
            let mut done = true;
            for i in r + 1..h.rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = h[(i, c)].div_floor(&h[(r, c)]);
                h.row_axpy(i, r, &q);
                if track {
                    u.row_axpy(i, r, &q);
                }
                if !h[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < h.rows && !h[(r, c)].is_zero() {
            if h[(r, c)].is_negative() {
                h.negate_row(r);
                if track {
                    u.negate_row(r);
                }
            }
            for i in 0..r {
                let q = h[(i, c)].div_floor(&h[(r, c)]);
                h.row_axpy(i, r, &q);
                if track {
                    u.row_axpy(i, r, &q);
                }
            }
            r += 1;
        }
    }
    (h, u)
}

/// Pivot columns of an echelon matrix (one per nonzero row).
pub fn pivot_cols(h: &IntMatrix) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..h.rows {
        if let Some(j) = h.row(i).iter().position(|x| !x.is_zero()) {
            out.push(j);
        }
    }
    out
}

pub fn rank(m: &IntMatrix) -> usize {
    pivot_cols(&hnf_only(m)).len()
}

/// Smith normal form diagonal `d₁ | d₂ | …` of length `min(rows, cols)`.
pub fn snf(m: &IntMatrix) -> Vec<BigInt> {
    snf_with_transform(m).diagonal
}

/// Smith normal form with transforms: `u · m · v = d`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

pub fn snf_with_transform(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut vi = IntMatrix::identity(cols);
    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap_rows(t, bi);
            u.swap_rows(t, bi);
            a.swap_cols(t, bj);
            v.swap_cols(t, bj);
            vi.swap_rows(t, bj);
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                a.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                a.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                // V ← V·E with E = I − q e_t e_jᵀ; V⁻¹ ← E⁻¹·V⁻¹ adds q·row j to row t
                vi.row_axpy(t, j, &(-&q));
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition on the trailing block
            let p = a[(t, t)].clone();
            let mut bad: Option<usize> = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[(i, j)] % &p).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    // row t += row i
                    let m1 = -BigInt::one();
                    a.row_axpy(t, i, &m1);
                    u.row_axpy(t, i, &m1);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    let diagonal = (0..n).map(|i| a[(i, i)].clone()).collect();
    Snf { diagonal, u, v, v_inv: vi }
}

/// Solve `coeffs · h = v` over ℤ for an echelon `h`; returns `None` if no
/// integer solution exists.
pub fn echelon_solve(h: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut res = v.to_vec();
    let piv = pivot_cols(h);
    let mut coeffs = vec![BigInt::zero(); h.rows];
    for (i, &p) in piv.iter().enumerate() {
        let (q, r) = res[p].div_rem(&h[(i, p)]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for j in 0..h.cols {
                res[j] -= &q * &h[(i, j)];
            }
        }
        coeffs[i] = q;
    }
    if res.iter().all(|x| x.is_zero()) {
        Some(coeffs)
    } else {
        None
    }
}

/// True iff `v` is an integer combination of the rows of `basis`, which must
/// span a lattice of full rank.
pub fn lattice_contains(basis: &IntMatrix, v: &[BigInt]) -> Result<bool> {
    if v.len() != basis.cols {
        return Err(Error::DimensionMismatch(format!("vector of length {} against {} columns", v.len(), basis.cols)));
    }
    let h = hnf_only(basis);
    if pivot_cols(&h).len() < basis.cols {
        return Err(Error::DegenerateLattice);
    }
    Ok(echelon_solve(&h, v).is_some())
}

/// Membership in the ℤ-span of an arbitrary (possibly rank-deficient) set of
/// rows.
pub fn span_contains(rows: &IntMatrix, v: &[BigInt]) -> bool {
    echelon_solve(&hnf_only(rows), v).is_some()
}

/// Coordinates of a rational vector `v` in the rows of an echelon integer
/// matrix `h` (whose nonzero rows are independent), or `None` if `v` is not in
/// the ℚ-span.
pub fn echelon_solve_rational(h: &IntMatrix, v: &[Rational]) -> Option<Vec<Rational>> {
    let mut res = v.to_vec();
    let piv = pivot_cols(h);
    let mut coeffs = vec![Rational::zero(); h.rows];
    for (i, &p) in piv.iter().enumerate() {
        let q = &res[p] / rat_int(h[(i, p)].clone());
        if !q.is_zero() {
            for j in 0..h.cols {
                res[j] -= &q * rat_int(h[(i, j)].clone());
            }
        }
        coeffs[i] = q;
    }
    if res.iter().all(|x| x.is_zero()) {
        Some(coeffs)
    } else {
        None
    }
}

/// Membership of a rational vector in `span(rows) ⊗ ℤ[1/p : p ∈ allowed]`.
pub fn span_contains_localized(rows: &IntMatrix, v: &[Rational], allowed: &BTreeSet<BigInt>) -> bool {
    let h = hnf_only(rows);
    match echelon_solve_rational(&h, v) {
        None => false,
        Some(c) => c.iter().all(|x| supported_on(x.denom(), allowed)),
    }
}

/// ℤ-basis (HNF rows) of the intersection of the row lattices of `a` and `b`,
/// read off from the Hermite form of the block matrix `[[a, a], [b, 0]]`.
pub fn lattice_intersection(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    assert_eq!(a.cols, b.cols, "lattices in different ambient spaces");
    let n = a.cols;
    let mut rows = Vec::with_capacity(a.rows + b.rows);
    for i in 0..a.rows {
        let mut r = a.row(i).to_vec();
        r.extend_from_slice(a.row(i));
        rows.push(r);
    }
    for i in 0..b.rows {
        let mut r = b.row(i).to_vec();
        r.extend(std::iter::repeat_n(BigInt::zero(), n));
        rows.push(r);
    }
    let h = hnf_only(&IntMatrix::from_rows(rows, 2 * n));
    let mut out = Vec::new();
    for i in 0..h.rows {
        let r = h.row(i);
        if r[..n].iter().all(|x| x.is_zero()) && r[n..].iter().any(|x| !x.is_zero()) {
            out.push(r[n..].to_vec());
        }
    }
    hnf_only(&IntMatrix::from_rows(out, n)).nonzero_rows()
}

/// Dense rational matrix for small change-of-basis computations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        RatMatrix { rows: r, cols: c, data }
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        RatMatrix { rows: m.rows, cols: m.cols, data: m.data.iter().map(|x| rat_int(x.clone())).collect() }
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Rational::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += a * &self[(i, j)];
            }
        }
        out
    }

    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] / &piv;
                for j in c..n {
                    let t = &f * &a[(c, j)];
                    a[(i, j)] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| !a[(i, c)].is_zero())?;
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
                inv.data.swap(p * n + j, c * n + j);
            }
            let piv = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] /= &piv;
                inv[(c, j)] /= &piv;
            }
            for i in 0..n {
                if i == c || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..n {
                    let t = &f * &a[(c, j)];
                    a[(i, j)] -= t;
                    let t = &f * &inv[(c, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Some(inv)
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}
