//! Finite abelian groups presented by generators and relations, normalised by
//! the Smith normal form. Elements are exponent vectors against the cyclic
//! factors `ℤ/d₁ ⊕ … ⊕ ℤ/d_r` with `1 < d₁ | d₂ | …`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{snf_with_transform, IntMatrix};

/// Canonical element label: exponents reduced into `[0, dᵢ)`.
pub type Elem = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    ngens: usize,
    orders: Vec<u64>,
    /// Column of the SNF coordinate system kept for each cyclic factor.
    keep: Vec<usize>,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl AbelianGroup {
    /// The group `ℤ^ngens / rowspan(rels)`; the relations must have full rank.
    pub fn from_relations(ngens: usize, rels: &IntMatrix) -> Result<Self> {
        if rels.cols() != ngens {
            return Err(Error::DimensionMismatch("relation width".into()));
        }
        if ngens == 0 {
            return Ok(Self::trivial());
        }
        let s = snf_with_transform(rels);
        if s.diagonal.len() < ngens || s.diagonal.iter().any(|d| d.is_zero()) {
            return Err(Error::InvalidArgument("relations do not define a finite group".into()));
        }
        let mut orders = Vec::new();
        let mut keep = Vec::new();
        for (i, d) in s.diagonal.iter().enumerate() {
            if !d.is_one() {
                orders.push(d.to_u64().expect("group order fits in u64"));
                keep.push(i);
            }
        }
        Ok(AbelianGroup { ngens, orders, keep, v: s.v, v_inv: s.v_inv })
    }

    pub fn trivial() -> Self {
        AbelianGroup {
            ngens: 0,
            orders: Vec::new(),
            keep: Vec::new(),
            v: IntMatrix::zeros(0, 0),
            v_inv: IntMatrix::zeros(0, 0),
        }
    }

    /// `ℤ/o₁ ⊕ ℤ/o₂ ⊕ …` on the given generators.
    pub fn from_orders(orders: &[u64]) -> Self {
        let d: Vec<BigInt> = orders.iter().map(|&o| BigInt::from(o)).collect();
        Self::from_relations(orders.len(), &IntMatrix::diagonal(&d)).expect("positive orders")
    }

    /// Number of generators of the presentation.
    pub fn ngens(&self) -> usize {
        self.ngens
    }

    /// Invariant factors `d₁ | d₂ | …`, all greater than one.
    pub fn invariants(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn identity(&self) -> Elem {
        vec![0; self.orders.len()]
    }

    /// Class of an exponent vector on the presentation generators.
    pub fn reduce(&self, x: &[BigInt]) -> Elem {
        assert_eq!(x.len(), self.ngens, "exponent vector length");
        if self.ngens == 0 {
            return Vec::new();
        }
        let y = self.v.vec_mul(x);
        self.keep.iter().zip(&self.orders).map(|(&i, &d)| y[i].mod_floor(&BigInt::from(d)).to_u64().unwrap()).collect()
    }

    pub fn reduce_i64(&self, x: &[i64]) -> Elem {
        let b: Vec<BigInt> = x.iter().map(|&t| BigInt::from(t)).collect();
        self.reduce(&b)
    }

    /// Class of the `i`-th presentation generator.
    pub fn gen(&self, i: usize) -> Elem {
        let mut e = vec![0i64; self.ngens];
        e[i] = 1;
        self.reduce_i64(&e)
    }

    /// An exponent vector on the presentation generators mapping to `e`.
    pub fn lift(&self, e: &Elem) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.ngens];
        for (&i, &x) in self.keep.iter().zip(e) {
            y[i] = BigInt::from(x);
        }
        self.v_inv.vec_mul(&y)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), d)| (x + y) % d).collect()
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        a.iter().zip(&self.orders).map(|(x, d)| (d - x) % d).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Elem, k: i64) -> Elem {
        a.iter().zip(&self.orders).map(|(&x, &d)| ((x as i128 * k as i128).rem_euclid(d as i128)) as u64).collect()
    }

    pub fn elem_order(&self, a: &Elem) -> u64 {
        a.iter().zip(&self.orders).fold(1u64, |acc, (&x, &d)| acc.lcm(&(d / x.gcd(&d))))
    }

    /// All elements in mixed-radix order (first coordinate slowest).
    pub fn elements(&self) -> Vec<Elem> {
        let mut out = vec![Vec::new()];
        for &d in &self.orders {
            out = out
                .into_iter()
                .flat_map(|p: Elem| {
                    (0..d).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Position of `a` in [`elements`](Self::elements).
    pub fn index_of(&self, a: &Elem) -> usize {
        let mut idx = 0usize;
        for (&x, &d) in a.iter().zip(&self.orders) {
            idx = idx * d as usize + x as usize;
        }
        idx
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut seen: BTreeSet<Elem> = BTreeSet::new();
        let id = self.identity();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Every subgroup, each as a sorted element list; deterministic order.
    pub fn all_subgroups(&self) -> Vec<Vec<Elem>> {
        let elems = self.elements();
        let mut found: BTreeSet<Vec<Elem>> = BTreeSet::new();
        let start = self.closure(&[]);
        found.insert(start.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(h) = queue.pop_front() {
            for g in &elems {
                if h.binary_search(g).is_ok() {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g.clone());
                let k = self.closure(&gens);
                if found.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        let mut out: Vec<Vec<Elem>> = found.into_iter().collect();
        out.sort_by_key(|h| h.len());
        out
    }

    /// Quotient by the subgroup generated by `h`; the quotient is presented on
    /// this group's cyclic factors, so `q.reduce(&embed(e))` is the projection.
    pub fn quotient(&self, h: &[Elem]) -> AbelianGroup {
        let r = self.orders.len();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (i, &d) in self.orders.iter().enumerate() {
            let mut row = vec![BigInt::zero(); r];
            row[i] = BigInt::from(d);
            rows.push(row);
        }
        for e in h {
            rows.push(e.iter().map(|&x| BigInt::from(x)).collect());
        }
        AbelianGroup::from_relations(r, &IntMatrix::from_rows(rows, r)).expect("quotient of a finite group is finite")
    }

    /// Image of an element of `self` in a quotient built by [`quotient`](Self::quotient).
    pub fn project(&self, q: &AbelianGroup, e: &Elem) -> Elem {
        let b: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
        q.reduce(&b)
    }
}

/// A concrete finite abelian group (given by its element list and law)
/// together with a presentation: greedily chosen generators, a word for every
/// element, and the relation lattice harvested from the Cayley graph.
#[derive(Clone, Debug)]
pub struct Presentation<T: Ord> {
    pub gens: Vec<T>,
    pub words: BTreeMap<T, Vec<i64>>,
    pub relations: IntMatrix,
    pub group: AbelianGroup,
}

impl<T: Clone + Ord> Presentation<T> {
    /// Presents the group whose elements are `elements` under `mul`.
    pub fn build(elements: &[T], identity: &T, mul: impl Fn(&T, &T) -> T) -> Self {
        let bfs = |gens: &[T]| -> BTreeMap<T, Vec<i64>> {
            let mut words = BTreeMap::new();
            words.insert(identity.clone(), vec![0i64; gens.len()]);
            let mut queue = VecDeque::from([identity.clone()]);
            while let Some(x) = queue.pop_front() {
                let w = words[&x].clone();
                for (i, g) in gens.iter().enumerate() {
                    let y = mul(&x, g);
                    if !words.contains_key(&y) {
                        let mut wy = w.clone();
                        wy[i] += 1;
                        words.insert(y.clone(), wy);
                        queue.push_back(y);
                    }
                }
            }
            words
        };
        let mut gens: Vec<T> = Vec::new();
        let mut reached = bfs(&gens);
        for e in elements {
            if reached.len() == elements.len() {
                break;
            }
            if !reached.contains_key(e) {
                gens.push(e.clone());
                reached = bfs(&gens);
            }
        }
        let words = bfs(&gens);
        let r = gens.len();
        let mut rows = Vec::new();
        for (x, w) in &words {
            for (i, g) in gens.iter().enumerate() {
                let wy = &words[&mul(x, g)];
                let row: Vec<BigInt> = (0..r).map(|j| BigInt::from(w[j] + i64::from(i == j) - wy[j])).collect();
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
        let relations = IntMatrix::from_rows(rows, r);
        let group = AbelianGroup::from_relations(r, &relations).expect("finite group");
        Presentation { gens, words, relations, group }
    }

    /// Exponent vector of `x` on the chosen generators.
    pub fn word(&self, x: &T) -> &[i64] {
        &self.words[x]
    }

    /// Canonical label of `x` in [`group`](Self::group).
    pub fn label(&self, x: &T) -> Elem {
        self.group.reduce_i64(self.word(x))
    }
}

/// Render an element label as `(a,b,…)`.
pub fn fmt_elem(e: &Elem) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}
