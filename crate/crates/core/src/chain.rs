//! Sparse chains of the bar complex with `Z/l` coefficients.
//!
//! An `n`-chain is a finite formal combination of `n`-tuples of group
//! elements. Tuples are stored by their index in the lexicographic
//! enumeration of `G^n` (leftmost entry most significant), so sorting by
//! index is the canonical tuple order used everywhere.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup};
use crate::modp::{axpy, Modulus};

/// Index of a tuple in the lexicographic enumeration of `G^n`.
pub type TupleIndex = u64;

/// The lexicographic bijection between `G^n` and `0..|G|^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleSpace {
    base: u64,
    degree: usize,
    size: u64,
}

impl TupleSpace {
    pub fn new(order: usize, degree: usize, cap: u64) -> Result<Self> {
        let size = (order as u128).pow(degree as u32);
        if size > cap as u128 {
            return Err(Error::cap(format!("tuple space |G|^{degree}"), size, cap as u128));
        }
        Ok(TupleSpace {
            base: order as u64,
            degree,
            size: size as u64,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn encode(&self, tuple: &[Element]) -> TupleIndex {
        encode(self.base, tuple)
    }

    pub fn decode(&self, index: TupleIndex) -> Vec<Element> {
        let mut out = vec![0; self.degree];
        decode_into(self.base, index, &mut out);
        out
    }
}

#[inline]
pub(crate) fn encode(base: u64, tuple: &[Element]) -> TupleIndex {
    tuple.iter().fold(0, |acc, &g| acc * base + g as u64)
}

#[inline]
pub(crate) fn decode_into(base: u64, mut index: TupleIndex, out: &mut [Element]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % base) as Element;
        index /= base;
    }
}

/// Terms of `d(<g_1, ..., g_m>)` as sorted `(tuple, coefficient)` pairs with
/// cancellation applied, written into `out`.
pub(crate) fn tuple_boundary(
    group: &FiniteGroup,
    m: usize,
    l: Modulus,
    index: TupleIndex,
    digits: &mut Vec<Element>,
    out: &mut Vec<(TupleIndex, u32)>,
) {
    out.clear();
    if m <= 1 {
        // d<g> = <> - <> = 0, and there is nothing below degree 0.
        return;
    }
    let base = group.order() as u64;
    digits.resize(m, 0);
    decode_into(base, index, digits);
    let face = |i: usize| -> TupleIndex {
        let mut acc = 0u64;
        if i == 0 {
            for &g in &digits[1..] {
                acc = acc * base + g as u64;
            }
        } else if i == m {
            for &g in &digits[..m - 1] {
                acc = acc * base + g as u64;
            }
        } else {
            for (j, &g) in digits.iter().enumerate() {
                if j == i {
                    continue;
                }
                let v = if j == i - 1 { group.mul(g, digits[i]) } else { g };
                acc = acc * base + v as u64;
            }
        }
        acc
    };
    for i in 0..=m {
        let key = face(i);
        out.push((key, l.sign(i % 2 == 0)));
    }
    merge_sorted_terms(out, l);
}

/// Sort `(key, coeff)` pairs, summing coefficients of equal keys and
/// dropping zeros.
pub(crate) fn merge_sorted_terms(terms: &mut Vec<(TupleIndex, u32)>, l: Modulus) {
    terms.sort_unstable_by_key(|t| t.0);
    let mut w = 0;
    for r in 0..terms.len() {
        if w > 0 && terms[w - 1].0 == terms[r].0 {
            terms[w - 1].1 = l.add(terms[w - 1].1, terms[r].1);
        } else {
            terms[w] = terms[r];
            w += 1;
        }
    }
    terms.truncate(w);
    terms.retain(|t| t.1 != 0);
}

/// An element of `C_n(G; Z/l)`.
#[derive(Clone)]
pub struct Chain {
    group: Arc<FiniteGroup>,
    degree: usize,
    l: Modulus,
    terms: Vec<(TupleIndex, u32)>,
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.group.name() == other.group.name()
            && self.degree == other.degree
            && self.l == other.l
            && self.terms == other.terms
    }
}

impl Eq for Chain {}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain[{} n={} {}](", self.group.name(), self.degree, self.l)?;
        for (i, (coeff, tuple)) in self.tuples().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{coeff}{tuple:?}")?;
        }
        write!(f, ")")
    }
}

/// Serialized chain: `{group, n, l, terms: [[coeff, [g1, ..., gn]], ...]}`
/// with terms in canonical tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub group: String,
    pub n: usize,
    pub l: u32,
    pub terms: Vec<(u32, Vec<Element>)>,
}

impl Chain {
    pub fn zero(group: Arc<FiniteGroup>, degree: usize, l: Modulus) -> Self {
        Chain {
            group,
            degree,
            l,
            terms: Vec::new(),
        }
    }

    /// Build from `(coefficient, tuple)` pairs; coefficients are reduced
    /// mod `l` and repeated tuples are summed.
    pub fn from_terms<I>(group: Arc<FiniteGroup>, degree: usize, l: Modulus, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Vec<Element>)>,
    {
        let base = group.order() as u64;
        let mut out = Vec::new();
        for (c, tuple) in terms {
            if tuple.len() != degree {
                return Err(Error::Malformed(format!(
                    "tuple {tuple:?} has length {}, expected {degree}",
                    tuple.len()
                )));
            }
            if let Some(&g) = tuple.iter().find(|&&g| g as usize >= group.order()) {
                return Err(Error::Malformed(format!("element index {g} out of range")));
            }
            out.push((encode(base, &tuple), l.reduce(c)));
        }
        merge_sorted_terms(&mut out, l);
        Ok(Chain {
            group,
            degree,
            l,
            terms: out,
        })
    }

    /// Build from already-encoded terms.
    pub fn from_indexed(
        group: Arc<FiniteGroup>,
        degree: usize,
        l: Modulus,
        mut terms: Vec<(TupleIndex, u32)>,
    ) -> Self {
        for t in terms.iter_mut() {
            t.1 %= l.get();
        }
        merge_sorted_terms(&mut terms, l);
        Chain {
            group,
            degree,
            l,
            terms,
        }
    }

    /// The single tuple `<g_1, ..., g_n>` with coefficient 1.
    pub fn basis(group: Arc<FiniteGroup>, tuple: &[Element], l: Modulus) -> Result<Self> {
        Chain::from_terms(group, tuple.len(), l, [(1, tuple.to_vec())])
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> Modulus {
        self.l
    }

    pub fn indexed_terms(&self) -> &[(TupleIndex, u32)] {
        &self.terms
    }

    /// `(coefficient, tuple)` pairs in canonical order.
    pub fn tuples(&self) -> impl Iterator<Item = (u32, Vec<Element>)> + '_ {
        let base = self.group.order() as u64;
        self.terms.iter().map(move |&(k, c)| {
            let mut t = vec![0; self.degree];
            decode_into(base, k, &mut t);
            (c, t)
        })
    }

    /// Number of nonzero coefficients.
    pub fn size(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, tuple: &[Element]) -> u32 {
        let key = encode(self.group.order() as u64, tuple);
        self.terms
            .binary_search_by_key(&key, |t| t.0)
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &Chain) -> Result<()> {
        if self.group.name() != other.group.name() || self.group.order() != other.group.order() {
            return Err(Error::Mismatch(format!(
                "groups {} and {}",
                self.group.name(),
                other.group.name()
            )));
        }
        if self.degree != other.degree {
            return Err(Error::Mismatch(format!("degrees {} and {}", self.degree, other.degree)));
        }
        if self.l != other.l {
            return Err(Error::Mismatch(format!("moduli {} and {}", self.l, other.l)));
        }
        Ok(())
    }

    /// `self + s * other`.
    pub fn combine(&self, other: &Chain, s: i64) -> Result<Chain> {
        self.check_compatible(other)?;
        let s = self.l.reduce(s);
        Ok(Chain {
            terms: axpy(&self.terms, s, &other.terms, self.l),
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Chain) -> Result<Chain> {
        self.combine(other, -1)
    }

    pub fn scale(&self, s: i64) -> Chain {
        let s = self.l.reduce(s);
        let terms = if s == 0 {
            Vec::new()
        } else {
            self.terms.iter().map(|&(k, c)| (k, self.l.mul(c, s))).collect()
        };
        Chain { terms, ..self.clone() }
    }

    /// The bar differential `d_n`.
    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return Err(Error::Precondition("boundary of a degree-0 chain".into()));
        }
        let mut acc: Vec<(TupleIndex, u32)> = Vec::with_capacity(self.terms.len() * (self.degree + 1));
        let mut digits = Vec::new();
        let mut faces = Vec::new();
        for &(key, c) in &self.terms {
            tuple_boundary(&self.group, self.degree, self.l, key, &mut digits, &mut faces);
            acc.extend(faces.iter().map(|&(k, v)| (k, self.l.mul(v, c))));
        }
        merge_sorted_terms(&mut acc, self.l);
        Ok(Chain {
            group: self.group.clone(),
            degree: self.degree - 1,
            l: self.l,
            terms: acc,
        })
    }

    /// Image under an element map applied entrywise to every tuple.
    pub fn map_elements(&self, target: Arc<FiniteGroup>, map: &[Element]) -> Chain {
        let terms = self
            .tuples()
            .map(|(c, t)| {
                let image: Vec<Element> = t.iter().map(|&g| map[g as usize]).collect();
                (encode(target.order() as u64, &image), c)
            })
            .collect();
        Chain::from_indexed(target, self.degree, self.l, terms)
    }

    /// Canonical total order: by size, then by terms in tuple order.
    pub fn canonical_cmp(&self, other: &Chain) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.terms.cmp(&other.terms))
    }

    pub fn to_json(&self) -> ChainJson {
        ChainJson {
            group: self.group.name().to_string(),
            n: self.degree,
            l: self.l.get(),
            terms: self.tuples().collect(),
        }
    }

    /// Inverse of [`Chain::to_json`]; the group is supplied by the caller and
    /// must match the recorded name.
    pub fn from_json(json: &ChainJson, group: Arc<FiniteGroup>) -> Result<Chain> {
        if json.group != group.name() {
            return Err(Error::Mismatch(format!(
                "chain is over {}, group supplied is {}",
                json.group,
                group.name()
            )));
        }
        let l = Modulus::new(json.l)?;
        Chain::from_terms(
            group,
            json.n,
            l,
            json.terms.iter().map(|(c, t)| (*c as i64, t.clone())),
        )
    }
}

/// A chain with exactly `size` distinct tuples chosen uniformly from `G^n`
/// and uniform nonzero coefficients. Deterministic in `seed`.
pub fn random_chain(
    group: Arc<FiniteGroup>,
    degree: usize,
    l: Modulus,
    size: usize,
    seed: u64,
    tuple_cap: u64,
) -> Result<Chain> {
    let space = TupleSpace::new(group.order(), degree, tuple_cap)?;
    if size as u64 > space.len() {
        return Err(Error::Precondition(format!(
            "requested size {size} exceeds |G|^{degree} = {}",
            space.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<usize> = sample(&mut rng, space.len() as usize, size).into_vec();
    picks.sort_unstable();
    let terms = picks
        .into_iter()
        .map(|k| (k as TupleIndex, rng.gen_range(1..l.get())))
        .collect();
    Ok(Chain::from_indexed(group, degree, l, terms))
}
