//! Finite groups behind a uniform element-index interface.
//!
//! Every group numbers its elements `0..order`. Small groups materialize
//! their multiplication table; larger ones multiply on demand from the
//! underlying representation (permutations, matrices, factors of a
//! product, or a parent group for subgroups and quotients).

mod matrix;
mod ops;
mod spec;

use std::fmt;
use std::sync::Arc;

pub use matrix::MatrixRep;
pub use ops::{
    abelianization, commutator_length, commutator_lengths, commutator_set, derived_subgroup,
    direct_product, elementary_rank, generated_subgroup, generators, quotient, subgroup_embedding,
    Homomorphism, SubgroupEmbedding,
};
pub use spec::{build_group, GroupSpec};

/// Groups up to this order keep an explicit multiplication table.
pub const TABLE_THRESHOLD: usize = 2048;

/// Default cap on group orders accepted by [`build_group`].
pub const DEFAULT_ORDER_CAP: u64 = 20_000;

pub type Element = u32;

#[derive(Debug)]
pub(crate) enum Structure {
    Cyclic { m: u32 },
    Dihedral { n: u32 },
    Perm { degree: usize },
    Matrix(MatrixRep),
    Product(Arc<FiniteGroup>, Arc<FiniteGroup>),
    Sub { parent: Arc<FiniteGroup>, elems: Vec<u32> },
    Quotient { parent: Arc<FiniteGroup>, reps: Vec<u32>, proj: Vec<u32> },
}

pub struct FiniteGroup {
    name: String,
    order: usize,
    identity: Element,
    inv: Vec<Element>,
    table: Option<Vec<Element>>,
    structure: Structure,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

fn factorial_rank(p: &[u8]) -> u32 {
    let n = p.len();
    let mut rank = 0u32;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count() as u32;
        rank = rank * (n - i) as u32 + smaller;
    }
    rank
}

fn factorial_unrank(mut r: u32, n: usize) -> Vec<u8> {
    let mut fact = vec![1u32; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as u32;
    }
    let mut avail: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let idx = (r / fact[i]) as usize;
        r %= fact[i];
        out.push(avail.remove(idx));
    }
    out
}

impl Structure {
    fn mul(&self, a: Element, b: Element) -> Element {
        match self {
            Structure::Cyclic { m } => (a + b) % m,
            Structure::Dihedral { n } => {
                let (sa, ka) = (a >= *n, a % n);
                let (sb, kb) = (b >= *n, b % n);
                match (sa, sb) {
                    (false, false) => (ka + kb) % n,
                    (false, true) => n + (kb + n - ka) % n,
                    (true, false) => n + (ka + kb) % n,
                    (true, true) => (kb + n - ka) % n,
                }
            }
            Structure::Perm { degree } => {
                let p = factorial_unrank(a, *degree);
                let q = factorial_unrank(b, *degree);
                let r: Vec<u8> = q.iter().map(|&i| p[i as usize]).collect();
                factorial_rank(&r)
            }
            Structure::Matrix(rep) => rep.mul(a, b),
            Structure::Product(g, h) => {
                let m = h.order() as u32;
                g.mul(a / m, b / m) * m + h.mul(a % m, b % m)
            }
            Structure::Sub { parent, elems } => {
                let c = parent.mul(elems[a as usize], elems[b as usize]);
                elems.binary_search(&c).expect("subgroup closed under multiplication") as u32
            }
            Structure::Quotient { parent, reps, proj } => {
                proj[parent.mul(reps[a as usize], reps[b as usize]) as usize]
            }
        }
    }

    fn inv(&self, a: Element) -> Element {
        match self {
            Structure::Cyclic { m } => (m - a) % m,
            Structure::Dihedral { n } => {
                if a >= *n {
                    a
                } else {
                    (n - a) % n
                }
            }
            Structure::Perm { degree } => {
                let p = factorial_unrank(a, *degree);
                let mut q = vec![0u8; *degree];
                for (i, &x) in p.iter().enumerate() {
                    q[x as usize] = i as u8;
                }
                factorial_rank(&q)
            }
            Structure::Matrix(rep) => rep.inv(a),
            Structure::Product(g, h) => {
                let m = h.order() as u32;
                g.inv(a / m) * m + h.inv(a % m)
            }
            Structure::Sub { parent, elems } => {
                let c = parent.inv(elems[a as usize]);
                elems.binary_search(&c).expect("subgroup closed under inverses") as u32
            }
            Structure::Quotient { parent, reps, proj } => proj[parent.inv(reps[a as usize]) as usize],
        }
    }

    fn identity(&self) -> Element {
        match self {
            Structure::Cyclic { .. } | Structure::Dihedral { .. } | Structure::Perm { .. } => 0,
            Structure::Matrix(rep) => rep.identity(),
            Structure::Product(g, h) => g.identity() * h.order() as u32 + h.identity(),
            Structure::Sub { parent, elems } => {
                elems.binary_search(&parent.identity()).expect("subgroup contains identity") as u32
            }
            Structure::Quotient { parent, proj, .. } => proj[parent.identity() as usize],
        }
    }

    fn label(&self, a: Element) -> String {
        match self {
            Structure::Cyclic { .. } => a.to_string(),
            Structure::Dihedral { n } => {
                if a >= *n {
                    format!("s*r^{}", a - n)
                } else {
                    format!("r^{a}")
                }
            }
            Structure::Perm { degree } => {
                let p = factorial_unrank(a, *degree);
                let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                format!("[{}]", parts.join(" "))
            }
            Structure::Matrix(rep) => rep.label(a),
            Structure::Product(g, h) => {
                let m = h.order() as u32;
                format!("({},{})", g.label(a / m), h.label(a % m))
            }
            Structure::Sub { parent, elems } => parent.label(elems[a as usize]),
            Structure::Quotient { parent, reps, .. } => format!("{}*D", parent.label(reps[a as usize])),
        }
    }
}

impl FiniteGroup {
    pub(crate) fn from_structure(name: String, order: usize, structure: Structure) -> Self {
        let identity = structure.identity();
        let table = (order <= TABLE_THRESHOLD).then(|| {
            let mut t = Vec::with_capacity(order * order);
            for a in 0..order as u32 {
                for b in 0..order as u32 {
                    t.push(structure.mul(a, b));
                }
            }
            t
        });
        let inv = match &table {
            Some(t) => (0..order)
                .map(|a| {
                    (0..order as u32)
                        .find(|&b| t[a * order + b as usize] == identity)
                        .expect("every element has an inverse")
                })
                .collect(),
            None => (0..order as u32).map(|a| structure.inv(a)).collect(),
        };
        FiniteGroup {
            name,
            order,
            identity,
            inv,
            table,
            structure,
        }
    }

    /// The spec string (or derived description) this group was built from.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Element {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order as Element
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        match &self.table {
            Some(t) => t[a as usize * self.order + b as usize],
            None => self.structure.mul(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        self.inv[a as usize]
    }

    pub fn pow(&self, a: Element, k: u64) -> Element {
        let (mut acc, mut base, mut k) = (self.identity, a, k);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: Element) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn commutator(&self, a: Element, b: Element) -> Element {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn label(&self, a: Element) -> String {
        self.structure.label(a)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = generators(self);
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Matrix entries (row-major field elements) for matrix groups and
    /// their subgroups.
    pub fn matrix_entries(&self, a: Element) -> Option<Vec<u32>> {
        match &self.structure {
            Structure::Matrix(rep) => Some(rep.entries(a)),
            Structure::Sub { parent, elems } => parent.matrix_entries(elems[a as usize]),
            _ => None,
        }
    }

    pub fn matrix_rep(&self) -> Option<&MatrixRep> {
        match &self.structure {
            Structure::Matrix(rep) => Some(rep),
            _ => None,
        }
    }
}
