//! Mod-`l` group homology from the bar complex.
//!
//! `dim H_n = nullity(D_n) - rank(D_{n+1})`. Class representatives are the
//! lowest-weight cycles that are independent modulo boundaries and the
//! representatives already chosen, scanned weight by weight in canonical
//! order; if the cycle search runs out of budget, kernel vectors of `D_n`
//! complete the basis instead.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{Chain, ChainJson, TupleIndex};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Homomorphism, SubgroupEmbedding};
use crate::limits::{check_degree, Limits};
use crate::linalg::{boundary_image_matrix, boundary_matrix, Basis, EliminationCache, Reduction, SparseMatrix, SparseVec};
use crate::modp::Modulus;
use crate::search::{for_each_solution, BarOperator, Term};

/// Largest number of homology classes enumerated explicitly.
pub const CLASS_CAP: u64 = 100_000;

/// Largest number of same-weight cycles collected while choosing
/// representatives.
const CYCLE_BATCH_CAP: usize = 2_000_000;

fn to_u32_terms(c: &Chain) -> SparseVec {
    c.indexed_terms().iter().map(|&(k, v)| (k as u32, v)).collect()
}

/// The boundary space `B_n = im D_{n+1}`, eliminated once.
#[derive(Debug, Clone)]
pub struct BoundarySpace {
    group: Arc<FiniteGroup>,
    n: usize,
    l: Modulus,
    col_basis: Basis,
    columns: usize,
    cache: EliminationCache,
}

impl BoundarySpace {
    pub fn new(group: Arc<FiniteGroup>, n: usize, l: Modulus, limits: &Limits) -> Result<Self> {
        let m = boundary_image_matrix(&group, n + 1, l, limits.matrix_caps())?;
        let cache = EliminationCache::new(&m, false);
        Ok(BoundarySpace {
            group,
            n,
            l,
            col_basis: m.col_basis.clone(),
            columns: m.cols(),
            cache,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.l
    }

    /// `rank D_{n+1}`.
    pub fn rank(&self) -> usize {
        self.cache.rank()
    }

    fn check(&self, c: &Chain) -> Result<()> {
        if c.degree() != self.n || c.modulus() != self.l || !Arc::ptr_eq(c.group(), &self.group) && c.group().name() != self.group.name() {
            return Err(Error::Mismatch(format!(
                "chain of degree {} over {} against boundaries of degree {} over {}",
                c.degree(),
                c.group().name(),
                self.n,
                self.group.name()
            )));
        }
        Ok(())
    }

    pub fn contains(&self, b: &Chain) -> Result<bool> {
        self.check(b)?;
        Ok(self.cache.in_column_space(&to_u32_terms(b)))
    }

    /// The elimination's canonical filler of `b`, if `b` is a boundary.
    pub fn canonical_filler(&self, b: &Chain) -> Result<Option<Chain>> {
        self.check(b)?;
        let Some(x) = self.cache.solve(&to_u32_terms(b)) else {
            return Ok(None);
        };
        let terms: Vec<(TupleIndex, u32)> = x.iter().map(|&(j, v)| (self.col_basis.tuple_index(j), v)).collect();
        let mut terms = terms;
        terms.sort_unstable_by_key(|t| t.0);
        Ok(Some(Chain::from_indexed(self.group.clone(), self.n + 1, self.l, terms)))
    }

    fn cache(&self) -> &EliminationCache {
        &self.cache
    }

    fn columns(&self) -> usize {
        self.columns
    }
}

/// Dimensions and a class basis of `H_n(G; Z/l)`.
#[derive(Debug, Clone)]
pub struct HomologyResult {
    group: Arc<FiniteGroup>,
    n: usize,
    l: Modulus,
    pub dim: usize,
    /// `nullity D_n` (for `n = 0`, the rank of `C_0`).
    pub nullity: usize,
    /// `rank D_n` (0 for `n = 0`).
    pub rank_n: usize,
    /// `rank D_{n+1}`.
    pub rank_next: usize,
    pub reps: Vec<Chain>,
    /// Whether the representatives came from the exhaustive low-weight
    /// scan rather than the kernel fallback.
    pub reps_minimal: bool,
    boundaries: Arc<BoundarySpace>,
    classifier: EliminationCache,
    base_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    pub nullity_n: usize,
    pub rank_n: usize,
    pub rank_next: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyJson {
    pub group: String,
    pub n: usize,
    pub l: u32,
    pub dim: usize,
    pub reps: Vec<ChainJson>,
    pub reps_minimal: bool,
    pub ranks: Ranks,
}

impl HomologyResult {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.l
    }

    pub fn boundaries(&self) -> &Arc<BoundarySpace> {
        &self.boundaries
    }

    /// Number of classes, `l^dim`, if it fits in `u64`.
    pub fn class_count(&self) -> Option<u64> {
        (self.l.get() as u64).checked_pow(self.dim as u32)
    }

    /// Coordinates of the class of a cycle in the representative basis.
    pub fn class_of(&self, z: &Chain) -> Result<Vec<u32>> {
        self.boundaries.check(z)?;
        if !is_cycle(z)? {
            return Err(Error::NotACycle);
        }
        self.class_of_terms(&to_u32_terms(z))
    }

    fn class_of_terms(&self, z: &[(u32, u32)]) -> Result<Vec<u32>> {
        let x = self
            .classifier
            .solve(z)
            .ok_or_else(|| Error::Internal("cycle outside boundaries plus representatives".into()))?;
        let mut coords = vec![0; self.dim];
        for (j, v) in x {
            if j >= self.base_id {
                coords[(j - self.base_id) as usize] = v;
            }
        }
        Ok(coords)
    }

    pub fn to_json(&self) -> HomologyJson {
        HomologyJson {
            group: self.group.name().to_string(),
            n: self.n,
            l: self.l.get(),
            dim: self.dim,
            reps: self.reps.iter().map(Chain::to_json).collect(),
            reps_minimal: self.reps_minimal,
            ranks: Ranks {
                nullity_n: self.nullity,
                rank_n: self.rank_n,
                rank_next: self.rank_next,
            },
        }
    }
}

/// `H_n(G; Z/l)` with representatives.
pub fn homology(group: &Arc<FiniteGroup>, n: usize, l: Modulus, limits: &Limits) -> Result<HomologyResult> {
    check_degree(group.order(), n)?;
    let boundaries = Arc::new(BoundarySpace::new(group.clone(), n, l, limits)?);
    homology_with(group, n, l, boundaries, limits)
}

/// As [`homology`], reusing an already eliminated boundary space.
pub fn homology_with(
    group: &Arc<FiniteGroup>,
    n: usize,
    l: Modulus,
    boundaries: Arc<BoundarySpace>,
    limits: &Limits,
) -> Result<HomologyResult> {
    check_degree(group.order(), n)?;
    let (nullity, rank_n) = if n == 0 {
        (1, 0)
    } else {
        let d = boundary_matrix(group, n, l, limits.matrix_caps())?;
        let r = EliminationCache::new(&d, false).rank();
        (d.cols() - r, r)
    };
    let rank_next = boundaries.rank();
    let dim = nullity
        .checked_sub(rank_next)
        .ok_or_else(|| Error::Internal(format!("rank of D_{} exceeds nullity of D_{n}", n + 1)))?;
    let base_id = boundaries.columns() as u32;
    let mut classifier = boundaries.cache().clone();
    let mut reps = Vec::new();
    let mut reps_minimal = true;
    if dim > 0 {
        let push = |terms: Vec<(TupleIndex, u32)>, classifier: &mut EliminationCache, reps: &mut Vec<Chain>| {
            let v: SparseVec = terms.iter().map(|&(k, c)| (k as u32, c)).collect();
            if let Reduction::Pivot(_) = classifier.push_column(&v, base_id + reps.len() as u32) {
                reps.push(Chain::from_indexed(group.clone(), n, l, terms));
            }
        };
        if n == 0 {
            push(vec![(0, 1)], &mut classifier, &mut reps);
        } else {
            reps_minimal = scan_low_weight_cycles(group, n, l, limits, &mut |terms| {
                push(terms, &mut classifier, &mut reps);
                reps.len() == dim
            })?;
        }
        if reps.len() < dim {
            reps_minimal = false;
            let d = boundary_matrix(group, n, l, limits.matrix_caps())?;
            let cache = EliminationCache::new(&d, true);
            let mut kernel: Vec<SparseVec> = cache.kernel().unwrap_or_default().to_vec();
            kernel.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            for v in kernel {
                if reps.len() == dim {
                    break;
                }
                let terms = v.iter().map(|&(k, c)| (k as TupleIndex, c)).collect();
                push(terms, &mut classifier, &mut reps);
            }
        }
        if reps.len() != dim {
            return Err(Error::Internal(format!("found {} of {dim} representatives", reps.len())));
        }
    }
    Ok(HomologyResult {
        group: group.clone(),
        n,
        l,
        dim,
        nullity,
        rank_n,
        rank_next,
        reps,
        reps_minimal,
        boundaries,
        classifier,
        base_id,
    })
}

/// Feed cycles to `offer` by increasing weight, in canonical order within
/// a weight and up to scaling, until it returns `true`. Returns whether
/// that happened within budget.
fn scan_low_weight_cycles(
    group: &Arc<FiniteGroup>,
    n: usize,
    l: Modulus,
    limits: &Limits,
    offer: &mut dyn FnMut(Vec<(TupleIndex, u32)>) -> bool,
) -> Result<bool> {
    let op = BarOperator::new(group.clone(), n, l, limits.tuple_cap)?;
    let mut nodes_left = limits.node_budget;
    for w in 1..=limits.weight_ceiling {
        let mut batch: Vec<Vec<Term>> = Vec::new();
        let mut overflow = false;
        let used = for_each_solution(&op, &[], w, nodes_left, &mut |sol| {
            if sol[0].1 == 1 {
                batch.push(sol.to_vec());
            }
            if batch.len() >= CYCLE_BATCH_CAP {
                overflow = true;
                return true;
            }
            false
        });
        let Ok(used) = used else {
            return Ok(false);
        };
        if overflow {
            return Ok(false);
        }
        nodes_left = nodes_left.saturating_sub(used);
        batch.sort_unstable();
        for terms in batch {
            if offer(terms) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn is_cycle(c: &Chain) -> Result<bool> {
    if c.degree() == 0 {
        return Ok(true);
    }
    Ok(c.boundary()?.is_zero())
}

/// Whether `b` is a boundary, with the canonical filler as witness.
pub fn is_boundary(b: &Chain, limits: &Limits) -> Result<Option<Chain>> {
    let space = BoundarySpace::new(b.group().clone(), b.degree(), b.modulus(), limits)?;
    space.canonical_filler(b)
}

pub fn homologous(z1: &Chain, z2: &Chain, limits: &Limits) -> Result<bool> {
    if !is_cycle(z1)? || !is_cycle(z2)? {
        return Err(Error::NotACycle);
    }
    Ok(is_boundary(&z1.sub(z2)?, limits)?.is_some())
}

/// `f_G(n, l)`: the largest, over all classes, of the smallest cycle size
/// in the class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentativeBound {
    pub bound: usize,
    /// False when the search stopped early; `bound` is then an upper bound.
    pub exact: bool,
    pub classes_total: u64,
    pub classes_found: u64,
    /// Weights up to this one were searched completely.
    pub searched_weight: usize,
}

pub fn minimal_representative_bound(h: &HomologyResult, limits: &Limits) -> Result<RepresentativeBound> {
    let total = h
        .class_count()
        .filter(|&t| t <= CLASS_CAP)
        .ok_or_else(|| Error::cap("number of homology classes", (h.l.get() as u128).pow(h.dim as u32), CLASS_CAP as u128))?;
    if h.dim == 0 {
        return Ok(RepresentativeBound {
            bound: 0,
            exact: true,
            classes_total: 1,
            classes_found: 1,
            searched_weight: 0,
        });
    }
    let mut found: HashSet<Vec<u32>> = HashSet::new();
    found.insert(vec![0; h.dim]);
    let mut bound = 0;
    let mut searched = 0;
    let mut failure = None;
    if h.n == 0 {
        // Classes are the multiples of <>, each of size 1.
        return Ok(RepresentativeBound {
            bound: 1,
            exact: true,
            classes_total: total,
            classes_found: total,
            searched_weight: 1,
        });
    }
    let op = BarOperator::new(h.group.clone(), h.n, h.l, limits.tuple_cap)?;
    let mut nodes_left = limits.node_budget;
    for w in 1..=limits.weight_ceiling {
        let mut new_here = false;
        let r = for_each_solution(&op, &[], w, nodes_left, &mut |sol| {
            let v: SparseVec = sol.iter().map(|&(k, c)| (k as u32, c)).collect();
            match h.class_of_terms(&v) {
                Ok(c) => {
                    if found.insert(c) {
                        new_here = true;
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    return true;
                }
            }
            found.len() as u64 == total
        });
        if let Some(e) = failure.take() {
            return Err(e);
        }
        match r {
            Ok(used) => nodes_left = nodes_left.saturating_sub(used),
            Err(_) => break,
        }
        if new_here {
            bound = w;
        }
        if found.len() as u64 == total {
            return Ok(RepresentativeBound {
                bound,
                exact: true,
                classes_total: total,
                classes_found: total,
                searched_weight: w,
            });
        }
        searched = w;
    }
    // Unfound classes are bounded by the sum of the representatives they use.
    let sizes: Vec<usize> = h.reps.iter().map(Chain::size).collect();
    let mut coords = vec![0u32; h.dim];
    let mut upper = bound;
    'classes: loop {
        if !found.contains(&coords) {
            let s: usize = coords.iter().zip(&sizes).filter(|(c, _)| **c != 0).map(|(_, s)| s).sum();
            upper = upper.max(s);
        }
        for c in coords.iter_mut() {
            *c += 1;
            if *c < h.l.get() {
                continue 'classes;
            }
            *c = 0;
        }
        break;
    }
    Ok(RepresentativeBound {
        bound: upper.max(searched + 1),
        exact: false,
        classes_total: total,
        classes_found: found.len() as u64,
        searched_weight: searched,
    })
}

/// The map `H_n(S) -> H_n(T)` of a homomorphism, on representative bases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedMap {
    pub source: String,
    pub target: String,
    pub n: usize,
    pub l: u32,
    pub source_dim: usize,
    pub target_dim: usize,
    /// `target_dim` rows, `source_dim` columns.
    pub matrix: Vec<Vec<u32>>,
    pub rank: usize,
    pub surjective: bool,
    pub injective: bool,
}

pub fn induced_map(f: &Homomorphism, n: usize, l: Modulus, limits: &Limits) -> Result<InducedMap> {
    let hs = homology(&f.source, n, l, limits)?;
    let ht = homology(&f.target, n, l, limits)?;
    induced_map_with(f, &hs, &ht)
}

pub fn induced_map_with(f: &Homomorphism, hs: &HomologyResult, ht: &HomologyResult) -> Result<InducedMap> {
    if hs.n != ht.n || hs.l != ht.l {
        return Err(Error::Mismatch("homology results of different degree or modulus".into()));
    }
    let mut columns = Vec::with_capacity(hs.dim);
    for z in &hs.reps {
        let image = z.map_elements(ht.group.clone(), &f.map);
        columns.push(ht.class_of(&image)?);
    }
    let mut matrix = vec![vec![0u32; hs.dim]; ht.dim];
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            matrix[i][j] = v;
        }
    }
    let sparse = SparseMatrix::from_columns(
        hs.l,
        ht.dim,
        columns
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, &v)| (i as u32, v as i64)).collect())
            .collect(),
    )?;
    let rank = crate::linalg::rank(&sparse);
    Ok(InducedMap {
        source: hs.group.name().to_string(),
        target: ht.group.name().to_string(),
        n: hs.n,
        l: hs.l.get(),
        source_dim: hs.dim,
        target_dim: ht.dim,
        matrix,
        rank,
        surjective: rank == ht.dim,
        injective: rank == hs.dim,
    })
}

/// `[G : T]` and whether it is prime to `l`.
pub fn index_prime_to_l(embedding: &SubgroupEmbedding, l: Modulus) -> (u64, bool) {
    let index = embedding.index();
    (index, index % l.get() as u64 != 0)
}

/// The diagonal matrices of a matrix group.
pub fn diagonal_torus(group: &Arc<FiniteGroup>) -> Result<SubgroupEmbedding> {
    let rep = group
        .matrix_rep()
        .ok_or_else(|| Error::Precondition(format!("{} is not a matrix group", group.name())))?;
    let diag: Vec<_> = group.elements().filter(|&a| rep.is_diagonal(a)).collect();
    crate::group::subgroup_embedding(group, &diag)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusReport {
    pub group: String,
    pub order: u64,
    pub torus_order: u64,
    pub n: usize,
    pub l: u32,
    pub index: u64,
    pub index_prime_to_l: bool,
    pub induced: InducedMap,
    /// False only when the index is prime to `l` and the map still fails
    /// to be surjective.
    pub consistent: bool,
}

pub fn torus_check(group: &Arc<FiniteGroup>, n: usize, l: Modulus, limits: &Limits) -> Result<TorusReport> {
    let t = diagonal_torus(group)?;
    let (index, prime) = index_prime_to_l(&t, l);
    let induced = induced_map(&Homomorphism::from(&t), n, l, limits)?;
    Ok(TorusReport {
        group: group.name().to_string(),
        order: group.order() as u64,
        torus_order: t.subgroup.order() as u64,
        n,
        l: l.get(),
        index,
        index_prime_to_l: prime,
        consistent: !prime || induced.surjective,
        induced,
    })
}
