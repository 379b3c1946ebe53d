//! Filler norms, the isoperimetric function, filler distance and the
//! sentences `Phi` and `Psi`.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::census::Census;
use crate::chain::{Chain, ChainJson, TupleIndex, TupleSpace};
use crate::error::{Error, Result};
use crate::group::{commutator_lengths, Element, FiniteGroup};
use crate::homology::{homology, is_cycle, BoundarySpace, HomologyResult};
use crate::limits::Limits;
use crate::modp::Modulus;
use crate::search::{exists_with_weight, for_each_solution, min_weight_solution, BarOperator, SearchBudget, Term};

/// Census items between checkpoint writes.
pub const CHECKPOINT_EVERY: u64 = 1_000_000;

/// A minimum-size filler, or the best upper bound the budget allowed.
#[derive(Debug, Clone)]
pub struct FillerResult {
    pub input: Chain,
    pub filler_size: usize,
    pub witness: Chain,
    pub exact: bool,
    pub nodes_explored: u64,
    pub budget: SearchBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillerJson {
    pub input: ChainJson,
    pub filler_size: usize,
    pub witness: ChainJson,
    pub exact: bool,
    pub nodes_explored: u64,
    pub node_budget: u64,
    pub weight_ceiling: usize,
}

impl FillerResult {
    pub fn to_json(&self) -> FillerJson {
        FillerJson {
            input: self.input.to_json(),
            filler_size: self.filler_size,
            witness: self.witness.to_json(),
            exact: self.exact,
            nodes_explored: self.nodes_explored,
            node_budget: self.budget.max_nodes,
            weight_ceiling: self.budget.max_weight,
        }
    }
}

/// Filler searches against one `(G, n, l)`.
pub struct FillerSolver {
    space: Arc<BoundarySpace>,
    op: BarOperator,
    budget: SearchBudget,
}

/// Filler size of a raw term list, without building chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Norm {
    size: usize,
    exact: bool,
    nodes: u64,
}

impl FillerSolver {
    pub fn new(space: Arc<BoundarySpace>, limits: &Limits) -> Result<Self> {
        let op = BarOperator::new(space.group().clone(), space.degree() + 1, space.modulus(), limits.tuple_cap)?;
        Ok(FillerSolver {
            space,
            op,
            budget: limits.budget(),
        })
    }

    pub fn for_degree(group: &Arc<FiniteGroup>, n: usize, l: Modulus, limits: &Limits) -> Result<Self> {
        FillerSolver::new(Arc::new(BoundarySpace::new(group.clone(), n, l, limits)?), limits)
    }

    pub fn space(&self) -> &Arc<BoundarySpace> {
        &self.space
    }

    pub fn budget(&self) -> SearchBudget {
        self.budget
    }

    fn chain(&self, terms: &[Term]) -> Chain {
        Chain::from_indexed(self.space.group().clone(), self.space.degree(), self.space.modulus(), terms.to_vec())
    }

    /// `filler_norm(b)`; fails with `NotABoundary` when `b` is not one.
    pub fn norm(&self, b: &Chain) -> Result<FillerResult> {
        let canonical = self.space.canonical_filler(b)?.ok_or(Error::NotABoundary)?;
        let res = min_weight_solution(
            &self.op,
            b.indexed_terms(),
            self.budget,
            Some(canonical.indexed_terms().to_vec()),
        );
        let sol = res
            .solution
            .ok_or_else(|| Error::Internal("filler search lost its fallback".into()))?;
        let witness = Chain::from_indexed(self.space.group().clone(), b.degree() + 1, b.modulus(), sol);
        if witness.boundary()? != *b {
            return Err(Error::Internal("filler witness does not bound its input".into()));
        }
        Ok(FillerResult {
            input: b.clone(),
            filler_size: witness.size(),
            witness,
            exact: res.exact,
            nodes_explored: res.nodes,
            budget: self.budget,
        })
    }

    fn norm_terms(&self, terms: &[Term]) -> Result<Option<Norm>> {
        let b = self.chain(terms);
        match self.norm(&b) {
            Ok(r) => Ok(Some(Norm {
                size: r.filler_size,
                exact: r.exact,
                nodes: r.nodes_explored,
            })),
            Err(Error::NotABoundary) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Whether `b` has a filler of size at most `k`; `None` when the budget
    /// ran out before deciding.
    pub fn fills_within(&self, b: &[Term], k: usize) -> Option<bool> {
        let budget = SearchBudget {
            max_nodes: self.budget.max_nodes,
            max_weight: k,
        };
        let res = min_weight_solution(&self.op, b, budget, None);
        match (res.solution, res.aborted) {
            (Some(_), _) => Some(true),
            (None, false) => Some(false),
            (None, true) => None,
        }
    }

    /// Whether `b` has a filler of size exactly `k`.
    pub fn fills_exactly(&self, b: &[Term], k: usize) -> Option<bool> {
        exists_with_weight(&self.op, b, k, self.budget.max_nodes).0
    }
}

pub fn filler_norm(b: &Chain, limits: &Limits) -> Result<FillerResult> {
    FillerSolver::for_degree(b.group(), b.degree(), b.modulus(), limits)?.norm(b)
}

/// `dist(z1, z2) = filler_norm(z1 - z2)` for homologous cycles.
pub fn filler_distance(z1: &Chain, z2: &Chain, limits: &Limits) -> Result<FillerResult> {
    let solver = FillerSolver::for_degree(z1.group(), z1.degree(), z1.modulus(), limits)?;
    distance_with(&solver, z1, z2)
}

pub fn distance_with(solver: &FillerSolver, z1: &Chain, z2: &Chain) -> Result<FillerResult> {
    if !is_cycle(z1)? || !is_cycle(z2)? {
        return Err(Error::NotACycle);
    }
    match solver.norm(&z1.sub(z2)?) {
        Err(Error::NotABoundary) => Err(Error::NotHomologous),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsopMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsopResult {
    #[serde(rename = "K")]
    pub k: usize,
    pub value: usize,
    pub mode: IsopMode,
    /// Boundaries of size `K` examined.
    pub census: u64,
    /// Chains of size `K` examined.
    pub chains: u64,
    /// Every filler value behind `value` was certified minimal.
    pub exact: bool,
    pub bound: BoundKind,
}

/// How a reported value relates to the true one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Exact,
    /// Sampled census with certified fillers.
    Lower,
    /// Full census, but some fillers are only upper bounds.
    Upper,
    /// Sampled census with uncertified fillers.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    value: usize,
    census: u64,
    chains: u64,
    exact: bool,
}

impl Tally {
    fn start() -> Self {
        Tally {
            exact: true,
            ..Default::default()
        }
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            value: self.value.max(o.value),
            census: self.census + o.census,
            chains: self.chains + o.chains,
            exact: self.exact && o.exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    key: String,
    next_index: u64,
    value: usize,
    census: u64,
    chains: u64,
    exact: bool,
}

fn read_checkpoint(path: &Path, key: &str) -> Result<Option<Checkpoint>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::Malformed(format!("checkpoint {}: {e}", path.display()))),
    };
    let cp: Checkpoint =
        serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("checkpoint {}: {e}", path.display())))?;
    Ok((cp.key == key).then_some(cp))
}

fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let text = serde_json::to_string(cp).map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Error::Precondition(format!("cannot write checkpoint {}: {e}", path.display())))
}

/// Whether a chain given by sorted terms is a cycle.
fn is_cycle_terms(group: &Arc<FiniteGroup>, n: usize, l: Modulus, terms: &[Term]) -> Result<bool> {
    if n <= 1 {
        return Ok(true);
    }
    Ok(Chain::from_indexed(group.clone(), n, l, terms.to_vec()).boundary()?.is_zero())
}

fn tuple_count(group: &FiniteGroup, n: usize, limits: &Limits) -> Result<u64> {
    let t = (group.order() as u128).pow(n as u32);
    if t > limits.tuple_cap as u128 {
        return Err(Error::cap(format!("tuple space |G|^{n}"), t, limits.tuple_cap as u128));
    }
    Ok(t as u64)
}

/// Largest group whose automorphisms are tabulated for census
/// symmetry reduction.
const SYMMETRY_MAX_ORDER: usize = 2000;

/// Automorphisms act on chains, commute with `d` and preserve size,
/// so an exhaustive census only needs one chain per orbit. A chain is
/// evaluated when it is the least member of its orbit after rescaling to
/// leading coefficient 1, and then counts once per orbit member.
struct Symmetry {
    tuples: TupleSpace,
    /// Non-identity automorphisms forming a group with the identity.
    maps: Vec<Vec<Element>>,
    l: Modulus,
}

impl Symmetry {
    fn new(group: &FiniteGroup, n: usize, l: Modulus, cap: u64) -> Result<Option<Self>> {
        if group.order() > SYMMETRY_MAX_ORDER || n == 0 {
            return Ok(None);
        }
        // Abelian groups have no inner automorphisms but can be inverted.
        let mut maps: Vec<Vec<Element>> = if group.is_abelian() {
            vec![group.elements().map(|x| group.inv(x)).collect()]
        } else {
            group
                .elements()
                .map(|g| {
                    let gi = group.inv(g);
                    group.elements().map(|x| group.mul(group.mul(g, x), gi)).collect()
                })
                .collect()
        };
        maps.sort();
        maps.dedup();
        let identity: Vec<Element> = group.elements().collect();
        maps.retain(|m| *m != identity);
        if maps.is_empty() {
            return Ok(None);
        }
        Ok(Some(Symmetry {
            tuples: TupleSpace::new(group.order(), n, cap)?,
            maps,
            l,
        }))
    }

    fn image(&self, map: &[Element], terms: &[Term], out: &mut Vec<Term>) {
        out.clear();
        out.extend(terms.iter().map(|&(t, a)| {
            let tuple: Vec<Element> = self.tuples.decode(t).into_iter().map(|x| map[x as usize]).collect();
            (self.tuples.encode(&tuple), a)
        }));
        out.sort_unstable();
        if let Some(&(_, lead)) = out.first() {
            let s = self.l.inv(lead);
            for term in out.iter_mut() {
                term.1 = self.l.mul(term.1, s);
            }
        }
    }

    /// Least member of the orbit of normalized `terms`.
    fn canonical(&self, terms: Vec<Term>) -> Vec<Term> {
        let mut best = terms;
        let mut scratch = Vec::with_capacity(best.len());
        for m in &self.maps {
            self.image(m, &best, &mut scratch);
            if scratch < best {
                std::mem::swap(&mut scratch, &mut best);
            }
        }
        best
    }

    /// Orbit size of `terms`, or `None` when another member is smaller.
    fn orbit(&self, terms: &[Term], scratch: &mut Vec<Term>) -> Option<u64> {
        let mut fixed = 1u64;
        for m in &self.maps {
            self.image(m, terms, scratch);
            match scratch.as_slice().cmp(terms) {
                std::cmp::Ordering::Less => return None,
                std::cmp::Ordering::Equal => fixed += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
        Some((self.maps.len() as u64 + 1) / fixed)
    }
}

/// Options for [`isop`].
#[derive(Debug, Clone, Default)]
pub struct IsopOptions<'a> {
    pub sampled: Option<(u64, u64)>,
    pub checkpoint: Option<&'a Path>,
}

/// `isop(K)`: the largest filler norm over boundaries of size exactly `K`,
/// 0 when there are none.
///
/// Exhaustive censuses scan chains with leading coefficient 1, which loses
/// nothing because filler norms are invariant under scaling.
pub fn isop(solver: &FillerSolver, k: usize, limits: &Limits, opts: &IsopOptions<'_>) -> Result<IsopResult> {
    isop_with(solver, k, limits, opts, true)
}

fn isop_with(solver: &FillerSolver, k: usize, limits: &Limits, opts: &IsopOptions<'_>, reduce: bool) -> Result<IsopResult> {
    let space = solver.space();
    let (group, n, l) = (space.group().clone(), space.degree(), space.modulus());
    let tuples = tuple_count(&group, n, limits)?;
    let symmetry = match opts.sampled {
        None if reduce => Symmetry::new(&group, n, l, limits.tuple_cap)?,
        _ => None,
    };
    let eval = |acc: &mut Tally, terms: &[Term]| -> Result<()> {
        let weight = match &symmetry {
            Some(sym) => match sym.orbit(terms, &mut Vec::with_capacity(terms.len())) {
                Some(w) => w,
                None => return Ok(()),
            },
            None => 1,
        };
        acc.chains += weight;
        if !is_cycle_terms(&group, n, l, terms)? {
            return Ok(());
        }
        if let Some(f) = solver.norm_terms(terms)? {
            acc.census += weight;
            acc.value = acc.value.max(f.size);
            acc.exact &= f.exact;
        }
        Ok(())
    };
    if let Some((samples, seed)) = opts.sampled {
        if k as u64 > tuples {
            return Err(Error::Precondition(format!("size {k} exceeds the {tuples} tuples available")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<Vec<Term>> = (0..samples)
            .map(|_| {
                let mut support: Vec<TupleIndex> =
                    sample(&mut rng, tuples as usize, k).into_iter().map(|x| x as u64).collect();
                support.sort_unstable();
                support.into_iter().map(|t| (t, rng.gen_range(1..l.get()))).collect()
            })
            .collect();
        use rayon::prelude::*;
        let tally = draws
            .par_iter()
            .map(|t| {
                let mut acc = Tally::start();
                eval(&mut acc, t)?;
                Ok(acc)
            })
            .try_reduce(Tally::start, |a, b| Ok(a.merge(b)))?;
        return Ok(IsopResult {
            k,
            value: tally.value,
            mode: IsopMode::Sampled,
            census: tally.census,
            chains: tally.chains,
            exact: tally.exact,
            bound: if tally.exact {
                BoundKind::Lower
            } else {
                BoundKind::Indeterminate
            },
        });
    }
    let census = Census::new(tuples, k, l, true, limits.census_cap)?;
    let key = format!("isop|{}|n={n}|l={}|K={k}", group.name(), l.get());
    let mut tally = Tally::start();
    let mut next = 0;
    if let Some(path) = opts.checkpoint {
        if let Some(cp) = read_checkpoint(path, &key)? {
            next = cp.next_index.min(census.len());
            tally = Tally {
                value: cp.value,
                census: cp.census,
                chains: cp.chains,
                exact: cp.exact,
            };
        }
    }
    while next < census.len() {
        let end = (next + CHECKPOINT_EVERY).min(census.len());
        let part = census.fold(next..end, Tally::start, eval, Tally::merge)?;
        tally = tally.merge(part);
        next = end;
        if let Some(path) = opts.checkpoint {
            write_checkpoint(
                path,
                &Checkpoint {
                    key: key.clone(),
                    next_index: next,
                    value: tally.value,
                    census: tally.census,
                    chains: tally.chains,
                    exact: tally.exact,
                },
            )?;
        }
    }
    let m = census.multiplicity();
    Ok(IsopResult {
        k,
        value: tally.value,
        mode: IsopMode::Exhaustive,
        census: tally.census * m,
        chains: tally.chains * m,
        exact: tally.exact,
        bound: if tally.exact { BoundKind::Exact } else { BoundKind::Upper },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsopProfile {
    pub profile: Vec<IsopResult>,
    /// `K1(K) = max{isop(1), ..., isop(2K)}` for every `K` with `2K` in range.
    pub k1: Vec<usize>,
}

pub fn isop_profile(solver: &FillerSolver, k_max: usize, limits: &Limits, sampled: Option<(u64, u64)>) -> Result<IsopProfile> {
    if sampled.is_none() {
        let space = solver.space();
        let tuples = tuple_count(space.group(), space.degree(), limits)?;
        for k in 0..=k_max {
            Census::new(tuples, k, space.modulus(), true, limits.census_cap)?;
        }
    }
    let mut profile = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let opts = IsopOptions {
            sampled: sampled.map(|(s, seed)| (s, seed.wrapping_add(k as u64))),
            checkpoint: None,
        };
        profile.push(isop(solver, k, limits, &opts)?);
    }
    let k1 = (0..=k_max / 2)
        .map(|k| profile[1..=2 * k].iter().map(|r| r.value).max().unwrap_or(0))
        .collect();
    Ok(IsopProfile { profile, k1 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiResult {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "K1")]
    pub k1: usize,
    #[serde(rename = "K2")]
    pub k2: usize,
    pub holds: bool,
    /// Boundaries of size `K` examined.
    pub census: u64,
    pub counterexample: Option<ChainJson>,
}

/// `Phi_{K,K1,K2}`: every boundary of size `K` admitting a filler of size
/// exactly `K1` has filler norm at most `K2`.
pub fn check_phi(solver: &FillerSolver, k: usize, k1: usize, k2: usize, limits: &Limits) -> Result<PhiResult> {
    let space = solver.space();
    let (group, n, l) = (space.group().clone(), space.degree(), space.modulus());
    let census = Census::new(tuple_count(&group, n, limits)?, k, l, true, limits.census_cap)?;
    // (boundaries seen, smallest counterexample index)
    let found = census.fold(
        0..census.len(),
        || (0u64, None::<Vec<Term>>),
        |acc, terms| {
            if !is_cycle_terms(&group, n, l, terms)? {
                return Ok(());
            }
            let Some(f) = solver.norm_terms(terms)? else {
                return Ok(());
            };
            acc.0 += 1;
            if f.size <= k2 || acc.1.is_some() {
                return Ok(());
            }
            if !f.exact {
                // The true norm may still be at most K2.
                if solver.fills_within(terms, k2) != Some(false) {
                    return Err(Error::BudgetExhausted {
                        budget: solver.budget().max_nodes,
                    });
                }
            }
            let exact_k1 = match f.size.cmp(&k1) {
                std::cmp::Ordering::Equal => Some(true),
                std::cmp::Ordering::Greater if f.exact => Some(false),
                _ => solver.fills_exactly(terms, k1),
            };
            match exact_k1 {
                Some(true) => acc.1 = Some(terms.to_vec()),
                Some(false) => {}
                None => {
                    return Err(Error::BudgetExhausted {
                        budget: solver.budget().max_nodes,
                    })
                }
            }
            Ok(())
        },
        |a, b| {
            let first = match (a.1, b.1) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
            (a.0 + b.0, first)
        },
    )?;
    Ok(PhiResult {
        k,
        k1,
        k2,
        holds: found.1.is_none(),
        census: found.0 * census.multiplicity(),
        counterexample: found.1.map(|t| solver.chain(&t).to_json()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiResult {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "K1")]
    pub k1: usize,
    pub h_bound: usize,
    pub holds: bool,
    /// Number of cycles in each tuple, `l^h_bound + 1`.
    pub tuple_size: u64,
    /// Cycles of size at most `K`.
    pub cycles: u64,
    /// Distinct classes among them.
    pub classes: u64,
    /// Largest set of these cycles with no homologous pair within
    /// distance `K1`.
    pub max_spread: u64,
    pub distances_checked: u64,
    pub counterexample: Option<Vec<ChainJson>>,
}

/// Pairs checked per class before refusing.
pub const PSI_PAIR_CAP: u64 = 2_000_000;

/// Largest class whose far-pair graph is searched for an independent set.
const MIS_CAP: usize = 64;

/// `Psi_K`: among any `l^h_bound + 1` cycles of size at most `K`, two are
/// homologous with filler distance at most `K1`.
///
/// `h_bound` bounds the dimension of `H_n`, so `l^h_bound` bounds the
/// number of classes. The check lists every cycle of size at most `K`,
/// groups them by class and finds, per class, the largest subset with no
/// pair within distance `K1`; `Psi` fails exactly when these maxima add up
/// to `l^h_bound + 1` or more.
pub fn check_psi(
    solver: &FillerSolver,
    h: &HomologyResult,
    k: usize,
    k1: usize,
    h_bound: usize,
    limits: &Limits,
) -> Result<PsiResult> {
    let space = solver.space();
    let (group, n, l) = (space.group().clone(), space.degree(), space.modulus());
    if h.degree() != n || h.modulus() != l {
        return Err(Error::Mismatch("homology result does not match the filler solver".into()));
    }
    let tuple_size = (l.get() as u64)
        .checked_pow(h_bound as u32)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::cap("tuple size l^H + 1", u128::MAX, u64::MAX as u128))?;
    let tuples = tuple_count(&group, n, limits)?;
    let mut full: u128 = 0;
    for w in 0..=k {
        full += crate::census::binomial(tuples, w as u64).saturating_mul(((l.get() - 1) as u128).pow(w as u32));
    }
    if full > limits.census_cap as u128 {
        return Err(Error::cap(format!("census of chains of size <= {k}"), full, limits.census_cap as u128));
    }
    let op = BarOperator::new(group.clone(), n, l, limits.tuple_cap)?;
    let mut classes: HashMap<Vec<u32>, Vec<Vec<Term>>> = HashMap::new();
    let mut cycles = 0u64;
    let mut failure = None;
    let node_cap = limits.node_budget.max(limits.census_cap.saturating_mul(k as u64 + 2));
    for w in 0..=k {
        for_each_solution(&op, &[], w, node_cap, &mut |sol| {
            cycles += 1;
            let z = Chain::from_indexed(group.clone(), n, l, sol.to_vec());
            match h.class_of(&z) {
                Ok(c) => classes.entry(c).or_default().push(sol.to_vec()),
                Err(e) => {
                    failure = Some(e);
                    return true;
                }
            }
            false
        })?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
    }
    let mut keys: Vec<Vec<u32>> = classes.keys().cloned().collect();
    keys.sort();
    let mut spread = 0u64;
    let mut checked = 0u64;
    let mut witness: Vec<Vec<Term>> = Vec::new();
    for key in &keys {
        let members = &classes[key];
        let (size, picks, pairs) = class_spread(solver, members, k1)?;
        spread += size;
        checked += pairs;
        witness.extend(picks.into_iter().map(|i| members[i].clone()));
    }
    let holds = spread < tuple_size;
    let counterexample = (!holds).then(|| {
        witness
            .iter()
            .take(tuple_size as usize)
            .map(|t| solver.chain_in_degree(n, t).to_json())
            .collect()
    });
    Ok(PsiResult {
        k,
        k1,
        h_bound,
        holds,
        tuple_size,
        cycles,
        classes: keys.len() as u64,
        max_spread: spread,
        distances_checked: checked,
        counterexample,
    })
}

impl FillerSolver {
    fn chain_in_degree(&self, n: usize, terms: &[Term]) -> Chain {
        Chain::from_indexed(self.space.group().clone(), n, self.space.modulus(), terms.to_vec())
    }
}

/// Largest subset of one class with pairwise distances above `k1`,
/// together with the subset and the number of distances computed.
fn class_spread(solver: &FillerSolver, members: &[Vec<Term>], k1: usize) -> Result<(u64, Vec<usize>, u64)> {
    let m = members.len();
    let pairs = (m as u64) * (m as u64 - 1) / 2;
    if pairs > PSI_PAIR_CAP {
        return Err(Error::cap("pairwise distances in one class", pairs as u128, PSI_PAIR_CAP as u128));
    }
    let space = solver.space();
    let l = space.modulus();
    let symmetry = Symmetry::new(space.group(), space.degree(), l, u64::MAX)?;
    let mut memo: HashMap<Vec<Term>, bool> = HashMap::new();
    let mut far: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            let mut d = crate::modp::axpy(&members[i], l.neg(1), &members[j], l);
            let lead = l.inv(d[0].1);
            for t in d.iter_mut() {
                t.1 = l.mul(t.1, lead);
            }
            if let Some(sym) = &symmetry {
                d = sym.canonical(d);
            }
            let close = match memo.get(&d) {
                Some(&c) => c,
                None => {
                    let c = solver.fills_within(&d, k1).ok_or(Error::BudgetExhausted {
                        budget: solver.budget().max_nodes,
                    })?;
                    memo.insert(d, c);
                    c
                }
            };
            if !close {
                far[i].push(j);
                far[j].push(i);
            }
        }
    }
    if m == 0 {
        return Ok((0, Vec::new(), 0));
    }
    if far.iter().all(Vec::is_empty) {
        return Ok((1, vec![0], pairs));
    }
    // Subsets with no close pair are cliques of the far graph.
    let active: Vec<usize> = (0..m).filter(|&i| !far[i].is_empty()).collect();
    if active.len() > MIS_CAP {
        return Err(Error::cap("cycles in a class with far pairs", active.len() as u128, MIS_CAP as u128));
    }
    let mut best = vec![active[0]];
    let mut current = Vec::new();
    max_clique(&far, &active, &mut current, &mut best);
    Ok((best.len() as u64, best, pairs))
}

fn max_clique(adj: &[Vec<usize>], cands: &[usize], current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if current.len() + cands.len() <= best.len() {
        return;
    }
    if cands.is_empty() {
        *best = current.clone();
        return;
    }
    for (i, &v) in cands.iter().enumerate() {
        if current.len() + cands.len() - i <= best.len() {
            return;
        }
        let next: Vec<usize> = cands[i + 1..].iter().copied().filter(|u| adj[v].contains(u)).collect();
        current.push(v);
        max_clique(adj, &next, current, best);
        current.pop();
    }
}

/// `Psi_K` with the recipe `K1 = max{isop(1), ..., isop(2K)}` and the
/// dimension of `H_n` as `h_bound`.
pub fn check_psi_recipe(group: &Arc<FiniteGroup>, n: usize, l: Modulus, k: usize, limits: &Limits) -> Result<(IsopProfile, PsiResult)> {
    let h = homology(group, n, l, limits)?;
    let solver = FillerSolver::new(h.boundaries().clone(), limits)?;
    let profile = isop_profile(&solver, 2 * k, limits, None)?;
    if profile.profile.iter().any(|r| !r.exact) {
        return Err(Error::BudgetExhausted {
            budget: limits.node_budget,
        });
    }
    let k1 = profile.k1[k];
    let psi = check_psi(&solver, &h, k, k1, h.dim, limits)?;
    Ok((profile, psi))
}

/// Filler norm of `<g>` next to the commutator length of `g`, for every
/// `g` in the derived subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorRow {
    pub element: String,
    pub commutator_length: u32,
    pub filler_norm: usize,
    pub exact: bool,
}

pub fn commutator_report(group: &Arc<FiniteGroup>, l: Modulus, limits: &Limits) -> Result<Vec<CommutatorRow>> {
    let solver = FillerSolver::for_degree(group, 1, l, limits)?;
    let lengths = commutator_lengths(group);
    let mut rows = Vec::new();
    for g in group.elements() {
        let Some(len) = lengths[g as usize] else {
            continue;
        };
        let b = Chain::basis(group.clone(), &[g], l)?;
        let f = solver.norm(&b)?;
        rows.push(CommutatorRow {
            element: group.label(g),
            commutator_length: len,
            filler_norm: f.filler_size,
            exact: f.exact,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec, DEFAULT_ORDER_CAP};

    fn g(s: &str) -> Arc<FiniteGroup> {
        build_group(&s.parse::<GroupSpec>().unwrap(), DEFAULT_ORDER_CAP).unwrap()
    }

    fn m(l: u32) -> Modulus {
        Modulus::new(l).unwrap()
    }

    #[test]
    fn orbit_reduction_matches_full_census() {
        let limits = Limits::default();
        for (spec, n, l, ks) in [("sym:3", 1, 3, 1..=4), ("dihedral:8", 1, 2, 1..=3), ("sym:3", 2, 2, 1..=2), ("cyclic:7", 1, 3, 1..=3)] {
            let solver = FillerSolver::for_degree(&g(spec), n, m(l), &limits).unwrap();
            for k in ks {
                let opts = IsopOptions::default();
                let a = isop_with(&solver, k, &limits, &opts, true).unwrap();
                let b = isop_with(&solver, k, &limits, &opts, false).unwrap();
                assert_eq!(a, b, "{spec} n={n} l={l} K={k}");
            }
        }
    }

    #[test]
    fn cyclic_two_values() {
        let lim = Limits::default();
        let z2 = g("cyclic:2");
        let solver = FillerSolver::for_degree(&z2, 1, m(2), &lim).unwrap();
        let e = Chain::basis(z2.clone(), &[0], m(2)).unwrap();
        let f = solver.norm(&e).unwrap();
        assert_eq!((f.filler_size, f.exact), (1, true));
        let t = Chain::basis(z2.clone(), &[1], m(2)).unwrap();
        assert!(matches!(solver.norm(&t), Err(Error::NotABoundary)));
        let p = isop_profile(&solver, 2, &lim, None).unwrap();
        let values: Vec<usize> = p.profile.iter().map(|r| r.value).collect();
        assert_eq!(values, vec![0, 1, 0]);
        assert_eq!(p.k1, vec![0, 1]);
        assert!(check_phi(&solver, 1, 4, 1, &lim).unwrap().holds);
        let phi = check_phi(&solver, 1, 1, 0, &lim).unwrap();
        assert!(!phi.holds);
        assert_eq!(phi.counterexample.unwrap().terms, vec![(1, vec![0])]);
        let h = homology(&z2, 1, m(2), &lim).unwrap();
        let psi = check_psi(&solver, &h, 1, 1, 1, &lim).unwrap();
        assert!(psi.holds);
        assert_eq!((psi.cycles, psi.classes, psi.tuple_size), (3, 2, 3));
        let psi = check_psi(&solver, &h, 1, 1, 0, &lim).unwrap();
        assert!(!psi.holds);
        let d = filler_distance(&t, &t.add(&e).unwrap(), &lim).unwrap();
        assert_eq!(d.filler_size, 1);
    }

    #[test]
    fn checkpoint_resume_matches_fresh_run() {
        let lim = Limits::default();
        let grp = g("sym:3");
        let solver = FillerSolver::for_degree(&grp, 1, m(3), &lim).unwrap();
        let dir = std::env::temp_dir().join(format!("barfill-cp-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("isop.json");
        let fresh = isop(&solver, 2, &lim, &IsopOptions::default()).unwrap();
        let opts = IsopOptions {
            sampled: None,
            checkpoint: Some(&path),
        };
        let first = isop(&solver, 2, &lim, &opts).unwrap();
        let resumed = isop(&solver, 2, &lim, &opts).unwrap();
        assert_eq!(fresh, first);
        assert_eq!(fresh, resumed);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn sampled_is_a_lower_bound() {
        let lim = Limits::default();
        let grp = g("cyclic:4");
        let solver = FillerSolver::for_degree(&grp, 1, m(2), &lim).unwrap();
        let full = isop(&solver, 2, &lim, &IsopOptions::default()).unwrap();
        let s = isop(
            &solver,
            2,
            &lim,
            &IsopOptions {
                sampled: Some((50, 7)),
                checkpoint: None,
            },
        )
        .unwrap();
        assert_eq!(s.bound, BoundKind::Lower);
        assert!(s.value <= full.value);
    }

    #[test]
    fn commutators_fill() {
        let rows = commutator_report(&g("sym:3"), m(2), &Limits::default()).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.exact));
        assert_eq!(rows.iter().filter(|r| r.commutator_length == 0).count(), 1);
    }
}
