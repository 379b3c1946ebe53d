use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Element, FiniteGroup, Structure};

/// Greedy generating set: scan elements in index order and keep each one
/// not already in the subgroup generated so far.
pub fn generators(g: &FiniteGroup) -> Vec<Element> {
    let mut gens = Vec::new();
    let mut inside = vec![false; g.order()];
    inside[g.identity() as usize] = true;
    let mut members = vec![g.identity()];
    for x in g.elements() {
        if inside[x as usize] {
            continue;
        }
        gens.push(x);
        // Extend the closure: every member times every generator.
        let mut queue: VecDeque<Element> = members.iter().copied().collect();
        while let Some(m) = queue.pop_front() {
            for &s in &gens {
                let y = g.mul(m, s);
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    gens
}

/// Sorted elements of the subgroup generated by `gens`.
pub fn generated_subgroup(g: &FiniteGroup, gens: &[Element]) -> Vec<Element> {
    let mut inside = vec![false; g.order()];
    inside[g.identity() as usize] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(m) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(m, s);
            if !inside[y as usize] {
                inside[y as usize] = true;
                queue.push_back(y);
            }
        }
    }
    (0..g.order() as Element).filter(|&x| inside[x as usize]).collect()
}

/// All commutators `a b a^-1 b^-1`, sorted and deduplicated.
pub fn commutator_set(g: &FiniteGroup) -> Vec<Element> {
    let mut seen = vec![false; g.order()];
    for a in g.elements() {
        for b in g.elements() {
            seen[g.commutator(a, b) as usize] = true;
        }
    }
    (0..g.order() as Element).filter(|&x| seen[x as usize]).collect()
}

/// The commutator subgroup `[G, G]`, as the normal closure of the
/// commutators of a generating set.
pub fn derived_subgroup(g: &FiniteGroup) -> Vec<Element> {
    let gens = generators(g);
    let mut inside = vec![false; g.order()];
    inside[g.identity() as usize] = true;
    let mut members = vec![g.identity()];
    let mut sub_gens: Vec<Element> = Vec::new();
    let mut pending: VecDeque<Element> = VecDeque::new();
    for &a in &gens {
        for &b in &gens {
            pending.push_back(g.commutator(a, b));
        }
    }
    // Invariant: `members` is the subgroup generated by `sub_gens`. A finite
    // subgroup is normal once conjugating its generators by the generators
    // of G stays inside.
    let mut checked = 0;
    loop {
        while let Some(c) = pending.pop_front() {
            if inside[c as usize] {
                continue;
            }
            sub_gens.push(c);
            let mut queue: VecDeque<Element> = members.iter().copied().collect();
            while let Some(m) = queue.pop_front() {
                for &s in &sub_gens {
                    let y = g.mul(m, s);
                    if !inside[y as usize] {
                        inside[y as usize] = true;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        if checked == sub_gens.len() {
            break;
        }
        let t = sub_gens[checked];
        checked += 1;
        for &s in &gens {
            pending.push_back(g.mul(g.mul(s, t), g.inv(s)));
        }
    }
    members.sort_unstable();
    members
}

/// Commutator length of every element: `Some(k)` for the least `k` such
/// that the element is a product of `k` commutators, `None` outside the
/// derived subgroup.
pub fn commutator_lengths(g: &FiniteGroup) -> Vec<Option<u32>> {
    let comms = commutator_set(g);
    let mut dist = vec![None; g.order()];
    dist[g.identity() as usize] = Some(0);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize].unwrap();
        for &c in &comms {
            let y = g.mul(x, c);
            if dist[y as usize].is_none() {
                dist[y as usize] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

pub fn commutator_length(g: &FiniteGroup, x: Element) -> Option<u32> {
    commutator_lengths(g)[x as usize]
}

/// Quotient by a normal subgroup. Cosets are numbered by their smallest
/// element; returns the quotient and the projection.
pub fn quotient(g: &Arc<FiniteGroup>, normal: &[Element], name: String) -> (Arc<FiniteGroup>, Vec<Element>) {
    const UNSET: Element = Element::MAX;
    let mut proj = vec![UNSET; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if proj[x as usize] != UNSET {
            continue;
        }
        let idx = reps.len() as Element;
        reps.push(x);
        for &d in normal {
            proj[g.mul(x, d) as usize] = idx;
        }
    }
    let order = reps.len();
    let q = FiniteGroup::from_structure(
        name,
        order,
        Structure::Quotient {
            parent: g.clone(),
            reps,
            proj: proj.clone(),
        },
    );
    (Arc::new(q), proj)
}

/// `G / [G, G]` with its canonical projection.
pub fn abelianization(g: &Arc<FiniteGroup>) -> (Arc<FiniteGroup>, Vec<Element>) {
    let d = derived_subgroup(g);
    quotient(g, &d, format!("ab({})", g.name()))
}

/// Dimension of `A / lA` over `Z/l` for an abelian group `A`, i.e. the
/// number of invariant factors of `A` divisible by `l`.
pub fn elementary_rank(a: &FiniteGroup, l: u32) -> u32 {
    let mut image = vec![false; a.order()];
    for x in a.elements() {
        image[a.pow(x, l as u64) as usize] = true;
    }
    let image_size = image.iter().filter(|&&b| b).count();
    let mut ratio = a.order() / image_size;
    let mut rank = 0;
    while ratio > 1 {
        ratio /= l as usize;
        rank += 1;
    }
    rank
}

pub fn direct_product(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>, order_cap: u64) -> Result<Arc<FiniteGroup>> {
    let order = g.order() as u128 * h.order() as u128;
    if order > order_cap as u128 {
        return Err(Error::cap("order of direct product", order, order_cap as u128));
    }
    Ok(Arc::new(FiniteGroup::from_structure(
        format!("product:{},{}", g.name(), h.name()),
        order as usize,
        Structure::Product(g.clone(), h.clone()),
    )))
}

/// A subgroup realized as a standalone group, with its inclusion map.
#[derive(Debug, Clone)]
pub struct SubgroupEmbedding {
    pub subgroup: Arc<FiniteGroup>,
    pub parent: Arc<FiniteGroup>,
    /// `inclusion[i]` is the parent index of subgroup element `i`.
    pub inclusion: Vec<Element>,
}

impl SubgroupEmbedding {
    pub fn index(&self) -> u64 {
        (self.parent.order() / self.subgroup.order()) as u64
    }
}

/// Package a subset closed under the group operations as a subgroup.
/// Subgroup indices follow the parent's index order.
pub fn subgroup_embedding(g: &Arc<FiniteGroup>, elements: &[Element]) -> Result<SubgroupEmbedding> {
    let mut elems: Vec<Element> = elements.to_vec();
    elems.sort_unstable();
    elems.dedup();
    if elems.iter().any(|&x| x as usize >= g.order()) {
        return Err(Error::Precondition("element index out of range".into()));
    }
    if elems.binary_search(&g.identity()).is_err() {
        return Err(Error::Precondition("subset does not contain the identity".into()));
    }
    let mut member = vec![false; g.order()];
    for &x in &elems {
        member[x as usize] = true;
    }
    // Closing a greedy generating set of the subset must stay inside it
    // and reach all of it.
    let mut inside = vec![false; g.order()];
    inside[g.identity() as usize] = true;
    let mut reached = vec![g.identity()];
    let mut gens = Vec::new();
    for &x in &elems {
        if inside[x as usize] {
            continue;
        }
        gens.push(x);
        let mut queue: VecDeque<Element> = reached.iter().copied().collect();
        while let Some(m) = queue.pop_front() {
            for &s in &gens {
                let y = g.mul(m, s);
                if !member[y as usize] {
                    return Err(Error::Precondition(format!(
                        "subset not closed: {} * {} leaves it",
                        g.label(m),
                        g.label(s)
                    )));
                }
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    reached.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    let name = if elems.len() == g.order() {
        g.name().to_string()
    } else {
        format!("sub({}; {} elements)", g.name(), elems.len())
    };
    let subgroup = FiniteGroup::from_structure(
        name,
        elems.len(),
        Structure::Sub {
            parent: g.clone(),
            elems: elems.clone(),
        },
    );
    Ok(SubgroupEmbedding {
        subgroup: Arc::new(subgroup),
        parent: g.clone(),
        inclusion: elems,
    })
}

/// An element map between groups, verified to respect multiplication.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    pub source: Arc<FiniteGroup>,
    pub target: Arc<FiniteGroup>,
    pub map: Vec<Element>,
}

impl Homomorphism {
    /// Checks `f(a s) = f(a) f(s)` for every `a` and every generator `s`,
    /// which forces multiplicativity on all pairs.
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, map: Vec<Element>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::NotAHomomorphism(format!(
                "map has {} entries for a group of order {}",
                map.len(),
                source.order()
            )));
        }
        if map.iter().any(|&y| y as usize >= target.order()) {
            return Err(Error::NotAHomomorphism("image index out of range".into()));
        }
        let gens = generators(&source);
        for a in source.elements() {
            for &s in &gens {
                let lhs = map[source.mul(a, s) as usize];
                let rhs = target.mul(map[a as usize], map[s as usize]);
                if lhs != rhs {
                    return Err(Error::NotAHomomorphism(format!(
                        "f({} * {}) != f({}) * f({})",
                        source.label(a),
                        source.label(s),
                        source.label(a),
                        source.label(s)
                    )));
                }
            }
        }
        Ok(Homomorphism { source, target, map })
    }

    /// The map `Z/m -> G`, `k -> x^k`, for an element with `x^m = e`.
    pub fn from_cyclic(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, x: Element) -> Result<Self> {
        let map = (0..source.order() as u64).map(|k| target.pow(x, k)).collect();
        Homomorphism::new(source, target, map)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.order()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y as usize], true))
    }
}

impl From<&SubgroupEmbedding> for Homomorphism {
    fn from(e: &SubgroupEmbedding) -> Self {
        Homomorphism {
            source: e.subgroup.clone(),
            target: e.parent.clone(),
            map: e.inclusion.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec, DEFAULT_ORDER_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn group(s: &str) -> Arc<FiniteGroup> {
        build_group(&s.parse::<GroupSpec>().unwrap(), DEFAULT_ORDER_CAP).unwrap()
    }

    const REGISTRY: &[&str] = &[
        "cyclic:1", "cyclic:6", "sym:3", "sym:4", "dihedral:8", "gl:2:3", "sl:2:3", "torus:2:4",
        "product:cyclic:2,sym:3", "gl:2:4", "sl:2:5",
    ];

    #[test]
    fn group_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in REGISTRY {
            let g = group(s);
            let e = g.identity();
            for a in g.elements() {
                assert_eq!(g.mul(e, a), a);
                assert_eq!(g.mul(a, e), a);
                assert_eq!(g.mul(a, g.inv(a)), e);
                assert_eq!(g.inv(g.inv(a)), a);
            }
            for _ in 0..1000 {
                let n = g.order() as u32;
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)), "{s}");
            }
        }
    }

    #[test]
    fn on_demand_backend_matches_table() {
        // gl:2:7 has order 2016 (table); products computed both ways agree.
        let g = group("gl:2:7");
        assert!(g.has_table());
        let rep = g.matrix_rep().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let a = rng.gen_range(0..g.order() as u32);
            let b = rng.gen_range(0..g.order() as u32);
            assert_eq!(g.mul(a, b), rep.mul(a, b));
            assert_eq!(g.inv(a), rep.inv(a));
        }
        let big = group("gl:2:8");
        assert!(!big.has_table());
        assert_eq!(big.order(), 3528);
        for _ in 0..200 {
            let a = rng.gen_range(0..big.order() as u32);
            let b = rng.gen_range(0..big.order() as u32);
            assert_eq!(big.mul(a, big.inv(a)), big.identity());
            assert_eq!(big.mul(big.mul(a, b), big.inv(b)), a);
        }
    }

    #[test]
    fn build_examples() {
        let c6 = group("cyclic:6");
        assert_eq!((c6.order(), c6.identity()), (6, 0));
        let s3 = group("sym:3");
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(group("gl:2:3").order(), 48);
        assert_eq!(group("sl:2:2").order(), 6);
    }

    #[test]
    fn products() {
        let c2 = group("cyclic:2");
        let c3 = group("cyclic:3");
        let p = direct_product(&c2, &c3, 100).unwrap();
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian());
        let v4 = direct_product(&c2, &c2, 100).unwrap();
        for x in v4.elements().filter(|&x| x != v4.identity()) {
            assert_eq!(v4.element_order(x), 2);
        }
        let s3 = group("sym:3");
        let t = group("cyclic:1");
        let copy = direct_product(&s3, &t, 100).unwrap();
        for a in s3.elements() {
            for b in s3.elements() {
                assert_eq!(copy.mul(a, b), s3.mul(a, b));
            }
        }
        assert!(direct_product(&s3, &s3, 30).unwrap_err().is_refusal());
    }

    #[test]
    fn derived_subgroup_matches_commutator_closure() {
        for s in REGISTRY {
            let g = group(s);
            let fast = derived_subgroup(&g);
            let slow = generated_subgroup(&g, &commutator_set(&g));
            assert_eq!(fast, slow, "{s}");
            // normal
            let member: Vec<bool> = (0..g.order() as u32).map(|x| fast.binary_search(&x).is_ok()).collect();
            for x in g.elements() {
                for &d in &fast {
                    assert!(member[g.mul(g.mul(x, d), g.inv(x)) as usize]);
                }
            }
        }
        assert_eq!(derived_subgroup(&group("cyclic:6")), vec![0]);
        let s3 = group("sym:3");
        let d = derived_subgroup(&s3);
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|&x| s3.element_order(x) != 2));
        assert_eq!(derived_subgroup(&group("sym:4")).len(), 12);
    }

    #[test]
    fn commutator_lengths_in_s3() {
        let s3 = group("sym:3");
        let lens = commutator_lengths(&s3);
        assert_eq!(lens[s3.identity() as usize], Some(0));
        for x in s3.elements() {
            match s3.element_order(x) {
                3 => assert_eq!(lens[x as usize], Some(1)),
                2 => assert_eq!(lens[x as usize], None),
                _ => {}
            }
        }
        for s in REGISTRY {
            let g = group(s);
            let comms = commutator_set(&g);
            let lens = commutator_lengths(&g);
            for &c in comms.iter().filter(|&&c| c != g.identity()) {
                assert_eq!(lens[c as usize], Some(1));
            }
        }
    }

    #[test]
    fn abelianizations() {
        let c6 = group("cyclic:6");
        let (a, proj) = abelianization(&c6);
        assert_eq!(a.order(), 6);
        let mut sorted = proj.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        assert_eq!(abelianization(&group("sym:3")).0.order(), 2);
        let (ab, proj) = abelianization(&group("gl:2:3"));
        assert_eq!(ab.order(), 2);
        assert!(ab.is_abelian());
        let g = group("gl:2:3");
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(proj[g.mul(a, b) as usize], ab.mul(proj[a as usize], proj[b as usize]));
            }
        }
    }

    #[test]
    fn elementary_ranks() {
        assert_eq!(elementary_rank(&group("cyclic:6"), 2), 1);
        assert_eq!(elementary_rank(&group("cyclic:6"), 5), 0);
        assert_eq!(elementary_rank(&group("torus:2:4"), 3), 2);
        assert_eq!(elementary_rank(&group("product:cyclic:4,cyclic:2"), 2), 2);
    }

    #[test]
    fn subgroup_embeddings() {
        let g = group("gl:2:3");
        let all: Vec<u32> = g.elements().collect();
        let whole = subgroup_embedding(&g, &all).unwrap();
        assert_eq!(whole.inclusion, all);
        let diag: Vec<u32> = g.elements().filter(|&x| g.matrix_rep().unwrap().is_diagonal(x)).collect();
        let t = subgroup_embedding(&g, &diag).unwrap();
        assert_eq!(t.subgroup.order(), 4);
        assert_eq!(t.index(), 12);
        let triv = subgroup_embedding(&g, &[g.identity()]).unwrap();
        assert_eq!(triv.subgroup.order(), 1);
        // {e, x} is not closed once x has order above 2
        let x = g.elements().find(|&x| g.element_order(x) > 2).unwrap();
        assert!(subgroup_embedding(&g, &[g.identity(), x]).is_err());
        assert!(Homomorphism::new(t.subgroup.clone(), g.clone(), t.inclusion.clone()).is_ok());
    }

    #[test]
    fn homomorphism_checks() {
        let c3 = group("cyclic:3");
        let c6 = group("cyclic:6");
        assert!(Homomorphism::from_cyclic(c3.clone(), c6.clone(), 2).unwrap().is_injective());
        assert!(Homomorphism::from_cyclic(c3.clone(), c6.clone(), 1).is_err());
        assert!(Homomorphism::new(c3, c6, vec![0, 1, 2]).is_err());
    }
}
