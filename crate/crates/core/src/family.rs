//! Chains across finite families of groups.
//!
//! A family stands in for an indexed product of groups. Bounded chains are
//! moved into every member by homomorphisms, split into a coefficient
//! pattern and per-member tuples, and the fillers of per-member boundaries
//! are compared for a uniform bound. "Almost all members" is rendered as a
//! plurality for patterns and as "every member" for bounds; the members
//! outside the plurality are always reported.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, ChainJson};
use crate::error::{Error, Result};
use crate::field::prime_power;
use crate::group::{build_group, Element, FiniteGroup, GroupSpec, Homomorphism};
use crate::isoperimetry::{FillerJson, FillerSolver};
use crate::limits::Limits;
use crate::modp::Modulus;

/// Matrix families indexed by the field size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Gl(u32),
    Sl(u32),
    Torus(u32),
}

impl FamilyKind {
    pub fn spec(self, q: u32) -> GroupSpec {
        match self {
            FamilyKind::Gl(d) => GroupSpec::Gl(d, q),
            FamilyKind::Sl(d) => GroupSpec::Sl(d, q),
            FamilyKind::Torus(r) => GroupSpec::Torus(r, q),
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    /// `gl:<n>`, `sl:<n>` or `torus:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let (kind, d) = s.split_once(':').ok_or_else(|| bad("expected gl:<n>, sl:<n> or torus:<r>"))?;
        let d: u32 = d.parse().map_err(|_| bad("dimension is not a number"))?;
        if !(1..=6).contains(&d) {
            return Err(bad("dimension must be between 1 and 6"));
        }
        match kind {
            "gl" => Ok(FamilyKind::Gl(d)),
            "sl" => Ok(FamilyKind::Sl(d)),
            "torus" => Ok(FamilyKind::Torus(d)),
            _ => Err(bad("unknown family kind")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub label: String,
    pub q: Option<u32>,
    pub group: Arc<FiniteGroup>,
}

#[derive(Debug, Clone)]
pub struct GroupFamily {
    pub kind: Option<FamilyKind>,
    pub members: Vec<FamilyMember>,
}

impl GroupFamily {
    /// Members for every prime power `q` in `lo..=hi`, optionally only
    /// those with `q = 1 (mod m)`.
    pub fn prime_powers(kind: FamilyKind, lo: u32, hi: u32, mod_filter: Option<u32>, limits: &Limits) -> Result<Self> {
        if mod_filter == Some(0) {
            return Err(Error::Precondition("congruence modulus must be positive".into()));
        }
        let mut members = Vec::new();
        for q in lo.max(2)..=hi {
            if prime_power(q).is_none() || mod_filter.is_some_and(|m| q % m != 1 % m) {
                continue;
            }
            let group = build_group(&kind.spec(q), limits.order_cap)?;
            members.push(FamilyMember {
                label: format!("q={q}"),
                q: Some(q),
                group,
            });
        }
        Ok(GroupFamily {
            kind: Some(kind),
            members,
        })
    }

    /// A family of arbitrary groups with distinct labels.
    pub fn from_groups(members: Vec<(String, Arc<FiniteGroup>)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (label, _) in &members {
            if !seen.insert(label.clone()) {
                return Err(Error::Precondition(format!("duplicate family label {label}")));
            }
        }
        Ok(GroupFamily {
            kind: None,
            members: members
                .into_iter()
                .map(|(label, group)| FamilyMember { label, q: None, group })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A chain with a fixed order on its terms. Moving a chain into another
/// group keeps the order of the source, so patterns stay comparable across
/// members even where the target's own tuple order would permute them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedChain {
    pub terms: Vec<(u32, Vec<Element>)>,
}

impl OrderedChain {
    /// Terms in canonical tuple order.
    pub fn from_chain(c: &Chain) -> Self {
        OrderedChain { terms: c.tuples().collect() }
    }

    pub fn size(&self) -> usize {
        self.terms.len()
    }

    pub fn to_chain(&self, group: Arc<FiniteGroup>, degree: usize, l: Modulus) -> Result<Chain> {
        Chain::from_terms(group, degree, l, self.terms.iter().map(|(c, t)| (*c as i64, t.clone())))
    }
}

/// Push a chain through one homomorphism per member. Terms whose images
/// collide are merged into the first of them.
pub fn diagonal_embed(c: &Chain, embeddings: &[Homomorphism]) -> Result<Vec<OrderedChain>> {
    let l = c.modulus();
    let base = OrderedChain::from_chain(c);
    embeddings
        .iter()
        .map(|f| {
            if f.source.order() != c.group().order() || f.source.name() != c.group().name() {
                return Err(Error::Mismatch(format!(
                    "embedding from {} applied to a chain over {}",
                    f.source.name(),
                    c.group().name()
                )));
            }
            let mut terms: Vec<(u32, Vec<Element>)> = Vec::with_capacity(base.size());
            for (coeff, t) in &base.terms {
                let image: Vec<Element> = t.iter().map(|&g| f.map[g as usize]).collect();
                match terms.iter_mut().find(|(_, u)| *u == image) {
                    Some(slot) => slot.0 = l.add(slot.0, *coeff),
                    None => terms.push((*coeff, image)),
                }
            }
            terms.retain(|t| t.0 != 0);
            Ok(OrderedChain { terms })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberCoords {
    pub label: String,
    pub coefficients: Vec<u32>,
    pub tuples: Vec<Vec<Element>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooDecomposition {
    /// The most frequent coefficient pattern, lexicographically least
    /// among ties.
    pub t0: Vec<u32>,
    pub members: Vec<String>,
    pub dissent: Vec<String>,
    pub per_index: Vec<MemberCoords>,
}

/// Split each member's chain into its coefficient pattern and its tuples
/// and select the plurality pattern.
pub fn coordinate_decompose(labels: &[String], chains: &[OrderedChain], k: usize) -> Result<CooDecomposition> {
    if labels.len() != chains.len() {
        return Err(Error::Mismatch(format!("{} labels for {} chains", labels.len(), chains.len())));
    }
    let mut per_index = Vec::with_capacity(chains.len());
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (label, c) in labels.iter().zip(chains) {
        if c.size() > k {
            return Err(Error::Precondition(format!("chain at {label} has size {} above {k}", c.size())));
        }
        let coefficients: Vec<u32> = c.terms.iter().map(|t| t.0).collect();
        *counts.entry(coefficients.clone()).or_default() += 1;
        per_index.push(MemberCoords {
            label: label.clone(),
            coefficients,
            tuples: c.terms.iter().map(|t| t.1.clone()).collect(),
        });
    }
    // BTreeMap iterates in lexicographic order, so the first maximum wins ties.
    let mut t0 = Vec::new();
    let mut best = 0;
    for (pattern, &count) in &counts {
        if count > best {
            best = count;
            t0 = pattern.clone();
        }
    }
    let (members, dissent): (Vec<&MemberCoords>, Vec<&MemberCoords>) = per_index.iter().partition(|m| m.coefficients == t0);
    Ok(CooDecomposition {
        t0,
        members: members.iter().map(|m| m.label.clone()).collect(),
        dissent: dissent.iter().map(|m| m.label.clone()).collect(),
        per_index: per_index.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarVerdict {
    /// Every member has a certified minimal filler.
    Bounded,
    /// Some member only has an upper bound.
    ExceededBudget,
    /// Some member failed outright.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberFiller {
    pub label: String,
    pub q: Option<u32>,
    pub order: u64,
    pub filler: Option<FillerJson>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub n: usize,
    pub l: u32,
    pub members: Vec<MemberFiller>,
    /// Largest filler over members with a filler.
    pub max_filler: usize,
    pub verdict: StarVerdict,
}

/// Filler norms of per-member boundaries and the uniform-bound verdict.
/// A member whose chain is not a boundary is an error.
pub fn check_star(family: &GroupFamily, boundaries: &[Chain], limits: &Limits) -> Result<FamilyReport> {
    let report = star_report(family, boundaries.iter().map(|b| Ok(b.clone())).collect(), limits)?;
    if let Some(m) = report.members.iter().find(|m| m.error.is_some()) {
        return Err(Error::Precondition(format!("{}: {}", m.label, m.error.as_deref().unwrap_or_default())));
    }
    Ok(report)
}

fn star_report(family: &GroupFamily, boundaries: Vec<Result<Chain>>, limits: &Limits) -> Result<FamilyReport> {
    if boundaries.len() != family.len() {
        return Err(Error::Mismatch(format!("{} boundaries for {} members", boundaries.len(), family.len())));
    }
    let (n, l) = boundaries
        .iter()
        .find_map(|b| b.as_ref().ok().map(|b| (b.degree(), b.modulus().get())))
        .unwrap_or((0, 0));
    let members: Vec<MemberFiller> = family
        .members
        .par_iter()
        .zip(boundaries.into_par_iter())
        .map(|(m, b)| {
            let outcome = b.and_then(|b| {
                if !Arc::ptr_eq(b.group(), &m.group) && b.group().name() != m.group.name() {
                    return Err(Error::Mismatch(format!("chain over {} at member {}", b.group().name(), m.label)));
                }
                let solver = FillerSolver::for_degree(&m.group, b.degree(), b.modulus(), limits)?;
                solver.norm(&b)
            });
            let (filler, error) = match outcome {
                Ok(f) => (Some(f.to_json()), None),
                Err(e) => (None, Some(e.to_string())),
            };
            MemberFiller {
                label: m.label.clone(),
                q: m.q,
                order: m.group.order() as u64,
                filler,
                error,
            }
        })
        .collect();
    let max_filler = members.iter().filter_map(|m| m.filler.as_ref()).map(|f| f.filler_size).max().unwrap_or(0);
    let verdict = if members.iter().any(|m| m.error.is_some()) {
        StarVerdict::Mixed
    } else if members.iter().all(|m| m.filler.as_ref().is_some_and(|f| f.exact)) {
        StarVerdict::Bounded
    } else {
        StarVerdict::ExceededBudget
    };
    Ok(FamilyReport {
        n,
        l,
        members,
        max_filler,
        verdict,
    })
}

/// The element of order `m` in the first diagonal slot, `diag(w, 1, ...)`
/// with `w = g^((q-1)/m)` for the chosen primitive element `g`.
pub fn cyclic_into_torus(base: &Arc<FiniteGroup>, target: &Arc<FiniteGroup>) -> Result<Homomorphism> {
    let m = base.order() as u32;
    let rep = target
        .matrix_rep()
        .ok_or_else(|| Error::Precondition(format!("{} is not a matrix group", target.name())))?;
    let field = rep.field();
    let q = field.order();
    if (q - 1) % m != 0 {
        return Err(Error::Precondition(format!("{m} does not divide {q} - 1")));
    }
    let w = field.pow(field.primitive_element(), ((q - 1) / m) as u64);
    let d = rep.dim();
    let mut entries = vec![0u32; d * d];
    for i in 0..d {
        entries[i * d + i] = 1;
    }
    entries[0] = w;
    if matches!(target.name().split(':').next(), Some("sl")) && d > 1 {
        entries[d + 1] = field.inv(w).unwrap_or(1);
    }
    let x = rep
        .index_of(&entries)
        .ok_or_else(|| Error::Precondition(format!("diagonal element not in {}", target.name())))?;
    Homomorphism::from_cyclic(base.clone(), target.clone(), x)
}

/// A boundary written in a small language of torus words, evaluated in
/// each member of a matrix family.
///
/// ```text
/// recipe := "d(" chain ")" | chain
/// chain  := ["-"] term (("+" | "-") term)*
/// term   := [int "*"] "[" word ("," word)* "]"
/// word   := factor ("." factor)*
/// factor := ("e" | "t" int) ["^" int]
/// ```
///
/// `e` is the identity and `t<i>` the diagonal matrix with the chosen
/// primitive element in slot `i` (and, for `sl`, its inverse in slot
/// `i+1`). `d(...)` takes the boundary of a chain one degree up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recipe {
    pub boundary_of: bool,
    pub terms: Vec<(i64, Vec<Vec<(Atom, u64)>>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Identity,
    Torus(usize),
}

impl std::str::FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |reason: String| Error::Malformed(format!("recipe `{s}`: {reason}"));
        let (boundary_of, body) = match src.strip_prefix("d(").and_then(|r| r.strip_suffix(')')) {
            Some(inner) => (true, inner.to_string()),
            None => (false, src.clone()),
        };
        let mut terms = Vec::new();
        let mut rest = body.as_str();
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        }
        loop {
            let (coeff, after) = match rest.find('[') {
                Some(0) => (1, rest),
                Some(i) => {
                    let c = rest[..i].strip_suffix('*').ok_or_else(|| bad("expected `*` before `[`".into()))?;
                    (c.parse::<i64>().map_err(|_| bad(format!("bad coefficient `{c}`")))?, &rest[i..])
                }
                None => return Err(bad("expected a term `[...]`".into())),
            };
            let close = after.find(']').ok_or_else(|| bad("unclosed `[`".into()))?;
            let inner = &after[1..close];
            let mut tuple = Vec::new();
            if !inner.is_empty() {
                for word in inner.split(',') {
                    let mut factors = Vec::new();
                    for f in word.split('.') {
                        let (atom, exp) = match f.split_once('^') {
                            Some((a, e)) => (a, e.parse::<u64>().map_err(|_| bad(format!("bad exponent in `{f}`")))?),
                            None => (f, 1),
                        };
                        let atom = match atom {
                            "e" => Atom::Identity,
                            a if a.starts_with('t') => Atom::Torus(
                                a[1..].parse().map_err(|_| bad(format!("bad generator `{a}`")))?,
                            ),
                            a => return Err(bad(format!("unknown atom `{a}`"))),
                        };
                        factors.push((atom, exp));
                    }
                    tuple.push(factors);
                }
            }
            terms.push((sign * coeff, tuple));
            rest = &after[close + 1..];
            if rest.is_empty() {
                break;
            }
            sign = match rest.as_bytes()[0] {
                b'+' => 1,
                b'-' => -1,
                _ => return Err(bad(format!("unexpected `{rest}`"))),
            };
            rest = &rest[1..];
        }
        let degree = terms[0].1.len();
        if terms.iter().any(|t| t.1.len() != degree) {
            return Err(bad("terms of different lengths".into()));
        }
        Ok(Recipe { boundary_of, terms })
    }
}

impl Recipe {
    /// Degree of the chain the recipe produces.
    pub fn degree(&self) -> usize {
        let d = self.terms[0].1.len();
        if self.boundary_of {
            d.saturating_sub(1)
        } else {
            d
        }
    }

    pub fn evaluate(&self, group: &Arc<FiniteGroup>, l: Modulus) -> Result<Chain> {
        let rep = group
            .matrix_rep()
            .ok_or_else(|| Error::Precondition(format!("{} is not a matrix group", group.name())))?;
        let field = rep.field();
        let d = rep.dim();
        let sl = group.name().starts_with("sl:");
        let w = field.primitive_element();
        let mut gens = Vec::new();
        for i in 0..d {
            let mut entries = vec![0u32; d * d];
            for j in 0..d {
                entries[j * d + j] = 1;
            }
            entries[i * d + i] = w;
            if sl {
                if i + 1 >= d {
                    gens.push(None);
                    continue;
                }
                entries[(i + 1) * d + i + 1] = field.inv(w).unwrap_or(1);
            }
            gens.push(rep.index_of(&entries));
        }
        let mut terms = Vec::new();
        for (coeff, tuple) in &self.terms {
            let mut t = Vec::with_capacity(tuple.len());
            for word in tuple {
                let mut x = group.identity();
                for &(atom, exp) in word {
                    let a = match atom {
                        Atom::Identity => group.identity(),
                        Atom::Torus(i) => gens.get(i).copied().flatten().ok_or_else(|| {
                            Error::Precondition(format!("generator t{i} does not exist in {}", group.name()))
                        })?,
                    };
                    x = group.mul(x, group.pow(a, exp));
                }
                t.push(x);
            }
            terms.push((*coeff, t));
        }
        let c = Chain::from_terms(group.clone(), self.terms[0].1.len(), l, terms)?;
        if self.boundary_of {
            c.boundary()
        } else {
            Ok(c)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub q: Option<u32>,
    pub order: u64,
    pub filler: Option<usize>,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub recipe: String,
    pub report: FamilyReport,
    pub table: Vec<GrowthRow>,
    /// Exact values strictly increase over the last three members.
    pub monotone_growth: bool,
}

/// Evaluate a recipe in every member and tabulate filler norms. Members
/// where the recipe fails are reported and skipped.
pub fn asymp_probe(family: &GroupFamily, recipe_text: &str, l: Modulus, limits: &Limits) -> Result<ProbeReport> {
    let recipe: Recipe = recipe_text.parse()?;
    let boundaries: Vec<Result<Chain>> = family.members.iter().map(|m| recipe.evaluate(&m.group, l)).collect();
    let mut report = star_report(family, boundaries, limits)?;
    if family.is_empty() {
        report.n = recipe.degree();
        report.l = l.get();
    }
    let table: Vec<GrowthRow> = report
        .members
        .iter()
        .map(|m| GrowthRow {
            q: m.q,
            order: m.order,
            filler: m.filler.as_ref().map(|f| f.filler_size),
            exact: m.filler.as_ref().is_some_and(|f| f.exact),
        })
        .collect();
    let monotone_growth = table.len() >= 3
        && table[table.len() - 3..].iter().all(|r| r.exact)
        && table[table.len() - 3..].windows(2).all(|w| w[0].filler < w[1].filler);
    Ok(ProbeReport {
        recipe: recipe_text.to_string(),
        report,
        table,
        monotone_growth,
    })
}

impl ProbeReport {
    /// `q,group_order,filler,exact` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,group_order,filler,exact\n");
        for r in &self.table {
            let q = r.q.map(|q| q.to_string()).unwrap_or_default();
            let f = r.filler.map(|f| f.to_string()).unwrap_or_default();
            out.push_str(&format!("{q},{},{f},{}\n", r.order, r.exact));
        }
        out
    }
}

/// Per-member chains as JSON, in member order.
pub fn ordered_to_json(family: &GroupFamily, chains: &[OrderedChain], degree: usize, l: Modulus) -> Result<Vec<ChainJson>> {
    family
        .members
        .iter()
        .zip(chains)
        .map(|(m, c)| Ok(c.to_chain(m.group.clone(), degree, l)?.to_json()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::random_chain;

    fn m(l: u32) -> Modulus {
        Modulus::new(l).unwrap()
    }

    fn g(s: &str) -> Arc<FiniteGroup> {
        build_group(&s.parse::<GroupSpec>().unwrap(), 20_000).unwrap()
    }

    #[test]
    fn prime_power_filter() {
        let f = GroupFamily::prime_powers(FamilyKind::Torus(1), 2, 20, Some(3), &Limits::default()).unwrap();
        let qs: Vec<u32> = f.members.iter().filter_map(|m| m.q).collect();
        assert_eq!(qs, vec![4, 7, 13, 16, 19]);
    }

    #[test]
    fn round_trip_through_torus_family() {
        let lim = Limits::default();
        let fam = GroupFamily::prime_powers(FamilyKind::Torus(1), 2, 20, Some(3), &lim).unwrap();
        let z3 = g("cyclic:3");
        let maps: Vec<Homomorphism> = fam.members.iter().map(|mb| cyclic_into_torus(&z3, &mb.group).unwrap()).collect();
        assert!(maps.iter().all(Homomorphism::is_injective));
        let labels: Vec<String> = fam.members.iter().map(|m| m.label.clone()).collect();
        for seed in 0..20 {
            let c = random_chain(z3.clone(), 2, m(3), 4, seed, 1 << 20).unwrap();
            let images = diagonal_embed(&c, &maps).unwrap();
            let coo = coordinate_decompose(&labels, &images, 4).unwrap();
            assert!(coo.dissent.is_empty());
            assert_eq!(coo.t0, OrderedChain::from_chain(&c).terms.iter().map(|t| t.0).collect::<Vec<_>>());
            for (mc, f) in coo.per_index.iter().zip(&maps) {
                let back: Vec<(i64, Vec<Element>)> = coo
                    .t0
                    .iter()
                    .zip(&mc.tuples)
                    .map(|(&a, t)| (a as i64, t.iter().map(|&y| f.map.iter().position(|&x| x == y).unwrap() as Element).collect()))
                    .collect();
                assert_eq!(Chain::from_terms(z3.clone(), 2, m(3), back).unwrap(), c);
            }
        }
    }

    #[test]
    fn plurality_and_dissent() {
        let labels: Vec<String> = (0..4).map(|i| format!("i{i}")).collect();
        let a = OrderedChain { terms: vec![(1, vec![0]), (2, vec![1])] };
        let b = OrderedChain { terms: vec![(2, vec![0]), (2, vec![1])] };
        let coo = coordinate_decompose(&labels, &[a.clone(), a.clone(), b.clone(), a.clone()], 2).unwrap();
        assert_eq!(coo.t0, vec![1, 2]);
        assert_eq!(coo.dissent, vec!["i2".to_string()]);
        // ties go to the lexicographically least pattern
        let coo = coordinate_decompose(&labels[..2], &[b, a], 2).unwrap();
        assert_eq!(coo.t0, vec![1, 2]);
        assert!(coordinate_decompose(&labels[..1], &[OrderedChain { terms: vec![(1, vec![0]); 3] }], 2).is_err());
    }

    #[test]
    fn star_on_repeated_cyclic_two() {
        let lim = Limits::default();
        let z2 = g("cyclic:2");
        let fam = GroupFamily::from_groups((0..3).map(|i| (format!("c{i}"), z2.clone())).collect()).unwrap();
        let e = Chain::basis(z2.clone(), &[0], m(2)).unwrap();
        let r = check_star(&fam, &vec![e; 3], &lim).unwrap();
        assert_eq!((r.verdict, r.max_filler), (StarVerdict::Bounded, 1));
        let t = Chain::basis(z2.clone(), &[1], m(2)).unwrap();
        assert!(check_star(&fam, &vec![t; 3], &lim).is_err());
    }

    #[test]
    fn recipes() {
        let lim = Limits::default();
        let fam = GroupFamily::prime_powers(FamilyKind::Gl(2), 3, 5, None, &lim).unwrap();
        let p = asymp_probe(&fam, "d([t0,t1] - [t1,t0])", m(2), &lim).unwrap();
        assert_eq!(p.table.len(), 3);
        assert!(p.table.iter().all(|r| r.filler.is_some_and(|f| f <= 2)));
        assert_eq!(p.report.verdict, StarVerdict::Bounded);
        let empty = GroupFamily::prime_powers(FamilyKind::Gl(2), 6, 6, None, &lim).unwrap();
        let p = asymp_probe(&empty, "d([t0,t1])", m(2), &lim).unwrap();
        assert!(p.table.is_empty());
        assert_eq!((p.report.verdict, p.report.max_filler), (StarVerdict::Bounded, 0));
        assert!("[t0".parse::<Recipe>().is_err());
        assert!("2*[t0] + [t1^2.e]".parse::<Recipe>().is_ok());
    }
}
