//! Built-in invariant suites with deterministic JSON reports.
//!
//! Reports hold no timings or addresses, so two runs with the same seed
//! serialize to identical bytes.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::census::Census;
use crate::chain::{random_chain, Chain};
use crate::error::{Error, Result};
use crate::family::{coordinate_decompose, cyclic_into_torus, diagonal_embed, FamilyKind, GroupFamily};
use crate::group::{abelianization, direct_product, elementary_rank, Element, FiniteGroup, Homomorphism};
use crate::homology::torus_check;
use crate::isoperimetry::{check_phi, check_psi_recipe, distance_with, isop, IsopOptions};
use crate::limits::Limits;
use crate::modp::Modulus;
use crate::registry::Registry;
use crate::search::Term;

pub const SUITES: &[&str] = &[
    "dd-zero",
    "homology-oracles",
    "filler-oracle",
    "isop-micro",
    "sentences",
    "torus",
    "metric",
    "family-roundtrip",
];

/// Groups every suite draws from.
pub const REGISTRY: &[&str] = &[
    "cyclic:2",
    "cyclic:3",
    "cyclic:4",
    "cyclic:5",
    "cyclic:6",
    "cyclic:7",
    "cyclic:8",
    "cyclic:9",
    "cyclic:10",
    "cyclic:11",
    "cyclic:12",
    "sym:3",
    "sym:4",
    "dihedral:8",
    "gl:2:3",
    "torus:2:4",
];

/// Census cap used by the sentence suite; larger groups are skipped.
pub const SENTENCE_CENSUS_CAP: u64 = 50_000;

const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
    pub details: serde_json::Value,
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failure_count: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(msg);
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(f);
            }
        }
    }

    fn report(self, suite: &str, seed: u64, details: serde_json::Value) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            passed: self.failure_count == 0 && self.checks > 0,
            checks: self.checks,
            failure_count: self.failure_count,
            failures: self.failures,
            details,
        }
    }
}

fn modulus(l: u32) -> Modulus {
    Modulus::new(l).expect("suite moduli are prime")
}

pub fn run_suite(name: &str, seed: u64, limits: &Limits) -> Result<SuiteReport> {
    let reg = Registry::new(*limits);
    match name {
        "dd-zero" => dd_zero(&reg, seed),
        "homology-oracles" => homology_oracles(&reg, seed),
        "filler-oracle" => filler_oracle(&reg, seed),
        "isop-micro" => isop_micro(&reg, seed),
        "sentences" => sentences(&reg, seed),
        "torus" => torus(&reg, seed),
        "metric" => metric(&reg, seed),
        "family-roundtrip" => family_roundtrip(&reg, seed),
        other => Err(Error::Precondition(format!("unknown selftest suite `{other}`"))),
    }
}

pub fn run_all(seed: u64, limits: &Limits) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, seed, limits)).collect()
}

/// Number of random chains in the `dd-zero` suite.
pub const DD_CHAINS: u64 = 10_000;

fn dd_zero(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut combos: Vec<(Arc<FiniteGroup>, usize, Modulus)> = Vec::new();
    for spec in REGISTRY {
        let g = reg.group_str(spec)?;
        for l in [2, 3, 5] {
            for n in 1..=3usize {
                if (g.order() as u64).pow(n as u32) <= reg.limits().tuple_cap {
                    combos.push((g.clone(), n, modulus(l)));
                }
            }
        }
    }
    let tally = (0..DD_CHAINS)
        .into_par_iter()
        .map(|i| -> Result<Tally> {
            let (g, n, l) = &combos[(i as usize) % combos.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let space = (g.order() as u64).pow(*n as u32);
            let size = rng.gen_range(1..=8u64).min(space) as usize;
            let c = random_chain(g.clone(), *n, *l, size, rng.gen(), reg.limits().tuple_cap)?;
            let d = c.boundary()?;
            let mut t = Tally::default();
            t.check(d.size() <= (n + 1) * c.size(), || format!("|d c| too large for chain {i}"));
            if *n == 1 {
                t.check(d.is_zero(), || format!("d_1 nonzero on chain {i} over {}", g.name()));
            } else {
                t.check(d.boundary()?.is_zero(), || format!("dd != 0 on chain {i} over {} (n={n}, l={l})", g.name()));
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |mut a, b| {
            a.absorb(b);
            Ok(a)
        })?;
    Ok(tally.report("dd-zero", seed, json!({ "chains": DD_CHAINS, "configurations": combos.len() })))
}

fn homology_oracles(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut cyclic = Vec::new();
    for l in [2u32, 3] {
        let spec = format!("cyclic:{l}").parse()?;
        let mut dims = Vec::new();
        for n in 0..=3 {
            let h = reg.homology(&spec, n, modulus(l))?;
            t.check(h.dim == 1, || format!("dim H_{n}(Z/{l}; Z/{l}) = {}", h.dim));
            dims.push(h.dim);
        }
        cyclic.push(json!({ "l": l, "dims": dims }));
    }
    let mut first = Vec::new();
    for spec in REGISTRY {
        let g = reg.group_str(spec)?;
        let (ab, _) = abelianization(&g);
        for l in [2u32, 3, 5] {
            let h = reg.homology(&spec.parse()?, 1, modulus(l))?;
            let oracle = elementary_rank(&ab, l) as usize;
            t.check(h.dim == oracle, || format!("{spec}: dim H_1 = {} but abelianization gives {oracle} (l={l})", h.dim));
            let h0 = reg.homology(&spec.parse()?, 0, modulus(l))?;
            t.check(h0.dim == 1, || format!("{spec}: dim H_0 = {} (l={l})", h0.dim));
            first.push(json!({ "group": spec, "l": l, "dim": h.dim, "oracle": oracle }));
        }
    }
    let z2 = reg.group_str("cyclic:2")?;
    let prod = direct_product(&z2, &z2, reg.limits().order_cap)?;
    let l = modulus(2);
    let factor: Vec<usize> = (0..=2)
        .map(|n| Ok(reg.homology(&"cyclic:2".parse()?, n, l)?.dim))
        .collect::<Result<_>>()?;
    let mut kunneth = Vec::new();
    for (n, expected) in [(1usize, 2usize), (2, 3)] {
        let h = crate::homology::homology(&prod, n, l, reg.limits())?;
        let sum: usize = (0..=n).map(|i| factor[i] * factor[n - i]).sum();
        t.check(h.dim == sum && h.dim == expected, || {
            format!("Z/2 x Z/2: dim H_{n} = {}, Kunneth sum {sum}, expected {expected}", h.dim)
        });
        kunneth.push(json!({ "n": n, "dim": h.dim, "kunneth": sum }));
    }
    Ok(t.report(
        "homology-oracles",
        seed,
        json!({ "cyclic": cyclic, "first_homology": first, "kunneth": kunneth }),
    ))
}

/// Minimal size of a chain of size at most `max` bounding each boundary,
/// by listing every such chain.
fn brute_fillers(g: &Arc<FiniteGroup>, m: usize, l: Modulus, max: usize) -> Result<HashMap<Vec<Term>, usize>> {
    let tuples = (g.order() as u64).pow(m as u32);
    let mut best: HashMap<Vec<Term>, usize> = HashMap::new();
    for w in 0..=max {
        let census = Census::new(tuples, w, l, false, u64::MAX)?;
        let found = census.fold(
            0..census.len(),
            Vec::new,
            |acc: &mut Vec<Vec<Term>>, terms| {
                let c = Chain::from_indexed(g.clone(), m, l, terms.to_vec());
                acc.push(c.boundary()?.indexed_terms().to_vec());
                Ok(())
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        )?;
        for b in found {
            best.entry(b).or_insert(w);
        }
    }
    Ok(best)
}

fn filler_oracle(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut configs = Vec::new();
    for spec in ["cyclic:2", "cyclic:3", "cyclic:4"] {
        for n in [1usize, 2] {
            for l in [2u32, 3] {
                let g = reg.group_str(spec)?;
                let l = modulus(l);
                let oracle = brute_fillers(&g, n + 1, l, 3)?;
                let solver = reg.filler_solver(&spec.parse()?, n, l)?;
                let mut cases: Vec<(&Vec<Term>, &usize)> = oracle.iter().collect();
                cases.sort();
                let sub = cases
                    .par_iter()
                    .map(|(b, &w)| -> Result<Tally> {
                        let mut s = Tally::default();
                        let chain = Chain::from_indexed(g.clone(), n, l, b.to_vec());
                        let f = solver.norm(&chain)?;
                        s.check(f.exact && f.filler_size == w, || {
                            format!(
                                "{spec} n={n} l={l}: search gives {} (exact {}), enumeration gives {w} for {:?}",
                                f.filler_size,
                                f.exact,
                                chain.to_json().terms
                            )
                        });
                        Ok(s)
                    })
                    .try_reduce(Tally::default, |mut a, b| {
                        a.absorb(b);
                        Ok(a)
                    })?;
                let mut hist = [0u64; 4];
                for (_, &w) in &cases {
                    hist[w] += 1;
                }
                configs.push(json!({
                    "group": spec, "n": n, "l": l.get(), "instances": cases.len(), "by_filler_size": hist
                }));
                t.absorb(sub);
            }
        }
    }
    let instances = t.checks;
    Ok(t.report("filler-oracle", seed, json!({ "instances": instances, "configurations": configs })))
}

fn isop_micro(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let l = modulus(2);
    let spec = "cyclic:2".parse()?;
    let solver = reg.filler_solver(&spec, 1, l)?;
    // Hand oracle: over Z/2, d<g,h> = <h> + <gh> + <g>; element 0 is e.
    let mul = |a: usize, b: usize| (a + b) % 2;
    let columns: Vec<[u32; 2]> = (0..2)
        .flat_map(|g| (0..2).map(move |h| (g, h)))
        .map(|(g, h)| {
            let mut v = [0u32; 2];
            for x in [h, mul(g, h), g] {
                v[x] ^= 1;
            }
            v
        })
        .collect();
    let mut span: Vec<([u32; 2], usize)> = Vec::new();
    for mask in 0u32..(1 << columns.len()) {
        let mut v = [0u32; 2];
        for (j, c) in columns.iter().enumerate() {
            if mask >> j & 1 == 1 {
                v[0] ^= c[0];
                v[1] ^= c[1];
            }
        }
        let w = mask.count_ones() as usize;
        match span.iter_mut().find(|(u, _)| *u == v) {
            Some(e) => e.1 = e.1.min(w),
            None => span.push((v, w)),
        }
    }
    span.sort();
    t.check(span.iter().map(|s| s.0).eq([[0, 0], [1, 0]]), || format!("B_1 of Z/2 is {span:?}"));
    let oracle = |k: usize| {
        span.iter()
            .filter(|(v, _)| v.iter().filter(|&&x| x != 0).count() == k)
            .map(|s| s.1)
            .max()
            .unwrap_or(0)
    };
    let mut values = Vec::new();
    for (k, expected) in [(1usize, 1usize), (2, 0)] {
        let r = isop(&solver, k, reg.limits(), &IsopOptions::default())?;
        t.check(r.exact && r.value == expected && oracle(k) == expected, || {
            format!("isop({k}) = {} (exact {}), hand oracle {}, expected {expected}", r.value, r.exact, oracle(k))
        });
        values.push(json!({ "K": k, "value": r.value, "oracle": oracle(k), "census": r.census }));
    }
    Ok(t.report("isop-micro", seed, json!({ "boundaries": span.len(), "isop": values })))
}

fn sentences(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let l2 = modulus(2);
    let solver = reg.filler_solver(&"cyclic:2".parse()?, 1, l2)?;
    let mut phi = Vec::new();
    for k1 in 0..=4 {
        let r = check_phi(&solver, 1, k1, 1, reg.limits())?;
        t.check(r.holds, || format!("Phi(1,{k1},1) fails on Z/2"));
        phi.push(json!({ "K": 1, "K1": k1, "K2": 1, "holds": r.holds }));
    }
    let r = check_phi(&solver, 1, 1, 0, reg.limits())?;
    t.check(!r.holds, || "Phi(1,1,0) holds on Z/2".into());
    phi.push(json!({ "K": 1, "K1": 1, "K2": 0, "holds": r.holds }));

    let mut limits = *reg.limits();
    limits.census_cap = SENTENCE_CENSUS_CAP;
    let mut psi = Vec::new();
    let mut skipped = Vec::new();
    for spec in REGISTRY {
        for l in [2u32, 3] {
            let g = reg.group_str(spec)?;
            for k in [1usize, 2] {
                match check_psi_recipe(&g, 1, modulus(l), k, &limits) {
                    Ok((profile, r)) => {
                        t.check(r.holds, || format!("Psi_{k} fails on {spec} (l={l}): {:?}", r.counterexample));
                        psi.push(json!({
                            "group": spec, "l": l, "K": k, "K1": r.k1, "H_bound": r.h_bound,
                            "classes": r.classes, "cycles": r.cycles, "holds": r.holds,
                            "isop": profile.profile.iter().map(|p| p.value).collect::<Vec<_>>(),
                        }));
                    }
                    Err(e) if e.is_refusal() => skipped.push(json!({ "group": spec, "l": l, "K": k, "reason": e.to_string() })),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(t.report("sentences", seed, json!({ "phi": phi, "psi": psi, "psi_skipped": skipped })))
}

fn torus(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for (q, p) in [(3u32, 3u32), (4, 2), (5, 5)] {
        for l in [2u32, 3] {
            if l == p {
                continue;
            }
            let g = reg.group_str(&format!("gl:2:{q}"))?;
            let r = torus_check(&g, 1, modulus(l), reg.limits())?;
            t.check(r.consistent, || format!("gl:2:{q}, l={l}: index {} prime to l but map not onto", r.index));
            rows.push(json!({
                "group": format!("gl:2:{q}"), "l": l, "index": r.index, "index_prime_to_l": r.index_prime_to_l,
                "source_dim": r.induced.source_dim, "target_dim": r.induced.target_dim,
                "surjective": r.induced.surjective, "consistent": r.consistent,
            }));
        }
    }
    Ok(t.report("torus", seed, json!({ "checks": rows })))
}

/// Exact instances required for each metric property.
pub const METRIC_INSTANCES: u64 = 200;

fn metric(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [("cyclic:6", 1usize, 3u32), ("sym:3", 1, 2), ("cyclic:4", 1, 2), ("cyclic:3", 2, 3)];
    let mut triangles = 0u64;
    let mut pairs = 0u64;
    let mut inexact = 0u64;
    let mut round = 0usize;
    let cap = reg.limits().tuple_cap;
    while triangles < METRIC_INSTANCES || pairs < METRIC_INSTANCES {
        let (spec, n, l) = configs[round % configs.len()];
        round += 1;
        if round > 100 * METRIC_INSTANCES as usize {
            return Err(Error::BudgetExhausted {
                budget: round as u64,
            });
        }
        let g = reg.group_str(spec)?;
        let l = modulus(l);
        let solver = reg.filler_solver(&spec.parse()?, n, l)?;
        let mut rand_chain = |deg: usize, max: usize| -> Result<Chain> {
            let size = rng.gen_range(1..=max);
            random_chain(g.clone(), deg, l, size, rng.gen(), cap)
        };
        if triangles < METRIC_INSTANCES {
            // A random cycle and two homologous moves away from it.
            let z1 = if n == 1 {
                rand_chain(1, 3)?
            } else {
                rand_chain(n + 1, 2)?.boundary()?
            };
            let z2 = z1.add(&rand_chain(n + 1, 3)?.boundary()?)?;
            let z3 = z2.add(&rand_chain(n + 1, 3)?.boundary()?)?;
            let d12 = distance_with(&solver, &z1, &z2)?;
            let d23 = distance_with(&solver, &z2, &z3)?;
            let d13 = distance_with(&solver, &z1, &z3)?;
            if d12.exact && d23.exact && d13.exact {
                triangles += 1;
                t.check(d13.filler_size <= d12.filler_size + d23.filler_size, || {
                    format!("triangle: {} > {} + {} on {spec}", d13.filler_size, d12.filler_size, d23.filler_size)
                });
            } else {
                inexact += 1;
            }
        }
        if pairs < METRIC_INSTANCES {
            let b1 = rand_chain(n + 1, 3)?.boundary()?;
            let b2 = rand_chain(n + 1, 3)?.boundary()?;
            let f1 = solver.norm(&b1)?;
            let f2 = solver.norm(&b2)?;
            let f12 = solver.norm(&b1.add(&b2)?)?;
            if f1.exact && f2.exact && f12.exact {
                pairs += 1;
                t.check(f12.filler_size <= f1.filler_size + f2.filler_size, || {
                    format!("subadditivity: {} > {} + {} on {spec}", f12.filler_size, f1.filler_size, f2.filler_size)
                });
                t.check(f1.filler_size <= 3 && f2.filler_size <= 3, || "filler above its witness size".into());
            } else {
                inexact += 1;
            }
        }
    }
    Ok(t.report(
        "metric",
        seed,
        json!({ "triangle_instances": triangles, "subadditivity_instances": pairs, "inexact_skipped": inexact }),
    ))
}

/// Random chains pushed through the family in the round-trip suite.
pub const ROUNDTRIP_CHAINS: u64 = 100;

fn family_roundtrip(reg: &Registry, seed: u64) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let fam = GroupFamily::prime_powers(FamilyKind::Torus(1), 2, 20, Some(3), reg.limits())?;
    let z3 = reg.group_str("cyclic:3")?;
    let l = modulus(3);
    let maps: Vec<Homomorphism> = fam
        .members
        .iter()
        .map(|m| cyclic_into_torus(&z3, &m.group))
        .collect::<Result<_>>()?;
    let labels: Vec<String> = fam.members.iter().map(|m| m.label.clone()).collect();
    let inverse: Vec<HashMap<Element, Element>> = maps
        .iter()
        .map(|f| f.map.iter().enumerate().map(|(i, &y)| (y, i as Element)).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..ROUNDTRIP_CHAINS {
        let n = rng.gen_range(1..=2usize);
        let size = rng.gen_range(1..=4usize).min(3usize.pow(n as u32));
        let c = random_chain(z3.clone(), n, l, size, rng.gen(), reg.limits().tuple_cap)?;
        let images = diagonal_embed(&c, &maps)?;
        let coo = coordinate_decompose(&labels, &images, 4)?;
        t.check(coo.dissent.is_empty(), || format!("chain {i}: dissent {:?}", coo.dissent));
        for (k, mc) in coo.per_index.iter().enumerate() {
            if !coo.members.contains(&mc.label) {
                continue;
            }
            let back: Vec<(i64, Vec<Element>)> = coo
                .t0
                .iter()
                .zip(&mc.tuples)
                .map(|(&a, tup)| (a as i64, tup.iter().map(|y| inverse[k][y]).collect()))
                .collect();
            let rebuilt = Chain::from_terms(z3.clone(), n, l, back)?;
            t.check(rebuilt == c, || format!("chain {i} at {}: reconstruction differs", mc.label));
            if n >= 1 {
                let target = fam.members[k].group.clone();
                let pushed = images[k].to_chain(target.clone(), n, l)?;
                let d_then_push = c.boundary()?.map_elements(target, &maps[k].map);
                t.check(pushed.boundary()? == d_then_push, || format!("chain {i} at {}: d does not commute", mc.label));
            }
        }
    }
    let qs: Vec<u32> = fam.members.iter().filter_map(|m| m.q).collect();
    Ok(t.report("family-roundtrip", seed, json!({ "chains": ROUNDTRIP_CHAINS, "family_q": qs })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for s in ["isop-micro", "torus", "family-roundtrip"] {
            let r = run_suite(s, 1, &Limits::default()).unwrap();
            assert!(r.passed, "{s}: {:?}", r.failures);
        }
        assert!(run_suite("nope", 1, &Limits::default()).is_err());
    }
}
