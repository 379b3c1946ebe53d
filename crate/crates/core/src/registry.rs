//! Shared cache of groups, boundary spaces and homology results.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::Result;
use crate::group::{build_group, FiniteGroup, GroupSpec};
use crate::homology::{homology_with, BoundarySpace, HomologyResult};
use crate::isoperimetry::FillerSolver;
use crate::limits::{check_degree, Limits};
use crate::modp::Modulus;

type Key = (String, usize, u32);

/// Everything built from a spec is computed once and shared; entries are
/// keyed by the canonical spec text, degree and modulus.
pub struct Registry {
    limits: Limits,
    groups: RwLock<HashMap<String, Arc<FiniteGroup>>>,
    spaces: RwLock<HashMap<Key, Arc<BoundarySpace>>>,
    homology: RwLock<HashMap<Key, Arc<HomologyResult>>>,
}

fn cached<K, V, F>(map: &RwLock<HashMap<K, V>>, key: K, make: F) -> Result<V>
where
    K: std::hash::Hash + Eq,
    V: Clone,
    F: FnOnce() -> Result<V>,
{
    if let Some(v) = map.read().expect("registry lock poisoned").get(&key) {
        return Ok(v.clone());
    }
    let v = make()?;
    Ok(map.write().expect("registry lock poisoned").entry(key).or_insert(v).clone())
}

impl Registry {
    pub fn new(limits: Limits) -> Self {
        Registry {
            limits,
            groups: RwLock::default(),
            spaces: RwLock::default(),
            homology: RwLock::default(),
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn group(&self, spec: &GroupSpec) -> Result<Arc<FiniteGroup>> {
        cached(&self.groups, spec.to_string(), || build_group(spec, self.limits.order_cap))
    }

    pub fn group_str(&self, spec: &str) -> Result<Arc<FiniteGroup>> {
        self.group(&spec.parse()?)
    }

    pub fn boundaries(&self, spec: &GroupSpec, n: usize, l: Modulus) -> Result<Arc<BoundarySpace>> {
        let g = self.group(spec)?;
        cached(&self.spaces, (spec.to_string(), n, l.get()), || {
            Ok(Arc::new(BoundarySpace::new(g, n, l, &self.limits)?))
        })
    }

    pub fn homology(&self, spec: &GroupSpec, n: usize, l: Modulus) -> Result<Arc<HomologyResult>> {
        let g = self.group(spec)?;
        check_degree(g.order(), n)?;
        let space = self.boundaries(spec, n, l)?;
        cached(&self.homology, (spec.to_string(), n, l.get()), || {
            Ok(Arc::new(homology_with(&g, n, l, space, &self.limits)?))
        })
    }

    pub fn filler_solver(&self, spec: &GroupSpec, n: usize, l: Modulus) -> Result<FillerSolver> {
        FillerSolver::new(self.boundaries(spec, n, l)?, &self.limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_shared() {
        let r = Registry::new(Limits::default());
        let spec: GroupSpec = "sym:3".parse().unwrap();
        let l = Modulus::new(2).unwrap();
        let a = r.homology(&spec, 1, l).unwrap();
        let b = r.homology(&spec, 1, l).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(Arc::ptr_eq(&r.group(&spec).unwrap(), &r.group_str("sym:3").unwrap()));
        assert_eq!(a.dim, 1);
    }
}
