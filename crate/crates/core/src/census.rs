//! Exhaustive enumeration of chains of a fixed size.
//!
//! Item `i` of the census is support number `i / P` in lexicographic order
//! of `K`-subsets of the tuple space, with coefficient pattern `i % P`.
//! Patterns either run over all `(l-1)^K` nonzero vectors or, when
//! `normalized`, over the `(l-1)^(K-1)` vectors with leading coefficient 1.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modp::Modulus;
use crate::search::Term;

/// Items handled by one parallel task.
const TASK_ITEMS: u64 = 4096;

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

#[derive(Debug, Clone)]
pub(crate) struct Census {
    tuples: u64,
    k: usize,
    l: Modulus,
    normalized: bool,
    patterns: u64,
    total: u64,
}

impl Census {
    /// `cap` bounds the full count with every coefficient pattern, whether
    /// or not the census itself is normalized.
    pub(crate) fn new(tuples: u64, k: usize, l: Modulus, normalized: bool, cap: u64) -> Result<Self> {
        let base = (l.get() - 1) as u128;
        let supports = binomial(tuples, k as u64);
        let full = supports.saturating_mul(base.saturating_pow(k as u32));
        if full > cap as u128 {
            return Err(Error::cap(format!("census of size-{k} chains"), full, cap as u128));
        }
        let exp = if normalized { k.saturating_sub(1) } else { k };
        let patterns = base.pow(exp as u32) as u64;
        Ok(Census {
            tuples,
            k,
            l,
            normalized,
            patterns,
            total: supports as u64 * patterns,
        })
    }

    pub(crate) fn len(&self) -> u64 {
        self.total
    }

    /// Scalar multiples represented by each item.
    pub(crate) fn multiplicity(&self) -> u64 {
        if self.normalized && self.k > 0 {
            (self.l.get() - 1) as u64
        } else {
            1
        }
    }

    fn unrank_support(&self, mut r: u128) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.k);
        let mut x = 0u64;
        for i in 0..self.k {
            loop {
                let c = binomial(self.tuples - x - 1, (self.k - i - 1) as u64);
                if r < c {
                    out.push(x);
                    x += 1;
                    break;
                }
                r -= c;
                x += 1;
            }
        }
        out
    }

    fn next_support(&self, s: &mut [u64]) -> bool {
        let k = s.len();
        for i in (0..k).rev() {
            if s[i] < self.tuples - (k - i) as u64 {
                s[i] += 1;
                for j in i + 1..k {
                    s[j] = s[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn pattern(&self, mut p: u64, out: &mut [u32]) {
        let base = (self.l.get() - 1) as u64;
        let skip = usize::from(self.normalized && self.k > 0);
        for c in out[..skip].iter_mut() {
            *c = 1;
        }
        for c in out[skip..].iter_mut().rev() {
            *c = (p % base) as u32 + 1;
            p /= base;
        }
    }

    /// Visit items `range` in order, calling `step` with each chain's terms.
    fn walk(&self, range: std::ops::Range<u64>, step: &mut dyn FnMut(&[Term]) -> Result<()>) -> Result<()> {
        if range.is_empty() {
            return Ok(());
        }
        let mut support = self.unrank_support((range.start / self.patterns) as u128);
        let mut p = range.start % self.patterns;
        let mut coeffs = vec![0u32; self.k];
        let mut terms: Vec<Term> = Vec::with_capacity(self.k);
        for _ in range {
            self.pattern(p, &mut coeffs);
            terms.clear();
            terms.extend(support.iter().copied().zip(coeffs.iter().copied()));
            step(&terms)?;
            p += 1;
            if p == self.patterns {
                p = 0;
                self.next_support(&mut support);
            }
        }
        Ok(())
    }

    /// Fold items `range` in parallel tasks; `merge` must be order-free
    /// for the result to be schedule independent.
    pub(crate) fn fold<A, I, S, M>(&self, range: std::ops::Range<u64>, init: I, step: S, merge: M) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        S: Fn(&mut A, &[Term]) -> Result<()> + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let starts: Vec<u64> = (range.start..range.end).step_by(TASK_ITEMS as usize).collect();
        starts
            .into_par_iter()
            .map(|s| {
                let mut acc = init();
                let e = (s + TASK_ITEMS).min(range.end);
                self.walk(s..e, &mut |t| step(&mut acc, t))?;
                Ok(acc)
            })
            .try_reduce(&init, |a, b| Ok(merge(a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn enumerates_every_chain_once() {
        let l = Modulus::new(3).unwrap();
        for normalized in [false, true] {
            let c = Census::new(5, 3, l, normalized, 1 << 20).unwrap();
            let mut seen = Vec::new();
            c.walk(0..c.len(), &mut |t| {
                seen.push(t.to_vec());
                Ok(())
            })
            .unwrap();
            let expect = if normalized { 10 * 4 } else { 10 * 8 };
            assert_eq!(seen.len(), expect);
            let mut sorted = seen.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), expect);
            assert!(seen.iter().all(|t| t.windows(2).all(|w| w[0].0 < w[1].0)));
            // Any starting point resumes the same sequence.
            for start in [0, 7, 33] {
                let mut tail = Vec::new();
                c.walk(start..c.len(), &mut |t| {
                    tail.push(t.to_vec());
                    Ok(())
                })
                .unwrap();
                assert_eq!(tail, seen[start as usize..]);
            }
        }
    }

    #[test]
    fn refuses_above_cap() {
        let l = Modulus::new(2).unwrap();
        assert!(matches!(Census::new(100, 3, l, true, 1000), Err(Error::CapExceeded { .. })));
    }
}
