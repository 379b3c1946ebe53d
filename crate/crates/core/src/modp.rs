//! Arithmetic in the prime field of chain coefficients.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The coefficient field `Z/l` for a prime `l`.
///
/// Values are always stored normalized to `0..l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulus(u32);

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Modulus {
    pub fn new(l: u32) -> Result<Self> {
        if !is_prime(l as u64) {
            return Err(Error::Precondition(format!("coefficient modulus {l} is not prime")));
        }
        if l >= 1 << 16 {
            return Err(Error::Precondition(format!("coefficient modulus {l} is too large")));
        }
        Ok(Modulus(l))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.0
    }

    pub fn pow(self, mut a: u32, mut e: u32) -> u32 {
        let mut acc = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    #[inline]
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.0 != 0, "inverse of zero");
        self.pow(a, self.0 - 2)
    }

    /// Signed value `+1`/`-1` as a field element.
    #[inline]
    pub fn sign(self, positive: bool) -> u32 {
        if positive {
            1 % self.0
        } else {
            self.0 - 1
        }
    }
}

/// `a + s * b` for sparse vectors stored as sorted `(index, value)` pairs.
pub fn axpy<K: Ord + Copy>(a: &[(K, u32)], s: u32, b: &[(K, u32)], l: Modulus) -> Vec<(K, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match take {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                let v = l.mul(s, b[j].1);
                if v != 0 {
                    out.push((b[j].0, v));
                }
                j += 1;
            }
            Ordering::Equal => {
                let v = l.add(a[i].1, l.mul(s, b[j].1));
                if v != 0 {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl TryFrom<u32> for Modulus {
    type Error = Error;

    fn try_from(l: u32) -> Result<Self> {
        Modulus::new(l)
    }
}

impl From<Modulus> for u32 {
    fn from(m: Modulus) -> u32 {
        m.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(Modulus::new(4).is_err());
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(7).is_ok());
    }

    #[test]
    fn inverses() {
        for l in [2u32, 3, 5, 7, 11] {
            let m = Modulus::new(l).unwrap();
            for a in 1..l {
                assert_eq!(m.mul(a, m.inv(a)), 1);
                assert_eq!(m.add(a, m.neg(a)), 0);
            }
        }
    }

    #[test]
    fn signs_mod_two_agree() {
        let m = Modulus::new(2).unwrap();
        assert_eq!(m.sign(true), m.sign(false));
    }
}
