use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FiniteField;

use super::Element;

/// Which matrices a matrix group contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    General,
    Special,
    Diagonal,
}

/// A group of `dim x dim` matrices over `GF(q)`, indexed by the
/// lexicographic order of their flattened entries.
#[derive(Debug)]
pub struct MatrixRep {
    field: Arc<FiniteField>,
    dim: usize,
    keys: Vec<u64>,
}

fn det(field: &FiniteField, dim: usize, mut m: Vec<u32>) -> u32 {
    let mut acc = 1;
    for col in 0..dim {
        let Some(piv) = (col..dim).find(|&r| m[r * dim + col] != 0) else {
            return 0;
        };
        if piv != col {
            for c in 0..dim {
                m.swap(piv * dim + c, col * dim + c);
            }
            acc = field.neg(acc);
        }
        let p = m[col * dim + col];
        acc = field.mul(acc, p);
        let p_inv = field.inv(p).expect("nonzero pivot");
        for r in col + 1..dim {
            let f = field.mul(m[r * dim + col], p_inv);
            if f == 0 {
                continue;
            }
            for c in col..dim {
                let v = field.mul(f, m[col * dim + c]);
                m[r * dim + c] = field.sub(m[r * dim + c], v);
            }
        }
    }
    acc
}

impl MatrixRep {
    pub(crate) fn enumerate(field: Arc<FiniteField>, dim: usize, kind: MatrixKind) -> Result<Self> {
        let q = field.order() as u64;
        let mut keys = Vec::new();
        match kind {
            MatrixKind::Diagonal => {
                // Lexicographic order on the diagonal tuple agrees with the
                // order on flattened entries since off-diagonal entries vanish.
                let count = (q - 1).pow(dim as u32);
                for k in 0..count {
                    let mut m = vec![0u32; dim * dim];
                    let mut r = k;
                    for i in (0..dim).rev() {
                        m[i * dim + i] = (r % (q - 1)) as u32 + 1;
                        r /= q - 1;
                    }
                    keys.push(encode(q, &m));
                }
            }
            MatrixKind::General | MatrixKind::Special => {
                let total = q
                    .checked_pow((dim * dim) as u32)
                    .filter(|&t| t <= 1 << 26)
                    .ok_or_else(|| Error::cap("matrix enumeration size", (q as u128).pow((dim * dim) as u32), 1 << 26))?;
                for k in 0..total {
                    let m = decode(q, dim, k);
                    let d = det(&field, dim, m);
                    let keep = match kind {
                        MatrixKind::General => d != 0,
                        _ => d == 1,
                    };
                    if keep {
                        keys.push(k);
                    }
                }
            }
        }
        Ok(MatrixRep { field, dim, keys })
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn entries(&self, a: Element) -> Vec<u32> {
        decode(self.field.order() as u64, self.dim, self.keys[a as usize])
    }

    /// Index of the matrix with the given entries, if it belongs to the group.
    pub fn index_of(&self, entries: &[u32]) -> Option<Element> {
        let key = encode(self.field.order() as u64, entries);
        self.keys.binary_search(&key).ok().map(|i| i as Element)
    }

    pub(crate) fn identity(&self) -> Element {
        let mut m = vec![0u32; self.dim * self.dim];
        for i in 0..self.dim {
            m[i * self.dim + i] = 1;
        }
        self.index_of(&m).expect("identity matrix is in every matrix group")
    }

    pub(crate) fn mul(&self, a: Element, b: Element) -> Element {
        let (x, y) = (self.entries(a), self.entries(b));
        let n = self.dim;
        let f = &self.field;
        let mut z = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0;
                for k in 0..n {
                    s = f.add(s, f.mul(x[i * n + k], y[k * n + j]));
                }
                z[i * n + j] = s;
            }
        }
        self.index_of(&z).expect("matrix group closed under multiplication")
    }

    pub(crate) fn inv(&self, a: Element) -> Element {
        let n = self.dim;
        let f = &self.field;
        let mut m = self.entries(a);
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            out[i * n + i] = 1;
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| m[r * n + col] != 0).expect("invertible matrix");
            for c in 0..n {
                m.swap(piv * n + c, col * n + c);
                out.swap(piv * n + c, col * n + c);
            }
            let p_inv = f.inv(m[col * n + col]).expect("nonzero pivot");
            for c in 0..n {
                m[col * n + c] = f.mul(m[col * n + c], p_inv);
                out[col * n + c] = f.mul(out[col * n + c], p_inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m[r * n + col];
                if factor == 0 {
                    continue;
                }
                for c in 0..n {
                    let v = f.mul(factor, m[col * n + c]);
                    m[r * n + c] = f.sub(m[r * n + c], v);
                    let w = f.mul(factor, out[col * n + c]);
                    out[r * n + c] = f.sub(out[r * n + c], w);
                }
            }
        }
        self.index_of(&out).expect("matrix group closed under inverses")
    }

    pub(crate) fn label(&self, a: Element) -> String {
        let m = self.entries(a);
        let rows: Vec<String> = m
            .chunks(self.dim)
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|&x| self.field.label(x)).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }

    pub fn is_diagonal(&self, a: Element) -> bool {
        let m = self.entries(a);
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || m[i * self.dim + j] == 0))
    }
}

fn encode(q: u64, entries: &[u32]) -> u64 {
    entries.iter().fold(0, |acc, &x| acc * q + x as u64)
}

fn decode(q: u64, dim: usize, mut key: u64) -> Vec<u32> {
    let mut m = vec![0u32; dim * dim];
    for slot in m.iter_mut().rev() {
        *slot = (key % q) as u32;
        key /= q;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl23_brute_force_count() {
        // Count invertible 2x2 matrices over GF(3) directly via ad - bc.
        let mut count = 0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        if (a * d + 9 - b * c) % 3 != 0 {
                            count += 1;
                        }
                    }
                }
            }
        }
        let f = Arc::new(FiniteField::new(3).unwrap());
        let rep = MatrixRep::enumerate(f, 2, MatrixKind::General).unwrap();
        assert_eq!(count, 48);
        assert_eq!(rep.len(), count);
    }

    #[test]
    fn determinant_matches_formula() {
        let f = FiniteField::new(5).unwrap();
        for k in 0..625u64 {
            let m = decode(5, 2, k);
            let expect = (m[0] * m[3] % 5 + 25 - m[1] * m[2] % 5) % 5;
            assert_eq!(det(&f, 2, m), expect);
        }
    }
}
