//! Sparse linear algebra over `Z/l`: bar boundary matrices, rank, solving
//! and kernels.
//!
//! Elimination works column by column. Each incoming column is reduced
//! against the pivots found so far, where a pivot is keyed by the largest
//! row index of its reduced column. A column that reduces to zero yields a
//! kernel vector; otherwise it becomes a new pivot. Alongside each reduced
//! column we keep the combination of original columns producing it, which
//! makes repeated solves against the same matrix cheap.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::chain::{tuple_boundary, TupleIndex, TupleSpace};
use crate::error::{Error, Result};
use crate::group::{generators, FiniteGroup};
use crate::modp::{axpy, Modulus};

/// Sparse vector as sorted `(index, value)` pairs with nonzero values.
pub type SparseVec = Vec<(u32, u32)>;

/// Which enumeration a side of a matrix is expressed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    /// Standard basis `0..len`.
    Standard,
    /// All `degree`-tuples of a group, lexicographically.
    Tuples { order: usize, degree: usize },
    /// A selection of `degree`-tuples; position `i` is tuple `indices[i]`.
    TupleSubset {
        order: usize,
        degree: usize,
        indices: Vec<TupleIndex>,
    },
}

impl Basis {
    /// Tuple index of position `i`.
    pub fn tuple_index(&self, i: u32) -> TupleIndex {
        match self {
            Basis::TupleSubset { indices, .. } => indices[i as usize],
            _ => i as TupleIndex,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SparseMatrix {
    l: Modulus,
    rows: usize,
    columns: Vec<SparseVec>,
    pub row_basis: Basis,
    pub col_basis: Basis,
}

impl SparseMatrix {
    pub fn zero(l: Modulus, rows: usize, cols: usize) -> Self {
        SparseMatrix {
            l,
            rows,
            columns: vec![Vec::new(); cols],
            row_basis: Basis::Standard,
            col_basis: Basis::Standard,
        }
    }

    pub fn identity(l: Modulus, k: usize) -> Self {
        SparseMatrix {
            l,
            rows: k,
            columns: (0..k as u32).map(|i| vec![(i, 1)]).collect(),
            row_basis: Basis::Standard,
            col_basis: Basis::Standard,
        }
    }

    /// Build from sparse columns; entries are reduced mod `l`, merged and
    /// checked against the row count.
    pub fn from_columns(l: Modulus, rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Result<Self> {
        let mut cols = Vec::with_capacity(columns.len());
        for col in columns {
            let mut v: Vec<(u32, u32)> = Vec::with_capacity(col.len());
            for (r, x) in col {
                if r as usize >= rows {
                    return Err(Error::Mismatch(format!("row index {r} out of range for {rows} rows")));
                }
                v.push((r, l.reduce(x)));
            }
            cols.push(normalize(v, l));
        }
        Ok(SparseMatrix {
            l,
            rows,
            columns: cols,
            row_basis: Basis::Standard,
            col_basis: Basis::Standard,
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.l
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, u32)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn mul_vec(&self, x: &[(u32, u32)]) -> Result<SparseVec> {
        let mut acc: Vec<(u32, u32)> = Vec::new();
        for &(j, v) in x {
            let col = self
                .columns
                .get(j as usize)
                .ok_or_else(|| Error::Mismatch(format!("vector index {j} beyond {} columns", self.cols())))?;
            acc = axpy(&acc, v, col, self.l);
        }
        Ok(acc)
    }

    /// Dense `rows x cols` rendering, for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i as usize][j] = v;
            }
        }
        out
    }

    /// MatrixMarket coordinate format, 1-based, entries in `0..l`.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate integer general")?;
        writeln!(w, "% entries are residues mod {}", self.l.get())?;
        writeln!(w, "{} {} {}", self.rows, self.cols(), self.nnz())?;
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }
}

fn normalize(mut v: Vec<(u32, u32)>, l: Modulus) -> SparseVec {
    v.sort_unstable_by_key(|t| t.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = l.add(last.1, x),
            _ => out.push((i, x)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

/// Size limits for matrix assembly.
#[derive(Debug, Clone, Copy)]
pub struct MatrixCaps {
    pub tuple_cap: u64,
    pub nnz_cap: u64,
}

impl Default for MatrixCaps {
    fn default() -> Self {
        MatrixCaps {
            tuple_cap: 10_000_000,
            nnz_cap: 10_000_000,
        }
    }
}

fn bar_columns<I>(group: &FiniteGroup, n: usize, l: Modulus, tuples: I, caps: MatrixCaps) -> Result<Vec<SparseVec>>
where
    I: Iterator<Item = TupleIndex>,
{
    let mut digits = Vec::new();
    let mut faces = Vec::new();
    let mut nnz = 0u64;
    let mut cols = Vec::new();
    for t in tuples {
        tuple_boundary(group, n, l, t, &mut digits, &mut faces);
        nnz += faces.len() as u64;
        if nnz > caps.nnz_cap {
            return Err(Error::cap(format!("nonzeros of D_{n}"), nnz as u128, caps.nnz_cap as u128));
        }
        cols.push(faces.iter().map(|&(k, v)| (k as u32, v)).collect());
    }
    Ok(cols)
}

/// The matrix of `d_n : C_n -> C_{n-1}` in the lexicographic tuple bases.
pub fn boundary_matrix(group: &FiniteGroup, n: usize, l: Modulus, caps: MatrixCaps) -> Result<SparseMatrix> {
    if n == 0 {
        return Err(Error::Precondition("d_0 is not part of the complex".into()));
    }
    let src = TupleSpace::new(group.order(), n, caps.tuple_cap)?;
    let dst = TupleSpace::new(group.order(), n - 1, caps.tuple_cap)?;
    let columns = bar_columns(group, n, l, 0..src.len(), caps)?;
    Ok(SparseMatrix {
        l,
        rows: dst.len() as usize,
        columns,
        row_basis: Basis::Tuples {
            order: group.order(),
            degree: n - 1,
        },
        col_basis: Basis::Tuples {
            order: group.order(),
            degree: n,
        },
    })
}

/// A matrix whose columns span the image of `d_n`, using fewer columns
/// when that is known to be safe.
///
/// For `n = 2` the columns `<g, s>` with `s` running over a generating set
/// already span `B_1`: modulo their span `<g s> = <g> + <s>`, so `<g>` is
/// additive along words in the generators and therefore in general. Other
/// degrees use every column.
pub fn boundary_image_matrix(group: &FiniteGroup, n: usize, l: Modulus, caps: MatrixCaps) -> Result<SparseMatrix> {
    if n != 2 {
        return boundary_matrix(group, n, l, caps);
    }
    let order = group.order() as u64;
    TupleSpace::new(group.order(), 1, caps.tuple_cap)?;
    let mut gens = generators(group);
    if gens.is_empty() {
        gens.push(group.identity());
    }
    let mut indices: Vec<TupleIndex> = (0..order)
        .flat_map(|g| gens.iter().map(move |&s| g * order + s as u64))
        .collect();
    indices.sort_unstable();
    let columns = bar_columns(group, 2, l, indices.iter().copied(), caps)?;
    Ok(SparseMatrix {
        l,
        rows: group.order(),
        columns,
        row_basis: Basis::Tuples {
            order: group.order(),
            degree: 1,
        },
        col_basis: Basis::TupleSubset {
            order: group.order(),
            degree: 2,
            indices,
        },
    })
}

#[derive(Debug, Clone)]
struct Pivot {
    /// Reduced column, scaled so the entry at its leading row is 1.
    reduced: SparseVec,
    /// Column ids whose combination equals `reduced`.
    combo: SparseVec,
}

/// Elimination state for one matrix, reusable across solves.
#[derive(Debug, Clone)]
pub struct EliminationCache {
    l: Modulus,
    rows: usize,
    columns_seen: usize,
    pivot_of_row: HashMap<u32, usize>,
    pivots: Vec<Pivot>,
    kernel: Option<Vec<SparseVec>>,
}

/// Result of pushing one column into an [`EliminationCache`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// The column was independent and became pivot number `.0`.
    Pivot(usize),
    /// The column was dependent; the vector is a kernel relation.
    Dependent(SparseVec),
}

impl EliminationCache {
    pub fn empty(l: Modulus, rows: usize) -> Self {
        EliminationCache {
            l,
            rows,
            columns_seen: 0,
            pivot_of_row: HashMap::new(),
            pivots: Vec::new(),
            kernel: None,
        }
    }

    /// Eliminate every column of `m`. Columns are visited in order of
    /// increasing weight (ties by index) to limit fill-in. Kernel vectors
    /// are kept only when `keep_kernel` is set.
    pub fn new(m: &SparseMatrix, keep_kernel: bool) -> Self {
        let mut cache = EliminationCache::empty(m.l, m.rows);
        if keep_kernel {
            cache.kernel = Some(Vec::new());
        }
        let mut order: Vec<u32> = (0..m.cols() as u32).collect();
        order.sort_by_key(|&j| (m.columns[j as usize].len(), j));
        for j in order {
            if let Reduction::Dependent(rel) = cache.push_column(m.column(j as usize), j) {
                if let Some(k) = cache.kernel.as_mut() {
                    k.push(rel);
                }
            }
        }
        cache.columns_seen = m.cols();
        cache
    }

    fn reduce(&self, v: &mut SparseVec, combo: &mut SparseVec) -> bool {
        loop {
            let Some(&(r, f)) = v.last() else {
                return true;
            };
            match self.pivot_of_row.get(&r) {
                Some(&k) => {
                    let p = &self.pivots[k];
                    let neg = self.l.neg(f);
                    *v = axpy(v, neg, &p.reduced, self.l);
                    *combo = axpy(combo, neg, &p.combo, self.l);
                }
                None => return false,
            }
        }
    }

    /// Add a column with the given id (ids need not be contiguous, but each
    /// must be used once).
    pub fn push_column(&mut self, col: &[(u32, u32)], id: u32) -> Reduction {
        let mut v = col.to_vec();
        let mut combo = vec![(id, 1)];
        if self.reduce(&mut v, &mut combo) {
            return Reduction::Dependent(combo);
        }
        let (r, f) = *v.last().unwrap();
        let inv = self.l.inv(f);
        for t in v.iter_mut() {
            t.1 = self.l.mul(t.1, inv);
        }
        for t in combo.iter_mut() {
            t.1 = self.l.mul(t.1, inv);
        }
        let k = self.pivots.len();
        self.pivots.push(Pivot { reduced: v, combo });
        self.pivot_of_row.insert(r, k);
        self.columns_seen = self.columns_seen.max(id as usize + 1);
        Reduction::Pivot(k)
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn modulus(&self) -> Modulus {
        self.l
    }

    /// Basis of the kernel, if it was requested at construction.
    pub fn kernel(&self) -> Option<&[SparseVec]> {
        self.kernel.as_deref()
    }

    pub fn in_column_space(&self, b: &[(u32, u32)]) -> bool {
        let mut v = b.to_vec();
        while let Some(&(r, f)) = v.last() {
            match self.pivot_of_row.get(&r) {
                Some(&k) => v = axpy(&v, self.l.neg(f), &self.pivots[k].reduced, self.l),
                None => return false,
            }
        }
        true
    }

    /// Canonical solution of `M x = b`, supported on pivot columns, or
    /// `None` when `b` is outside the column space.
    pub fn solve(&self, b: &[(u32, u32)]) -> Option<SparseVec> {
        let mut v = b.to_vec();
        let mut x: SparseVec = Vec::new();
        loop {
            let Some(&(r, f)) = v.last() else {
                return Some(x);
            };
            let &k = self.pivot_of_row.get(&r)?;
            let p = &self.pivots[k];
            v = axpy(&v, self.l.neg(f), &p.reduced, self.l);
            x = axpy(&x, f, &p.combo, self.l);
        }
    }
}

pub fn rank(m: &SparseMatrix) -> usize {
    EliminationCache::new(m, false).rank()
}

pub fn solve(m: &SparseMatrix, b: &[(u32, u32)]) -> Result<Option<SparseVec>> {
    if let Some(&(r, _)) = b.iter().find(|t| t.0 as usize >= m.rows) {
        return Err(Error::Mismatch(format!("right-hand side index {r} beyond {} rows", m.rows)));
    }
    Ok(EliminationCache::new(m, false).solve(b))
}

pub fn nullspace_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let cache = EliminationCache::new(m, true);
    cache.kernel.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec, DEFAULT_ORDER_CAP};
    use proptest::prelude::*;

    fn m(l: u32) -> Modulus {
        Modulus::new(l).unwrap()
    }

    fn z2() -> std::sync::Arc<FiniteGroup> {
        build_group(&"cyclic:2".parse::<GroupSpec>().unwrap(), DEFAULT_ORDER_CAP).unwrap()
    }

    /// Dense Gaussian elimination, the reference for rank.
    fn dense_rank(mut a: Vec<Vec<u32>>, l: Modulus) -> usize {
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
                continue;
            };
            a.swap(rank, p);
            let inv = l.inv(a[rank][c]);
            for r in 0..rows {
                if r != rank && a[r][c] != 0 {
                    let f = l.mul(a[r][c], inv);
                    for k in 0..cols {
                        let v = l.mul(f, a[rank][k]);
                        a[r][k] = l.sub(a[r][k], v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn d1_is_zero() {
        let g = build_group(&"sym:3".parse::<GroupSpec>().unwrap(), DEFAULT_ORDER_CAP).unwrap();
        let d1 = boundary_matrix(&g, 1, m(3), MatrixCaps::default()).unwrap();
        assert_eq!((d1.rows(), d1.cols(), d1.nnz()), (1, 6, 0));
    }

    #[test]
    fn d2_for_z2() {
        let d2 = boundary_matrix(&z2(), 2, m(2), MatrixCaps::default()).unwrap();
        assert_eq!(d2.to_dense(), vec![vec![1, 1, 1, 1], vec![0, 0, 0, 0]]);
        assert_eq!(rank(&d2), 1);
        assert_eq!(nullspace_basis(&d2).len(), 3);
        let x = solve(&d2, &[(0, 1)]).unwrap().unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(d2.mul_vec(&x).unwrap(), vec![(0, 1)]);
        assert_eq!(solve(&d2, &[(1, 1)]).unwrap(), None);
        assert!(solve(&d2, &[(7, 1)]).is_err());
    }

    #[test]
    fn d3_shape() {
        let g = build_group(&"cyclic:3".parse::<GroupSpec>().unwrap(), DEFAULT_ORDER_CAP).unwrap();
        let d3 = boundary_matrix(&g, 3, m(2), MatrixCaps::default()).unwrap();
        assert_eq!((d3.rows(), d3.cols()), (9, 27));
    }

    #[test]
    fn trivial_matrices() {
        let l = m(5);
        assert_eq!(rank(&SparseMatrix::zero(l, 3, 4)), 0);
        assert_eq!(rank(&SparseMatrix::identity(l, 6)), 6);
        assert!(nullspace_basis(&SparseMatrix::identity(l, 6)).is_empty());
        let z = nullspace_basis(&SparseMatrix::zero(l, 2, 3));
        assert_eq!(z, vec![vec![(0, 1)], vec![(1, 1)], vec![(2, 1)]]);
        let id = SparseMatrix::identity(l, 4);
        assert_eq!(solve(&id, &[(1, 3), (3, 2)]).unwrap(), Some(vec![(1, 3), (3, 2)]));
        assert_eq!(solve(&id, &[]).unwrap(), Some(vec![]));
    }

    #[test]
    fn matrix_market_dump() {
        let d2 = boundary_matrix(&z2(), 2, m(2), MatrixCaps::default()).unwrap();
        let mut buf = Vec::new();
        d2.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate integer general"));
        assert!(text.contains("\n2 4 4\n"));
        assert!(text.ends_with("1 4 1\n"));
    }

    #[test]
    fn image_matrix_spans_same_space() {
        for s in ["sym:3", "dihedral:8", "gl:2:3", "torus:2:4"] {
            let g = build_group(&s.parse::<GroupSpec>().unwrap(), DEFAULT_ORDER_CAP).unwrap();
            for l in [2, 3] {
                let full = boundary_matrix(&g, 2, m(l), MatrixCaps::default()).unwrap();
                let small = boundary_image_matrix(&g, 2, m(l), MatrixCaps::default()).unwrap();
                assert!(small.cols() < full.cols());
                let cache = EliminationCache::new(&small, false);
                assert_eq!(cache.rank(), rank(&full), "{s} l={l}");
                for col in full.columns() {
                    assert!(cache.in_column_space(col));
                }
            }
        }
    }

    #[test]
    fn dd_zero_matrices() {
        let g = build_group(&"sym:3".parse::<GroupSpec>().unwrap(), DEFAULT_ORDER_CAP).unwrap();
        for n in 2..=3 {
            let hi = boundary_matrix(&g, n, m(3), MatrixCaps::default()).unwrap();
            let lo = boundary_matrix(&g, n - 1, m(3), MatrixCaps::default()).unwrap();
            for col in hi.columns() {
                assert!(lo.mul_vec(col).unwrap().is_empty());
            }
        }
    }

    fn arb_matrix() -> impl Strategy<Value = (u32, usize, Vec<Vec<(u32, i64)>>)> {
        (prop::sample::select(vec![2u32, 3, 5, 7]), 1usize..8, 1usize..10).prop_flat_map(|(l, rows, cols)| {
            let col = prop::collection::vec((0..rows as u32, 0i64..7), 0..4);
            (Just(l), Just(rows), prop::collection::vec(col, cols))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity_and_solutions((l, rows, cols) in arb_matrix(), seed in 0u64..1000) {
            let l = m(l);
            let a = SparseMatrix::from_columns(l, rows, cols).unwrap();
            let cache = EliminationCache::new(&a, true);
            prop_assert_eq!(cache.rank(), dense_rank(a.to_dense(), l));
            let kernel = cache.kernel().unwrap();
            prop_assert_eq!(cache.rank() + kernel.len(), a.cols());
            for v in kernel {
                prop_assert!(a.mul_vec(v).unwrap().is_empty());
            }
            // a right-hand side in the image is always solved exactly
            let x: SparseVec = (0..a.cols() as u32)
                .filter(|j| (seed >> j) & 1 == 1)
                .map(|j| (j, 1 + (seed as u32 + j) % (l.get() - 1).max(1)))
                .map(|(j, v)| (j, v % l.get()))
                .filter(|t| t.1 != 0)
                .collect();
            let b = a.mul_vec(&x).unwrap();
            let sol = cache.solve(&b).expect("b is in the image");
            prop_assert_eq!(a.mul_vec(&sol).unwrap(), b);
        }
    }
}
