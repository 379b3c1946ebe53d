//! Minimum-weight solutions of sparse linear systems over `Z/l`.
//!
//! Given a column source `M` and a target `b`, find `x` with `M x = b` and
//! the fewest nonzero entries. The search deepens on the weight `w`; at
//! each level a depth-first branch and bound picks a row where the
//! residual `b - M x` is nonzero and branches over the undecided columns
//! meeting that row, excluding each column from its later siblings so
//! every support is visited at most once. A partial support is pruned when
//! its residual has more nonzeros than the remaining columns can touch.
//!
//! When the residual vanishes before the weight is used up, exact-weight
//! searches keep going by adding the smallest undecided column, which is
//! what enumerating cycles of a given size needs.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{decode_into, tuple_boundary};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::SparseMatrix;
use crate::modp::{axpy, Modulus};

pub type Term = (u64, u32);

/// Column access for the search: columns and the columns meeting a row.
pub trait ColumnSource {
    fn modulus(&self) -> Modulus;
    fn num_columns(&self) -> u64;
    /// Nonzero entries of column `c`, sorted by row.
    fn column(&self, c: u64, out: &mut Vec<Term>);
    /// Every column that may have a nonzero entry in `row`, sorted and
    /// deduplicated. May over-approximate.
    fn columns_meeting(&self, row: u64, out: &mut Vec<u64>);
    /// Upper bound on the number of nonzeros in any column.
    fn max_column_weight(&self) -> usize;
}

/// The bar differential on `m`-tuples, as an implicit matrix with
/// `|G|^m` columns and `|G|^(m-1)` rows.
pub struct BarOperator {
    group: Arc<FiniteGroup>,
    m: usize,
    l: Modulus,
    columns: u64,
}

impl BarOperator {
    pub fn new(group: Arc<FiniteGroup>, m: usize, l: Modulus, tuple_cap: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("no differential out of degree 0".into()));
        }
        let columns = (group.order() as u128).pow(m as u32);
        if columns > tuple_cap as u128 {
            return Err(Error::cap(format!("tuple space |G|^{m}"), columns, tuple_cap as u128));
        }
        Ok(BarOperator {
            group,
            m,
            l,
            columns: columns as u64,
        })
    }

    pub fn source_degree(&self) -> usize {
        self.m
    }
}

impl ColumnSource for BarOperator {
    fn modulus(&self) -> Modulus {
        self.l
    }

    fn num_columns(&self) -> u64 {
        self.columns
    }

    fn column(&self, c: u64, out: &mut Vec<Term>) {
        let mut digits = Vec::with_capacity(self.m);
        tuple_boundary(&self.group, self.m, self.l, c, &mut digits, out);
    }

    fn columns_meeting(&self, row: u64, out: &mut Vec<u64>) {
        out.clear();
        let g = &self.group;
        let base = g.order() as u64;
        let m = self.m;
        if m == 1 {
            // d_1 vanishes identically.
            return;
        }
        let mut h = vec![0; m - 1];
        decode_into(base, row, &mut h);
        let mut t = vec![0; m];
        let encode = |t: &[u32]| t.iter().fold(0u64, |acc, &x| acc * base + x as u64);
        for x in g.elements() {
            // face 0 drops the first entry
            t[0] = x;
            t[1..].copy_from_slice(&h);
            out.push(encode(&t));
            // face m drops the last entry
            t[..m - 1].copy_from_slice(&h);
            t[m - 1] = x;
            out.push(encode(&t));
            // face i merges entries i-1 and i into h[i-1]
            for i in 1..m {
                t[..i - 1].copy_from_slice(&h[..i - 1]);
                t[i - 1] = x;
                t[i] = g.mul(g.inv(x), h[i - 1]);
                t[i + 1..].copy_from_slice(&h[i..]);
                out.push(encode(&t));
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    fn max_column_weight(&self) -> usize {
        if self.m == 1 {
            0
        } else {
            self.m + 1
        }
    }
}

/// An explicit sparse matrix with a row index.
pub struct MatrixOperator<'a> {
    matrix: &'a SparseMatrix,
    rows: Vec<Vec<u64>>,
    max_weight: usize,
}

impl<'a> MatrixOperator<'a> {
    pub fn new(matrix: &'a SparseMatrix) -> Self {
        let mut rows = vec![Vec::new(); matrix.rows()];
        for (j, col) in matrix.columns().iter().enumerate() {
            for &(i, _) in col {
                rows[i as usize].push(j as u64);
            }
        }
        let max_weight = matrix.columns().iter().map(Vec::len).max().unwrap_or(0);
        MatrixOperator {
            matrix,
            rows,
            max_weight,
        }
    }
}

impl ColumnSource for MatrixOperator<'_> {
    fn modulus(&self) -> Modulus {
        self.matrix.modulus()
    }

    fn num_columns(&self) -> u64 {
        self.matrix.cols() as u64
    }

    fn column(&self, c: u64, out: &mut Vec<Term>) {
        out.clear();
        out.extend(self.matrix.column(c as usize).iter().map(|&(i, v)| (i as u64, v)));
    }

    fn columns_meeting(&self, row: u64, out: &mut Vec<u64>) {
        out.clear();
        if let Some(r) = self.rows.get(row as usize) {
            out.extend_from_slice(r);
        }
    }

    fn max_column_weight(&self) -> usize {
        self.max_weight
    }
}

/// Limits on a search: explored nodes and the largest weight tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_weight: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 10_000_000,
            max_weight: 8,
        }
    }
}

struct Aborted;

struct Dfs<'a, S: ColumnSource + ?Sized> {
    src: &'a S,
    l: Modulus,
    max_weight: usize,
    nodes: u64,
    max_nodes: u64,
    exact: bool,
    chosen: Vec<Term>,
    excluded: HashSet<u64>,
    floor: u64,
}

impl<S: ColumnSource + ?Sized> Dfs<'_, S> {
    fn undecided(&self, c: u64) -> bool {
        c >= self.floor && !self.excluded.contains(&c) && !self.chosen.iter().any(|t| t.0 == c)
    }

    fn report(&self, visit: &mut dyn FnMut(&[Term]) -> bool) -> bool {
        let mut sol = self.chosen.clone();
        sol.sort_unstable_by_key(|t| t.0);
        visit(&sol)
    }

    /// Returns `Ok(true)` when the visitor asked to stop.
    fn run(
        &mut self,
        residual: &[Term],
        remaining: usize,
        visit: &mut dyn FnMut(&[Term]) -> bool,
    ) -> std::result::Result<bool, Aborted> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Aborted);
        }
        let mut col = Vec::new();
        if residual.is_empty() {
            if !self.exact || remaining == 0 {
                return Ok(self.report(visit));
            }
            // Extend by a fresh piece whose smallest column is `c`.
            let saved_floor = self.floor;
            let total = self.src.num_columns();
            let mut c = self.floor;
            let mut stop = false;
            while c < total {
                if self.undecided(c) {
                    self.src.column(c, &mut col);
                    self.floor = c + 1;
                    for a in 1..self.l.get() {
                        let next = axpy(&[], self.l.neg(a), &col, self.l);
                        self.chosen.push((c, a));
                        let r = self.run(&next, remaining - 1, visit);
                        self.chosen.pop();
                        match r {
                            Ok(true) => stop = true,
                            Ok(false) => {}
                            Err(e) => {
                                self.floor = saved_floor;
                                return Err(e);
                            }
                        }
                        if stop {
                            break;
                        }
                    }
                }
                if stop {
                    break;
                }
                c += 1;
            }
            self.floor = saved_floor;
            return Ok(stop);
        }
        if remaining == 0 {
            return Ok(false);
        }
        if residual.len() > remaining * self.src.max_column_weight() {
            return Ok(false);
        }
        let (row, target) = residual[0];
        let mut cands = Vec::new();
        self.src.columns_meeting(row, &mut cands);
        if remaining == 1 {
            for &c in &cands {
                if !self.undecided(c) {
                    continue;
                }
                self.src.column(c, &mut col);
                if col.len() != residual.len() {
                    continue;
                }
                let Ok(pos) = col.binary_search_by_key(&row, |t| t.0) else {
                    continue;
                };
                let a = self.l.mul(target, self.l.inv(col[pos].1));
                if col.iter().zip(residual).all(|(x, y)| x.0 == y.0 && self.l.mul(a, x.1) == y.1) {
                    self.chosen.push((c, a));
                    let stop = self.report(visit);
                    self.chosen.pop();
                    if stop {
                        return Ok(true);
                    }
                }
            }
            return Ok(false);
        }
        let mut newly_excluded = Vec::new();
        let mut outcome = Ok(false);
        'outer: for &c in &cands {
            if !self.undecided(c) {
                continue;
            }
            self.src.column(c, &mut col);
            if col.binary_search_by_key(&row, |t| t.0).is_err() {
                continue;
            }
            for a in 1..self.l.get() {
                let next = axpy(residual, self.l.neg(a), &col, self.l);
                self.chosen.push((c, a));
                let r = self.run(&next, remaining - 1, visit);
                self.chosen.pop();
                match r {
                    Ok(false) => {}
                    other => {
                        outcome = other;
                        break 'outer;
                    }
                }
            }
            self.excluded.insert(c);
            newly_excluded.push(c);
        }
        for c in newly_excluded {
            self.excluded.remove(&c);
        }
        outcome
    }
}

/// Outcome of a minimum-weight search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinWeight {
    /// Best solution found, sorted by column.
    pub solution: Option<Vec<Term>>,
    /// Certified minimal: every smaller weight was searched exhaustively.
    pub exact: bool,
    /// The node budget ran out.
    pub aborted: bool,
    pub nodes: u64,
}

fn new_dfs<S: ColumnSource + ?Sized>(src: &S, budget: SearchBudget, exact: bool) -> Dfs<'_, S> {
    Dfs {
        src,
        l: src.modulus(),
        max_weight: budget.max_weight,
        nodes: 0,
        max_nodes: budget.max_nodes,
        exact,
        chosen: Vec::new(),
        excluded: HashSet::new(),
        floor: 0,
    }
}

/// Find a minimum-weight `x` with `M x = target`.
///
/// `fallback`, if given, is a known solution; it caps the levels searched
/// and is returned (as exact once all smaller weights are exhausted, and
/// as an upper bound otherwise) when the search finds nothing better.
pub fn min_weight_solution<S: ColumnSource + ?Sized>(
    src: &S,
    target: &[Term],
    budget: SearchBudget,
    fallback: Option<Vec<Term>>,
) -> MinWeight {
    let mut dfs = new_dfs(src, budget, false);
    let ceiling = dfs.max_weight;
    for w in 0..=ceiling {
        if let Some(f) = fallback.as_ref().filter(|f| f.len() <= w) {
            return MinWeight {
                solution: Some(f.clone()),
                exact: true,
                aborted: false,
                nodes: dfs.nodes,
            };
        }
        let mut found = None;
        let r = dfs.run(target, w, &mut |sol| {
            found = Some(sol.to_vec());
            true
        });
        match r {
            Ok(_) if found.is_some() => {
                return MinWeight {
                    solution: found,
                    exact: true,
                    aborted: false,
                    nodes: dfs.nodes,
                }
            }
            Ok(_) => {}
            Err(Aborted) => {
                return MinWeight {
                    solution: fallback,
                    exact: false,
                    aborted: true,
                    nodes: dfs.nodes,
                }
            }
        }
    }
    MinWeight {
        solution: fallback,
        exact: false,
        aborted: false,
        nodes: dfs.nodes,
    }
}

/// Whether some `x` of weight exactly `w` solves `M x = target`.
/// `None` when the node budget ran out first.
pub fn exists_with_weight<S: ColumnSource + ?Sized>(
    src: &S,
    target: &[Term],
    w: usize,
    max_nodes: u64,
) -> (Option<bool>, u64) {
    let mut dfs = new_dfs(
        src,
        SearchBudget {
            max_nodes,
            max_weight: w,
        },
        true,
    );
    let mut found = false;
    let r = dfs.run(target, w, &mut |_| {
        found = true;
        true
    });
    match r {
        Ok(_) => (Some(found), dfs.nodes),
        Err(Aborted) => (None, dfs.nodes),
    }
}

/// Visit every `x` of weight exactly `w` with `M x = target`; the visitor
/// returns `true` to stop early. Returns the node count, or an error when
/// the budget ran out.
pub fn for_each_solution<S: ColumnSource + ?Sized>(
    src: &S,
    target: &[Term],
    w: usize,
    max_nodes: u64,
    visit: &mut dyn FnMut(&[Term]) -> bool,
) -> Result<u64> {
    let mut dfs = new_dfs(
        src,
        SearchBudget {
            max_nodes,
            max_weight: w,
        },
        true,
    );
    match dfs.run(target, w, visit) {
        Ok(_) => Ok(dfs.nodes),
        Err(Aborted) => Err(Error::BudgetExhausted { budget: max_nodes }),
    }
}
