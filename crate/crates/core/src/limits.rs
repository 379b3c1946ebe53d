//! Caps and budgets shared by every computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::DEFAULT_ORDER_CAP;
use crate::linalg::MatrixCaps;
use crate::search::SearchBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub order_cap: u64,
    pub tuple_cap: u64,
    pub nnz_cap: u64,
    /// Largest number of chains an exhaustive census may visit.
    pub census_cap: u64,
    pub node_budget: u64,
    pub weight_ceiling: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            order_cap: DEFAULT_ORDER_CAP,
            tuple_cap: 10_000_000,
            nnz_cap: 10_000_000,
            census_cap: 50_000_000,
            node_budget: 10_000_000,
            weight_ceiling: 8,
        }
    }
}

impl Limits {
    pub fn matrix_caps(&self) -> MatrixCaps {
        MatrixCaps {
            tuple_cap: self.tuple_cap,
            nnz_cap: self.nnz_cap,
        }
    }

    pub fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_nodes: self.node_budget,
            max_weight: self.weight_ceiling,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let caps = [
            ("order_cap", self.order_cap),
            ("tuple_cap", self.tuple_cap),
            ("nnz_cap", self.nnz_cap),
            ("census_cap", self.census_cap),
            ("node_budget", self.node_budget),
        ];
        for (name, v) in caps {
            if v == 0 {
                return Err(Error::Precondition(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Largest homology degree attempted for a group of the given order.
pub fn max_degree(order: usize) -> Option<usize> {
    match order {
        0..=50 => Some(3),
        51..=400 => Some(2),
        401..=20_000 => Some(1),
        _ => None,
    }
}

pub(crate) fn check_degree(order: usize, n: usize) -> Result<()> {
    match max_degree(order) {
        Some(m) if n <= m => Ok(()),
        Some(m) => Err(Error::cap(format!("homology degree for a group of order {order}"), n as u128, m as u128)),
        None => Err(Error::cap("group order for homology", order as u128, 20_000)),
    }
}
