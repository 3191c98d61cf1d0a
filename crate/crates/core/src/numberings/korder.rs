use std::collections::HashMap;

use serde::Serialize;

use super::{ComplexityTable, NumberingError};

/// Ranking of certified elements by increasing complexity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KOrderTable {
    /// Elements in rank order; `order[i]` has rank `i + 1`.
    pub order: Vec<u64>,
    /// Complexity per element, when the table came from a sweep.
    pub complexity: Vec<Option<u64>>,
    /// Best constant `c0` with `c0 * C_u(x) <= K(x)` on the table.
    pub c0: Option<f64>,
    #[serde(skip)]
    rank: HashMap<u64, u64>,
}

impl KOrderTable {
    /// A ranking given directly, with no complexity data.
    pub fn from_order(order: Vec<u64>) -> KOrderTable {
        let rank = order.iter().enumerate().map(|(i, &x)| (x, i as u64 + 1)).collect();
        let complexity = vec![None; order.len()];
        KOrderTable { order, complexity, c0: None, rank }
    }

    pub fn identity(n: u64) -> KOrderTable {
        KOrderTable::from_order((1..=n).collect())
    }

    /// `K(x)`.
    pub fn rank(&self, x: u64) -> Option<u64> {
        self.rank.get(&x).copied()
    }

    /// `K^{-1}(k)`.
    pub fn element(&self, k: u64) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.order.get(i as usize)).copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Sorts the certified entries by `(C_u, value)`. Fails if some rank
/// exceeds its complexity, which would mean the certified set is not
/// downward closed.
pub fn kolmogorov_order(table: &ComplexityTable) -> Result<KOrderTable, NumberingError> {
    let mut certified: Vec<(u64, u64)> = table.certified_values().map(|(x, c)| (c, x)).collect();
    if certified.is_empty() {
        return Err(NumberingError::EmptyCertifiedSet);
    }
    certified.sort_unstable();
    let mut t = KOrderTable::from_order(certified.iter().map(|&(_, x)| x).collect());
    t.complexity = certified.iter().map(|&(c, _)| Some(c)).collect();
    let mut c0 = f64::INFINITY;
    for (i, &(c, x)) in certified.iter().enumerate() {
        let k = i as u64 + 1;
        if k > c {
            return Err(NumberingError::OrderBoundViolation(x));
        }
        c0 = c0.min(k as f64 / c as f64);
    }
    t.c0 = Some(c0);
    Ok(t)
}
