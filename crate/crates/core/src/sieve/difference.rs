use std::collections::HashMap;

use crate::energy::{rep_diff, RepFunction};
use crate::sets::IntegerSet;

/// `|A|²` up to which a sparse map is considered at all.
pub const DENSE_PAIR_LIMIT: u64 = 10_000_000;

/// Lookup table for `r_{A-A}(k)`, `k > 0`.
pub enum DifferenceTable {
    Dense(RepFunction),
    Sparse(HashMap<u64, u32>),
}

impl DifferenceTable {
    /// Dense array over the difference range unless `A` is small and spread
    /// over a range much wider than `|A|²`, in which case a hash map is used.
    pub fn new(a: &IntegerSet) -> Self {
        let n = a.len() as u64;
        let span = match (a.min(), a.max()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        };
        let pairs = n * n;
        if pairs <= DENSE_PAIR_LIMIT && span > 8 * pairs + 1024 {
            let el = a.elements();
            let mut map = HashMap::with_capacity((pairs / 2) as usize);
            for (i, &x) in el.iter().enumerate() {
                for &y in &el[..i] {
                    *map.entry(x - y).or_insert(0) += 1;
                }
            }
            DifferenceTable::Sparse(map)
        } else {
            DifferenceTable::Dense(rep_diff(a, a))
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, DifferenceTable::Dense(_))
    }

    /// `r_{A-A}(k)` for `k >= 1`.
    pub fn get(&self, k: u64) -> u32 {
        match self {
            DifferenceTable::Dense(rep) => i64::try_from(k).map(|k| rep.get(k)).unwrap_or(0),
            DifferenceTable::Sparse(map) => map.get(&k).copied().unwrap_or(0),
        }
    }
}
