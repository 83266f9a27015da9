//! Finite sets of positive integers in `[1, N]` and their residue statistics.

mod generate;
mod io;

pub use generate::{
    quadratic_image, residue_avoiding_random, sidon_set, squares_up_to, AllowedClasses,
    AvoidingSet, ClassStrategy,
};
pub use io::{format_set, parse_set, read_set, write_set, ParsedSet};

use bitvec::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ambient interval for which the eager bitmask is built.
pub const MAX_CAP: u64 = 1 << 32;

/// A set `A ⊆ [1, N]`, kept both as a sorted list and as a membership mask.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerSet {
    cap: u64,
    elements: Vec<u64>,
    mask: BitVec<u64, Lsb0>,
}

impl IntegerSet {
    /// Builds a set from arbitrary elements; duplicates are dropped.
    pub fn new(cap: u64, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Self::from_sorted(cap, elements)
    }

    /// Builds a set from a strictly increasing list.
    pub fn from_sorted(cap: u64, elements: Vec<u64>) -> Result<Self> {
        if cap == 0 {
            return Err(Error::Precondition("cap must be >= 1".into()));
        }
        if cap > MAX_CAP {
            return Err(Error::Resource(format!("cap {cap} exceeds {MAX_CAP}")));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "elements must be strictly increasing".into(),
            ));
        }
        if let Some(&bad) = elements.iter().find(|&&e| e == 0 || e > cap) {
            return Err(Error::Precondition(format!(
                "element {bad} outside [1, {cap}]"
            )));
        }
        let mut mask = bitvec![u64, Lsb0; 0; cap as usize + 1];
        for &e in &elements {
            mask.set(e as usize, true);
        }
        Ok(IntegerSet {
            cap,
            elements,
            mask,
        })
    }

    pub fn empty(cap: u64) -> Result<Self> {
        Self::from_sorted(cap, Vec::new())
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().copied()
    }

    pub fn min(&self) -> Option<u64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    /// O(1) membership through the mask; accepts any signed value.
    pub fn contains(&self, n: i64) -> bool {
        n >= 1 && (n as u64) <= self.cap && self.mask[n as usize]
    }

    /// The same elements viewed inside a different ambient interval.
    pub fn with_cap(&self, cap: u64) -> Result<Self> {
        Self::from_sorted(cap, self.elements.clone())
    }

    /// `{a + t}`; the cap grows by `t`.
    pub fn translate(&self, t: u64) -> Result<Self> {
        Self::from_sorted(self.cap + t, self.elements.iter().map(|&e| e + t).collect())
    }

    /// `{u a}` for `u >= 1`; the cap is scaled by `u`.
    pub fn dilate(&self, u: u64) -> Result<Self> {
        if u == 0 {
            return Err(Error::Degenerate("dilation by 0".into()));
        }
        Self::from_sorted(self.cap * u, self.elements.iter().map(|&e| e * u).collect())
    }
}

impl std::fmt::Debug for IntegerSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntegerSet")
            .field("cap", &self.cap)
            .field("elements", &self.elements)
            .finish()
    }
}

impl Serialize for IntegerSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IntegerSet", 2)?;
        st.serialize_field("cap", &self.cap)?;
        st.serialize_field("elements", &self.elements)?;
        st.end()
    }
}

/// Class counts `|A(v;h)|` and occupancy `|A_v|` for one modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueProfile {
    pub modulus: u64,
    pub counts: Vec<u64>,
    pub occupancy: u64,
}

impl ResidueProfile {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ_h |A(v;h)|²`.
    pub fn sum_of_squares(&self) -> u128 {
        self.counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
    }
}

pub fn occupancy(a: &IntegerSet, v: u64) -> Result<ResidueProfile> {
    if v == 0 {
        return Err(Error::Precondition("modulus must be >= 1".into()));
    }
    let len = usize::try_from(v).map_err(|_| Error::Resource("modulus too large".into()))?;
    let mut counts = vec![0u64; len];
    for e in a.iter() {
        counts[(e % v) as usize] += 1;
    }
    let occupancy = counts.iter().filter(|&&c| c > 0).count() as u64;
    Ok(ResidueProfile {
        modulus: v,
        counts,
        occupancy,
    })
}

/// Elements of `A` in its most populated class mod 4 (smallest class on ties).
pub fn mod4_restrict(a: &IntegerSet) -> IntegerSet {
    let mut counts = [0usize; 4];
    for e in a.iter() {
        counts[(e % 4) as usize] += 1;
    }
    let mut best = 0;
    for h in 1..4 {
        if counts[h] > counts[best] {
            best = h;
        }
    }
    let kept = a.iter().filter(|e| (e % 4) as usize == best).collect();
    IntegerSet::from_sorted(a.cap(), kept).expect("subset of a valid set")
}

/// Whether every nonzero difference `x - x'` occurs at most once.
pub fn is_sidon(x: &IntegerSet) -> bool {
    let (Some(lo), Some(hi)) = (x.min(), x.max()) else {
        return true;
    };
    let mut seen = bitvec![u64, Lsb0; 0; (hi - lo + 1) as usize];
    let el = x.elements();
    for (i, &a) in el.iter().enumerate() {
        for &b in &el[..i] {
            let d = (a - b) as usize;
            if seen[d] {
                return false;
            }
            seen.set(d, true);
        }
    }
    true
}
