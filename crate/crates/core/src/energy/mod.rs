//! Representation functions `r_{X+Y}`, `r_{X-Y}` and additive energy.
//!
//! The energy `E(X,Y) = #{x1 + y1 = x2 + y2}` is computed three ways:
//! from `Σ_n r_{X+Y}(n)²`, from `Σ_n r_{X-X}(n) r_{Y-Y}(n)`, and by a
//! brute-force quadruple count. All three are exact and must agree.

pub mod conv;

use std::fmt::Write as _;

use serde::Serialize;

pub use conv::Backend;

use crate::error::{Error, Result};
use crate::sets::IntegerSet;

/// `r(n)` over a contiguous range starting at `offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepFunction {
    offset: i64,
    counts: Vec<u32>,
}

impl RepFunction {
    pub fn empty() -> Self {
        RepFunction {
            offset: 0,
            counts: Vec::new(),
        }
    }

    /// Trims zero counts at both ends so the range is tight.
    pub fn from_parts(offset: i64, mut counts: Vec<u32>) -> Self {
        let Some(first) = counts.iter().position(|&c| c != 0) else {
            return Self::empty();
        };
        let last = counts.iter().rposition(|&c| c != 0).unwrap();
        counts.truncate(last + 1);
        counts.drain(..first);
        RepFunction {
            offset: offset + first as i64,
            counts,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Largest represented value, if any.
    pub fn top(&self) -> Option<i64> {
        (!self.counts.is_empty()).then(|| self.offset + self.counts.len() as i64 - 1)
    }

    pub fn get(&self, n: i64) -> u32 {
        let i = n - self.offset;
        if i < 0 || i as usize >= self.counts.len() {
            0
        } else {
            self.counts[i as usize]
        }
    }

    /// `(n, r(n))` for every `n` with `r(n) > 0`, increasing in `n`.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (self.offset + i as i64, c))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// `Σ r(n)²` with checked 64-bit accumulation.
    pub fn sum_of_squares(&self) -> Result<u64> {
        self.counts.iter().try_fold(0u64, |acc, &c| {
            let c = c as u64;
            c.checked_mul(c)
                .and_then(|sq| acc.checked_add(sq))
                .ok_or(Error::Overflow("sum of squared counts"))
        })
    }

    /// `Σ_n r(n) s(n)`, checked.
    pub fn dot(&self, other: &RepFunction) -> Result<u64> {
        let (Some(a_top), Some(b_top)) = (self.top(), other.top()) else {
            return Ok(0);
        };
        let lo = self.offset.max(other.offset);
        let hi = a_top.min(b_top);
        let mut acc = 0u64;
        for n in lo..=hi {
            let term = (self.get(n) as u64) * (other.get(n) as u64);
            acc = acc
                .checked_add(term)
                .ok_or(Error::Overflow("dot product of counts"))?;
        }
        Ok(acc)
    }

    /// CSV with header `n,count`, one row per nonzero count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count\n");
        for (n, c) in self.nonzero() {
            let _ = writeln!(out, "{n},{c}");
        }
        out
    }
}

fn signed(set: &IntegerSet) -> Vec<i64> {
    set.iter().map(|e| e as i64).collect()
}

fn reflected(set: &IntegerSet) -> Vec<i64> {
    set.elements().iter().rev().map(|&e| -(e as i64)).collect()
}

pub fn rep_sum(x: &IntegerSet, y: &IntegerSet) -> RepFunction {
    rep_sum_with(x, y, Backend::Auto)
}

pub fn rep_sum_with(x: &IntegerSet, y: &IntegerSet, backend: Backend) -> RepFunction {
    conv::convolve(&signed(x), &signed(y), backend).0
}

/// `r_{X-Y}`, computed as the sum representation of `X` and `-Y`.
pub fn rep_diff(x: &IntegerSet, y: &IntegerSet) -> RepFunction {
    rep_diff_with(x, y, Backend::Auto)
}

pub fn rep_diff_with(x: &IntegerSet, y: &IntegerSet, backend: Backend) -> RepFunction {
    conv::convolve(&signed(x), &reflected(y), backend).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMethod {
    SumIdentity,
    DiffIdentity,
    BruteForce,
}

impl EnergyMethod {
    pub fn name(self) -> &'static str {
        match self {
            EnergyMethod::SumIdentity => "sum-identity",
            EnergyMethod::DiffIdentity => "diff-identity",
            EnergyMethod::BruteForce => "brute-force",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnergyReport {
    pub value: u64,
    pub method: EnergyMethod,
    pub lower_trivial: u64,
    pub upper_trivial: u64,
}

impl EnergyReport {
    fn new(x: &IntegerSet, y: &IntegerSet, value: u64, method: EnergyMethod) -> Self {
        let (nx, ny) = (x.len() as u64, y.len() as u64);
        EnergyReport {
            value,
            method,
            lower_trivial: nx * ny,
            upper_trivial: nx * ny * nx.min(ny),
        }
    }

    pub fn within_trivial_bounds(&self) -> bool {
        self.lower_trivial <= self.value && self.value <= self.upper_trivial
    }
}

/// `E(X,Y) = Σ_n r_{X+Y}(n)²`.
pub fn energy_sum_path(x: &IntegerSet, y: &IntegerSet) -> Result<EnergyReport> {
    let value = rep_sum(x, y).sum_of_squares()?;
    Ok(EnergyReport::new(x, y, value, EnergyMethod::SumIdentity))
}

/// `E(X,Y) = Σ_n r_{X-X}(n) r_{Y-Y}(n)`.
pub fn energy_diff_path(x: &IntegerSet, y: &IntegerSet) -> Result<EnergyReport> {
    let value = rep_diff(x, x).dot(&rep_diff(y, y))?;
    Ok(EnergyReport::new(x, y, value, EnergyMethod::DiffIdentity))
}

/// Guard on `|X|²|Y|` for [`energy_bruteforce`].
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000_000;

/// Counts quadruples directly: for each `(x1, x2, y1)` tests `x1 + y1 - x2 ∈ Y`.
pub fn energy_bruteforce(x: &IntegerSet, y: &IntegerSet) -> Result<EnergyReport> {
    let work = (x.len() as u64)
        .saturating_mul(x.len() as u64)
        .saturating_mul(y.len() as u64);
    if work > BRUTE_FORCE_LIMIT {
        return Err(Error::Resource(format!(
            "brute-force energy needs {work} steps, limit {BRUTE_FORCE_LIMIT}"
        )));
    }
    let mut count = 0u64;
    for x1 in x.iter() {
        for x2 in x.iter() {
            let shift = x1 as i64 - x2 as i64;
            for y1 in y.iter() {
                if y.contains(y1 as i64 + shift) {
                    count += 1;
                }
            }
        }
    }
    Ok(EnergyReport::new(x, y, count, EnergyMethod::BruteForce))
}

pub fn energy(x: &IntegerSet, y: &IntegerSet) -> Result<u64> {
    energy_sum_path(x, y).map(|r| r.value)
}

/// `X + Y`, inside `[1, cap(X) + cap(Y)]`.
pub fn sumset(x: &IntegerSet, y: &IntegerSet) -> Result<IntegerSet> {
    let rep = rep_sum(x, y);
    IntegerSet::from_sorted(
        x.cap() + y.cap(),
        rep.nonzero().map(|(n, _)| n as u64).collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CauchySchwarzReport {
    pub lhs: u128,
    pub rhs: u128,
    pub holds: bool,
}

/// `E(X,Y)² <= E(X,X) E(Y,Y)`.
pub fn cauchy_schwarz_check(x: &IntegerSet, y: &IntegerSet) -> Result<CauchySchwarzReport> {
    let exy = energy(x, y)? as u128;
    let exx = energy(x, x)? as u128;
    let eyy = energy(y, y)? as u128;
    let lhs = exy * exy;
    let rhs = exx * eyy;
    Ok(CauchySchwarzReport {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}
