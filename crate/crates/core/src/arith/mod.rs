//! Primes, factorization, the occupancy ceiling `Δ` and the partial sums
//! built from it.
//!
//! `Δ` is the multiplicative function with `Δ(p^k) = p^(k-1) (p/2 + ε(p))`.
//! It is evaluated exactly (as a rational) for inequality checks and in
//! floating point for the long partial sums
//!
//! * `M(x) = Σ_{n<=x} μ(n)² / Δ(n)`
//! * `T(x) = Σ_{n<=x, n squarefree} n² / Δ(n)` (plus the unrestricted variant)
//!
//! and the truncated Euler product `Π_{p<=P} (1 - 1/p)² (1 + 1/Δ(p))`.

mod epsilon;
mod primes;

pub use epsilon::{parse_rational, EpsilonMode, EpsilonSpec, Rational};
pub use primes::{
    factorize, is_prime, is_squarefree, sieve_primes, sieve_primes_with, FactorSieve,
    Factorization, PrimeTable, SieveConfig, DEFAULT_LIMIT_CAP, DEFAULT_SEGMENT,
};

use num_rational::Ratio;
use num_traits::{CheckedMul, One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact value of `Δ`.
pub type DeltaValue = Ratio<i128>;

/// `Δ(p^k)` exactly.
pub fn delta_prime_power(p: u64, k: u32, eps: &EpsilonSpec) -> Result<DeltaValue> {
    debug_assert!(k >= 1);
    let e = eps.at(p);
    let (num, den) = (*e.numer() as i128, *e.denom() as i128);
    let base = DeltaValue::new((p as i128) * den + 2 * num, 2 * den);
    let scale = (p as i128)
        .checked_pow(k - 1)
        .ok_or(Error::Overflow("delta prime power"))?;
    base.checked_mul(&DeltaValue::from_integer(scale))
        .ok_or(Error::Overflow("delta prime power"))
}

/// `Δ(v)` exactly, via the factorization of `v`.
pub fn delta(v: u64, eps: &EpsilonSpec, primes: &PrimeTable) -> Result<DeltaValue> {
    let f = factorize(v, primes)?;
    delta_of(&f, eps)
}

pub fn delta_of(f: &Factorization, eps: &EpsilonSpec) -> Result<DeltaValue> {
    f.factors
        .iter()
        .try_fold(DeltaValue::one(), |acc, &(p, k)| {
            acc.checked_mul(&delta_prime_power(p, k, eps)?)
                .ok_or(Error::Overflow("delta"))
        })
}

pub fn delta_f64(v: u64, eps: &EpsilonSpec, primes: &PrimeTable) -> Result<f64> {
    delta(v, eps, primes).map(|d| d.to_f64().unwrap_or(f64::INFINITY))
}

fn delta_prime_f64(p: u64, eps: &EpsilonSpec) -> f64 {
    p as f64 / 2.0 + eps.at_f64(p)
}

/// Which integers enter `T(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TSum {
    Squarefree,
    All,
}

/// One row of partial sums at a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub x: u64,
    pub m: f64,
    pub t_squarefree: f64,
    pub t_all: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesTable {
    pub rows: Vec<SeriesRow>,
    pub truncation_prime: u64,
    pub singular_series: f64,
}

/// Evaluates `M`, `T` (both variants) at every point of an increasing grid in
/// one pass over `n <= max(grid)`.
pub fn partial_sums(grid: &[u64], eps: &EpsilonSpec) -> Result<Vec<SeriesRow>> {
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "grid must be strictly increasing and start at >= 1".into(),
        ));
    }
    let x_max = *grid.last().unwrap();
    let limit = usize::try_from(x_max).map_err(|_| Error::Resource("grid too large".into()))?;
    if x_max > DEFAULT_LIMIT_CAP {
        return Err(Error::Resource(format!(
            "partial sums up to {x_max} exceed cap"
        )));
    }
    let sieve = FactorSieve::new(limit);

    let mut rows = Vec::with_capacity(grid.len());
    let mut next = grid.iter().copied().peekable();
    let (mut m, mut t_sf, mut t_all) = (0.0f64, 0.0f64, 0.0f64);
    for n in 1..=limit {
        let mut d = 1.0f64;
        let mut squarefree = true;
        sieve.for_each_prime_power(n, |p, k| {
            if k > 1 {
                squarefree = false;
            }
            d *= (p as f64).powi(k as i32 - 1) * delta_prime_f64(p, eps);
        });
        let nf = n as f64;
        t_all += nf * nf / d;
        if squarefree {
            m += 1.0 / d;
            t_sf += nf * nf / d;
        }
        if next.peek() == Some(&(n as u64)) {
            next.next();
            rows.push(SeriesRow {
                x: n as u64,
                m,
                t_squarefree: t_sf,
                t_all,
            });
        }
    }
    Ok(rows)
}

pub fn m_partial_sum(x: u64, eps: &EpsilonSpec) -> Result<f64> {
    Ok(partial_sums(&[x], eps)?[0].m)
}

pub fn t_partial_sum(x: u64, eps: &EpsilonSpec, which: TSum) -> Result<f64> {
    let row = partial_sums(&[x], eps)?[0];
    Ok(match which {
        TSum::Squarefree => row.t_squarefree,
        TSum::All => row.t_all,
    })
}

/// `Π_{p<=P} (1 - 1/p)² (1 + 1/Δ(p))`.
pub fn singular_series(eps: &EpsilonSpec, truncation: u64) -> Result<f64> {
    if truncation < 2 {
        return Err(Error::Precondition("truncation bound must be >= 2".into()));
    }
    let primes = sieve_primes(truncation)?;
    Ok(primes
        .primes()
        .iter()
        .map(|&p| {
            let pf = p as f64;
            let q = 1.0 - 1.0 / pf;
            q * q * (1.0 + 1.0 / delta_prime_f64(p, eps))
        })
        .product())
}

pub fn series_table(grid: &[u64], eps: &EpsilonSpec, truncation: u64) -> Result<SeriesTable> {
    Ok(SeriesTable {
        rows: partial_sums(grid, eps)?,
        truncation_prime: truncation,
        singular_series: singular_series(eps, truncation)?,
    })
}
