use serde::Serialize;

use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`sieve_primes`].
pub const DEFAULT_LIMIT_CAP: u64 = 1 << 31;
pub const DEFAULT_SEGMENT: usize = 1 << 16;

/// All primes up to `limit`, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.limit && self.primes.binary_search(&n).is_ok()
    }

    /// Primes `p <= bound` (clamped to the table limit).
    pub fn up_to(&self, bound: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..end]
    }

    /// Whether trial division by this table fully factors `n`.
    pub fn covers(&self, n: u64) -> bool {
        self.limit >= n || (self.limit as u128) * (self.limit as u128) >= n as u128
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SieveConfig {
    pub limit_cap: u64,
    pub segment: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            limit_cap: DEFAULT_LIMIT_CAP,
            segment: DEFAULT_SEGMENT,
        }
    }
}

pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_with(limit, SieveConfig::default())
}

/// Segmented sieve of Eratosthenes.
pub fn sieve_primes_with(limit: u64, config: SieveConfig) -> Result<PrimeTable> {
    if limit > config.limit_cap {
        return Err(Error::Resource(format!(
            "prime sieve limit {limit} exceeds cap {}",
            config.limit_cap
        )));
    }
    if config.segment == 0 {
        return Err(Error::Precondition("segment size must be positive".into()));
    }
    if limit < 2 {
        return Ok(PrimeTable {
            limit,
            primes: Vec::new(),
        });
    }

    let root = limit.isqrt();
    let base = simple_sieve(root as usize);

    let mut primes = Vec::new();
    let seg_len = config.segment as u64;
    let mut marks = vec![false; config.segment];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + seg_len - 1).min(limit);
        let width = (hi - lo + 1) as usize;
        marks[..width].fill(true);
        for &p in &base {
            let p2 = p * p;
            if p2 > hi {
                break;
            }
            let mut m = if p2 >= lo { p2 } else { lo.div_ceil(p) * p };
            while m <= hi {
                marks[(m - lo) as usize] = false;
                m += p;
            }
        }
        primes.extend(
            marks[..width]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

fn simple_sieve(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut is_p = vec![true; limit + 1];
    is_p[0] = false;
    is_p[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if is_p[i] {
            let mut j = i * i;
            while j <= limit {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_p.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs with increasing primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, k)| k == 1)
    }
}

pub fn factorize(n: u64, primes: &PrimeTable) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Precondition("cannot factor 0".into()));
    }
    if !primes.covers(n) {
        return Err(Error::Precondition(format!(
            "prime table up to {} cannot factor {n}",
            primes.limit()
        )));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for &p in primes.primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            factors.push((p, k));
        }
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn is_squarefree(n: u64, primes: &PrimeTable) -> Result<bool> {
    Ok(factorize(n, primes)?.is_squarefree())
}

/// Least-prime-factor table for every integer up to `limit`, for bulk
/// factorization in the partial sums.
pub struct FactorSieve {
    lpf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: usize) -> Self {
        let mut lpf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=limit {
            if lpf[i] == 0 {
                lpf[i] = i as u32;
                primes.push(i as u32);
            }
            let li = lpf[i];
            for &p in &primes {
                if p > li || (p as usize) * i > limit {
                    break;
                }
                lpf[p as usize * i] = p;
            }
        }
        FactorSieve { lpf }
    }

    pub fn limit(&self) -> usize {
        self.lpf.len() - 1
    }

    /// Calls `f(p, k)` for each prime power `p^k || n`, in increasing `p`.
    pub fn for_each_prime_power(&self, mut n: usize, mut f: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.lpf[n] as usize;
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            f(p as u64, k);
        }
    }
}
