//! Energy between a set `A ⊆ [1, N]` and the squares `S = {n² <= N}`.
//!
//! `E(A,S) = |A||S| + 2 Σ_{1<=m<n<=√N} r_{A-A}(n² - m²)`, and writing
//! `n² - m² = uv` with `u = n - m`, `v = n + m` turns the sum into one over
//! pairs `u ≡ v (mod 2)`, `v >= u + 2`, `u + v <= 2⌊√N⌋`. This module
//! computes all three forms, the mod-4 lower bound, and the derived
//! reports (quadratic hits, Sidon contrast, Ramanujan ratio).

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::arith::{sieve_primes, EpsilonSpec};
use crate::energy::{energy, rep_sum};
use crate::error::{Error, Result};
use crate::sets::{is_sidon, mod4_restrict, occupancy, squares_up_to, IntegerSet};
use crate::sieve::{divisor_sum_over, DifferenceTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub cap: u64,
    pub card_a: u64,
    pub card_s: u64,
    /// (i) directly from the energy module.
    pub via_energy: u64,
    /// (ii) `|A||S| + 2 Σ_{m<n} r_{A-A}(n² - m²)`.
    pub via_squares: u64,
    /// (iii) the same sum over factor pairs `(u, v)`.
    pub via_factor_pairs: u64,
}

impl Decomposition {
    pub fn agrees(&self) -> bool {
        self.via_energy == self.via_squares && self.via_squares == self.via_factor_pairs
    }
}

/// The three computations of `E(A,S)`, without the agreement check.
pub fn decompose(a: &IntegerSet, cap: u64) -> Result<Decomposition> {
    let s = squares_up_to(cap)?;
    let r = cap.isqrt();
    let card_a = a.len() as u64;
    let card_s = s.len() as u64;
    let diagonal = card_a * card_s;

    let via_energy = energy(a, &s)?;
    let table = DifferenceTable::new(a);

    let mut over_squares = 0u64;
    for n in 2..=r {
        for m in 1..n {
            over_squares += table.get(n * n - m * m) as u64;
        }
    }

    let mut over_pairs = 0u64;
    for u in 1..=r {
        let mut v = u + 2;
        while u + v <= 2 * r {
            over_pairs += table.get(u * v) as u64;
            v += 2;
        }
    }

    let combine = |sum: u64| {
        sum.checked_mul(2)
            .and_then(|t| t.checked_add(diagonal))
            .ok_or(Error::Overflow("energy decomposition"))
    };
    Ok(Decomposition {
        cap,
        card_a,
        card_s,
        via_energy,
        via_squares: combine(over_squares)?,
        via_factor_pairs: combine(over_pairs)?,
    })
}

/// [`decompose`], failing with an invariant error if the paths disagree.
pub fn energy_decomposition(a: &IntegerSet, cap: u64) -> Result<Decomposition> {
    let d = decompose(a, cap)?;
    if !d.agrees() {
        return Err(Error::Invariant(format!(
            "E(A,S) paths disagree at N={cap}: {} / {} / {}",
            d.via_energy, d.via_squares, d.via_factor_pairs
        )));
    }
    Ok(d)
}

/// Whether `k = n² - m²` has an integer solution, i.e. `k ≢ 2 (mod 4)`.
pub fn solvability_filter(k: i64) -> Result<bool> {
    if k == 0 {
        return Err(Error::Precondition("k must be nonzero".into()));
    }
    Ok(k.rem_euclid(4) != 2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub cap: u64,
    pub card_a: u64,
    pub restricted_card: u64,
    /// `Σ_{1<=u<v<=⌊√N⌋/2} r_{A'-A'}(uv)` on the mod-4 restriction `A'`.
    pub divisor_sum: u64,
    /// Half of `divisor_sum`.
    pub lower_bound: f64,
    /// `E(A', S)`.
    pub energy: u64,
    pub ratio: f64,
    pub holds: bool,
}

pub fn theorem_lower_bound(a: &IntegerSet, cap: u64) -> Result<LowerBoundReport> {
    let restricted = mod4_restrict(a);
    let card_a = a.len() as u64;
    if restricted.is_empty() {
        return Ok(LowerBoundReport {
            cap,
            card_a,
            restricted_card: 0,
            divisor_sum: 0,
            lower_bound: 0.0,
            energy: 0,
            ratio: 0.0,
            holds: true,
        });
    }
    let s = squares_up_to(cap)?;
    let table = DifferenceTable::new(&restricted);
    let divisor_sum = divisor_sum_over(&table, cap.isqrt() / 2);
    let e = energy(&restricted, &s)?;
    let lower_bound = divisor_sum as f64 / 2.0;
    Ok(LowerBoundReport {
        cap,
        card_a,
        restricted_card: restricted.len() as u64,
        divisor_sum,
        lower_bound,
        energy: e,
        ratio: lower_bound / e as f64,
        holds: (divisor_sum as u128) <= 2 * e as u128,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticHits {
    /// Shift maximizing `r_{A+S}` (smallest on ties).
    pub shift: i64,
    /// `max_n r_{A+S}(n)`.
    pub count: u64,
    /// Elements `a ∈ A` with `a = shift - x²`.
    pub witnesses: Vec<u64>,
    pub xs: Vec<u64>,
    /// `log N · |A||S|`.
    pub log_scale: f64,
    /// `Σ_n r_{A+S}(n)² = E(A,S)`.
    pub energy: u64,
    /// `|A||S| · max_n r_{A+S}(n)`.
    pub max_scale: u64,
}

impl QuadraticHits {
    /// `q(x) = shift - x²`.
    pub fn witness_quadratic(&self) -> String {
        format!("q(x) = {} - x^2", self.shift)
    }
}

pub fn quadratic_hits(a: &IntegerSet, cap: u64) -> Result<QuadraticHits> {
    if a.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    let s = squares_up_to(cap)?;
    let rep = rep_sum(a, &s);
    let (shift, count) = rep.nonzero().fold(
        (0i64, 0u32),
        |best, (n, c)| if c > best.1 { (n, c) } else { best },
    );
    let mut witnesses = Vec::new();
    let mut xs = Vec::new();
    for x in 1..=cap.isqrt() {
        let a_val = shift - (x * x) as i64;
        if a.contains(a_val) {
            witnesses.push(a_val as u64);
            xs.push(x);
        }
    }
    witnesses.reverse();
    xs.reverse();
    let product = a.len() as u64 * s.len() as u64;
    Ok(QuadraticHits {
        shift,
        count: count as u64,
        witnesses,
        xs,
        log_scale: (cap as f64).ln() * product as f64,
        energy: rep.sum_of_squares()?,
        max_scale: product * count as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SidonReport {
    pub cap: u64,
    pub card_x: u64,
    pub card_s: u64,
    pub energy: u64,
    /// `|S|(|X| + |S|)`.
    pub bound: u64,
    pub holds: bool,
    /// `(p, |X_p|)` for primes `p <= Q`.
    pub occupancy: Vec<(u64, u64)>,
    pub hypothesis_ok: bool,
}

pub fn sidon_report(
    x: &IntegerSet,
    cap: u64,
    prime_bound: u64,
    eps: &EpsilonSpec,
) -> Result<SidonReport> {
    if !is_sidon(x) {
        return Err(Error::Precondition("input set is not Sidon".into()));
    }
    let s = squares_up_to(cap)?;
    let e = energy(x, &s)?;
    let (cx, cs) = (x.len() as u64, s.len() as u64);
    let bound = cs * (cx + cs);
    let primes = sieve_primes(prime_bound)?;
    let mut occ = Vec::with_capacity(primes.len());
    let mut hypothesis_ok = true;
    for &p in primes.primes() {
        let o = occupancy(x, p)?.occupancy;
        hypothesis_ok &= o <= eps.allowed_classes(p);
        occ.push((p, o));
    }
    Ok(SidonReport {
        cap,
        card_x: cx,
        card_s: cs,
        energy: e,
        bound,
        holds: e <= bound,
        occupancy: occ,
        hypothesis_ok,
    })
}

/// `E(S,S)` for the squares up to `N`.
pub fn squares_energy(cap: u64) -> Result<u64> {
    let s = squares_up_to(cap)?;
    energy(&s, &s)
}

/// `E(S,S) / (N ln N)`.
pub fn ramanujan_ratio(cap: u64) -> Result<f64> {
    if cap < 4 {
        return Err(Error::Precondition("N must be >= 4".into()));
    }
    let n = cap as f64;
    Ok(squares_energy(cap)? as f64 / (n * n.ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Theorem,
    Ramanujan,
    Sidon,
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem" => Ok(Experiment::Theorem),
            "ramanujan" => Ok(Experiment::Ramanujan),
            "sidon" => Ok(Experiment::Sidon),
            other => Err(Error::Precondition(format!("unknown experiment {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    #[serde(rename = "N")]
    pub cap: u64,
    #[serde(rename = "card_A")]
    pub card_a: u64,
    #[serde(rename = "card_S")]
    pub card_s: u64,
    pub energy: u64,
    pub lower_bound: f64,
    /// `E / (|A||S|)`.
    #[serde(rename = "ratio_AS")]
    pub ratio_as: f64,
    /// `E / (|A|² ln N)`; for the Ramanujan experiment `E / (N ln N)`.
    pub ratio_log: f64,
    pub seconds: f64,
    pub decomposition_ok: bool,
}

pub const EXPERIMENT_CSV_HEADER: &str =
    "N,card_A,card_S,energy,lower_bound,ratio_AS,ratio_log,seconds,decomposition_ok";

impl ExperimentRow {
    pub fn csv_row(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{:.6},{}",
            self.cap,
            self.card_a,
            self.card_s,
            self.energy,
            self.lower_bound,
            self.ratio_as,
            self.ratio_log,
            self.seconds,
            self.decomposition_ok
        );
        out
    }
}

/// One sweep row for the set `a` at cap `N`.
pub fn experiment_row(a: &IntegerSet, cap: u64, kind: Experiment) -> Result<ExperimentRow> {
    let start = Instant::now();
    let d = decompose(a, cap)?;
    let lb = theorem_lower_bound(a, cap)?;
    let (ca, cs) = (d.card_a as f64, d.card_s as f64);
    let log_n = (cap as f64).ln();
    let e = d.via_energy as f64;
    let ratio_log = match kind {
        Experiment::Ramanujan => e / (cap as f64 * log_n),
        _ => e / (ca * ca * log_n),
    };
    Ok(ExperimentRow {
        cap,
        card_a: d.card_a,
        card_s: d.card_s,
        energy: d.via_energy,
        lower_bound: lb.lower_bound,
        ratio_as: e / (ca * cs),
        ratio_log,
        seconds: start.elapsed().as_secs_f64(),
        decomposition_ok: d.agrees(),
    })
}

/// Largest prime `p` with `2p² + p <= N`, so the Sidon construction is untruncated.
pub fn largest_sidon_prime(cap: u64) -> Option<u64> {
    let mut p = ((cap / 2) as f64).sqrt() as u64 + 1;
    while p >= 2 {
        if 2 * p * p + p <= cap && crate::arith::is_prime(p) {
            return Some(p);
        }
        p -= 1;
    }
    None
}
