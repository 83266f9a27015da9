//! Sieve inequalities and the divisor sum `Σ_{1<=u<v<=√N} r_{A-A}(uv)`.
//!
//! * [`composite_moduli_check`] tests `|A|²/Δ(v) <= Σ_h |A(v;h)|²`, reporting
//!   whether the occupancy hypothesis actually holds at the prime powers of `v`.
//! * [`gallagher_bound`] evaluates the larger-sieve upper bound on `|A|`.
//! * [`divisor_sum_direct`] and [`divisor_sum_partition`] compute the divisor
//!   sum by iterating `(u, v)` and by scanning congruence windows
//!   `b < a < b + v²`, `a ≡ b (mod v)`, respectively.

mod difference;

pub use difference::{DifferenceTable, DENSE_PAIR_LIMIT};

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::{delta_of, delta_prime_power, factorize, sieve_primes, DeltaValue, EpsilonSpec};
use crate::error::{Error, Result};
use crate::sets::{occupancy, IntegerSet, ResidueProfile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SieveCheckResult {
    pub modulus: u64,
    pub card: u64,
    pub delta_num: i128,
    pub delta_den: i128,
    /// `|A|²/Δ(v)`, exact as `lhs_num / lhs_den`.
    pub lhs_num: i128,
    pub lhs_den: i128,
    pub lhs: f64,
    /// `Σ_h |A(v;h)|²`.
    pub rhs: u128,
    /// `|A_v|`.
    pub occupancy: u64,
    /// `|A_{p^j}| <= Δ(p^j)` for every `p^j` dividing `v`.
    pub hypothesis_ok: bool,
    pub holds: bool,
}

impl SieveCheckResult {
    /// `rhs >= |A|²/|A_v|`, which needs no hypothesis.
    pub fn unconditional_ok(&self) -> bool {
        self.occupancy == 0 || self.rhs * self.occupancy as u128 >= (self.card as u128).pow(2)
    }

    pub fn csv_header() -> &'static str {
        "v,card,delta,lhs,rhs,occupancy,hypothesis_ok,holds"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{}/{},{}/{},{},{},{},{}",
            self.modulus,
            self.card,
            self.delta_num,
            self.delta_den,
            self.lhs_num,
            self.lhs_den,
            self.rhs,
            self.occupancy,
            self.hypothesis_ok,
            self.holds
        )
    }
}

pub fn composite_moduli_check(
    a: &IntegerSet,
    v: u64,
    eps: &EpsilonSpec,
) -> Result<SieveCheckResult> {
    if v == 0 {
        return Err(Error::Precondition("modulus must be >= 1".into()));
    }
    let primes = sieve_primes(v.isqrt() + 1)?;
    let f = factorize(v, &primes)?;
    let delta = delta_of(&f, eps)?;

    let mut hypothesis_ok = true;
    'outer: for &(p, k) in &f.factors {
        let mut q = 1u64;
        for j in 1..=k {
            q *= p;
            let occ = occupancy(a, q)?.occupancy as i128;
            if DeltaValue::from_integer(occ) > delta_prime_power(p, j, eps)? {
                hypothesis_ok = false;
                break 'outer;
            }
        }
    }

    let profile = occupancy(a, v)?;
    let card = a.len() as u64;
    let sq = DeltaValue::from_integer((card as i128) * (card as i128));
    let lhs = sq / delta;
    let rhs = profile.sum_of_squares();
    let holds = lhs <= DeltaValue::from_integer(rhs as i128);
    Ok(SieveCheckResult {
        modulus: v,
        card,
        delta_num: *delta.numer(),
        delta_den: *delta.denom(),
        lhs_num: *lhs.numer(),
        lhs_den: *lhs.denom(),
        lhs: lhs.to_f64().unwrap_or(f64::NAN),
        rhs,
        occupancy: profile.occupancy,
        hypothesis_ok,
        holds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum GallagherBound {
    Bound(f64),
    Inconclusive,
}

impl GallagherBound {
    pub fn value(self) -> Option<f64> {
        match self {
            GallagherBound::Bound(b) => Some(b),
            GallagherBound::Inconclusive => None,
        }
    }
}

impl std::fmt::Display for GallagherBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GallagherBound::Bound(b) => write!(f, "{b}"),
            GallagherBound::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

/// Larger sieve:
/// `|A| <= (Σ log p - log N) / (Σ log p / |A_p| - log N)` when the
/// denominator is positive.
pub fn gallagher_bound(profiles: &[ResidueProfile], cap: u64) -> Result<GallagherBound> {
    let mut moduli: Vec<u64> = profiles.iter().map(|p| p.modulus).collect();
    moduli.sort_unstable();
    if moduli.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition(
            "profiles must have distinct moduli".into(),
        ));
    }
    if let Some(p) = profiles.iter().find(|p| p.occupancy == 0) {
        return Err(Error::Precondition(format!(
            "empty occupancy at modulus {}",
            p.modulus
        )));
    }
    let log_n = (cap as f64).ln();
    let (mut num, mut den) = (-log_n, -log_n);
    for prof in profiles {
        let lp = (prof.modulus as f64).ln();
        num += lp;
        den += lp / prof.occupancy as f64;
    }
    Ok(if den > 0.0 {
        GallagherBound::Bound(num / den)
    } else {
        GallagherBound::Inconclusive
    })
}

/// Occupancy profiles of `A` at every prime `p <= q`, then [`gallagher_bound`].
pub fn gallagher_for_set(a: &IntegerSet, q: u64) -> Result<GallagherBound> {
    let primes = sieve_primes(q)?;
    let profiles = primes
        .primes()
        .iter()
        .map(|&p| occupancy(a, p))
        .collect::<Result<Vec<_>>>()?;
    gallagher_bound(&profiles, a.cap())
}

/// `Σ_{1<=u<v<=⌊√N⌋} r_{A-A}(uv)`, by iterating the pairs `(u, v)`.
pub fn divisor_sum_direct(a: &IntegerSet, cap: u64) -> u64 {
    let table = DifferenceTable::new(a);
    divisor_sum_over(&table, cap.isqrt())
}

/// `Σ_{1<=u<v<=r} r_{A-A}(uv)` against a prepared table.
pub fn divisor_sum_over(table: &DifferenceTable, r: u64) -> u64 {
    let mut total = 0u64;
    for v in 2..=r {
        for u in 1..v {
            total += table.get(u * v) as u64;
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorRow {
    pub v: u64,
    /// `J_v = ⌊N/v²⌋`; intervals `I_j = [j v², (j+1) v²)` for `0 <= j <= J_v`.
    pub intervals: u64,
    /// Ordered pairs `a ≠ b` with `a ≡ b (mod v)` and `b < a < b + v²`.
    pub window_count: u64,
    /// Pairs `b < a` sharing a residue class mod `v` and an interval `I_j`.
    pub partition_lower_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorSumTrace {
    pub cap: u64,
    pub rows: Vec<DivisorRow>,
    pub total: u64,
    pub partition_total: u64,
}

impl DivisorSumTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,J_v,window_count,partition_lower_bound\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.v, r.intervals, r.window_count, r.partition_lower_bound
            );
        }
        out
    }
}

/// The same divisor sum, counted through congruence windows per modulus.
pub fn divisor_sum_partition(a: &IntegerSet, cap: u64) -> DivisorSumTrace {
    let r = cap.isqrt();
    let mut rows = Vec::with_capacity(r as usize);
    let mut classes: Vec<Vec<u64>> = Vec::new();
    for v in 1..=r {
        let v2 = v * v;
        classes.clear();
        classes.resize_with(v as usize, Vec::new);
        for e in a.iter() {
            classes[(e % v) as usize].push(e);
        }

        let mut window_count = 0u64;
        let mut partition_lower_bound = 0u64;
        for class in &classes {
            for (i, &x) in class.iter().enumerate() {
                // b in (x - v², x)
                let lo = x.saturating_sub(v2 - 1);
                window_count += (i - class[..i].partition_point(|&b| b < lo)) as u64;
            }
            // Elements of one class are sorted, so each interval is a run.
            let mut run = 0u64;
            let mut current = None;
            for &x in class {
                let j = x / v2;
                if current == Some(j) {
                    run += 1;
                } else {
                    partition_lower_bound += run * run.saturating_sub(1) / 2;
                    current = Some(j);
                    run = 1;
                }
            }
            partition_lower_bound += run * run.saturating_sub(1) / 2;
        }
        rows.push(DivisorRow {
            v,
            intervals: cap / v2,
            window_count,
            partition_lower_bound,
        });
    }
    let total = rows.iter().map(|r| r.window_count).sum();
    let partition_total = rows.iter().map(|r| r.partition_lower_bound).sum();
    DivisorSumTrace {
        cap,
        rows,
        total,
        partition_total,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorScaleReport {
    pub cap: u64,
    pub card: u64,
    pub total: u64,
    /// `|A|² log N`.
    pub scale: f64,
    pub ratio: f64,
    /// Occupancy hypothesis at every prime `p <= √N`.
    pub hypothesis_ok: bool,
}

/// Measured constant `Σ r_{A-A}(uv) / (|A|² log N)`.
pub fn divisor_sum_scale(
    a: &IntegerSet,
    cap: u64,
    eps: &EpsilonSpec,
) -> Result<DivisorScaleReport> {
    let total = divisor_sum_direct(a, cap);
    let card = a.len() as u64;
    let scale = (card as f64).powi(2) * (cap as f64).ln();
    let ratio = if scale > 0.0 {
        total as f64 / scale
    } else {
        0.0
    };
    let primes = sieve_primes(cap.isqrt())?;
    let mut hypothesis_ok = true;
    for &p in primes.primes() {
        if occupancy(a, p)?.occupancy > eps.allowed_classes(p) {
            hypothesis_ok = false;
            break;
        }
    }
    Ok(DivisorScaleReport {
        cap,
        card,
        total,
        scale,
        ratio,
        hypothesis_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::squares_up_to;

    fn set(cap: u64, xs: &[u64]) -> IntegerSet {
        IntegerSet::new(cap, xs.iter().copied()).unwrap()
    }

    #[test]
    fn composite_moduli_examples() {
        let a = set(16, &[1, 4, 9, 16]);
        let r = composite_moduli_check(&a, 3, &EpsilonSpec::half()).unwrap();
        assert_eq!((r.delta_num, r.delta_den), (2, 1));
        assert_eq!((r.lhs_num, r.lhs_den), (8, 1));
        assert_eq!(r.rhs, 10);
        assert!(r.hypothesis_ok && r.holds);

        let r = composite_moduli_check(&a, 3, &EpsilonSpec::zero()).unwrap();
        assert_eq!((r.delta_num, r.delta_den), (3, 2));
        assert_eq!((r.lhs_num, r.lhs_den), (32, 3));
        assert_eq!(r.rhs, 10);
        assert!(!r.hypothesis_ok && !r.holds);
        assert!(r.unconditional_ok());

        let r = composite_moduli_check(&a, 1, &EpsilonSpec::zero()).unwrap();
        assert_eq!((r.lhs_num, r.lhs_den, r.rhs), (16, 1, 16));
        assert!(r.holds);
    }

    #[test]
    fn hypothesis_looks_at_prime_powers() {
        // mod 2: 1 class <= Δ(2) = 1; mod 4: 2 classes <= Δ(4) = 2.
        let a = set(100, &[2, 4, 6, 8]);
        let r = composite_moduli_check(&a, 4, &EpsilonSpec::zero()).unwrap();
        assert!(r.hypothesis_ok);
        // mod 8: 4 classes <= Δ(8) = 4, but mod 3: 3 classes > Δ(3) = 3/2.
        let r = composite_moduli_check(&a, 24, &EpsilonSpec::zero()).unwrap();
        assert!(!r.hypothesis_ok);
    }

    #[test]
    fn gallagher_cases() {
        let one = ResidueProfile {
            modulus: 7,
            counts: vec![1, 0, 0, 0, 0, 0, 0],
            occupancy: 1,
        };
        match gallagher_bound(&[one.clone()], 5).unwrap() {
            GallagherBound::Bound(b) => assert!((b - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let full = ResidueProfile {
            modulus: 2,
            counts: vec![5, 5],
            occupancy: 2,
        };
        assert_eq!(
            gallagher_bound(&[full], 100).unwrap(),
            GallagherBound::Inconclusive
        );
        assert!(gallagher_bound(&[one.clone(), one], 5).is_err());
    }

    #[test]
    fn gallagher_on_squares_is_an_upper_bound() {
        let s = squares_up_to(10_000).unwrap();
        if let GallagherBound::Bound(b) = gallagher_for_set(&s, 200).unwrap() {
            assert!(b >= s.len() as f64);
        }
    }

    #[test]
    fn divisor_sum_examples() {
        let a = set(16, &[1, 4, 9, 16]);
        assert_eq!(divisor_sum_direct(&a, 16), 3);
        assert_eq!(divisor_sum_partition(&a, 16).total, 3);
        assert_eq!(divisor_sum_direct(&set(16, &[5]), 16), 0);
        assert_eq!(divisor_sum_direct(&set(16, &[1, 2]), 16), 0);
        assert_eq!(divisor_sum_partition(&set(16, &[1, 2]), 16).total, 0);
    }

    #[test]
    fn first_row_is_empty_window() {
        let a = set(100, &[3, 4, 5, 50, 99]);
        let t = divisor_sum_partition(&a, 100);
        assert_eq!(t.rows[0].v, 1);
        assert_eq!(t.rows[0].window_count, 0);
        assert_eq!(t.rows[0].partition_lower_bound, 0);
    }

    #[test]
    fn progression_row_by_hand() {
        // A = {5, 10, ..., 50}, v = 5: differences 5, 10, 15, 20 (< 25) in one class.
        let a = IntegerSet::new(100, (1..=10).map(|k| 5 * k)).unwrap();
        let t = divisor_sum_partition(&a, 100);
        let row = t.rows[4];
        assert_eq!(row.v, 5);
        assert_eq!(row.intervals, 4);
        // d=5: 9 pairs, d=10: 8, d=15: 7, d=20: 6.
        assert_eq!(row.window_count, 9 + 8 + 7 + 6);
        // Intervals [0,25): {5..20}, [25,50): {25..45}, [50,75): {50}.
        assert_eq!(row.partition_lower_bound, 6 + 10);
        assert_eq!(t.total, divisor_sum_direct(&a, 100));
    }

    #[test]
    fn trace_csv_header() {
        let a = set(16, &[1, 4, 9, 16]);
        let csv = divisor_sum_partition(&a, 16).to_csv();
        assert!(csv.starts_with("v,J_v,window_count,partition_lower_bound\n1,16,0,0\n"));
    }

    #[test]
    fn divisor_scale_degenerate() {
        let r = divisor_sum_scale(&set(100, &[7]), 100, &EpsilonSpec::half()).unwrap();
        assert_eq!((r.total, r.ratio), (0, 0.0));
        assert!(r.hypothesis_ok);
    }
}
