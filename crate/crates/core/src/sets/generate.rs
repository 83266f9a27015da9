use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::IntegerSet;
use crate::arith::{is_prime, sieve_primes, EpsilonSpec};
use crate::error::{Error, Result};

/// `{n² : 1 <= n <= ⌊√N⌋}`.
pub fn squares_up_to(cap: u64) -> Result<IntegerSet> {
    let r = cap.isqrt();
    IntegerSet::from_sorted(cap, (1..=r).map(|n| n * n).collect())
}

/// `{a x² + b x + c : x ∈ Z} ∩ [1, N]`.
pub fn quadratic_image(a: i64, b: i64, c: i64, cap: u64) -> Result<IntegerSet> {
    if a == 0 {
        return Err(Error::Degenerate("leading coefficient is 0".into()));
    }
    let (a, b, c) = (a as i128, b as i128, c as i128);
    let n = cap as i128;
    // |a|x² - |b||x| <= N + |c| whenever q(x) ∈ [1, N].
    let disc = (b * b + 4 * a.abs() * (n + c.abs())) as u128;
    let bound = ((b.abs() + disc.isqrt() as i128) / (2 * a.abs())) + 1;
    let mut out = Vec::new();
    for x in -bound..=bound {
        let q = a * x * x + b * x + c;
        if (1..=n).contains(&q) {
            out.push(q as u64);
        }
    }
    IntegerSet::new(cap, out)
}

/// Erdős–Turán Sidon set `{2p i + (i² mod p) + 1 : 0 <= i < p} ∩ [1, N]`.
pub fn sidon_set(p: u64, cap: u64) -> Result<IntegerSet> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let out = (0..p)
        .map(|i| 2 * p * i + (i * i) % p + 1)
        .take_while(|&e| e <= cap)
        .collect();
    IntegerSet::from_sorted(cap, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassStrategy {
    /// `{0} ∪ {quadratic residues}`, truncated or padded to the allowed size.
    Qr,
    /// Random classes.
    Uniform,
}

impl std::str::FromStr for ClassStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qr" => Ok(ClassStrategy::Qr),
            "uniform" => Ok(ClassStrategy::Uniform),
            other => Err(Error::Precondition(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AllowedClasses {
    pub prime: u64,
    pub classes: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AvoidingSet {
    pub set: IntegerSet,
    pub allowed: Vec<AllowedClasses>,
    /// Set when no integer in `[1, N]` survived the congruence conditions.
    pub empty_warning: bool,
}

/// Random set meeting `|A_p| <= ⌊p/2 + ε(p)⌋` for every prime `p <= P`.
pub fn residue_avoiding_random(
    cap: u64,
    eps: &EpsilonSpec,
    prime_bound: u64,
    seed: u64,
    strategy: ClassStrategy,
) -> Result<AvoidingSet> {
    let primes = sieve_primes(prime_bound)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut allowed = Vec::with_capacity(primes.len());
    for &p in primes.primes() {
        let k = eps.allowed_classes(p).clamp(1, p) as usize;
        let mut classes = match strategy {
            ClassStrategy::Qr => {
                let mut is_qr = vec![false; p as usize];
                for x in 1..p {
                    is_qr[((x * x) % p) as usize] = true;
                }
                let mut ordered: Vec<u64> = std::iter::once(0)
                    .chain((1..p).filter(|&h| is_qr[h as usize]))
                    .collect();
                if ordered.len() >= k {
                    ordered.truncate(k);
                } else {
                    let mut rest: Vec<u64> = (1..p).filter(|&h| !is_qr[h as usize]).collect();
                    rest.shuffle(&mut rng);
                    ordered.extend(rest.into_iter().take(k - ordered.len()));
                }
                ordered
            }
            ClassStrategy::Uniform => {
                let mut all: Vec<u64> = (0..p).collect();
                all.shuffle(&mut rng);
                all.truncate(k);
                all
            }
        };
        classes.sort_unstable();
        allowed.push(AllowedClasses { prime: p, classes });
    }

    let masks: Vec<(u64, Vec<bool>)> = allowed
        .iter()
        .map(|ac| {
            let mut m = vec![false; ac.prime as usize];
            for &h in &ac.classes {
                m[h as usize] = true;
            }
            (ac.prime, m)
        })
        .collect();
    let kept = (1..=cap)
        .filter(|&n| masks.iter().all(|(p, m)| m[(n % p) as usize]))
        .collect::<Vec<_>>();
    let set = IntegerSet::from_sorted(cap, kept)?;
    let empty_warning = set.is_empty();
    Ok(AvoidingSet {
        set,
        allowed,
        empty_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{is_sidon, occupancy};

    #[test]
    fn squares_examples() {
        assert_eq!(squares_up_to(10).unwrap().elements(), &[1, 4, 9]);
        assert_eq!(squares_up_to(1).unwrap().elements(), &[1]);
        let s = squares_up_to(100).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s.max(), Some(100));
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(quadratic_image(1, 0, 0, 10).unwrap().elements(), &[1, 4, 9]);
        assert_eq!(quadratic_image(1, 0, -1, 10).unwrap().elements(), &[3, 8]);
        assert_eq!(
            quadratic_image(-1, 0, 50, 100).unwrap().elements(),
            &[1, 14, 25, 34, 41, 46, 49, 50]
        );
        assert!(matches!(
            quadratic_image(0, 1, 1, 10),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn quadratic_matches_wide_enumeration() {
        for (a, b, c) in [(2, 3, -7), (-3, 5, 400), (1, -9, 20), (5, 0, -3)] {
            let got = quadratic_image(a, b, c, 500).unwrap();
            let mut want: Vec<u64> = (-2000i64..=2000)
                .map(|x| a * x * x + b * x + c)
                .filter(|q| (1..=500).contains(q))
                .map(|q| q as u64)
                .collect();
            want.sort_unstable();
            want.dedup();
            assert_eq!(got.elements(), want.as_slice(), "q = {a}x² + {b}x + {c}");
        }
    }

    #[test]
    fn sidon_examples() {
        assert_eq!(sidon_set(3, 20).unwrap().elements(), &[1, 8, 14]);
        assert_eq!(sidon_set(2, 20).unwrap().elements(), &[1, 6]);
        let s5 = sidon_set(5, 60).unwrap();
        assert_eq!(s5.len(), 5);
        assert!(is_sidon(&s5));
        assert!(sidon_set(4, 100).is_err());
    }

    #[test]
    fn avoiding_examples() {
        let r =
            residue_avoiding_random(100, &EpsilonSpec::half(), 2, 1, ClassStrategy::Qr).unwrap();
        assert_eq!(r.allowed[0].classes, vec![0]);
        assert_eq!(
            r.set.elements(),
            (1..=50).map(|k| 2 * k).collect::<Vec<_>>().as_slice()
        );

        let r = residue_avoiding_random(50, &EpsilonSpec::half(), 3, 9, ClassStrategy::Qr).unwrap();
        assert!(r.set.iter().all(|n| n % 3 != 2));

        let a = residue_avoiding_random(2000, &EpsilonSpec::half(), 31, 42, ClassStrategy::Uniform)
            .unwrap();
        let b = residue_avoiding_random(2000, &EpsilonSpec::half(), 31, 42, ClassStrategy::Uniform)
            .unwrap();
        assert_eq!(a.set, b.set);
        assert_eq!(a.allowed, b.allowed);
    }

    #[test]
    fn avoiding_respects_occupancy() {
        for seed in 0..10 {
            for strategy in [ClassStrategy::Qr, ClassStrategy::Uniform] {
                let eps = EpsilonSpec::half();
                let r = residue_avoiding_random(5000, &eps, 23, seed, strategy).unwrap();
                for ac in &r.allowed {
                    let occ = occupancy(&r.set, ac.prime).unwrap().occupancy;
                    assert!(occ <= eps.allowed_classes(ac.prime));
                }
            }
        }
    }

    #[test]
    fn empty_result_is_flagged() {
        // Only class 0 mod 2 and class 0 mod 3 survive: multiples of 6, none <= 5.
        let r = residue_avoiding_random(5, &EpsilonSpec::zero(), 3, 0, ClassStrategy::Qr).unwrap();
        assert!(r.set.is_empty());
        assert!(r.empty_warning);
    }
}
