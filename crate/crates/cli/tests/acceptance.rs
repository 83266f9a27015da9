//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary so the output order is fixed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use addsieve::arith::{sieve_primes, EpsilonSpec};
use addsieve::energy::conv::{convolve, Backend, Used};
use addsieve::energy::{energy_bruteforce, energy_diff_path, energy_sum_path, rep_diff, rep_sum};
use addsieve::sets::{
    mod4_restrict, occupancy, quadratic_image, residue_avoiding_random, sidon_set, squares_up_to,
    ClassStrategy, IntegerSet,
};
use addsieve::sieve::{composite_moduli_check, divisor_sum_direct, divisor_sum_partition};
use addsieve::theorem::{
    decompose, largest_sidon_prime, ramanujan_ratio, sidon_report, squares_energy,
    theorem_lower_bound,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn random_set(rng: &mut ChaCha8Rng, cap: u64, max_len: usize) -> IntegerSet {
    let len = rng.gen_range(0..=max_len.min(cap as usize));
    IntegerSet::new(cap, (0..len).map(|_| rng.gen_range(1..=cap))).unwrap()
}

/// Sets shared by the decomposition and lower-bound criteria.
fn corpus() -> Vec<(String, IntegerSet)> {
    let mut out = Vec::new();
    for cap in [16, 100, 1_000, 5_000, 10_000] {
        out.push((format!("squares N={cap}"), squares_up_to(cap).unwrap()));
    }
    for cap in [100, 1_000, 10_000] {
        if let Some(p) = largest_sidon_prime(cap) {
            out.push((format!("sidon p={p} N={cap}"), sidon_set(p, cap).unwrap()));
        }
    }
    for (a, b, c) in [(1, 0, 0), (2, 1, 3), (3, -2, 7), (1, 1, 1), (5, 0, -4)] {
        out.push((
            format!("quadratic {a}x²+{b}x+{c}"),
            quadratic_image(a, b, c, 10_000).unwrap(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    for i in 0..100 {
        let cap = rng.gen_range(10..=10_000);
        out.push((format!("random #{i}"), random_set(&mut rng, cap, 200)));
    }
    out
}

fn exact_path_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..500 {
        let cap = rng.gen_range(1..=2000);
        let x = random_set(&mut rng, cap, 100);
        let y = random_set(&mut rng, cap, 100);
        let a = energy_sum_path(&x, &y).map_err(|e| e.to_string())?.value;
        let b = energy_diff_path(&x, &y).map_err(|e| e.to_string())?.value;
        let c = energy_bruteforce(&x, &y).map_err(|e| e.to_string())?.value;
        ensure!(a == b && b == c, "pair {i}: {a} / {b} / {c}");
    }
    within(start, Duration::from_secs(60))?;
    Ok("500 pairs".into())
}

fn fixed_fixture() -> Outcome {
    let s = squares_up_to(16).unwrap();
    let paths = [
        energy_sum_path(&s, &s).unwrap().value,
        energy_diff_path(&s, &s).unwrap().value,
        energy_bruteforce(&s, &s).unwrap().value,
    ];
    ensure!(paths == [28; 3], "E(S,S) = {paths:?}");

    let sums: Vec<(i64, u32)> = rep_sum(&s, &s).nonzero().collect();
    let want_sums = vec![
        (2, 1),
        (5, 2),
        (8, 1),
        (10, 2),
        (13, 2),
        (17, 2),
        (18, 1),
        (20, 2),
        (25, 2),
        (32, 1),
    ];
    ensure!(sums == want_sums, "r_(S+S) = {sums:?}");

    let diffs = rep_diff(&s, &s);
    ensure!(diffs.get(0) == 4, "r_(S-S)(0) = {}", diffs.get(0));
    let positive: Vec<(i64, u32)> = diffs.nonzero().filter(|&(n, _)| n > 0).collect();
    let want_positive = vec![(3, 1), (5, 1), (7, 1), (8, 1), (12, 1), (15, 1)];
    ensure!(
        positive == want_positive,
        "r_(S-S) positive part = {positive:?}"
    );
    ensure!(
        diffs.nonzero().all(|(n, c)| diffs.get(-n) == c),
        "r_(S-S) not symmetric"
    );
    Ok("E=28 on all three paths".into())
}

fn divisor_sum_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let cap = rng.gen_range(1..=10_000);
        let a = random_set(&mut rng, cap, 300);
        let (d, p) = (
            divisor_sum_direct(&a, cap),
            divisor_sum_partition(&a, cap).total,
        );
        ensure!(d == p, "set {i} N={cap}: direct {d}, partition {p}");
    }
    let cap = 100_000;
    let s = squares_up_to(cap).unwrap();
    let (d, p) = (
        divisor_sum_direct(&s, cap),
        divisor_sum_partition(&s, cap).total,
    );
    ensure!(d == p, "squares N={cap}: direct {d}, partition {p}");
    within(start, Duration::from_secs(120))?;
    Ok(format!("200 random sets, squares total {d}"))
}

fn composite_moduli_suite() -> Outcome {
    let mut cases: Vec<(String, IntegerSet, EpsilonSpec)> = vec![(
        "squares".into(),
        squares_up_to(10_000).unwrap(),
        EpsilonSpec::half(),
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let presets = [EpsilonSpec::zero(), EpsilonSpec::half(), EpsilonSpec::one()];
    let mut attempts = 0;
    while cases.len() < 101 {
        attempts += 1;
        ensure!(
            attempts < 1000,
            "could not build 100 nonempty residue-avoiding sets"
        );
        let eps = presets[rng.gen_range(0..presets.len())].clone();
        let cap = rng.gen_range(500..=20_000);
        let prime_bound = [3, 5, 7, 11, 13, 17][rng.gen_range(0..6)];
        let strategy = if rng.gen_bool(0.5) {
            ClassStrategy::Qr
        } else {
            ClassStrategy::Uniform
        };
        let g = residue_avoiding_random(cap, &eps, prime_bound, rng.gen(), strategy).unwrap();
        if !g.set.is_empty() {
            cases.push((
                format!("avoiding N={cap} P={prime_bound} eps={eps}"),
                g.set,
                eps,
            ));
        }
    }

    let mut applicable = 0u64;
    for (name, a, eps) in &cases {
        for v in 1..=1000 {
            let r = composite_moduli_check(a, v, eps).map_err(|e| format!("{name} v={v}: {e}"))?;
            if r.hypothesis_ok {
                applicable += 1;
                ensure!(r.holds, "{name} v={v}: lhs {} > rhs {}", r.lhs, r.rhs);
            }
        }
    }
    let zero =
        composite_moduli_check(&squares_up_to(10_000).unwrap(), 3, &EpsilonSpec::zero()).unwrap();
    ensure!(
        !zero.hypothesis_ok,
        "eps=0 squares at v=3 should fail the hypothesis"
    );
    ensure!(applicable > 0, "no modulus met the hypothesis");
    Ok(format!(
        "{} sets, {applicable} moduli checked under the hypothesis",
        cases.len()
    ))
}

fn decomposition_equality() -> Outcome {
    let start = Instant::now();
    let corpus = corpus();
    for (name, a) in &corpus {
        let d = decompose(a, a.cap()).map_err(|e| e.to_string())?;
        ensure!(d.agrees(), "{name}: {d:?}");
    }
    let big = squares_up_to(1_000_000).unwrap();
    let d = decompose(&big, 1_000_000).map_err(|e| e.to_string())?;
    ensure!(d.agrees(), "squares N=10^6: {d:?}");
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{} corpus sets + squares N=10^6 (E={})",
        corpus.len(),
        d.via_energy
    ))
}

fn lower_bound_suite() -> Outcome {
    let mut sets = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..20 {
        let cap = rng.gen_range(1_000..=20_000);
        let g =
            residue_avoiding_random(cap, &EpsilonSpec::half(), 13, i, ClassStrategy::Qr).unwrap();
        sets.push((format!("avoiding #{i}"), g.set));
    }
    sets.push(("squares N=10^6".into(), squares_up_to(1_000_000).unwrap()));
    let mut worst: f64 = 0.0;
    for (name, a) in &sets {
        let r = theorem_lower_bound(a, a.cap()).map_err(|e| e.to_string())?;
        ensure!(
            r.holds,
            "{name}: half divisor sum {} > E(A',S) {}",
            r.lower_bound,
            r.energy
        );
        ensure!(
            mod4_restrict(a).len() as u64 == r.restricted_card,
            "{name}: restricted size mismatch"
        );
        worst = worst.max(r.ratio);
    }
    Ok(format!("{} sets, max bound/energy {worst:.4}", sets.len()))
}

fn ramanujan_trend() -> Outcome {
    let start = Instant::now();
    let grid = [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000];
    let ratios: Vec<f64> = grid.iter().map(|&n| ramanujan_ratio(n).unwrap()).collect();
    let last = *ratios.last().unwrap();
    ensure!((0.125..=0.5).contains(&last), "ratio(10^7) = {last}");
    let gaps: Vec<f64> = ratios[2..].iter().map(|r| (r - 0.25).abs()).collect();
    ensure!(
        gaps.windows(2).all(|w| w[1] <= w[0]),
        "|ratio - 1/4| not nonincreasing: ratios {ratios:?}"
    );
    // The transform backend must reproduce the exact count where it applies.
    let s = squares_up_to(1_000_000).unwrap();
    let xs: Vec<i64> = s.iter().map(|x| x as i64).collect();
    let (table, used) = convolve(&xs, &xs, Backend::Fft);
    ensure!(
        used == Used::Fft,
        "transform backend not used at N=10^6: {used:?}"
    );
    let fft = table.sum_of_squares().map_err(|e| e.to_string())?;
    let exact = squares_energy(1_000_000).unwrap();
    ensure!(fft == exact, "FFT energy {fft} != direct {exact} at N=10^6");
    within(start, Duration::from_secs(600))?;
    Ok(format!(
        "ratios {:?}",
        ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()
    ))
}

fn log_growth_signature() -> Outcome {
    let mut normalized = Vec::new();
    let mut c = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let s = squares_up_to(n).unwrap();
        let e = squares_energy(n).unwrap() as f64;
        let k = s.len() as f64;
        normalized.push(e / (k * k));
        c.push(e / (k * k * (n as f64).ln()));
    }
    ensure!(
        normalized.windows(2).all(|w| w[1] > w[0]),
        "E/(|A||S|) not strictly increasing: {normalized:?}"
    );
    let (lo, hi) = c
        .iter()
        .fold((f64::MAX, f64::MIN), |(l, h), &x| (l.min(x), h.max(x)));
    ensure!(lo > 0.0 && hi / lo <= 10.0, "c(N) band violated: {c:?}");
    Ok(format!("c(N) in [{lo:.4}, {hi:.4}]"))
}

fn sidon_contrast() -> Outcome {
    let eps = EpsilonSpec::half();
    let primes = sieve_primes(200).unwrap();
    for &p in primes.primes() {
        let cap = 2 * p * p + p;
        let x = sidon_set(p, cap).unwrap();
        ensure!(x.len() as u64 == p, "p={p}: {} elements", x.len());
        let r = sidon_report(&x, cap, 50, &eps).map_err(|e| format!("p={p}: {e}"))?;
        ensure!(r.holds, "p={p}: E={} > {}", r.energy, r.bound);
    }
    let n = 1_000_000;
    let s = squares_up_to(n).unwrap();
    let k = s.len() as u64;
    let e = squares_energy(n).unwrap();
    let bound = k * (k + k);
    ensure!(e > bound, "squares N=10^6: E={e} <= |S|(|S|+|S|)={bound}");
    Ok(format!(
        "{} Sidon sets within bound; squares E={e} > {bound}",
        primes.len()
    ))
}

fn residue_occupancy() -> Outcome {
    let primes = sieve_primes(10_000).unwrap();
    for &p in primes.primes() {
        // x = 1..=p covers every residue of x mod p.
        let s = squares_up_to(p * p).unwrap();
        let occ = occupancy(&s, p).unwrap().occupancy;
        if p == 2 {
            // Both residues mod 2 are squares; (p+1)/2 is not an integer here.
            ensure!(occ == 2, "p=2: occupancy {occ}");
        } else {
            ensure!(occ == (p + 1) / 2, "p={p}: occupancy {occ}");
        }
    }
    Ok(format!("{} primes (p=2: both classes)", primes.len()))
}

fn run_cli(args: &[&str], dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_addsieve"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

/// Drops the `seconds` column from experiment CSV.
fn without_timing(csv: &[u8]) -> String {
    let text = String::from_utf8_lossy(csv);
    let Some(col) = text
        .lines()
        .next()
        .and_then(|h| h.split(',').position(|c| c == "seconds"))
    else {
        return text.into_owned();
    };
    text.lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            if cells.len() > col {
                cells.remove(col);
            }
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "gen",
            "random-avoiding",
            "--N",
            "5000",
            "--P",
            "13",
            "--eps",
            "1/2",
            "--seed",
            "42",
        ],
        vec![
            "gen",
            "random-avoiding",
            "--N",
            "5000",
            "--P",
            "7",
            "--strategy",
            "uniform",
            "--seed",
            "9",
        ],
        vec!["gen", "sidon", "--N", "20000", "--p", "97"],
        vec![
            "sweep",
            "theorem",
            "--grid",
            "1e3,1e4",
            "--set",
            "random-avoiding",
            "--seed",
            "42",
        ],
        vec!["sweep", "ramanujan", "--grid", "1e3,1e4,1e5"],
        vec!["--format", "json", "series", "--grid", "10,100,1000"],
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    std::fs::write(
        dir.path().join("probe.txt"),
        "N=100\n1\n4\n7\n9\n16\n25\n50\n",
    )
    .map_err(|e| e.to_string())?;
    let mut all = runs.clone();
    all.push(vec!["energy", "probe.txt", "--squares", "--method", "all"]);
    all.push(vec!["sieve", "probe.txt", "--check-upto", "30"]);
    all.push(vec!["sieve", "probe.txt", "--divisor-sum"]);
    all.push(vec!["--format", "json", "report", "hits", "probe.txt"]);
    for args in &all {
        let first = without_timing(&run_cli(args, dir.path())?);
        let second = without_timing(&run_cli(args, dir.path())?);
        ensure!(first == second, "{args:?}: outputs differ");
        ensure!(!first.is_empty(), "{args:?}: empty output");
    }
    Ok(format!("{} commands byte-identical", all.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("exact path agreement", exact_path_agreement),
        ("fixed fixture E(S,S)=28", fixed_fixture),
        ("divisor-sum identity", divisor_sum_identity),
        ("composite-moduli inequality", composite_moduli_suite),
        ("energy decomposition equality", decomposition_equality),
        ("mod-4 lower bound", lower_bound_suite),
        ("Ramanujan trend", ramanujan_trend),
        ("log-growth signature", log_growth_signature),
        ("Sidon contrast", sidon_contrast),
        ("quadratic residue occupancy", residue_occupancy),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{t:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{t:.2}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
