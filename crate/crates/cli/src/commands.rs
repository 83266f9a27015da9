use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use addsieve::arith::{series_table, EpsilonSpec};
use addsieve::energy::{
    energy_bruteforce, energy_diff_path, energy_sum_path, rep_diff, rep_sum, EnergyReport,
};
use addsieve::sets::{
    format_set, quadratic_image, read_set, residue_avoiding_random, sidon_set, squares_up_to,
    ClassStrategy,
};
use addsieve::sieve::{
    composite_moduli_check, divisor_sum_direct, divisor_sum_partition, divisor_sum_scale,
    gallagher_for_set, SieveCheckResult,
};
use addsieve::theorem::{
    decompose, experiment_row, largest_sidon_prime, quadratic_hits, sidon_report,
    theorem_lower_bound, Experiment, ExperimentRow, EXPERIMENT_CSV_HEADER,
};
use addsieve::IntegerSet;

use crate::{
    Cli, Command, EnergyArgs, Failure, Format, GenArgs, GenKind, Method, ReportArgs, ReportKind,
    RepsArgs, SeriesArgs, SieveArgs, SweepArgs, SweepKind, SweepSet,
};

/// Largest N accepted by `sweep` unless overridden.
pub const DEFAULT_MAX_N: u64 = 200_000_000;
pub const MAX_N_ENV: &str = "ADDSIEVE_MAX_N";
/// Test hook: `energy-diff` corrupts the difference-identity path.
pub const FAULT_ENV: &str = "ADDSIEVE_FAULT";

type CmdResult = Result<(), Failure>;

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Energy(args) => cmd_energy(args, cli.format),
        Command::Reps(args) => cmd_reps(args, cli.format),
        Command::Sieve(args) => cmd_sieve(args, cli.format),
        Command::Report(args) => cmd_report(args),
        Command::Series(args) => cmd_series(args, cli.format),
        Command::Sweep(args) => cmd_sweep(args, cli.format, cli.threads),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("stdout: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn load_set(path: &Path) -> Result<IntegerSet, Failure> {
    let parsed = read_set(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    if parsed.has_duplicates() {
        eprintln!(
            "warning: {}: {} duplicate element(s) ignored",
            path.display(),
            parsed.duplicates
        );
    }
    Ok(parsed.set)
}

fn load_eps(spec: &str) -> Result<EpsilonSpec, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        return EpsilonSpec::from_file(path).map_err(|e| Failure::usage(format!("{spec}: {e}")));
    }
    EpsilonSpec::preset(spec).map_err(|e| Failure::usage(format!("bad --eps {spec:?}: {e}")))
}

fn second_set(a: &IntegerSet, b: Option<&PathBuf>, squares: bool) -> Result<IntegerSet, Failure> {
    match (b, squares) {
        (Some(path), _) => load_set(path),
        (None, true) => Ok(squares_up_to(a.cap())?),
        (None, false) => Ok(a.clone()),
    }
}

/// Accepts `1000`, `1e3`, `2.5e4`.
pub fn parse_grid_value(s: &str) -> Result<u64, Failure> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let exp: u32 = exp
            .parse()
            .map_err(|_| Failure::usage(format!("bad grid value {s:?}")))?;
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        if !frac_part.is_empty() && frac_part.len() as u32 > exp {
            return Err(Failure::usage(format!(
                "grid value {s:?} is not an integer"
            )));
        }
        let digits: u64 = format!("{int_part}{frac_part}")
            .parse()
            .map_err(|_| Failure::usage(format!("bad grid value {s:?}")))?;
        return 10u64
            .checked_pow(exp - frac_part.len() as u32)
            .and_then(|scale| digits.checked_mul(scale))
            .ok_or_else(|| Failure::usage(format!("grid value {s:?} too large")));
    }
    Err(Failure::usage(format!("bad grid value {s:?}")))
}

fn parse_grid(raw: &[String]) -> Result<Vec<u64>, Failure> {
    let grid = raw
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_grid_value(s))
        .collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() {
        return Err(Failure::usage("empty grid"));
    }
    if grid.contains(&0) {
        return Err(Failure::usage("grid values must be >= 1"));
    }
    Ok(grid)
}

fn max_n() -> Result<u64, Failure> {
    match std::env::var(MAX_N_ENV) {
        Ok(v) => parse_grid_value(&v).map_err(|_| Failure::usage(format!("bad {MAX_N_ENV}={v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn cmd_gen(args: &GenArgs) -> CmdResult {
    let n = args.cap;
    if n == 0 {
        return Err(Failure::usage("--N must be >= 1"));
    }
    let set = match args.kind {
        GenKind::Squares => squares_up_to(n)?,
        GenKind::Sidon => {
            let p = args.p.ok_or_else(|| Failure::usage("sidon needs --p"))?;
            if 2 * p * p + p > n {
                eprintln!("warning: 2p²+p > N, construction truncated");
            }
            sidon_set(p, n)?
        }
        GenKind::Quadratic => {
            let a = args
                .a
                .ok_or_else(|| Failure::usage("quadratic needs --a"))?;
            quadratic_image(a, args.b, args.c, n)?
        }
        GenKind::RandomAvoiding => {
            let bound = args
                .prime_bound
                .ok_or_else(|| Failure::usage("random-avoiding needs --P"))?;
            let strategy: ClassStrategy = args.strategy.parse()?;
            let eps = load_eps(&args.eps)?;
            let out = residue_avoiding_random(n, &eps, bound, args.seed, strategy)?;
            if out.empty_warning {
                eprintln!("warning: generated set is empty");
            }
            out.set
        }
    };
    emit(args.out.as_ref(), &format_set(&set))
}

fn energy_csv(reports: &[EnergyReport]) -> String {
    let mut out = String::from("method,value,lower_trivial,upper_trivial\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.method.name(),
            r.value,
            r.lower_trivial,
            r.upper_trivial
        );
    }
    out
}

fn cmd_energy(args: &EnergyArgs, format: Format) -> CmdResult {
    let a = load_set(&args.set_a)?;
    let b = second_set(&a, args.set_b.as_ref(), args.squares)?;
    let fault = std::env::var(FAULT_ENV).ok();
    let diff = || -> Result<EnergyReport, Failure> {
        let mut r = energy_diff_path(&a, &b)?;
        if fault.as_deref() == Some("energy-diff") {
            r.value += 1;
        }
        Ok(r)
    };
    let reports = match args.method {
        Method::Sum => vec![energy_sum_path(&a, &b)?],
        Method::Diff => vec![diff()?],
        Method::Brute => vec![energy_bruteforce(&a, &b)?],
        Method::All => vec![
            energy_sum_path(&a, &b)?,
            diff()?,
            energy_bruteforce(&a, &b)?,
        ],
    };
    let text = match format {
        Format::Csv => energy_csv(&reports),
        Format::Json => to_json(&reports),
    };
    emit(args.out.as_ref(), &text)?;
    if reports.windows(2).any(|w| w[0].value != w[1].value) {
        let values: Vec<String> = reports.iter().map(|r| r.value.to_string()).collect();
        return Err(Failure::invariant(format!(
            "energy paths disagree: {}",
            values.join(" / ")
        )));
    }
    Ok(())
}

fn cmd_reps(args: &RepsArgs, format: Format) -> CmdResult {
    let a = load_set(&args.set_a)?;
    let b = second_set(&a, args.set_b.as_ref(), args.squares)?;
    let rep = if args.diff {
        rep_diff(&a, &b)
    } else {
        rep_sum(&a, &b)
    };
    let text = match format {
        Format::Csv => rep.to_csv(),
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                n: i64,
                count: u32,
            }
            let rows: Vec<Row> = rep.nonzero().map(|(n, count)| Row { n, count }).collect();
            to_json(&rows)
        }
    };
    emit(args.out.as_ref(), &text)
}

fn sieve_rows_csv(rows: &[SieveCheckResult]) -> String {
    let mut out = String::from(SieveCheckResult::csv_header());
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn cmd_sieve(args: &SieveArgs, format: Format) -> CmdResult {
    let a = load_set(&args.set_a)?;
    let cap = a.cap();
    let eps = load_eps(&args.eps)?;

    if let Some(v) = args.check_v.or(args.check_upto) {
        let moduli: Vec<u64> = if args.check_v.is_some() {
            vec![v]
        } else {
            (1..=v).collect()
        };
        let rows = moduli
            .into_iter()
            .map(|v| composite_moduli_check(&a, v, &eps))
            .collect::<Result<Vec<_>, _>>()?;
        let text = match format {
            Format::Csv => sieve_rows_csv(&rows),
            Format::Json => to_json(&rows),
        };
        return emit(args.out.as_ref(), &text);
    }

    if let Some(q) = args.gallagher {
        let bound = gallagher_for_set(&a, q)?;
        let text = match format {
            Format::Csv => format!("Q,N,card,bound\n{q},{cap},{},{bound}\n", a.len()),
            Format::Json => to_json(&serde_json::json!({
                "Q": q, "N": cap, "card": a.len(), "bound": bound,
            })),
        };
        return emit(args.out.as_ref(), &text);
    }

    if args.divisor_sum {
        let trace = divisor_sum_partition(&a, cap);
        let direct = divisor_sum_direct(&a, cap);
        let text = match format {
            Format::Csv => trace.to_csv(),
            Format::Json => {
                to_json(&serde_json::json!({ "trace": &trace, "direct_total": direct }))
            }
        };
        emit(args.out.as_ref(), &text)?;
        eprintln!(
            "total={} direct={direct} partition_lower_bound={}",
            trace.total, trace.partition_total
        );
        if trace.total != direct {
            return Err(Failure::invariant(format!(
                "divisor sums disagree: window {} vs direct {direct}",
                trace.total
            )));
        }
        return Ok(());
    }

    let r = divisor_sum_scale(&a, cap, &eps)?;
    let text = match format {
        Format::Csv => format!(
            "N,card,total,scale,ratio,hypothesis_ok\n{},{},{},{},{},{}\n",
            r.cap, r.card, r.total, r.scale, r.ratio, r.hypothesis_ok
        ),
        Format::Json => to_json(&r),
    };
    emit(args.out.as_ref(), &text)
}

fn cmd_report(args: &ReportArgs) -> CmdResult {
    let a = load_set(&args.set_a)?;
    let cap = a.cap();
    let text = match args.kind {
        ReportKind::Hits => to_json(&quadratic_hits(&a, cap)?),
        ReportKind::Sidon => {
            let eps = load_eps(&args.eps)?;
            let r = sidon_report(&a, cap, args.prime_bound, &eps)?;
            if !r.holds {
                emit(args.out.as_ref(), &to_json(&r))?;
                return Err(Failure::invariant("Sidon energy bound violated"));
            }
            to_json(&r)
        }
        ReportKind::Decomposition => {
            let d = decompose(&a, cap)?;
            emit(args.out.as_ref(), &to_json(&d))?;
            if !d.agrees() {
                return Err(Failure::invariant("E(A,S) decomposition paths disagree"));
            }
            return Ok(());
        }
        ReportKind::LowerBound => to_json(&theorem_lower_bound(&a, cap)?),
    };
    emit(args.out.as_ref(), &text)
}

fn cmd_series(args: &SeriesArgs, format: Format) -> CmdResult {
    let grid = parse_grid(&args.grid)?;
    let eps = load_eps(&args.eps)?;
    let table = series_table(&grid, &eps, args.truncation)?;
    let text = match format {
        Format::Csv => {
            let mut out = String::from("x,M,T_squarefree,T_all,M_over_log2,T_over_x2log\n");
            for r in &table.rows {
                let lx = (r.x as f64).ln();
                let (m_norm, t_norm) = if r.x > 1 {
                    (
                        r.m / (lx * lx),
                        r.t_squarefree / ((r.x as f64).powi(2) * lx),
                    )
                } else {
                    (f64::NAN, f64::NAN)
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.x, r.m, r.t_squarefree, r.t_all, m_norm, t_norm
                );
            }
            out
        }
        Format::Json => to_json(&table),
    };
    eprintln!(
        "singular series (P={}): {}",
        table.truncation_prime, table.singular_series
    );
    emit(args.out.as_ref(), &text)
}

fn sweep_set(args: &SweepArgs, cap: u64) -> Result<IntegerSet, Failure> {
    let family = match args.experiment {
        SweepKind::Ramanujan => SweepSet::Squares,
        SweepKind::Sidon => SweepSet::Sidon,
        SweepKind::Theorem => args.set,
    };
    Ok(match family {
        SweepSet::Squares => squares_up_to(cap)?,
        SweepSet::Sidon => {
            let p = largest_sidon_prime(cap)
                .ok_or_else(|| Failure::usage(format!("N={cap} too small for a Sidon set")))?;
            sidon_set(p, cap)?
        }
        SweepSet::RandomAvoiding => {
            let eps = load_eps(&args.eps)?;
            residue_avoiding_random(cap, &eps, args.prime_bound, args.seed, ClassStrategy::Qr)?.set
        }
    })
}

fn cmd_sweep(args: &SweepArgs, format: Format, threads: usize) -> CmdResult {
    let grid = parse_grid(&args.grid)?;
    let cap_limit = max_n()?;
    let kind = match args.experiment {
        SweepKind::Theorem => Experiment::Theorem,
        SweepKind::Ramanujan => Experiment::Ramanujan,
        SweepKind::Sidon => Experiment::Sidon,
    };
    let ok_len = grid.iter().take_while(|&&n| n <= cap_limit).count();
    let run_one = |n: u64| -> Result<ExperimentRow, Failure> {
        let set = sweep_set(args, n)?;
        Ok(experiment_row(&set, n, kind)?)
    };

    let rows: Vec<ExperimentRow> = if threads > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
        pool.install(|| {
            grid[..ok_len]
                .par_iter()
                .map(|&n| run_one(n))
                .collect::<Result<_, _>>()
        })?
    } else {
        grid[..ok_len]
            .iter()
            .map(|&n| run_one(n))
            .collect::<Result<_, _>>()?
    };
    let truncated_at = grid.get(ok_len).copied();

    let text = match format {
        Format::Csv => {
            let mut out = String::from(EXPERIMENT_CSV_HEADER);
            out.push('\n');
            for r in &rows {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
            if let Some(n) = truncated_at {
                let _ = writeln!(out, "# truncated: N={n} exceeds cap {cap_limit}");
            }
            out
        }
        Format::Json => {
            to_json(&serde_json::json!({ "rows": &rows, "truncated_at": truncated_at }))
        }
    };
    emit(args.out.as_ref(), &text)?;

    if let Some(bad) = rows.iter().find(|r| !r.decomposition_ok) {
        return Err(Failure::invariant(format!(
            "decomposition mismatch at N={}",
            bad.cap
        )));
    }
    if let Some(n) = truncated_at {
        return Err(Failure::resource(format!(
            "N={n} exceeds cap {cap_limit} ({MAX_N_ENV})"
        )));
    }
    Ok(())
}
