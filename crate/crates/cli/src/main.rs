//! `expolog`: component-size statistics of exp-log labeled structures.

mod format;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use expolog::cache::{self, CacheKind};
use expolog::enumerate::{largest_table_with, smallest_table_with, Backend, FloatTable, Kind};
use expolog::error::Error;
use expolog::exec::Exec;
use expolog::family::{self, FamilyId};
use expolog::ratios::{self, RatioTable};
use expolog::sampler;
use expolog::specfun::{self, delay, DelayKind};
use expolog::stats::{self, MedianConvention, RowStats};
use serde_json::json;

use format::{fixed, full};

/// Largest `n` whose sequences are written back to the cache (files grow
/// quadratically in `n`).
const CACHE_MAX_N: usize = 1500;
/// Largest table written back to the cache.
const TABLE_CACHE_MAX_N: usize = 300;

#[derive(Parser, Debug)]
#[command(
    name = "expolog",
    version,
    about = "Component sizes of exp-log labeled structures"
)]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Neither read nor write the on-disk sequence cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of n-objects b_n, or connected ones c_n.
    Counts {
        #[arg(long)]
        family: FamilyId,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        connected: bool,
        /// Print every index 0..=n as CSV.
        #[arg(long)]
        all: bool,
    },
    /// A row (or the whole triangle) of L_{k,n} or S_{k,n}.
    Table {
        #[arg(long)]
        family: FamilyId,
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
        #[arg(long, default_value = "auto")]
        backend: Backend,
        /// All rows 1..=n instead of row n.
        #[arg(long)]
        triangle: bool,
    },
    /// Normalized largest/smallest statistics of row n.
    Stats {
        #[arg(long)]
        family: FamilyId,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "auto")]
        backend: Backend,
        /// lower = max{k: CDF<1/2} (published tables), upper = min{k: CDF>=1/2},
        /// strict = min{k: CDF>1/2}.
        #[arg(long, default_value = "lower")]
        median: MedianConvention,
        /// 17 significant digits instead of the published column widths.
        #[arg(long)]
        full: bool,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
    /// Special functions and limiting constants.
    Specfun {
        #[command(subcommand)]
        func: Specfun,
    },
    /// Smooth/rough convergence ratios and their limits.
    Ratio(RatioArgs),
    /// Monte Carlo estimates from uniformly sampled partitions.
    Sample {
        #[arg(long)]
        family: FamilyId,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
}

#[derive(Subcommand, Debug)]
enum Specfun {
    /// Generalized Dickman function rho_a(x).
    #[command(allow_negative_numbers = true)]
    Rho {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Generalized Buchstab function Omega_a(x), or omega_A(x) with --family.
    #[command(allow_negative_numbers = true)]
    Omega {
        #[arg(long, default_value_t = 1.0, conflicts_with = "family")]
        a: f64,
        #[arg(long)]
        family: Option<FamilyId>,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Exponential integral E_1(x).
    #[command(name = "E", allow_negative_numbers = true)]
    E {
        #[arg(long)]
        x: f64,
    },
    /// Limiting moments LG_a(r, h) and SG_a(r, h).
    #[command(allow_negative_numbers = true)]
    Moment {
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        h: u32,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// A named constant, or all of them with --list.
    Constant {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
struct RatioArgs {
    /// 5 = smooth, 6 = connectedness, 7 = rough, 8 = connected over smooth;
    /// comma-separated for several.
    #[arg(long, value_delimiter = ',', required = true)]
    table: Vec<u8>,
    #[arg(long)]
    family: FamilyId,
    /// Comma-separated; with --sweep defaults to 100,200,...,800.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Comma-separated; with --sweep defaults to 2,3,4,5.
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    /// Print an m-by-x matrix with a final limit row.
    #[arg(long)]
    sweep: bool,
    /// Round to the digits of the published tables.
    #[arg(long)]
    reproduce: bool,
    #[arg(long, default_value = "auto")]
    backend: Backend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

struct Ctx {
    exec: Exec,
    cache_dir: Option<PathBuf>,
}

impl Ctx {
    /// Seeds the sequence memo from the cache; returns the cached length.
    fn warm(&self, f: FamilyId) -> usize {
        let Some(dir) = &self.cache_dir else { return 0 };
        match cache::load_memo(dir, f) {
            Ok(n) => n.unwrap_or(0),
            Err(e) => {
                eprintln!("warning: ignoring cache: {e}");
                0
            }
        }
    }

    /// Writes the sequences back if they grew past what was cached.
    fn persist(&self, f: FamilyId, cached: usize, n: usize) {
        let Some(dir) = &self.cache_dir else { return };
        let n = n.min(CACHE_MAX_N);
        if n > cached {
            if let Err(e) = cache::store_memo(dir, f, n) {
                eprintln!("warning: could not write cache: {e}");
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        exec: if cli.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        },
        cache_dir: (!cli.no_cache).then(cache::cache_dir),
    };
    match run(&ctx, cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Tolerance { .. } => 3,
        Error::Domain(_) | Error::OutOfRange { .. } | Error::NoObjects { .. } => 2,
        _ => 1,
    }
}

type Out = Result<String, Error>;

fn run(ctx: &Ctx, cmd: Command) -> Out {
    match cmd {
        Command::Counts {
            family,
            n,
            connected,
            all,
        } => counts(ctx, family, n, connected, all),
        Command::Table {
            family,
            kind,
            n,
            format,
            backend,
            triangle,
        } => table(ctx, family, kind, n, format, backend, triangle),
        Command::Stats {
            family,
            n,
            backend,
            median,
            full,
            format,
        } => stats_cmd(ctx, family, n, backend, median, full, format),
        Command::Specfun { func } => specfun_cmd(func),
        Command::Ratio(args) => ratio_cmd(ctx, args),
        Command::Sample {
            family,
            n,
            trials,
            seed,
            format,
        } => sample_cmd(ctx, family, n, trials, seed, format),
    }
}

fn counts(ctx: &Ctx, f: FamilyId, n: usize, connected: bool, all: bool) -> Out {
    if connected && n == 0 {
        return Err(Error::Domain("c_n needs n >= 1".into()));
    }
    let cached = ctx.warm(f);
    let values = if connected {
        family::connected_counts(f, n)
    } else {
        family::total_counts(f, n)
    };
    ctx.persist(f, cached, n);
    let name = if connected { "c_n" } else { "b_n" };
    if !all {
        return Ok(format!("{}\n", values[n]));
    }
    let mut out = format!("n,{name}\n");
    let start = usize::from(connected);
    for (i, v) in values.iter().enumerate().skip(start) {
        writeln!(out, "{i},{v}").unwrap();
    }
    Ok(out)
}

fn table(
    ctx: &Ctx,
    f: FamilyId,
    kind: Kind,
    n: usize,
    format: OutFormat,
    backend: Backend,
    triangle: bool,
) -> Out {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let rows: Vec<usize> = if triangle { (1..=n).collect() } else { vec![n] };
    let cached = ctx.warm(f);
    let cells: Vec<(usize, Vec<String>)> = if backend.use_exact(n) {
        let t = exact_table(ctx, f, kind, n)?;
        rows.iter()
            .map(|&r| Ok((r, t.row(r)?.iter().map(|v| v.to_string()).collect())))
            .collect::<Result<_, Error>>()?
    } else {
        let t = match kind {
            Kind::Largest => FloatTable::largest(f, n, ctx.exec),
            Kind::Smallest => FloatTable::smallest(f, n, ctx.exec),
        };
        rows.iter()
            .map(|&r| {
                Ok((
                    r,
                    t.distribution(r)?.probs.iter().map(|&p| full(p)).collect(),
                ))
            })
            .collect::<Result<_, Error>>()?
    };
    ctx.persist(f, cached, n);
    let exact = backend.use_exact(n);
    let value_name = if exact { "count" } else { "probability" };
    Ok(match format {
        OutFormat::Csv => {
            let mut out = format!("n,k,{value_name}\n");
            for (r, row) in &cells {
                for (k, v) in row.iter().enumerate() {
                    writeln!(out, "{r},{k},{v}").unwrap();
                }
            }
            out
        }
        OutFormat::Json => {
            let rows: Vec<_> = cells
                .iter()
                .map(|(r, row)| json!({ "n": r, "cells": row }))
                .collect();
            let doc = json!({
                "family": f,
                "kind": kind,
                "exact": exact,
                "rows": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    })
}

/// Exact table up to `n`, read from or written to the cache when small.
fn exact_table(
    ctx: &Ctx,
    f: FamilyId,
    kind: Kind,
    n: usize,
) -> Result<expolog::enumerate::CountTable, Error> {
    let dir = ctx.cache_dir.as_ref().filter(|_| n <= TABLE_CACHE_MAX_N);
    if let Some(dir) = dir {
        if cache::cache_path(dir, f, CacheKind::Table(kind)).exists() {
            match cache::read_table(dir, f, kind) {
                Ok(t) if t.max_n() >= n => return Ok(t),
                Ok(_) => {}
                Err(e) => eprintln!("warning: ignoring cache: {e}"),
            }
        }
    }
    let t = match kind {
        Kind::Largest => largest_table_with(f, n, ctx.exec)?,
        Kind::Smallest => smallest_table_with(f, n, ctx.exec)?,
    };
    if let Some(dir) = dir {
        if let Err(e) = cache::write_table(dir, &t) {
            eprintln!("warning: could not write cache: {e}");
        }
    }
    Ok(t)
}

const STATS_HEADER: &str = "Lmu_tilde,Lsigma2_tilde,Lnu_tilde,Smu_tilde,Ssigma2_tilde";

fn stats_cmd(
    ctx: &Ctx,
    f: FamilyId,
    n: usize,
    backend: Backend,
    median: MedianConvention,
    full_digits: bool,
    format: OutFormat,
) -> Out {
    let cached = ctx.warm(f);
    let (l, s) = stats::row_pair(f, n, backend, ctx.exec)?;
    ctx.persist(f, cached, n);
    Ok(match format {
        OutFormat::Csv => format!(
            "{STATS_HEADER}\n{}\n",
            stats_row(&l, &s, median, full_digits)
        ),
        OutFormat::Json => {
            let doc = json!({
                "family": f,
                "n": n,
                "exact": backend.use_exact(n),
                "largest": l,
                "smallest": s,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    })
}

/// The five published columns. The smallest-component spread column is the
/// scaled second moment.
fn stats_row(l: &RowStats, s: &RowStats, median: MedianConvention, full_digits: bool) -> String {
    let cols = [
        l.normalized_mean,
        l.table_spread(),
        l.normalized_median_by(median),
        s.normalized_mean,
        s.table_spread(),
    ];
    let decimals = [6, 6, 4, 6, 6];
    cols.iter()
        .zip(decimals)
        .map(|(&v, d)| if full_digits { full(v) } else { fixed(v, d) })
        .collect::<Vec<_>>()
        .join(",")
}

fn tolerance_check(err: f64, tol: f64) -> Result<(), Error> {
    if err > tol {
        Err(Error::Tolerance {
            requested: tol,
            achieved: err,
        })
    } else {
        Ok(())
    }
}

fn specfun_cmd(func: Specfun) -> Out {
    let value_err = |v: f64, e: f64| format!("value,abs_err\n{},{}\n", full(v), format::sig(e, 3));
    match func {
        Specfun::Rho { a, x, tol } => {
            let (v, e) = delay_eval(DelayKind::Rho, a, x)?;
            tolerance_check(e, tol)?;
            Ok(value_err(v, e))
        }
        Specfun::Omega {
            a,
            family: None,
            x,
            tol,
        } => {
            let (v, e) = delay_eval(DelayKind::Omega, a, x)?;
            tolerance_check(e, tol)?;
            Ok(value_err(v, e))
        }
        Specfun::Omega {
            family: Some(f),
            x,
            tol,
            ..
        } => {
            let a = f.spec().a.value();
            let (_, e) = delay_eval(DelayKind::Omega, a, x)?;
            let scale = f.spec().kappa / x.powf(a);
            tolerance_check(e * scale, tol)?;
            Ok(value_err(specfun::omega_family(f, x)?, e * scale))
        }
        Specfun::E { x } => {
            let v = specfun::exp_integral_e(x)?;
            Ok(value_err(v, 4.0 * f64::EPSILON * v))
        }
        Specfun::Moment { kind, a, r, h, tol } => {
            let q = match kind {
                Kind::Largest => specfun::moment_largest(a, r, h, tol)?,
                Kind::Smallest => specfun::moment_smallest(a, r, h as f64, tol)?,
            };
            tolerance_check(q.abs_err, tol)?;
            Ok(value_err(q.value, q.abs_err))
        }
        Specfun::Constant { name, list, tol } => {
            let entries = if list {
                specfun::constants()
            } else {
                let name = name.unwrap();
                vec![specfun::constant(&name)
                    .ok_or_else(|| Error::Domain(format!("unknown constant `{name}`")))?]
            };
            let mut out = String::from("name,value,abs_err,reference,formula\n");
            for c in entries {
                let q = c.evaluate(tol)?;
                tolerance_check(q.abs_err, tol)?;
                writeln!(
                    out,
                    "{},{},{},{},\"{}\"",
                    c.name,
                    full(q.value),
                    format::sig(q.abs_err, 3),
                    c.reference,
                    c.formula
                )
                .unwrap();
            }
            Ok(out)
        }
    }
}

fn delay_eval(kind: DelayKind, a: f64, x: f64) -> Result<(f64, f64), Error> {
    if !a.is_finite() || a <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "need a > 0 and finite x, got a = {a}, x = {x}"
        )));
    }
    delay::piecewise(kind, a, x)?.eval_with_err(x)
}

fn ratio_cmd(ctx: &Ctx, args: RatioArgs) -> Out {
    let tables = args
        .table
        .iter()
        .map(|&t| RatioTable::from_id(t))
        .collect::<Result<Vec<_>, Error>>()?;
    let f = args.family;
    let (m_list, x_list) = if args.sweep {
        let m = if args.m.is_empty() {
            (1..=8).map(|i| 100 * i).collect()
        } else {
            args.m
        };
        let x = if args.x.is_empty() {
            vec![2.0, 3.0, 4.0, 5.0]
        } else {
            args.x
        };
        (m, x)
    } else {
        if args.m.is_empty() || args.x.is_empty() {
            return Err(Error::Domain(
                "--m and --x are required without --sweep".into(),
            ));
        }
        (args.m, args.x)
    };
    let cached = ctx.warm(f);
    let mut out = String::new();
    if args.sweep {
        let head: Vec<String> = x_list.iter().map(|x| format!("x={x}")).collect();
        writeln!(out, "table,m,{}", head.join(",")).unwrap();
    } else {
        out.push_str("table,family,m,x,n,finite,limit,gap,exact\n");
    }
    let mut n_max = 0;
    for table in tables {
        let sweep = ratios::table_sweep(table, f, &m_list, &x_list, args.backend, ctx.exec)?;
        n_max = sweep
            .rows
            .iter()
            .flatten()
            .map(|r| r.n)
            .fold(n_max, usize::max);
        let show = |x: f64, v: f64| {
            if args.reproduce {
                table.format_published(x, v)
            } else {
                full(v)
            }
        };
        if args.sweep {
            for row in &sweep.rows {
                let cells: Vec<String> = row.iter().map(|r| show(r.x, r.finite_value)).collect();
                writeln!(out, "{table},{},{}", row[0].m, cells.join(",")).unwrap();
            }
            let lim: Vec<String> = x_list
                .iter()
                .zip(&sweep.limits)
                .map(|(&x, &l)| show(x, l))
                .collect();
            writeln!(out, "{table},inf,{}", lim.join(",")).unwrap();
        } else {
            for r in sweep.rows.iter().flatten() {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    table,
                    f,
                    r.m,
                    r.x,
                    r.n,
                    show(r.x, r.finite_value),
                    show(r.x, r.limit_value),
                    format::sig(r.gap, 6),
                    r.exact
                )
                .unwrap();
            }
        }
    }
    ctx.persist(f, cached, n_max);
    Ok(out)
}

fn sample_cmd(
    ctx: &Ctx,
    f: FamilyId,
    n: usize,
    trials: usize,
    seed: u64,
    format: OutFormat,
) -> Out {
    let cached = ctx.warm(f);
    let st = sampler::monte_carlo_stats(f, n, trials, seed, ctx.exec)?;
    ctx.persist(f, cached, n);
    Ok(match format {
        OutFormat::Csv => {
            let mut out = String::from(
                "stat,mean,std_err,variance,median,normalized_mean,normalized_mean_se,normalized_second_moment\n",
            );
            for (name, s) in [("largest", &st.largest), ("smallest", &st.smallest)] {
                writeln!(
                    out,
                    "{name},{},{},{},{},{},{},{}",
                    full(s.mean),
                    full(s.std_err),
                    full(s.variance),
                    s.median,
                    full(s.normalized_mean),
                    full(s.normalized_mean_se),
                    full(s.normalized_second_moment)
                )
                .unwrap();
            }
            out
        }
        OutFormat::Json => format!("{}\n", serde_json::to_string_pretty(&st).unwrap()),
    })
}
