//! Convergence ratios for smooth and rough objects and their limits.
//!
//! | table | finite ratio                  | limit            |
//! |-------|-------------------------------|------------------|
//! | 5     | `b_{n,m}^≤ / b_n`             | `ρ_a(x)`         |
//! | 6     | `c_n / b_{n,m}^≥`             | `1 / Ω_a(x)`     |
//! | 7     | `m^a b_{n,m}^≥ / b_n`         | `ω_A(x)`         |
//! | 8     | `n^a c_n / b_{n,m}^≤`         | `κ_A / ρ_a(x)`   |
//!
//! with `n = ⌊x m⌋`, `b^≤` counting objects whose components all have at
//! most `m` nodes and `b^≥` those whose components all have at least `m`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::Serialize;

use crate::enumerate::bigratio::ratio_to_f64;
use crate::enumerate::direct::{threshold_counts_exact, threshold_probs_float, Threshold};
use crate::enumerate::float::exp_dd;
use crate::enumerate::logs::LogTables;
use crate::enumerate::Backend;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::{self, BigCount, FamilyId};
use crate::specfun;

/// Largest `n` for which [`Backend::Auto`] uses exact counts here. The
/// single-threshold recursion costs `O(n m)` big-integer products, so this
/// is well above the triangle-table threshold.
pub const RATIO_EXACT_MAX: usize = 4000;

const LIMIT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioTable {
    Smooth,
    Connectedness,
    Rough,
    ConnectedOverSmooth,
}

impl RatioTable {
    pub const ALL: [RatioTable; 4] = [
        RatioTable::Smooth,
        RatioTable::Connectedness,
        RatioTable::Rough,
        RatioTable::ConnectedOverSmooth,
    ];

    pub fn id(self) -> u8 {
        match self {
            RatioTable::Smooth => 5,
            RatioTable::Connectedness => 6,
            RatioTable::Rough => 7,
            RatioTable::ConnectedOverSmooth => 8,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        RatioTable::ALL
            .into_iter()
            .find(|t| t.id() == id)
            .ok_or_else(|| Error::Domain(format!("no ratio table {id} (expected 5, 6, 7 or 8)")))
    }

    fn threshold(self, m: usize) -> Threshold {
        match self {
            RatioTable::Smooth | RatioTable::ConnectedOverSmooth => Threshold::AtMost(m),
            RatioTable::Connectedness | RatioTable::Rough => Threshold::AtLeast(m),
        }
    }

    /// The `m → ∞` limit at `x`.
    pub fn limit(self, family: FamilyId, x: f64) -> Result<f64> {
        let spec = family.spec();
        let a = spec.a.value();
        Ok(match self {
            RatioTable::Smooth => specfun::dickman_rho(a, x, LIMIT_TOL)?,
            RatioTable::Connectedness => 1.0 / specfun::buchstab_omega(a, x, LIMIT_TOL)?,
            RatioTable::Rough => specfun::omega_family(family, x)?,
            RatioTable::ConnectedOverSmooth => spec.kappa / specfun::dickman_rho(a, x, LIMIT_TOL)?,
        })
    }

    /// Formats a value with the digits used in the published tables.
    pub fn format_published(self, x: f64, value: f64) -> String {
        match self {
            RatioTable::Smooth if value < 0.01 => format!("{value:.7}"),
            RatioTable::Smooth => format!("{value:.6}"),
            RatioTable::Connectedness if x == 2.0 => format!("{value:.3}"),
            RatioTable::Connectedness => format!("{value:.6}"),
            RatioTable::Rough => format!("{value:.5}"),
            RatioTable::ConnectedOverSmooth => {
                // six significant digits
                let int_digits = if value >= 1.0 {
                    value.log10().floor() as i32 + 1
                } else {
                    1
                };
                let decimals = (6 - int_digits).max(0) as usize;
                format!("{value:.decimals$}")
            }
        }
    }
}

impl fmt::Display for RatioTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// One cell of a ratio table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub family: FamilyId,
    pub table: RatioTable,
    pub m: usize,
    pub x: f64,
    pub n: usize,
    pub finite_value: f64,
    pub limit_value: f64,
    pub gap: f64,
    /// Whether `finite_value` comes from exact counts.
    pub exact: bool,
}

fn row_size(m: usize, x: f64) -> Result<usize> {
    if m == 0 {
        return Err(Error::out_of_range("m", 0, 1, usize::MAX));
    }
    if !x.is_finite() || x <= 1.0 {
        return Err(Error::Domain(format!("ratio tables need x > 1, got {x}")));
    }
    Ok((x * m as f64).floor() as usize)
}

type CountKey = (FamilyId, Threshold);

/// Exact threshold counts up to at least `n`, reusing earlier results (tables
/// 5 and 8 share the smooth counts, 6 and 7 the rough ones).
fn memo_counts(family: FamilyId, n: usize, t: Threshold) -> Result<Arc<Vec<BigCount>>> {
    static MEMO: OnceLock<Mutex<HashMap<CountKey, Arc<Vec<BigCount>>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(v) = memo.lock().unwrap().get(&(family, t)) {
        if v.len() > n {
            return Ok(Arc::clone(v));
        }
    }
    let v = Arc::new(threshold_counts_exact(family, n, t)?);
    memo.lock().unwrap().insert((family, t), Arc::clone(&v));
    Ok(v)
}

/// Finite ratios for one `m` and several `n`, sharing one threshold recursion.
fn finite_values(
    table: RatioTable,
    family: FamilyId,
    m: usize,
    ns: &[usize],
    backend: Backend,
) -> Result<(Vec<f64>, bool)> {
    let n_max = ns.iter().copied().max().unwrap_or(m);
    let a = family.spec().a.value();
    let exact = match backend {
        Backend::Auto => n_max <= RATIO_EXACT_MAX,
        other => other.use_exact(n_max),
    };
    let t = table.threshold(m);
    let no_objects = |n| Error::NoObjects { family, n };
    let mut out = Vec::with_capacity(ns.len());
    if exact {
        let counts = memo_counts(family, n_max, t)?;
        let totals = family::total_counts(family, n_max);
        for &n in ns {
            let (b, bm) = (&totals[n], &counts[n]);
            let c = family::connected_count(family, n);
            let v = match table {
                RatioTable::Smooth | RatioTable::Rough => {
                    if b.is_zero() {
                        return Err(no_objects(n));
                    }
                    let r = ratio_to_f64(bm, b);
                    if table == RatioTable::Rough {
                        r * (m as f64).powf(a)
                    } else {
                        r
                    }
                }
                RatioTable::Connectedness | RatioTable::ConnectedOverSmooth => {
                    if bm.is_zero() {
                        return Err(no_objects(n));
                    }
                    let r = ratio_to_f64(&c, bm);
                    if table == RatioTable::ConnectedOverSmooth {
                        r * (n as f64).powf(a)
                    } else {
                        r
                    }
                }
            };
            out.push(v);
        }
    } else {
        let probs = threshold_probs_float(family, n_max, t)?;
        let logs = LogTables::new(family, n_max);
        for &n in ns {
            let p = probs[n];
            if p.is_nan() {
                return Err(no_objects(n));
            }
            let conn = || -> Result<f64> {
                let lc = logs.ln_connected[n].ok_or_else(|| no_objects(n))?;
                let lb = logs.ln_total[n].ok_or_else(|| no_objects(n))?;
                Ok(exp_dd(lc - lb))
            };
            let v = match table {
                RatioTable::Smooth => p,
                RatioTable::Rough => p * (m as f64).powf(a),
                RatioTable::Connectedness => conn()? / p,
                RatioTable::ConnectedOverSmooth => conn()? / p * (n as f64).powf(a),
            };
            out.push(v);
        }
    }
    Ok((out, exact))
}

/// One cell, computed with the given backend.
pub fn ratio(
    table: RatioTable,
    family: FamilyId,
    m: usize,
    x: f64,
    backend: Backend,
) -> Result<RatioReport> {
    let n = row_size(m, x)?;
    let (values, exact) = finite_values(table, family, m, &[n], backend)?;
    let limit_value = table.limit(family, x)?;
    Ok(RatioReport {
        family,
        table,
        m,
        x,
        n,
        finite_value: values[0],
        limit_value,
        gap: (values[0] - limit_value).abs(),
        exact,
    })
}

/// `b_{⌊xm⌋,m} / b_{⌊xm⌋}` with components of size at most `m`; limit `ρ_a(x)`.
pub fn smooth_ratio(family: FamilyId, m: usize, x: f64) -> Result<RatioReport> {
    ratio(RatioTable::Smooth, family, m, x, Backend::Auto)
}

/// `c_n / b_{n,m}` with components of size at least `m`; limit `1/Ω_a(x)`.
pub fn connectedness_ratio(family: FamilyId, m: usize, x: f64) -> Result<RatioReport> {
    ratio(RatioTable::Connectedness, family, m, x, Backend::Auto)
}

/// `m^a b_{n,m} / b_n` with components of size at least `m`; limit `ω_A(x)`.
pub fn rough_probability_ratio(family: FamilyId, m: usize, x: f64) -> Result<RatioReport> {
    ratio(RatioTable::Rough, family, m, x, Backend::Auto)
}

/// `n^a c_n / b_{n,m}` with components of size at most `m`; limit `κ_A/ρ_a(x)`.
pub fn connected_over_smooth_ratio(family: FamilyId, m: usize, x: f64) -> Result<RatioReport> {
    ratio(RatioTable::ConnectedOverSmooth, family, m, x, Backend::Auto)
}

/// A block of a ratio table: one row per `m` plus the limit row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub table: RatioTable,
    pub family: FamilyId,
    pub xs: Vec<f64>,
    /// `rows[i][j]` is the cell for `m_list[i]`, `xs[j]`.
    pub rows: Vec<Vec<RatioReport>>,
    pub limits: Vec<f64>,
}

/// Evaluates every `(m, x)` pair and the limit row. Rows for different `m`
/// are independent and run in parallel under [`Exec::Parallel`]; the output
/// order is always that of `m_list`.
pub fn table_sweep(
    table: RatioTable,
    family: FamilyId,
    m_list: &[usize],
    x_list: &[f64],
    backend: Backend,
    exec: Exec,
) -> Result<Sweep> {
    let limits = x_list
        .iter()
        .map(|&x| {
            row_size(1, x)?;
            table.limit(family, x)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = exec
        .map_range(0..m_list.len(), |i| -> Result<Vec<RatioReport>> {
            let m = m_list[i];
            let ns = x_list
                .iter()
                .map(|&x| row_size(m, x))
                .collect::<Result<Vec<_>>>()?;
            let (values, exact) = finite_values(table, family, m, &ns, backend)?;
            Ok(values
                .into_iter()
                .zip(x_list.iter().zip(&ns))
                .zip(&limits)
                .map(|((v, (&x, &n)), &l)| RatioReport {
                    family,
                    table,
                    m,
                    x,
                    n,
                    finite_value: v,
                    limit_value: l,
                    gap: (v - l).abs(),
                    exact,
                })
                .collect())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep {
        table,
        family,
        xs: x_list.to_vec(),
        rows,
        limits,
    })
}
