//! Normalized floating-point tables: `L_{k,n}/b_n` and `S_{k,n}/b_n`.
//!
//! The same recursions as the exact backend, with every weight
//! `n! c_k^j b_{n-kj} / (j! (k!)^j (n-kj)! b_n)` formed in double-double log
//! space and exponentiated once. All summands are nonnegative, so the relative
//! error grows by a few ulps per recursion level; the bound carried with each
//! row is `n * ROW_ERR_STEP`.

use super::logs::LogTables;
use super::{singleton_only_count, Kind};
use crate::dd::{CompensatedSum, DoubleDouble};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::FamilyId;

/// Default accepted relative error of a floating row.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

/// Relative error added per recursion level: exp (2 ulp), product with the
/// inner cumulative (1 ulp), compensated summations (2 ulp), plus slack.
const ROW_ERR_STEP: f64 = 8.0 * f64::EPSILON;

/// One normalized row: `probs[k]` for `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDistribution {
    pub family: FamilyId,
    pub kind: Kind,
    pub n: usize,
    pub probs: Vec<f64>,
    pub err_bound: f64,
}

impl ScaledDistribution {
    pub fn total(&self) -> f64 {
        self.probs
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }
}

#[inline]
pub(crate) fn exp_dd(x: DoubleDouble) -> f64 {
    x.hi.exp() * (1.0 + x.lo)
}

/// Normalized cumulative rows, prefix sums for largest and suffix sums for
/// smallest (same layout as the exact [`super::CountTable`]).
#[derive(Debug, Clone)]
pub struct FloatTable {
    family: FamilyId,
    kind: Kind,
    max_n: usize,
    cum: Vec<Vec<f64>>,
    err: Vec<f64>,
}

impl FloatTable {
    pub fn largest(family: FamilyId, max_n: usize, exec: Exec) -> Self {
        build(family, Kind::Largest, max_n, exec)
    }

    pub fn smallest(family: FamilyId, max_n: usize, exec: Exec) -> Self {
        build(family, Kind::Smallest, max_n, exec)
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `P(size <= k)` in row `n`.
    pub fn cdf(&self, k: usize, n: usize) -> f64 {
        let row = &self.cum[n];
        match self.kind {
            Kind::Largest => row[k.min(n)],
            Kind::Smallest => row[0] - row[(k + 1).min(n + 1)],
        }
    }

    /// `P(size >= k)` in row `n`.
    pub fn tail(&self, k: usize, n: usize) -> f64 {
        let row = &self.cum[n];
        match self.kind {
            Kind::Largest if k == 0 => row[n],
            Kind::Largest => row[n] - row[(k - 1).min(n)],
            Kind::Smallest => row[k.min(n + 1)],
        }
    }

    pub fn distribution(&self, n: usize) -> Result<ScaledDistribution> {
        if n == 0 || n > self.max_n {
            return Err(Error::out_of_range("n", n, 1, self.max_n));
        }
        if self.err[n].is_nan() {
            return Err(Error::NoObjects {
                family: self.family,
                n,
            });
        }
        let row = &self.cum[n];
        let probs = match self.kind {
            Kind::Largest => (0..=n)
                .map(|k| if k == 0 { row[0] } else { row[k] - row[k - 1] })
                .collect(),
            Kind::Smallest => (0..=n).map(|k| row[k] - row[k + 1]).collect(),
        };
        Ok(ScaledDistribution {
            family: self.family,
            kind: self.kind,
            n,
            probs,
            err_bound: self.err[n],
        })
    }
}

fn build(family: FamilyId, kind: Kind, max_n: usize, exec: Exec) -> FloatTable {
    let logs = LogTables::new(family, max_n.max(1));
    let singleton = singleton_only_count(family) == 1;
    let mut cum: Vec<Vec<f64>> = Vec::with_capacity(max_n + 1);
    let mut err = Vec::with_capacity(max_n + 1);
    match kind {
        Kind::Largest => cum.push(vec![1.0]),
        Kind::Smallest => cum.push(vec![if singleton { 1.0 } else { 0.0 }, 0.0]),
    }
    err.push(0.0);

    for n in 1..=max_n {
        let Some(ln_bn) = logs.ln_total[n] else {
            cum.push(vec![0.0; n + if kind == Kind::Smallest { 2 } else { 1 }]);
            err.push(f64::NAN);
            continue;
        };
        let prev = &cum;
        let logs = &logs;
        let ln_nfact = logs.ln_fact[n];
        let cells: Vec<f64> = exec.map_range(0..n + 1, |k| {
            if k == 0 {
                return 0.0;
            }
            if kind == Kind::Largest && k == 1 {
                return if singleton { exp_dd(-ln_bn) } else { 0.0 };
            }
            let Some(egf) = logs.ln_connected_egf(k) else {
                return 0.0;
            };
            let mut acc = CompensatedSum::default();
            for j in 1..=n / k {
                let r = n - k * j;
                let Some(ln_br) = logs.ln_total[r] else {
                    continue;
                };
                let inner = match kind {
                    Kind::Largest => {
                        let m = (k - 1).min(r);
                        if m >= 1 {
                            prev[r][m]
                        } else {
                            prev[r][1.min(r)]
                        }
                    }
                    Kind::Smallest if r == 0 => 1.0,
                    Kind::Smallest if k + 1 > r => 0.0,
                    Kind::Smallest => prev[r][k + 1],
                };
                if inner == 0.0 {
                    continue;
                }
                let lw =
                    ln_nfact - logs.ln_fact[r] - logs.ln_fact[j] + egf.mul_f64(j as f64) + ln_br
                        - ln_bn;
                acc.add(exp_dd(lw) * inner);
            }
            acc.value()
        });
        cum.push(cumulate(kind, &cells));
        let prev_err = err
            .iter()
            .copied()
            .filter(|e: &f64| !e.is_nan())
            .fold(0.0, f64::max);
        err.push(prev_err + ROW_ERR_STEP);
    }
    FloatTable {
        family,
        kind,
        max_n,
        cum,
        err,
    }
}

fn cumulate(kind: Kind, cells: &[f64]) -> Vec<f64> {
    match kind {
        Kind::Largest => {
            let mut acc = CompensatedSum::default();
            cells
                .iter()
                .map(|&c| {
                    acc.add(c);
                    acc.value()
                })
                .collect()
        }
        Kind::Smallest => {
            let mut out = vec![0.0; cells.len() + 1];
            let mut acc = CompensatedSum::default();
            for k in (0..cells.len()).rev() {
                acc.add(cells[k]);
                out[k] = acc.value();
            }
            out
        }
    }
}

fn row_float(family: FamilyId, kind: Kind, n: usize, tol: f64) -> Result<ScaledDistribution> {
    if n == 0 {
        return Err(Error::out_of_range("n", n, 1, usize::MAX));
    }
    let table = build(family, kind, n, Exec::default());
    let dist = table.distribution(n)?;
    if dist.err_bound > tol || (dist.total() - 1.0).abs() > tol {
        return Err(Error::Tolerance {
            requested: tol,
            achieved: dist.err_bound.max((dist.total() - 1.0).abs()),
        });
    }
    Ok(dist)
}

/// Normalized largest-component distribution of row `n`.
pub fn largest_row_float(family: FamilyId, n: usize) -> Result<ScaledDistribution> {
    row_float(family, Kind::Largest, n, DEFAULT_FLOAT_TOL)
}

/// Normalized smallest-component distribution of row `n`.
pub fn smallest_row_float(family: FamilyId, n: usize) -> Result<ScaledDistribution> {
    row_float(family, Kind::Smallest, n, DEFAULT_FLOAT_TOL)
}
