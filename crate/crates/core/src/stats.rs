//! Means, variances and medians of table rows, with the normalizations of
//! the published tables.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::dd::CompensatedSum;
use crate::enumerate::bigratio::ratio_to_f64;
use crate::enumerate::{
    largest_table_with, smallest_table_with, Backend, CountTable, FloatTable, Kind,
    ScaledDistribution, DEFAULT_FLOAT_TOL,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::{ExpLogType, FamilyId};
use crate::specfun::{self, QuadratureResult};

/// Statistics of one row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowStats {
    pub family: FamilyId,
    pub kind: Kind,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// `Σ k² p_k`. The published smallest-component columns list this
    /// (scaled) rather than the variance; the two agree in the limit.
    pub second_moment: f64,
    /// `min{k : P(size ≤ k) ≥ 1/2}`.
    pub median: usize,
    /// `min{k : P(size ≤ k) > 1/2}`; differs from `median` only on exact ties.
    pub median_strict: usize,
    /// `max{k : P(size ≤ k) < 1/2}`, one below `median`. This is the
    /// convention that reproduces the published median columns.
    pub median_lower: usize,
    pub normalized_mean: f64,
    pub normalized_variance: f64,
    pub normalized_second_moment: f64,
    pub normalized_median: f64,
    pub normalized_median_lower: f64,
    /// Relative error bound on mean and variance (0 for exact rows up to rounding).
    pub err_bound: f64,
}

impl RowStats {
    /// Whether `≥ 1/2` and `> 1/2` disagree on this row (the CDF hits 1/2 exactly).
    pub fn median_ambiguous(&self) -> bool {
        self.median != self.median_strict
    }

    pub fn median_by(&self, convention: MedianConvention) -> usize {
        match convention {
            MedianConvention::AtLeastHalf => self.median,
            MedianConvention::AboveHalf => self.median_strict,
            MedianConvention::BelowHalf => self.median_lower,
        }
    }

    pub fn normalized_median_by(&self, convention: MedianConvention) -> f64 {
        self.median_by(convention) as f64 / self.n as f64
    }

    /// The spread column as printed in the published tables: variance for
    /// the largest component, second moment for the smallest.
    pub fn table_spread(&self) -> f64 {
        match self.kind {
            Kind::Largest => self.normalized_variance,
            Kind::Smallest => self.normalized_second_moment,
        }
    }
}

/// Which integer is reported as the median.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MedianConvention {
    /// `max{k : CDF(k) < 1/2}`, matching the published tables.
    #[default]
    BelowHalf,
    /// `min{k : CDF(k) ≥ 1/2}`.
    AtLeastHalf,
    /// `min{k : CDF(k) > 1/2}`.
    AboveHalf,
}

impl std::str::FromStr for MedianConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" | "below" => Ok(MedianConvention::BelowHalf),
            "upper" | "at-least" => Ok(MedianConvention::AtLeastHalf),
            "strict" | "above" => Ok(MedianConvention::AboveHalf),
            _ => Err(Error::Domain(format!(
                "unknown median convention {s:?} (lower, upper, strict)"
            ))),
        }
    }
}

/// Either source of a row.
#[derive(Debug, Clone, Copy)]
pub enum RowSource<'a> {
    Exact(&'a CountTable, usize),
    Float(&'a ScaledDistribution),
}

/// Scalings `(mean, variance, median)` for a row of size `n`.
///
/// Largest: `n`, `n²`, `n`. Smallest: mean by `ln n` when `a = 1` and by
/// `n^{1-a}` otherwise, variance by `n^{2-a}`, median by `n`.
pub fn scalings(kind: Kind, a: ExpLogType, n: usize) -> (f64, f64, f64) {
    let nf = n as f64;
    match kind {
        Kind::Largest => (nf, nf * nf, nf),
        Kind::Smallest => {
            let av = a.value();
            let mean = if a == ExpLogType::ONE {
                nf.ln()
            } else {
                nf.powf(1.0 - av)
            };
            (mean, nf.powf(2.0 - av), nf)
        }
    }
}

pub fn row_stats(source: RowSource<'_>) -> Result<RowStats> {
    match source {
        RowSource::Exact(table, n) => exact_stats(table, n),
        RowSource::Float(dist) => float_stats(dist),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    family: FamilyId,
    kind: Kind,
    n: usize,
    mean: f64,
    variance: f64,
    second_moment: f64,
    medians: (usize, usize),
    err_bound: f64,
) -> RowStats {
    let (sm, sv, sd) = scalings(kind, family.exp_log_type(), n);
    let lower = medians.0.saturating_sub(1);
    RowStats {
        family,
        kind,
        n,
        mean,
        variance,
        second_moment,
        median: medians.0,
        median_strict: medians.1,
        median_lower: lower,
        // a row with n = 1 has ln n = 0; the scaled mean is then undefined
        normalized_mean: mean / sm,
        normalized_variance: variance / sv,
        normalized_second_moment: second_moment / sv,
        normalized_median: medians.0 as f64 / sd,
        normalized_median_lower: lower as f64 / sd,
        err_bound,
    }
}

fn exact_stats(table: &CountTable, n: usize) -> Result<RowStats> {
    if n == 0 || n > table.max_n() {
        return Err(Error::out_of_range("n", n, 1, table.max_n()));
    }
    let total = table.total(n).clone();
    if total.is_zero() {
        return Err(Error::NoObjects {
            family: table.family(),
            n,
        });
    }
    let row = table.row(n)?;
    let mut s1 = BigInt::zero();
    let mut s2 = BigInt::zero();
    for (k, c) in row.iter().enumerate() {
        let c = BigInt::from(c.clone());
        let k = BigInt::from(k);
        s1 += &k * &c;
        s2 += &k * &k * &c;
    }
    let b = BigInt::from(total.clone());
    // n² Var = (Σk² c)·b − (Σk c)²  over b²
    let var_num = (&s2 * &b - &s1 * &s1)
        .to_biguint()
        .expect("variance numerator is nonnegative");
    let mean = ratio_to_f64(&s1.to_biguint().expect("nonnegative"), &total);
    let variance = ratio_to_f64(&var_num, &(&total * &total));
    let second_moment = ratio_to_f64(&s2.to_biguint().expect("nonnegative"), &total);

    let twice = |k: usize| -> Result<num_bigint::BigUint> { Ok(table.prefix(k, n)? * 2u32) };
    let mut median = None;
    let mut strict = None;
    for k in 0..=n {
        let t = twice(k)?;
        if median.is_none() && t >= total {
            median = Some(k);
        }
        if t > total {
            strict = Some(k);
            break;
        }
    }
    let median = median.expect("cdf reaches 1");
    Ok(finish(
        table.family(),
        table.kind(),
        n,
        mean,
        variance,
        second_moment,
        (median, strict.unwrap_or(n)),
        2.0 * f64::EPSILON,
    ))
}

fn float_stats(dist: &ScaledDistribution) -> Result<RowStats> {
    let n = dist.n;
    if n == 0 {
        return Err(Error::out_of_range("n", 0, 1, usize::MAX));
    }
    let total = dist.total();
    if (total - 1.0).abs() > dist.err_bound.max(1e-12) * 4.0 {
        return Err(Error::Tolerance {
            requested: dist.err_bound,
            achieved: (total - 1.0).abs(),
        });
    }
    let mean: f64 = dist
        .probs
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p)
        .collect::<CompensatedSum>()
        .value();
    let variance: f64 = dist
        .probs
        .iter()
        .enumerate()
        .map(|(k, p)| (k as f64 - mean).powi(2) * p)
        .collect::<CompensatedSum>()
        .value();
    let second_moment: f64 = dist
        .probs
        .iter()
        .enumerate()
        .map(|(k, p)| (k * k) as f64 * p)
        .collect::<CompensatedSum>()
        .value();
    let mut acc = CompensatedSum::default();
    let mut median = None;
    let mut strict = n;
    for (k, p) in dist.probs.iter().enumerate() {
        acc.add(*p);
        let c = acc.value();
        if median.is_none() && c >= 0.5 {
            median = Some(k);
        }
        if c > 0.5 {
            strict = k;
            break;
        }
    }
    Ok(finish(
        dist.family,
        dist.kind,
        n,
        mean,
        variance.max(0.0),
        second_moment,
        (median.unwrap_or(n), strict),
        dist.err_bound + (n as f64) * f64::EPSILON,
    ))
}

/// Largest- and smallest-component statistics of row `n`, computed with
/// `backend`. Float rows must meet [`DEFAULT_FLOAT_TOL`].
pub fn row_pair(
    family: FamilyId,
    n: usize,
    backend: Backend,
    exec: Exec,
) -> Result<(RowStats, RowStats)> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0, 1, usize::MAX));
    }
    let pick = |kind: Kind| -> Result<RowStats> {
        if backend.use_exact(n) {
            let table = match kind {
                Kind::Largest => largest_table_with(family, n, exec)?,
                Kind::Smallest => smallest_table_with(family, n, exec)?,
            };
            if table.total(n).is_zero() {
                return Err(Error::NoObjects { family, n });
            }
            row_stats(RowSource::Exact(&table, n))
        } else {
            let table = match kind {
                Kind::Largest => FloatTable::largest(family, n, exec),
                Kind::Smallest => FloatTable::smallest(family, n, exec),
            };
            let dist = table.distribution(n)?;
            let achieved = dist.err_bound.max((dist.total() - 1.0).abs());
            if achieved > DEFAULT_FLOAT_TOL {
                return Err(Error::Tolerance {
                    requested: DEFAULT_FLOAT_TOL,
                    achieved,
                });
            }
            row_stats(RowSource::Float(&dist))
        }
    };
    Ok((pick(Kind::Largest)?, pick(Kind::Smallest)?))
}

/// Limits of the normalized statistics for a family and kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitConstants {
    pub family: FamilyId,
    pub kind: Kind,
    pub mean: QuadratureResult,
    pub variance: QuadratureResult,
    /// Only the largest component has a non-degenerate median limit.
    pub median: Option<f64>,
}

pub fn limit_constants(family: FamilyId, kind: Kind, tol: f64) -> Result<LimitConstants> {
    let spec = family.spec();
    let a = spec.a.value();
    let (mean, variance, median) = match kind {
        Kind::Largest => {
            let m1 = specfun::moment_largest(a, 1, 1, tol / 4.0)?;
            let m2 = specfun::moment_largest(a, 1, 2, tol / 4.0)?;
            let var = QuadratureResult {
                value: m2.value - m1.value * m1.value,
                abs_err: m2.abs_err + 2.0 * m1.value * m1.abs_err,
                truncation: m2.truncation,
            };
            (m1, var, Some(specfun::median_limit(a)?))
        }
        Kind::Smallest => {
            let s = spec.shortest_scale;
            let m1 = specfun::moment_smallest(a, 1, 1.0, tol / s)?.scale(s);
            let m2 = specfun::moment_smallest(a, 1, 2.0, tol / s)?.scale(s);
            (m1, m2, None)
        }
    };
    Ok(LimitConstants {
        family,
        kind,
        mean,
        variance,
        median,
    })
}

/// Mean of the smallest component of a uniform permutation obtained by
/// mixing derangements (no fixed points) with the `n! − d_n` permutations
/// whose smallest cycle is 1, divided by `ln n`.
pub fn derangement_mixture(smallest_mean_derange: f64, n: usize) -> f64 {
    let d_over_fact = derange_fraction(n);
    (smallest_mean_derange * d_over_fact + (1.0 - d_over_fact)) / (n as f64).ln()
}

/// `d_n / n!` from the alternating series.
fn derange_fraction(n: usize) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..=n.min(40) {
        term *= -1.0 / k as f64;
        sum += term;
    }
    sum
}
