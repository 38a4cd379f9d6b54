//! Monte Carlo oracle: uniform component-size partitions of `n`-objects.
//!
//! In a uniform `n`-object the component holding node 1 has `k` nodes with
//! probability `C(n-1, k-1) c_k b_{n-k} / b_n`, and the rest is a uniform
//! `(n-k)`-object. Repeating the draw on the remainder yields the size multiset
//! of a uniform object.
//!
//! Each draw is an inverse-CDF lookup of a uniform real `U` against the
//! cumulative weights. `U` is generated 64 bits at a time; the float CDF
//! settles the draw unless `U` lies within the float error of a boundary, in
//! which case exact big-integer cumulatives are compared against `U`, reading
//! further bits until the comparison is decided. Draws are therefore exact.
//!
//! Random stream (version 1): trial `t` of a run with seed `s` uses
//! `ChaCha8Rng::seed_from_u64(s)` with `set_stream(t)`, consuming `next_u64`
//! words in draw order.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dd::CompensatedSum;
use crate::enumerate::logs::LogTables;
use crate::enumerate::Kind;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::{self, FamilyId};
use crate::stats::scalings;

/// Version tag of the random stream layout described in the module docs.
pub const STREAM_VERSION: u32 = 1;

const TWO_POW_M64: f64 = 1.0 / 18_446_744_073_709_551_616.0;

/// Component sizes of one sampled object, in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSample {
    pub family: FamilyId,
    pub n: usize,
    pub sizes: Vec<usize>,
}

impl PartitionSample {
    pub fn largest(&self) -> usize {
        self.sizes[0]
    }

    pub fn smallest(&self) -> usize {
        *self.sizes.last().unwrap()
    }
}

/// Precomputed float CDFs for every remainder size up to `n`.
#[derive(Debug)]
pub struct PartitionSampler {
    family: FamilyId,
    n: usize,
    /// `cdf[m][k]`, `k = 0..=m`: probability that the marked component of an
    /// `m`-object has at most `k` nodes.
    cdf: Vec<Vec<f64>>,
    slack: f64,
}

impl PartitionSampler {
    pub fn new(family: FamilyId, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range("n", 0, 1, usize::MAX));
        }
        let logs = LogTables::new(family, n);
        if logs.ln_total[n].is_none() {
            return Err(Error::NoObjects { family, n });
        }
        let cdf = (0..=n)
            .map(|m| {
                let mut acc = CompensatedSum::default();
                let mut row = vec![0.0];
                if logs.ln_total[m].is_none() {
                    return row;
                }
                for k in 1..=m {
                    acc.add(logs.marked_component_prob(m, k));
                    row.push(acc.value());
                }
                row
            })
            .collect();
        Ok(PartitionSampler {
            family,
            n,
            cdf,
            // each probability is good to a few ulps of 1; generous margin
            slack: 64.0 * (n as f64 + 1.0) * f64::EPSILON,
        })
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> PartitionSample {
        let mut sizes = Vec::new();
        let mut rest = self.n;
        while rest > 0 {
            let k = self.draw(rest, rng);
            sizes.push(k);
            rest -= k;
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        PartitionSample {
            family: self.family,
            n: self.n,
            sizes,
        }
    }

    /// Size of the marked component of a uniform `m`-object.
    fn draw<R: RngCore>(&self, m: usize, rng: &mut R) -> usize {
        let word = rng.next_u64();
        let lo = word as f64 * TWO_POW_M64;
        let hi = lo + TWO_POW_M64;
        let row = &self.cdf[m];
        // first k with cdf > lo
        let k = row.partition_point(|&c| c <= lo).max(1);
        if k <= m && row[k - 1] + self.slack < lo && hi + self.slack < row[k] {
            return k;
        }
        exact_draw(self.family, m, word, rng)
    }
}

/// Inverse-CDF draw with exact cumulative counts; `first` holds the leading
/// 64 bits of `U`.
fn exact_draw<R: RngCore>(family: FamilyId, m: usize, first: u64, rng: &mut R) -> usize {
    let b = family::total_counts(family, m);
    let c = family::connected_counts(family, m);
    let mut cum = Vec::with_capacity(m);
    let mut acc = BigUint::zero();
    let mut binom = BigUint::one();
    for k in 1..=m {
        if k > 1 {
            binom = binom * (m - k + 1) / (k - 1);
        }
        acc += &binom * &c[k] * &b[m - k];
        cum.push(acc.clone());
    }
    debug_assert_eq!(cum[m - 1], b[m]);
    // U lies in [num / 2^bits, (num + 1) / 2^bits)
    let mut num = BigUint::from(first);
    let mut bits = 64u64;
    loop {
        let lo = &num * &b[m];
        let hi = (&num + 1u32) * &b[m];
        let undecided = cum.iter().any(|ck| {
            let s = ck << bits;
            lo < s && s < hi
        });
        if !undecided {
            return 1 + cum.iter().position(|ck| (ck << bits) >= hi).unwrap();
        }
        num = (num << 64u32) + rng.next_u64();
        bits += 64;
    }
}

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One uniform partition. Builds the sampler tables each call; use
/// [`PartitionSampler`] for repeated draws.
pub fn sample_partition<R: RngCore>(
    family: FamilyId,
    n: usize,
    rng: &mut R,
) -> Result<PartitionSample> {
    Ok(PartitionSampler::new(family, n)?.sample(rng))
}

/// Sample moments of one statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
    pub std_err: f64,
    pub second_moment: f64,
    /// `min {k : F̂(k) >= 1/2}` of the empirical distribution.
    pub median: usize,
    pub normalized_mean: f64,
    pub normalized_mean_se: f64,
    pub normalized_second_moment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloStats {
    pub family: FamilyId,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub largest: Summary,
    pub smallest: Summary,
}

fn summarize(kind: Kind, family: FamilyId, n: usize, values: &mut [usize]) -> Summary {
    let t = values.len() as f64;
    let mean = values
        .iter()
        .map(|&v| v as f64)
        .collect::<CompensatedSum>()
        .value()
        / t;
    let second_moment = values
        .iter()
        .map(|&v| (v as f64) * (v as f64))
        .collect::<CompensatedSum>()
        .value()
        / t;
    let variance = if values.len() > 1 {
        values
            .iter()
            .map(|&v| (v as f64 - mean).powi(2))
            .collect::<CompensatedSum>()
            .value()
            / (t - 1.0)
    } else {
        0.0
    };
    let std_err = (variance / t).sqrt();
    values.sort_unstable();
    let median = values[values.len().div_ceil(2) - 1];
    let (s_mean, _, s_second) = scalings(kind, family.exp_log_type(), n);
    Summary {
        mean,
        variance,
        std_err,
        second_moment,
        median,
        normalized_mean: mean / s_mean,
        normalized_mean_se: std_err / s_mean,
        normalized_second_moment: second_moment / s_second,
    }
}

/// Largest and smallest component sizes of each trial, in trial order.
pub fn sample_extremes(
    family: FamilyId,
    n: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<(usize, usize)>> {
    if trials == 0 {
        return Err(Error::out_of_range("trials", 0, 1, usize::MAX));
    }
    let sampler = PartitionSampler::new(family, n)?;
    Ok(exec.map_range(0..trials, |t| {
        let p = sampler.sample(&mut trial_rng(seed, t as u64));
        (p.largest(), p.smallest())
    }))
}

/// Means, variances, medians and standard errors of the largest and smallest
/// component sizes over `trials` seeded samples.
pub fn monte_carlo_stats(
    family: FamilyId,
    n: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<MonteCarloStats> {
    let ext = sample_extremes(family, n, trials, seed, exec)?;
    let mut large: Vec<usize> = ext.iter().map(|e| e.0).collect();
    let mut small: Vec<usize> = ext.iter().map(|e| e.1).collect();
    Ok(MonteCarloStats {
        family,
        n,
        trials,
        seed,
        largest: summarize(Kind::Largest, family, n, &mut large),
        smallest: summarize(Kind::Smallest, family, n, &mut small),
    })
}

/// Counts of each value `0..=n` (index = size).
pub fn histogram(values: impl IntoIterator<Item = usize>, n: usize) -> Vec<u64> {
    let mut h = vec![0u64; n + 1];
    for v in values {
        h[v] += 1;
    }
    h
}

/// Pearson chi-square goodness of fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Observations falling in cells of probability zero.
    pub impossible: u64,
}

impl GoodnessOfFit {
    /// Whether the statistic is below the critical value at level `alpha`
    /// and no impossible value was observed.
    pub fn passes(&self, alpha: f64) -> bool {
        self.impossible == 0 && self.p_value > alpha
    }
}

/// Compares observed counts with `probs`. Cells with expected count below 5
/// are pooled with their neighbors (in index order) before testing.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<GoodnessOfFit> {
    if observed.len() != probs.len() {
        return Err(Error::Domain("observed and expected lengths differ".into()));
    }
    let total: u64 = observed.iter().sum();
    let t = total as f64;
    let mut impossible = 0;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pend = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        if p == 0.0 {
            impossible += o;
            continue;
        }
        pend.0 += o as f64;
        pend.1 += p * t;
        if pend.1 >= 5.0 {
            cells.push(pend);
            pend = (0.0, 0.0);
        }
    }
    if pend.1 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += pend.0;
                last.1 += pend.1;
            }
            None => cells.push(pend),
        }
    }
    if cells.len() < 2 {
        return Ok(GoodnessOfFit {
            statistic: 0.0,
            dof: 0,
            p_value: 1.0,
            impossible,
        });
    }
    let statistic = cells.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(GoodnessOfFit {
        statistic,
        dof,
        p_value: dist.sf(statistic),
        impossible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::bigratio::ratio_to_f64;
    use crate::enumerate::exact::{largest_table, smallest_table};

    #[test]
    fn deterministic_streams() {
        let a = sample_extremes(FamilyId::Map, 50, 200, 7, Exec::Parallel).unwrap();
        let b = sample_extremes(FamilyId::Map, 50, 200, 7, Exec::Sequential).unwrap();
        assert_eq!(a, b);
        let c = sample_extremes(FamilyId::Map, 50, 200, 8, Exec::Sequential).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn samples_are_valid() {
        for f in FamilyId::ALL {
            let s = PartitionSampler::new(f, 30).unwrap();
            for t in 0..200 {
                let p = s.sample(&mut trial_rng(1, t));
                assert_eq!(p.sizes.iter().sum::<usize>(), 30);
                assert!(p.sizes.iter().all(|&k| k >= f.min_component()));
            }
        }
        let g = sample_partition(FamilyId::Graph, 3, &mut trial_rng(0, 0)).unwrap();
        assert_eq!(g.sizes, vec![3]);
        assert!(sample_partition(FamilyId::Graph, 2, &mut trial_rng(0, 0)).is_err());
        assert!(sample_partition(FamilyId::Derange, 1, &mut trial_rng(0, 0)).is_err());
    }

    #[test]
    fn exact_path_agrees_with_float_path() {
        // the exact draw must return the same size as the float CDF whenever
        // the float CDF is unambiguous
        let s = PartitionSampler::new(FamilyId::Permute, 12).unwrap();
        let mut rng = trial_rng(3, 0);
        for _ in 0..2000 {
            let word = rng.next_u64();
            let x = word as f64 * TWO_POW_M64;
            let row = &s.cdf[12];
            let k = row.partition_point(|&c| c <= x).max(1);
            let e = exact_draw(FamilyId::Permute, 12, word, &mut rng);
            assert_eq!(k, e);
        }
    }

    #[test]
    fn exact_draw_at_a_boundary() {
        // Map, m = 2: P(k = 1) = 1/4, so U = 1/4 exactly is the boundary and
        // U just below it selects k = 1
        let mut rng = trial_rng(0, 0);
        assert_eq!(exact_draw(FamilyId::Map, 2, 1 << 62, &mut rng), 2);
        assert_eq!(exact_draw(FamilyId::Map, 2, (1 << 62) - 1, &mut rng), 1);
    }

    #[test]
    fn marginals_match_exact_tables() {
        let n = 8;
        let trials = 100_000;
        for f in FamilyId::ALL {
            let ext = sample_extremes(f, n, trials, 11, Exec::Parallel).unwrap();
            let lt = largest_table(f, n).unwrap();
            let st = smallest_table(f, n).unwrap();
            for (table, pick) in [(&lt, 0usize), (&st, 1)] {
                let probs: Vec<f64> = (0..=n)
                    .map(|k| ratio_to_f64(&table.cell(k, n).unwrap(), table.total(n)))
                    .collect();
                let h = histogram(ext.iter().map(|e| if pick == 0 { e.0 } else { e.1 }), n);
                let g = chi_square_gof(&h, &probs).unwrap();
                assert!(g.passes(1e-3), "{f} {pick}: {g:?}");
            }
        }
    }

    #[test]
    fn gof_detects_a_wrong_law() {
        let g = chi_square_gof(&[500, 500], &[0.4, 0.6]).unwrap();
        assert!(!g.passes(1e-3));
        let g = chi_square_gof(&[1, 0], &[0.0, 1.0]).unwrap();
        assert_eq!(g.impossible, 1);
    }
}
