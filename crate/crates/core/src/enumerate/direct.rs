//! Smooth and rough counts for a single threshold `m`, without the triangle.
//!
//! Marking one node and removing its component gives
//! `b_n = Σ_k C(n-1, k-1) c_k b_{n-k}`; restricting `k` to `k <= m` (or
//! `k >= m`) and recursing on the remainder yields the smooth (or rough) counts
//! for every `n' <= n` in `O(n m)` steps.

use num_traits::{One, Zero};

use super::logs::LogTables;
use crate::dd::CompensatedSum;
use crate::error::{Error, Result};
use crate::family::{self, BigCount, FamilyId};

/// Which side of the threshold the component sizes must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Threshold {
    /// Every component has at most `m` nodes.
    AtMost(usize),
    /// Every component has at least `m` nodes.
    AtLeast(usize),
}

impl Threshold {
    fn m(self) -> usize {
        match self {
            Threshold::AtMost(m) | Threshold::AtLeast(m) => m,
        }
    }

    fn sizes(self, n: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            Threshold::AtMost(m) => 1..=m.min(n),
            Threshold::AtLeast(m) => m..=n,
        }
    }
}

/// Exact counts `b_{n',m}` for `n' = 0..=n`.
pub fn threshold_counts_exact(family: FamilyId, n: usize, t: Threshold) -> Result<Vec<BigCount>> {
    if t.m() == 0 {
        return Err(Error::out_of_range("m", 0, 1, n));
    }
    let c = family::connected_counts(family, n.max(1));
    let mut out: Vec<BigCount> = Vec::with_capacity(n + 1);
    out.push(BigCount::one());
    // Pascal row n'-1
    let mut pascal = vec![BigCount::one()];
    for np in 1..=n {
        if np > 1 {
            let mut row = Vec::with_capacity(np);
            row.push(BigCount::one());
            for w in pascal.windows(2) {
                row.push(&w[0] + &w[1]);
            }
            row.push(BigCount::one());
            pascal = row;
        }
        let mut acc = BigCount::zero();
        for k in t.sizes(np) {
            let rest = &out[np - k];
            if c[k].is_zero() || rest.is_zero() {
                continue;
            }
            acc += &pascal[k - 1] * &c[k] * rest;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Probabilities `b_{n',m} / b_{n'}` for `n' = 0..=n` (NaN where `b_{n'} = 0`).
pub fn threshold_probs_float(family: FamilyId, n: usize, t: Threshold) -> Result<Vec<f64>> {
    if t.m() == 0 {
        return Err(Error::out_of_range("m", 0, 1, n));
    }
    let logs = LogTables::new(family, n.max(1));
    Ok(threshold_probs_with(&logs, n, t))
}

pub(crate) fn threshold_probs_with(logs: &LogTables, n: usize, t: Threshold) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    for np in 1..=n {
        if logs.ln_total[np].is_none() {
            out.push(f64::NAN);
            continue;
        }
        let mut acc = CompensatedSum::default();
        for k in t.sizes(np) {
            let rest = out[np - k];
            if rest.is_nan() || rest == 0.0 {
                continue;
            }
            acc.add(logs.marked_component_prob(np, k) * rest);
        }
        out.push(acc.value());
    }
    out
}
