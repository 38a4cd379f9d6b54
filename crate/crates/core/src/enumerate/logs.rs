//! Log-space tables (double-double) for the floating backends.

use crate::dd::DoubleDouble;
use crate::family::{self, FamilyId};

/// `ln n!`, `ln b_n` and `ln c_n` for `0 <= n <= max_n`. Zero counts are `None`.
#[derive(Debug, Clone)]
pub struct LogTables {
    pub family: FamilyId,
    pub max_n: usize,
    pub ln_fact: Vec<DoubleDouble>,
    pub ln_total: Vec<Option<DoubleDouble>>,
    pub ln_connected: Vec<Option<DoubleDouble>>,
}

impl LogTables {
    pub fn new(family: FamilyId, max_n: usize) -> Self {
        let mut ln_fact = Vec::with_capacity(max_n + 1);
        let mut acc = DoubleDouble::ZERO;
        ln_fact.push(acc);
        let ln_int: Vec<DoubleDouble> = (0..=max_n.max(1))
            .map(|i| {
                if i == 0 {
                    DoubleDouble::ZERO
                } else {
                    DoubleDouble::new(i as f64).ln()
                }
            })
            .collect();
        for l in ln_int.iter().take(max_n + 1).skip(1) {
            acc += *l;
            ln_fact.push(acc);
        }

        let ln_total: Vec<Option<DoubleDouble>> = match family {
            FamilyId::Permute => ln_fact.iter().copied().map(Some).collect(),
            FamilyId::Map => (0..=max_n)
                .map(|n| Some(ln_int[n].mul_f64(n as f64)))
                .collect(),
            FamilyId::Graph | FamilyId::Derange => family::total_counts(family, max_n)
                .iter()
                .map(|b| (b.bits() > 0).then(|| DoubleDouble::ln_biguint(b)))
                .collect(),
        };

        let ln2 = DoubleDouble::LN_2;
        let ln_connected: Vec<Option<DoubleDouble>> = (0..=max_n)
            .map(|n| match (family, n) {
                (_, 0) => None,
                (FamilyId::Permute, _) => Some(ln_fact[n - 1]),
                (FamilyId::Derange, 1) => None,
                (FamilyId::Derange, _) => Some(ln_fact[n - 1]),
                (FamilyId::Graph, 1 | 2) => None,
                (FamilyId::Graph, _) => Some(ln_fact[n - 1] - ln2),
                (FamilyId::Map, _) => Some(ln_int[n].mul_f64(n as f64) + ln_connected_map_ratio(n)),
            })
            .collect();

        LogTables {
            family,
            max_n,
            ln_fact,
            ln_total,
            ln_connected,
        }
    }

    /// `ln(c_k / k!)`.
    #[inline]
    pub fn ln_connected_egf(&self, k: usize) -> Option<DoubleDouble> {
        self.ln_connected[k].map(|c| c - self.ln_fact[k])
    }

    /// Probability that the component containing a fixed node of a uniform
    /// `n`-object has exactly `k` nodes: `C(n-1, k-1) c_k b_{n-k} / b_n`.
    pub fn marked_component_prob(&self, n: usize, k: usize) -> f64 {
        let (Some(c), Some(br), Some(bn)) =
            (self.ln_connected[k], self.ln_total[n - k], self.ln_total[n])
        else {
            return 0.0;
        };
        let l = self.ln_fact[n - 1] - self.ln_fact[k - 1] - self.ln_fact[n - k] + c + br - bn;
        l.to_f64().exp()
    }
}

/// `ln(c_n / n^n)` for mappings, from
/// `c_n / n^n = (1/n) Σ_{j=1}^{n} Π_{i<j} (1 - i/n)`.
fn ln_connected_map_ratio(n: usize) -> DoubleDouble {
    let nf = n as f64;
    let mut term = DoubleDouble::new(1.0);
    let mut sum = DoubleDouble::ZERO;
    for j in 1..=n {
        sum += term;
        // next factor (1 - j/n) = (n - j)/n
        term = term.mul_f64((n - j) as f64).div_f64(nf);
        if term.hi < 1e-40 * sum.hi {
            break;
        }
    }
    sum.div_f64(nf).ln()
}
