//! The four structure families and their exact global counts.
//!
//! `b_n` counts all `n`-objects of a family and `c_n` the connected ones (a
//! single component on all `n` nodes). Both sequences are memoized per family
//! behind a lock; values handed out are owned clones.

use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Error;

/// Exact nonnegative integer used for every count in the crate.
pub type BigCount = BigUint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    Permute,
    Graph,
    Map,
    Derange,
}

impl FamilyId {
    pub const ALL: [FamilyId; 4] = [
        FamilyId::Permute,
        FamilyId::Graph,
        FamilyId::Map,
        FamilyId::Derange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Permute => "permute",
            FamilyId::Graph => "graph",
            FamilyId::Map => "map",
            FamilyId::Derange => "derange",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn exp_log_type(self) -> ExpLogType {
        match self {
            FamilyId::Permute | FamilyId::Derange => ExpLogType::ONE,
            FamilyId::Graph | FamilyId::Map => ExpLogType::HALF,
        }
    }

    pub fn spec(self) -> FamilySpec {
        FamilySpec::of(self)
    }

    /// Smallest component size that can occur.
    pub fn min_component(self) -> usize {
        match self {
            FamilyId::Permute | FamilyId::Map => 1,
            FamilyId::Graph => 3,
            FamilyId::Derange => 2,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "permute" | "permutation" | "p" => Ok(FamilyId::Permute),
            "graph" | "g" => Ok(FamilyId::Graph),
            "map" | "mapping" | "m" => Ok(FamilyId::Map),
            "derange" | "derangement" | "d" => Ok(FamilyId::Derange),
            other => Err(Error::Domain(format!("unknown family `{other}`"))),
        }
    }
}

/// Rational exp-log type `a = num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExpLogType {
    pub num: u32,
    pub den: u32,
}

impl ExpLogType {
    pub const ONE: ExpLogType = ExpLogType { num: 1, den: 1 };
    pub const HALF: ExpLogType = ExpLogType { num: 1, den: 2 };

    pub fn value(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl fmt::Display for ExpLogType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Per-family constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub a: ExpLogType,
    /// `lim n^a c_n / b_n`.
    pub kappa: f64,
    /// `lim (median largest size) / n`.
    pub median_limit: f64,
    /// Factor applied to the generic smallest-size moment integrals.
    pub shortest_scale: f64,
}

impl FamilySpec {
    pub fn of(id: FamilyId) -> Self {
        let a = id.exp_log_type();
        let median_limit = if a == ExpLogType::ONE {
            (-0.5f64).exp()
        } else {
            let e = std::f64::consts::E;
            4.0 * e / ((1.0 + e) * (1.0 + e))
        };
        FamilySpec {
            id,
            a,
            kappa: connectivity_constant(id),
            median_limit,
            shortest_scale: shortest_scale(id),
        }
    }
}

/// `κ_A = lim n^a c_n / b_n`, from closed forms.
pub fn connectivity_constant(family: FamilyId) -> f64 {
    use std::f64::consts::{E, PI};
    match family {
        FamilyId::Permute => 1.0,
        FamilyId::Graph => (0.75f64).exp() * PI.sqrt() / 2.0,
        FamilyId::Map => (PI / 2.0).sqrt(),
        FamilyId::Derange => E,
    }
}

fn shortest_scale(family: FamilyId) -> f64 {
    match family {
        FamilyId::Permute => 1.0,
        FamilyId::Graph => (0.75f64).exp(),
        FamilyId::Map => std::f64::consts::SQRT_2,
        FamilyId::Derange => std::f64::consts::E,
    }
}

#[derive(Default)]
struct Memo {
    total: Vec<BigCount>,
    connected: Vec<BigCount>,
}

fn memo(family: FamilyId) -> &'static RwLock<Memo> {
    static MEMOS: OnceLock<[RwLock<Memo>; 4]> = OnceLock::new();
    &MEMOS.get_or_init(Default::default)[family.index()]
}

fn extend_total(family: FamilyId, seq: &mut Vec<BigCount>, n: usize) {
    if seq.is_empty() {
        seq.push(BigCount::one());
    }
    while seq.len() <= n {
        let m = seq.len();
        let next = match family {
            FamilyId::Permute => &seq[m - 1] * m,
            FamilyId::Map => BigCount::from(m).pow(m as u32),
            FamilyId::Graph => {
                if m < 3 {
                    BigCount::zero()
                } else {
                    let pairs = (m - 1) * (m - 2) / 2;
                    &seq[m - 1] * (m - 1) + &seq[m - 3] * pairs
                }
            }
            FamilyId::Derange => {
                let scaled = &seq[m - 1] * m;
                if m.is_multiple_of(2) {
                    scaled + 1u32
                } else {
                    scaled - 1u32
                }
            }
        };
        seq.push(next);
    }
}

fn factorial(n: usize) -> BigCount {
    (1..=n).fold(BigCount::one(), |acc, i| acc * i)
}

/// Connected mappings on `n` nodes:
/// `Σ_{j=1}^{n-1} n^{n-j-1} n!/(n-j)! + (n-1)!`.
fn connected_mappings(n: usize) -> BigCount {
    if n == 1 {
        return BigCount::one();
    }
    let nn = BigCount::from(n);
    // j = 1 term: n^{n-2} * n
    let mut term = nn.pow((n - 1) as u32);
    let mut sum = term.clone();
    for j in 1..n - 1 {
        term *= n - j;
        let (q, r) = term.div_rem(&nn);
        assert!(r.is_zero(), "inexact division in connected mapping count");
        term = q;
        sum += &term;
    }
    sum + factorial(n - 1)
}

fn extend_connected(family: FamilyId, seq: &mut Vec<BigCount>, n: usize) {
    if seq.is_empty() {
        // c_0 is not meaningful; keep a placeholder so indices line up.
        seq.push(BigCount::zero());
    }
    while seq.len() <= n {
        let m = seq.len();
        let next = match family {
            FamilyId::Permute => {
                if m == 1 {
                    BigCount::one()
                } else {
                    &seq[m - 1] * (m - 1)
                }
            }
            FamilyId::Derange => {
                if m < 2 {
                    BigCount::zero()
                } else if m == 2 {
                    BigCount::one()
                } else {
                    &seq[m - 1] * (m - 1)
                }
            }
            FamilyId::Graph => match m {
                0..=2 => BigCount::zero(),
                3 => BigCount::one(),
                _ => &seq[m - 1] * (m - 1),
            },
            FamilyId::Map => connected_mappings(m),
        };
        seq.push(next);
    }
}

/// `b_n`, the number of `n`-objects. `b_0 = 1` for every family.
pub fn total_count(family: FamilyId, n: usize) -> BigCount {
    total_counts(family, n).swap_remove(n)
}

/// `b_0, ..., b_n`.
pub fn total_counts(family: FamilyId, n: usize) -> Vec<BigCount> {
    {
        let guard = memo(family).read().unwrap();
        if guard.total.len() > n {
            return guard.total[..=n].to_vec();
        }
    }
    let mut guard = memo(family).write().unwrap();
    extend_total(family, &mut guard.total, n);
    guard.total[..=n].to_vec()
}

/// `c_n`, the number of connected `n`-objects (`n >= 1`).
pub fn connected_count(family: FamilyId, n: usize) -> BigCount {
    connected_counts(family, n).swap_remove(n)
}

/// `c_0, ..., c_n` where the `c_0` slot is a zero placeholder.
pub fn connected_counts(family: FamilyId, n: usize) -> Vec<BigCount> {
    {
        let guard = memo(family).read().unwrap();
        if guard.connected.len() > n {
            return guard.connected[..=n].to_vec();
        }
    }
    let mut guard = memo(family).write().unwrap();
    extend_connected(family, &mut guard.connected, n);
    guard.connected[..=n].to_vec()
}

/// Pre-populates the memo from externally supplied values (used by the cache
/// loader after validation). Values must be a prefix starting at index 0.
pub fn seed_memo(family: FamilyId, total: Option<Vec<BigCount>>, connected: Option<Vec<BigCount>>) {
    let mut guard = memo(family).write().unwrap();
    if let Some(t) = total {
        if t.len() > guard.total.len() {
            guard.total = t;
        }
    }
    if let Some(c) = connected {
        if c.len() > guard.connected.len() {
            guard.connected = c;
        }
    }
}

/// Clears the in-memory memo of one family.
pub fn clear_memo(family: FamilyId) {
    let mut guard = memo(family).write().unwrap();
    guard.total.clear();
    guard.connected.clear();
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;

    #[test]
    fn listed_values() {
        assert_eq!(total_count(FamilyId::Map, 4), BigCount::from(256u32));
        assert_eq!(total_count(FamilyId::Graph, 6), BigCount::from(70u32));
        assert_eq!(total_count(FamilyId::Derange, 5), BigCount::from(44u32));
        assert_eq!(connected_count(FamilyId::Map, 3), BigCount::from(17u32));
        assert_eq!(connected_count(FamilyId::Map, 2), BigCount::from(3u32));
        assert_eq!(connected_count(FamilyId::Graph, 2), BigCount::zero());
        assert_eq!(connected_count(FamilyId::Permute, 5), BigCount::from(24u32));
    }

    #[test]
    fn empty_object() {
        for f in FamilyId::ALL {
            assert_eq!(total_count(f, 0), BigCount::one());
        }
        assert_eq!(total_count(FamilyId::Graph, 1), BigCount::zero());
        assert_eq!(total_count(FamilyId::Graph, 2), BigCount::zero());
        assert_eq!(total_count(FamilyId::Derange, 1), BigCount::zero());
    }

    #[test]
    fn connected_never_exceeds_total() {
        for f in FamilyId::ALL {
            let b = total_counts(f, 50);
            let c = connected_counts(f, 50);
            for n in 1..=50 {
                assert!(c[n] <= b[n], "{f} n={n}");
            }
        }
    }

    #[test]
    fn cycle_families_connected_is_factorial() {
        for n in 1..=30 {
            let fact = factorial(n - 1);
            assert_eq!(connected_count(FamilyId::Permute, n), fact);
            if n >= 2 {
                assert_eq!(connected_count(FamilyId::Derange, n), fact);
            }
        }
    }

    #[test]
    fn derangements_match_alternating_sum() {
        // n! Σ (-1)^i / i! = Σ (-1)^i n!/i!
        for n in 0..=30usize {
            let mut acc = BigInt::zero();
            for i in 0..=n {
                let falling: BigInt = ((i + 1)..=n).fold(BigInt::one(), |a, t| a * t);
                if i % 2 == 0 {
                    acc += falling;
                } else {
                    acc -= falling;
                }
            }
            assert!(!acc.is_negative());
            assert_eq!(acc.to_biguint().unwrap(), total_count(FamilyId::Derange, n));
        }
    }

    #[test]
    fn connected_mappings_integral_to_200() {
        // The isolated-term formula panics on an inexact division, so merely
        // evaluating it is the check; also compare against the rational form.
        let c = connected_counts(FamilyId::Map, 200);
        for n in [1usize, 2, 3, 4, 10, 57, 200] {
            // c_n * n = Σ_{j=1}^n n^{n-j} n!/(n-j)!
            let mut rhs = BigCount::zero();
            for j in 1..=n {
                let falling: BigCount = ((n - j + 1)..=n).fold(BigCount::one(), |a, t| a * t);
                rhs += BigCount::from(n).pow((n - j) as u32) * falling;
            }
            assert_eq!(&c[n] * n, rhs, "n={n}");
        }
    }

    #[test]
    fn constants() {
        assert_eq!(connectivity_constant(FamilyId::Permute), 1.0);
        assert!((connectivity_constant(FamilyId::Map) - 1.253_314_137_315_5).abs() < 1e-13);
        assert!((connectivity_constant(FamilyId::Derange) - std::f64::consts::E).abs() < 1e-15);
        let g = FamilyId::Graph.spec();
        assert!((g.median_limit - 0.786_447_732_965_927_4).abs() < 1e-15);
        assert!((FamilyId::Permute.spec().median_limit - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn parse_names() {
        for f in FamilyId::ALL {
            assert_eq!(f.name().parse::<FamilyId>().unwrap(), f);
        }
        assert!("tree".parse::<FamilyId>().is_err());
    }
}
