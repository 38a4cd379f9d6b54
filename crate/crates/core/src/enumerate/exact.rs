//! Exact big-integer tables of `L_{k,n}` and `S_{k,n}`.

use num_integer::Integer;
use num_traits::{One, Zero};

use super::{singleton_only_count, Kind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::family::{self, BigCount, FamilyId};

/// Triangular table of exact counts, stored as cumulative sums per row.
///
/// For [`Kind::Largest`] row `n` holds prefix sums `Σ_{i<=k} L_{i,n}` for
/// `k = 0..=n`; for [`Kind::Smallest`] it holds suffix sums
/// `Σ_{i>=k} S_{i,n}` for `k = 0..=n+1`. Individual cells are differences of
/// neighbouring entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    family: FamilyId,
    kind: Kind,
    max_n: usize,
    cum: Vec<Vec<BigCount>>,
    totals: Vec<BigCount>,
}

impl CountTable {
    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `b_n`.
    pub fn total(&self, n: usize) -> &BigCount {
        &self.totals[n]
    }

    fn check(&self, k: usize, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::out_of_range("n", n, 0, self.max_n));
        }
        if k > n {
            return Err(Error::out_of_range("k", k, 0, n));
        }
        Ok(())
    }

    /// The count `L_{k,n}` or `S_{k,n}`.
    pub fn cell(&self, k: usize, n: usize) -> Result<BigCount> {
        self.check(k, n)?;
        let row = &self.cum[n];
        Ok(match self.kind {
            Kind::Largest if k == 0 => row[0].clone(),
            Kind::Largest => &row[k] - &row[k - 1],
            Kind::Smallest => &row[k] - &row[k + 1],
        })
    }

    /// Cells `0..=n` of row `n`.
    pub fn row(&self, n: usize) -> Result<Vec<BigCount>> {
        (0..=n).map(|k| self.cell(k, n)).collect()
    }

    /// `Σ_{i=0}^{k} cell(i, n)`.
    pub fn prefix(&self, k: usize, n: usize) -> Result<BigCount> {
        self.check(k, n)?;
        let row = &self.cum[n];
        Ok(match self.kind {
            Kind::Largest => row[k].clone(),
            Kind::Smallest => &row[0] - &row[k + 1],
        })
    }

    /// `Σ_{i=k}^{n} cell(i, n)`.
    pub fn suffix(&self, k: usize, n: usize) -> Result<BigCount> {
        self.check(k, n)?;
        let row = &self.cum[n];
        Ok(match self.kind {
            Kind::Largest if k == 0 => row[n].clone(),
            Kind::Largest => &row[n] - &row[k - 1],
            Kind::Smallest => row[k].clone(),
        })
    }

    /// Checks `Σ_{k>=1} cell(k,n) = b_n` and `cell(n,n) = c_n` for every
    /// `1 <= n <= max_n`.
    pub fn verify_identities(&self) -> Result<()> {
        let c = family::connected_counts(self.family, self.max_n);
        #[allow(clippy::needless_range_loop)]
        for n in 1..=self.max_n {
            let sum = self.suffix(1, n)?;
            if sum != self.totals[n] {
                return Err(Error::Domain(format!(
                    "{} {} row {n}: cells sum to {sum}, expected b_n = {}",
                    self.family, self.kind, self.totals[n]
                )));
            }
            if self.cell(n, n)? != c[n] {
                return Err(Error::Domain(format!(
                    "{} {} row {n}: diagonal differs from c_n",
                    self.family, self.kind
                )));
            }
        }
        Ok(())
    }

    /// Rebuilds a table from explicit cells `rows[n][k]`, `k = 0..=n`.
    pub fn from_cells(family: FamilyId, kind: Kind, rows: Vec<Vec<BigCount>>) -> Result<Self> {
        let max_n = rows
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::Domain("empty table".into()))?;
        let mut cum = Vec::with_capacity(rows.len());
        for (n, cells) in rows.iter().enumerate() {
            if cells.len() != n + 1 {
                return Err(Error::Domain(format!("row {n} has {} cells", cells.len())));
            }
            cum.push(cumulate(kind, cells));
        }
        Ok(CountTable {
            family,
            kind,
            max_n,
            cum,
            totals: family::total_counts(family, max_n),
        })
    }
}

fn cumulate(kind: Kind, cells: &[BigCount]) -> Vec<BigCount> {
    match kind {
        Kind::Largest => {
            let mut acc = BigCount::zero();
            cells
                .iter()
                .map(|c| {
                    acc += c;
                    acc.clone()
                })
                .collect()
        }
        Kind::Smallest => {
            let mut out = vec![BigCount::zero(); cells.len() + 1];
            for k in (0..cells.len()).rev() {
                out[k] = &out[k + 1] + &cells[k];
            }
            out
        }
    }
}

/// `b_{n,m}`: objects whose largest component has at most `m` nodes.
pub fn smooth_count(table: &CountTable, n: usize, m: usize) -> Result<BigCount> {
    if table.kind != Kind::Largest {
        return Err(Error::Domain(
            "smooth counts need a largest-component table".into(),
        ));
    }
    if n == 0 || n > table.max_n {
        return Err(Error::out_of_range("n", n, 1, table.max_n));
    }
    if m == 0 || m > n {
        return Err(Error::out_of_range("m", m, 1, n));
    }
    table.prefix(m, n)
}

/// `b_{n,m}`: objects whose smallest component has at least `m` nodes.
pub fn rough_count(table: &CountTable, n: usize, m: usize) -> Result<BigCount> {
    if table.kind != Kind::Smallest {
        return Err(Error::Domain(
            "rough counts need a smallest-component table".into(),
        ));
    }
    if n == 0 || n > table.max_n {
        return Err(Error::out_of_range("n", n, 1, table.max_n));
    }
    if m == 0 || m > n {
        return Err(Error::out_of_range("m", m, 1, n));
    }
    table.suffix(m, n)
}

/// `C(n, k)` by the multiplicative formula with every division checked.
pub(crate) fn binomial(n: usize, k: usize) -> Result<BigCount> {
    let k = k.min(n - k);
    let mut acc = BigCount::one();
    for t in 1..=k {
        acc *= n - k + t;
        let (q, r) = acc.div_rem(&BigCount::from(t));
        if !r.is_zero() {
            return Err(Error::InexactDivision("binomial coefficient"));
        }
        acc = q;
    }
    Ok(acc)
}

/// `blocks[k][j] = (kj)! c_k^j / (j! (k!)^j)`: the number of ways to split
/// `kj` labeled nodes into `j` connected components of size `k`. Built as
/// `blocks[k][j-1] * c_k * C(kj-1, k-1)` (the block holding the smallest
/// remaining label). Families with `c_k = 0` get an empty list.
fn block_weights(connected: &[BigCount], max_n: usize) -> Result<Vec<Vec<BigCount>>> {
    let mut blocks = vec![Vec::new(); max_n + 1];
    for k in 1..=max_n {
        let ck = &connected[k];
        if ck.is_zero() {
            continue;
        }
        let mut v = Vec::with_capacity(max_n / k + 1);
        v.push(BigCount::one());
        for j in 1..=max_n / k {
            let next = &v[j - 1] * ck * binomial(k * j - 1, k - 1)?;
            v.push(next);
        }
        blocks[k] = v;
    }
    Ok(blocks)
}

fn next_pascal_row(prev: &[BigCount]) -> Vec<BigCount> {
    let mut row = Vec::with_capacity(prev.len() + 1);
    row.push(BigCount::one());
    for w in prev.windows(2) {
        row.push(&w[0] + &w[1]);
    }
    row.push(BigCount::one());
    row
}

pub fn largest_table(family: FamilyId, max_n: usize) -> Result<CountTable> {
    largest_table_with(family, max_n, Exec::default())
}

pub fn smallest_table(family: FamilyId, max_n: usize) -> Result<CountTable> {
    smallest_table_with(family, max_n, Exec::default())
}

/// `L_{k,n}` for `0 <= k <= n <= max_n`.
///
/// `L_{0,n} = δ_{0,n}`, `L_{1,n}` is fixed by the family, and for `k >= 2`
/// `L_{k,n} = Σ_j C(n,kj) B_{k,j} Σ_{i=1}^{m} L_{i,n-kj}` with
/// `m = min(k-1, n-kj)`; when `m = 0` the inner sum runs over `i ∈ {0, 1}`.
pub fn largest_table_with(family: FamilyId, max_n: usize, exec: Exec) -> Result<CountTable> {
    let connected = family::connected_counts(family, max_n.max(1));
    let blocks = block_weights(&connected, max_n)?;
    let singleton = BigCount::from(singleton_only_count(family));

    let mut cum: Vec<Vec<BigCount>> = Vec::with_capacity(max_n + 1);
    cum.push(vec![BigCount::one()]);
    let mut pascal = vec![BigCount::one()];
    for n in 1..=max_n {
        pascal = next_pascal_row(&pascal);
        let prev = &cum;
        let binom = &pascal;
        let blocks = &blocks;
        let mut cells = exec.map_range(0..n + 1, |k| match k {
            0 => BigCount::zero(),
            1 => singleton.clone(),
            _ => {
                let mut acc = BigCount::zero();
                if blocks[k].is_empty() {
                    return acc;
                }
                for j in 1..=n / k {
                    let r = n - k * j;
                    let m = (k - 1).min(r);
                    let inner = if m >= 1 {
                        &prev[r][m]
                    } else {
                        &prev[r][1.min(r)]
                    };
                    if inner.is_zero() {
                        continue;
                    }
                    acc += &binom[k * j] * &blocks[k][j] * inner;
                }
                acc
            }
        });
        // L_{0,n} = 0 for n >= 1
        cells[0] = BigCount::zero();
        cum.push(cumulate(Kind::Largest, &cells));
    }
    Ok(CountTable {
        family,
        kind: Kind::Largest,
        max_n,
        cum,
        totals: family::total_counts(family, max_n),
    })
}

/// `S_{k,n}` for `0 <= k <= n <= max_n`.
///
/// `S_{k,n} = Σ_j C(n,kj) B_{k,j} Σ_{i=k+1}^{n-kj} S_{i,n-kj} + θ_{k,n} B_{k,n/k}`
/// where `θ_{k,n}` is 1 when `k` divides `n`.
pub fn smallest_table_with(family: FamilyId, max_n: usize, exec: Exec) -> Result<CountTable> {
    let connected = family::connected_counts(family, max_n.max(1));
    let blocks = block_weights(&connected, max_n)?;
    let empty = BigCount::from(singleton_only_count(family));

    let mut cum: Vec<Vec<BigCount>> = Vec::with_capacity(max_n + 1);
    cum.push(vec![empty, BigCount::zero()]);
    let mut pascal = vec![BigCount::one()];
    for n in 1..=max_n {
        pascal = next_pascal_row(&pascal);
        let prev = &cum;
        let binom = &pascal;
        let blocks = &blocks;
        let cells = exec.map_range(0..n + 1, |k| {
            let mut acc = BigCount::zero();
            if k == 0 || blocks[k].is_empty() {
                return acc;
            }
            for j in 1..=n / k {
                let r = n - k * j;
                if r == 0 {
                    acc += &blocks[k][j];
                    continue;
                }
                if k + 1 > r {
                    continue;
                }
                let inner = &prev[r][k + 1];
                if inner.is_zero() {
                    continue;
                }
                acc += &binom[k * j] * &blocks[k][j] * inner;
            }
            acc
        });
        cum.push(cumulate(Kind::Smallest, &cells));
    }
    Ok(CountTable {
        family,
        kind: Kind::Smallest,
        max_n,
        cum,
        totals: family::total_counts(family, max_n),
    })
}
