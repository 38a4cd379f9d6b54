//! On-disk cache of count sequences and tables.
//!
//! One file per family and kind:
//!
//! ```text
//! EXPOLOG-CACHE v1 <family> <kind>
//! <n> <value>          kinds b and c
//! <k> <n> <value>      kinds L and S
//! ```
//!
//! Indices are strictly increasing (row-major for tables). Everything read
//! back is revalidated before use, so a missing, stale or corrupted file only
//! costs a recomputation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_traits::{ToPrimitive, Zero};

use crate::enumerate::{CountTable, Kind};
use crate::error::{Error, Result};
use crate::family::{self, BigCount, FamilyId};

pub const CACHE_ENV: &str = "EXPOLOG_CACHE";
pub const DEFAULT_CACHE_DIR: &str = "./.expolog-cache";
const MAGIC: &str = "EXPOLOG-CACHE v1";

/// Kind tag of a cache file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheKind {
    /// `b_n`, `n >= 0`.
    Total,
    /// `c_n`, `n >= 1`.
    Connected,
    Table(Kind),
}

impl CacheKind {
    pub fn tag(self) -> &'static str {
        match self {
            CacheKind::Total => "b",
            CacheKind::Connected => "c",
            CacheKind::Table(Kind::Largest) => "L",
            CacheKind::Table(Kind::Smallest) => "S",
        }
    }
}

/// `$EXPOLOG_CACHE`, or `./.expolog-cache` when unset or empty.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => PathBuf::from(DEFAULT_CACHE_DIR),
    }
}

pub fn cache_path(dir: &Path, family: FamilyId, kind: CacheKind) -> PathBuf {
    dir.join(format!("{}-{}.txt", family.name(), kind.tag()))
}

fn header(family: FamilyId, kind: CacheKind) -> String {
    format!("{MAGIC} {} {}\n", family.name(), kind.tag())
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn bad(path: &Path, reason: impl Into<String>) -> Error {
    Error::Cache {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Writes `b_0..` or `c_1..` (the `c_0` placeholder is skipped).
pub fn write_sequence(
    dir: &Path,
    family: FamilyId,
    kind: CacheKind,
    values: &[BigCount],
) -> Result<PathBuf> {
    let start = match kind {
        CacheKind::Total => 0,
        CacheKind::Connected => 1,
        CacheKind::Table(_) => {
            return Err(Error::Domain("tables are written with write_table".into()))
        }
    };
    let mut body = header(family, kind);
    for (n, v) in values.iter().enumerate().skip(start) {
        body.push_str(&format!("{n} {v}\n"));
    }
    let path = cache_path(dir, family, kind);
    write_atomic(&path, &body)?;
    Ok(path)
}

fn read_body(path: &Path, family: FamilyId, kind: CacheKind) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let want = header(family, kind);
    if lines.next() != Some(want.trim_end()) {
        return Err(bad(path, format!("header is not `{}`", want.trim_end())));
    }
    Ok(lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(str::to_owned).collect())
        .collect())
}

fn parse_index(path: &Path, s: &str) -> Result<usize> {
    s.parse().map_err(|_| bad(path, format!("bad index `{s}`")))
}

fn parse_value(path: &Path, s: &str) -> Result<BigCount> {
    s.parse().map_err(|_| bad(path, format!("bad value `{s}`")))
}

/// Reads a `b` or `c` file; the result is indexed from 0 (`c_0` = 0).
/// Indices must run consecutively from the first one.
pub fn read_sequence(dir: &Path, family: FamilyId, kind: CacheKind) -> Result<Vec<BigCount>> {
    let path = cache_path(dir, family, kind);
    let mut out = Vec::new();
    if kind == CacheKind::Connected {
        out.push(BigCount::zero());
    }
    for fields in read_body(&path, family, kind)? {
        let [n, v] = fields.as_slice() else {
            return Err(bad(&path, "expected `<n> <value>`"));
        };
        if parse_index(&path, n)? != out.len() {
            return Err(bad(&path, format!("index {n} out of order")));
        }
        out.push(parse_value(&path, v)?);
    }
    Ok(out)
}

/// Writes every cell `(k, n)`, `0 <= k <= n <= max_n`, of a table.
pub fn write_table(dir: &Path, table: &CountTable) -> Result<PathBuf> {
    let kind = CacheKind::Table(table.kind());
    let mut body = header(table.family(), kind);
    for n in 0..=table.max_n() {
        for (k, v) in table.row(n)?.iter().enumerate() {
            body.push_str(&format!("{k} {n} {v}\n"));
        }
    }
    let path = cache_path(dir, table.family(), kind);
    write_atomic(&path, &body)?;
    Ok(path)
}

/// Reads a table and checks its row sums and diagonal.
pub fn read_table(dir: &Path, family: FamilyId, kind: Kind) -> Result<CountTable> {
    let ck = CacheKind::Table(kind);
    let path = cache_path(dir, family, ck);
    let mut rows: Vec<Vec<BigCount>> = Vec::new();
    for fields in read_body(&path, family, ck)? {
        let [k, n, v] = fields.as_slice() else {
            return Err(bad(&path, "expected `<k> <n> <value>`"));
        };
        let (k, n) = (parse_index(&path, k)?, parse_index(&path, n)?);
        let in_order = match rows.last() {
            Some(last) if last.len() < rows.len() => n == rows.len() - 1 && k == last.len(),
            _ => n == rows.len() && k == 0,
        };
        if !in_order {
            return Err(bad(&path, format!("cell ({k}, {n}) out of order")));
        }
        if k == 0 {
            rows.push(Vec::with_capacity(n + 1));
        }
        rows.last_mut().unwrap().push(parse_value(&path, v)?);
    }
    if rows.last().is_some_and(|r| r.len() != rows.len()) {
        return Err(bad(&path, "last row is incomplete"));
    }
    let table =
        CountTable::from_cells(family, kind, rows).map_err(|e| bad(&path, e.to_string()))?;
    table
        .verify_identities()
        .map_err(|e| bad(&path, e.to_string()))?;
    Ok(table)
}

const PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847];

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Checks `b_0 = 1` and `b_n = Σ_k C(n-1, k-1) c_k b_{n-k}` modulo two large
/// primes (a corrupted value passes with probability about `2^-122`).
pub fn check_sequences(total: &[BigCount], connected: &[BigCount]) -> Result<()> {
    let n_max = total.len().min(connected.len()).saturating_sub(1);
    if total.first().is_some_and(|b0| *b0 != BigCount::from(1u32)) {
        return Err(Error::Domain("b_0 must be 1".into()));
    }
    for p in PRIMES {
        let pb = BigCount::from(p);
        let red = |v: &BigCount| (v % &pb).to_u64().unwrap();
        let b: Vec<u64> = total[..=n_max].iter().map(red).collect();
        let c: Vec<u64> = connected[..=n_max].iter().map(red).collect();
        // Pascal row n-1, updated in place
        let mut pascal = vec![1u64; n_max.max(1)];
        for n in 1..=n_max {
            for j in (1..n - 1).rev() {
                pascal[j] = (pascal[j] + pascal[j - 1]) % p;
            }
            let mut acc = 0u64;
            for k in 1..=n {
                acc = (acc + mulmod(mulmod(pascal[k - 1], c[k], p), b[n - k], p)) % p;
            }
            if acc != b[n] {
                return Err(Error::Domain(format!("identity fails at n = {n}")));
            }
        }
    }
    Ok(())
}

/// Seeds the in-memory sequences of `family` from `dir` when both files are
/// present and consistent. Returns the number of terms loaded.
pub fn load_memo(dir: &Path, family: FamilyId) -> Result<Option<usize>> {
    let (bp, cp) = (
        cache_path(dir, family, CacheKind::Total),
        cache_path(dir, family, CacheKind::Connected),
    );
    if !bp.exists() || !cp.exists() {
        return Ok(None);
    }
    let total = read_sequence(dir, family, CacheKind::Total)?;
    let connected = read_sequence(dir, family, CacheKind::Connected)?;
    let len = total.len().min(connected.len());
    check_sequences(&total, &connected).map_err(|e| bad(&bp, e.to_string()))?;
    let terms = len.saturating_sub(1);
    family::seed_memo(
        family,
        Some(total[..len].to_vec()),
        Some(connected[..len].to_vec()),
    );
    Ok(Some(terms))
}

/// Writes `b_0..=b_n` and `c_1..=c_n` of `family` to `dir`.
pub fn store_memo(dir: &Path, family: FamilyId, n: usize) -> Result<()> {
    write_sequence(
        dir,
        family,
        CacheKind::Total,
        &family::total_counts(family, n),
    )?;
    write_sequence(
        dir,
        family,
        CacheKind::Connected,
        &family::connected_counts(family, n),
    )?;
    Ok(())
}
