//! Largest- and smallest-component tables.
//!
//! `L_{k,n}` counts `n`-objects whose largest component has exactly `k` nodes
//! and `S_{k,n}` those whose smallest component has exactly `k` nodes. Both
//! satisfy a recursion over the number `j` of components of size `k`, with
//! weight `n! c_k^j / (j! (k!)^j (n-kj)!)`, which is what [`exact`] implements
//! with big integers and [`float`] implements in normalized log space.
//! [`direct`] computes the cumulative smooth/rough counts `b_{n,m}` for a
//! single `m` without building the whole triangle.

pub mod bigratio;
pub mod direct;
pub mod exact;
pub mod float;
pub mod logs;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::family::FamilyId;

pub use exact::{
    largest_table, largest_table_with, smallest_table, smallest_table_with, CountTable,
};
pub use float::{
    largest_row_float, smallest_row_float, FloatTable, ScaledDistribution, DEFAULT_FLOAT_TOL,
};

/// Largest- or smallest-component statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Largest,
    Smallest,
}

impl Kind {
    pub fn letter(self) -> char {
        match self {
            Kind::Largest => 'L',
            Kind::Smallest => 'S',
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Largest => "largest",
            Kind::Smallest => "smallest",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "largest" | "l" => Ok(Kind::Largest),
            "smallest" | "s" => Ok(Kind::Smallest),
            other => Err(Error::Domain(format!("unknown kind `{other}`"))),
        }
    }
}

/// Which arithmetic to use for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Exact up to [`EXACT_THRESHOLD`], floating above.
    #[default]
    Auto,
    Exact,
    Float,
}

/// Largest `n` for which [`Backend::Auto`] picks exact arithmetic.
pub const EXACT_THRESHOLD: usize = 1500;

impl Backend {
    pub fn use_exact(self, n: usize) -> bool {
        match self {
            Backend::Auto => n <= EXACT_THRESHOLD,
            Backend::Exact => true,
            Backend::Float => false,
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Backend::Auto),
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::Domain(format!("unknown backend `{other}`"))),
        }
    }
}

/// Initial value `L_{1,n}` for `n >= 1`: the all-singletons object exists
/// only when a single node is itself a component.
pub(crate) fn singleton_only_count(family: FamilyId) -> u32 {
    match family {
        FamilyId::Permute | FamilyId::Map => 1,
        FamilyId::Graph | FamilyId::Derange => 0,
    }
}
