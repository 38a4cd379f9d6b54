use thiserror::Error;

use crate::family::FamilyId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        lo: usize,
        hi: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tolerance not met: requested {requested:e}, achieved {achieved:e}")]
    Tolerance { requested: f64, achieved: f64 },
    #[error("inexact division while computing {0}")]
    InexactDivision(&'static str),
    #[error("there are no {family} objects of size {n}")]
    NoObjects { family: FamilyId, n: usize },
    #[error("cache file {path}: {reason}")]
    Cache { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: usize, lo: usize, hi: usize) -> Self {
        Error::OutOfRange {
            what,
            value,
            lo,
            hi,
        }
    }
}
