//! Exact enumeration and special functions for the component sizes of
//! decomposable labeled structures of exp-log type: permutations, 2-regular
//! labeled graphs, mappings and derangements.
//!
//! * [`family`]: global counts `b_n`, `c_n` and per-family constants.
//! * [`enumerate`]: largest/smallest component tables, exact and floating.
//! * [`stats`]: means, variances and medians of those distributions.
//! * [`specfun`]: exponential integral, generalized Dickman and Buchstab
//!   functions, moment integrals and the constants registry.
//! * [`ratios`]: finite-size smooth/rough ratios against their limits.
//! * [`sampler`]: Monte Carlo sampling of component-size partitions.
//! * [`cache`]: the on-disk sequence cache.

pub mod cache;
pub mod dd;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod family;
pub mod ratios;
pub mod sampler;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Exec;
pub use family::{BigCount, ExpLogType, FamilyId, FamilySpec};
