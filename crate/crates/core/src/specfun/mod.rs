//! Special functions behind the limiting laws.

pub mod constants;
pub mod delay;
pub mod expint;
pub mod moments;
pub mod quad;

pub use constants::{constant, constants, ConstantEntry, Recipe};
pub use delay::{buchstab_omega, dickman_rho, DelayKind, PiecewiseFunction};
pub use expint::{exp_integral_e, EULER_GAMMA};
pub use moments::{
    mean_largest_via_rho_tail, median_limit, moment_largest, moment_largest_via_rho,
    moment_smallest, omega_family, omega_moment,
};
pub use quad::{gauss_jacobi, gauss_legendre, QuadratureResult};
