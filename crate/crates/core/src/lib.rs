//! Matrix-variate special functions and fractional integral operators over
//! the cone of real symmetric positive definite matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`spd`]: SPD matrices, the rectangular transform `A^{1/2} X B X' A^{1/2}`
//!   and the Stiefel-manifold constant.
//! * [`gamma`] and [`partition`]: scalar and matrix gamma/beta functions,
//!   integer partitions, generalized Pochhammer symbols, the pathway factor.
//! * [`zonal`]: zonal polynomials in the monomial symmetric basis.
//! * [`hyper`]: truncated hypergeometric series of matrix argument.
//! * [`fracint`]: the left-sided fractional integral over `O < Z_Y < Z_X`,
//!   its closed forms and the extended Saigo operator.
//! * [`sample`] and [`mc`]: seeded samplers over matrix cones and the Monte
//!   Carlo integration oracle.
//! * [`verify`]: oracle-comparison suites with JSON reports.

pub mod error;
pub mod fracint;
pub mod gamma;
pub mod hyper;
pub mod mc;
pub mod partition;
pub mod rng;
pub mod sample;
pub mod spd;
pub mod verify;
pub mod zonal;

pub use error::{Error, Result};
pub use partition::Partition;
pub use spd::{RectConfig, RectMatrix, SpdMatrix};

/// Schema tag carried by every JSON record this crate emits.
pub const SCHEMA: &str = "mvfrac/1";
