//! Closed-walk counting on lattices and the Taylor coefficients of single-electron
//! tight-binding partition functions.
//!
//! Every coefficient is available through three independent routes:
//!
//! - [`series`]: closed-form walk-counting sums in exact rational arithmetic,
//! - [`oracle`]: brute-force dynamic programming over labelled closed walks,
//! - [`quadrature`]: moments of the dispersion relation averaged over the
//!   reciprocal primitive cell on alias-free uniform grids.
//!
//! [`verify`] cross-checks the routes and [`cli`] exposes everything as batch commands.

pub mod cli;
pub mod error;
pub mod lattice;
pub mod numeric;
pub mod oracle;
pub mod quadrature;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{LatticeKind, LatticeSpec, StepVector, SublatticeFlag};
pub use series::{MultiIndex, Series, WalkCount};
