//! Sharp admissibility bounds for weighted integral transforms of
//! normalized analytic functions on the unit disk, with the series,
//! quadrature, and special-function machinery needed to compute and
//! independently verify them.

pub mod accel;
pub mod bounds;
pub mod error;
pub mod hypergeom;
pub mod params;
pub mod quad;
pub mod selftest;
pub mod series;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use params::{derive_mu_nu, ClassParams, HohlovParams, TargetParams};
