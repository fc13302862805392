//! Statevector simulation of phase estimation, LCU state preparation,
//! amplitude estimation and the HHL linear-system algorithm, applied end to
//! end to cubic spline interpolation and checked against exact classical
//! solvers.
//!
//! Qubit ordering is little-endian throughout (see [`statevector`]).

pub mod error;
pub mod estimation;
pub mod hhl;
pub mod pipeline;
pub mod qpe;
pub mod spline;
pub mod stateprep;
pub mod statevector;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use statevector::{Operator, Statevector};
