//! Entanglement evidence from measured expectation values.
//!
//! Given observables and the values they were measured at, the crate
//! searches the set of compatible density matrices and decides whether all
//! of them are entangled, produces a separable certificate when one exists,
//! and simulates the measurements and tomography that generate such data.

pub mod entanglement;
pub mod error;
pub mod evidence;
pub mod experiments;
pub mod observables;
pub mod rng;
pub mod scenario;
pub mod state;
pub mod tensor;
pub mod tol;

pub use error::{Error, Result};
pub use tensor::{ComplexMatrix, Dims, C64};
