//! S-spectra of quaternionic matrices and shift-type operators.
//!
//! The crate computes S-spectra and left S-resolvents of quaternionic matrices,
//! Fredholm, Weyl and boundary S-spectra relative to algebra homomorphisms, and
//! the corresponding Calkin-algebra spectra for a class of shift-plus-finite-rank
//! operators on `ℓ²_ℍ(ℤ)` and `ℓ²_ℍ(ℕ)`.

pub mod cli;
pub mod error;
pub mod fredholm;
pub mod grid;
pub(crate) mod linalg;
pub mod qmat;
pub mod quat;
pub mod random;
pub mod shiftlab;
pub mod spheres;
pub mod sresolvent;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use qmat::{Invertibility, QMatrix};
pub use quat::{ImaginaryUnit, Quaternion, Sphere};
