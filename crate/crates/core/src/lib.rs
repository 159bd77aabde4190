//! Spectral toolkit for the Hatano-Nelson chain with generalized
//! boundary conditions.
//!
//! The crate builds the asymmetric-hopping chain and its gauge
//! transformed partner, diagonalizes dense complex matrices with a
//! balanced QR iteration, checks the numerics against closed-form
//! spectra and eigenmodes, sweeps boundary parameters while tracking
//! eigenvalue branches, locates exceptional points, and quantifies the
//! skin effect of the eigenmodes.

pub mod error;
pub mod matrix;
pub mod model;

mod assign;

pub mod analysis;
pub mod analytic;
pub mod eig;
pub mod skin;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use model::{
    build_hamiltonian, build_transformed, gauge_scaling, pt_conjugate, BoundaryFamily,
    ModelParams, RANGE_GUARD_LIMIT,
};
pub use num_complex::Complex64;
