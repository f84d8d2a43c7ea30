//! Paradifferential toolkit and pseudospectral solver for the power-type
//! nonlinear Schrodinger equation on the torus.

pub mod error;
pub mod fourier;
pub mod lab;
pub mod paradiff;
pub mod diagonalizer;
pub mod paralin;
pub mod solver;

pub use error::{Error, Result};
