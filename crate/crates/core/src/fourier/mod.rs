//! Truncated Fourier lattices, exact products, multipliers and norms.

pub mod fft;
pub mod field;
pub mod io;
pub mod lattice;
pub mod multiplier;
pub mod norm;
pub mod product;

pub use field::{relative_error, FourierField};
pub use lattice::{BoxShape, LatticeSpec};
pub use multiplier::{apply_fn, apply_multiplier, jap, jjap, project, Side, Symbol};
pub use norm::{inner_l2, norm, weighted, weighted_sq, NormKind, NormParams};
pub use product::{convolve_direct, monomial, multiply, power_nonlinearity};
