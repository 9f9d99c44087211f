//! Exact and high-precision computations around the quantum cohomology of
//! del Pezzo surfaces.
//!
//! The crate is `no_std` and only needs an allocator. Everything that touches
//! files, threads or the command line lives in the `dpgamma` crate.
//!
//! Rough map:
//!
//! - [`linalg`]: rational matrices, characteristic polynomials, Sturm isolation.
//! - [`spectra`]: eigenvalues and Property O certificates.
//! - [`pf`]: generalized Perron-Frobenius checks and the conjugation search.
//! - [`lattice`]: the Picard lattice of `X_r`, exceptional curves, symmetries.
//! - [`gw`]: the table of low-degree Gromov-Witten invariants.
//! - [`operator`]: the matrix of quantum multiplication by `c_1`.
//! - [`gamma`]: Gamma classes.
//! - [`mirror`]: Landau-Ginzburg potentials and their critical points.
//! - [`jseries`]: hypergeometric J-series and the Gamma limit.

#![no_std]

extern crate alloc;

pub mod gamma;
pub mod gw;
pub mod jseries;
pub mod lattice;
pub mod linalg;
pub mod mirror;
pub mod operator;
pub mod pf;
pub mod real;
pub mod spectra;
pub mod surface;

pub use linalg::{Poly, QMatrix, Rat};
pub use surface::SurfaceId;
