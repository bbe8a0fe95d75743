//! Biharmonic Steklov eigenvalues on rectangular cylinders.
//!
//! The problem is `Δ²u = 0` in a domain, `u = 0` on its boundary and
//! `Δu + λ ρ ∂u/∂ν = 0` on the part of the boundary carrying the density `ρ`
//! (`ν` the inward normal). On boxes the spectrum separates and is known in
//! closed form; this crate provides
//!
//! * [`profile`]: the scalar profile function `t(s)` that maps base
//!   frequencies to Steklov eigenvalues, its derivative and inverse, and the
//!   vertical eigenfunction factor;
//! * [`boxspec`]: closed-form spectra and eigenfunctions on n-dimensional
//!   rectangular cylinders;
//! * [`lattice`] and [`counting`]: exact eigenvalue counting functions by
//!   lattice enumeration, with ellipsoid volume bounds;
//! * [`weyl`]: leading-order Weyl predictions and convergence reports;
//! * [`fd`]: a finite-difference solver for the 2-D problem that assembles
//!   the discrete Neumann-to-Laplacian boundary map and diagonalizes it;
//! * [`cli`]: the table-oriented command-line front end.

pub mod boxspec;
pub mod cli;
pub mod counting;
pub mod error;
pub mod fd;
pub mod lattice;
pub mod profile;
pub mod weyl;

pub use boxspec::{BoxCylinder, BoxMode, SpectralFamily};
pub use error::{Error, Result};
