//! Finite differences for the 2-D problem on a rectangle.
//!
//! The biharmonic problem with `u = 0` on the whole boundary is split as
//! `w = Δu`, `Δw = 0`. Boundary data `g = w|_∂` determines `w` by harmonic
//! extension and then `u` by a Dirichlet Poisson solve; the map
//! `g -> ∂u/∂ν` is assembled column by column on the faces that carry
//! unknowns. Faces with `∂u/∂ν = 0` are eliminated by a Schur complement and
//! the Steklov condition `g = -λ ρ ∂u/∂ν` becomes a symmetric eigenproblem
//! after a diagonal similarity.
//!
//! Corner nodes are not boundary unknowns. Both interior stencils are the
//! standard 5-point Laplacian.

mod banded;
mod grid;
mod jacobi;
mod operator;
mod spectrum;

pub use banded::BandCholesky;
pub use grid::{BoundaryNode, BoundaryPartition, Face, FaceCondition, Grid2D, MIN_CELLS};
pub use jacobi::{cyclic_jacobi, SymmetricEigen};
pub use operator::{
    assemble_boundary_operator, BoundaryOperator, DiscreteLaplacian, MAX_CONDITION, SOLVE_TOL,
};
pub use spectrum::{
    rayleigh_quotient, sign_self_test, steklov_spectrum_2d, ModeFields, SteklovProblem,
    SteklovSpectrum, CLUSTER_TOL, JACOBI_TOL, MAX_ASYMMETRY,
};
