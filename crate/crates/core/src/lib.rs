//! Element agglomeration coarsening and geometric multigrid on unstructured
//! triangle and tetrahedron meshes.
//!
//! Sparse algebra, assembly and the solvers are generic over the scalar
//! type; the aliases below fix the common choices.

pub mod agglomerate;
pub mod error;
pub mod hierarchy;
pub mod mesh;
pub mod mesh_io;
pub mod partitioner;
pub mod scalar;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};
pub use sparse::SparseMatrix;

/// Double-precision sparse matrix.
pub type Matrix = SparseMatrix<f64>;
/// Single-precision sparse matrix.
pub type MatrixF32 = SparseMatrix<f32>;
/// Exact rational sparse matrix, for Galerkin and transfer oracles.
pub type RationalMatrix = SparseMatrix<num_rational::Rational64>;
/// Double-precision multigrid preconditioner.
pub type Multigrid = solver::Multigrid<f64>;
/// Single-precision multigrid preconditioner.
pub type MultigridF32 = solver::Multigrid<f32>;
/// Double-precision dense LU factorisation.
pub type DenseLu = solver::DenseLu<f64>;
