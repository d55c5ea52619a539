//! Dense complex linear algebra: the matrix type, Jacobi decompositions,
//! Hilbert-Schmidt subspaces and seeded random sampling.

pub mod decomp;
pub mod matrix;
pub mod random;
pub mod subspace;

pub use decomp::{complete_orthonormal, hermitian_eig, nullspace, nullspace_scaled, rank, svd, HermitianEigen, Svd};
pub use matrix::{hs_inner, kron, kron_vec, partial_trace, pauli, vdot, vnorm, ComplexMatrix, Subsystem};
pub use subspace::MatrixSubspace;

/// Default relative tolerance for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-8;
