//! Small dense complex linear algebra: matrices, density operators, a Jacobi
//! eigensolver and the entropic quantities built on it.

mod density;
mod eig;
mod entropy;
mod matrix;

pub use density::{partial_trace, permute_subsystems, tensor_density, trace_distance, trace_norm, DensityMatrix};
pub use eig::{hermitian_eig, EigenDecomposition};
pub use entropy::{classical_kl, quantum_relative_entropy, von_neumann_entropy};
pub use matrix::{tensor_product, ComplexMatrix};

pub use num_complex::Complex64;

/// Hermiticity tolerance on |A − A†| entries.
pub const TAU_HERM: f64 = 1e-9;
/// Allowed deviation of tr ρ from 1.
pub const TAU_TR: f64 = 1e-9;
/// Allowed negative eigenvalue magnitude for a state.
pub const TAU_PSD: f64 = 1e-9;
/// Eigen-reconstruction target.
pub const TAU_EIG: f64 = 1e-10;
/// Eigenvalues at or below this are outside the support.
pub const TAU_SUPP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    Trace(f64),
    #[error("matrix has eigenvalue {0:e} below zero")]
    NotPositive(f64),
    #[error("subsystem {0} out of range for {1} subsystems")]
    Subsystem(usize, usize),
    #[error("non-finite matrix entry")]
    NonFinite,
}
