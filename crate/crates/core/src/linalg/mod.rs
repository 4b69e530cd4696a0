//! Dense complex linear algebra for matrices up to 16x16.

mod eigen;
mod layout;
mod matrix;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, trace_norm, HermitianEigen};
pub use layout::{partial_trace, partial_transpose, LabeledState, SubsystemLayout};
pub use matrix::{pauli, ComplexMatrix, HERMITIAN_TOL};

/// Kronecker product; `a` indexes the slower-varying subsystem.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Smallest eigenvalue, used for positivity checks.
pub fn min_eigenvalue(m: &ComplexMatrix) -> crate::Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}
