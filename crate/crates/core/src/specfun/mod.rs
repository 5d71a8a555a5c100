//! Numerical kernels shared by the rest of the crate: Bessel functions of the
//! first kind (orders 0 and 1), adaptive Gauss-Kronrod quadrature, a complex
//! Cholesky factorization for correlation matrices and a seeded Gaussian
//! source.

mod bessel;
mod linalg;
mod quad;
mod rng;

pub use bessel::{bessel_j0, bessel_j1};
pub use linalg::{cholesky, HermitianMatrix, LowerTriangular};
pub use quad::{integrate, integrate_with_limit, MAX_SUBDIVISIONS};
pub use rng::{gaussian_pair, RngSeed, SimRng};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("argument {0} is outside the domain of the function")]
    Domain(f64),

    #[error("invalid integration interval [{a}, {b}] or tolerance {tol}")]
    InvalidInterval { a: f64, b: f64, tol: f64 },

    #[error("quadrature did not reach tolerance: best estimate {estimate} with error {error}")]
    Convergence { estimate: f64, error: f64 },

    #[error(
        "matrix is not Hermitian: entry ({row}, {col}) differs from its conjugate transpose by {deviation}"
    )]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("matrix is not positive semi-definite: pivot {pivot} at index {index}")]
    NotPositiveSemidefinite { index: usize, pivot: f64 },

    #[error("expected {expected} entries, got {actual}")]
    Shape { expected: usize, actual: usize },
}
