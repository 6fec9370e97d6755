//! Dense column-major linear algebra in binary64, with a few kernels generic
//! over emulated arithmetic.

mod cholesky;
mod hager;
mod lu;
mod matrix;
mod mtx;
pub(crate) mod qr;
mod svd;
pub(crate) mod triangular;

pub use cholesky::{cholesky_solve, Cholesky};
pub use hager::{hager_one_norm_inverse_estimate, HAGER_MAX_ITERATIONS};
pub use lu::{lu_solve, LuFactors};
pub use matrix::{axpy, dot, norm2, relative_difference, sub_vec, Matrix, StoragePrecision};
pub use mtx::{parse_mtx, read_mtx, write_mtx};
pub use qr::{householder_qr, householder_r, QrFactors};
pub use svd::{
    condition_diagnostics, singular_values, two_norm, ConditionDiagnostics, JACOBI_MAX_SWEEPS,
    JACOBI_TOL,
};
pub use triangular::{right_divide_upper, triangular_solve, triangular_solve_vec};
