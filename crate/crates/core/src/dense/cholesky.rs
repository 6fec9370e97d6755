use crate::dense::{dot, Matrix};
use crate::error::{Error, Result};

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Upper triangular `R` with `S = RᵀR`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    r: Matrix,
}

impl Cholesky {
    /// Factor the symmetric part `(S + Sᵀ)/2`. The input has to be symmetric
    /// to within `10·u·max|s_ij|`.
    pub fn factor(s: &Matrix) -> Result<Self> {
        let n = s.rows();
        if s.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Cholesky needs a square matrix, got {:?}",
                s.shape()
            )));
        }
        let tol = 10.0 * UNIT_ROUNDOFF * s.max_abs();
        let mut r = Matrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let (a, b) = (s[(i, j)], s[(j, i)]);
                if (a - b).abs() > tol {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i}, {j}): {a:e} vs {b:e}"
                    )));
                }
                r[(i, j)] = 0.5 * (a + b);
            }
        }
        for j in 0..n {
            for i in 0..j {
                let v = (r[(i, j)] - dot(&r.col(i)[..i], &r.col(j)[..i])) / r[(i, i)];
                r[(i, j)] = v;
            }
            let col = &r.col(j)[..j];
            let d = r[(j, j)] - dot(col, col);
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { step: j, pivot: d });
            }
            r[(j, j)] = d.sqrt();
        }
        Ok(Self { r })
    }

    pub fn factor_r(&self) -> &Matrix {
        &self.r
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let y = crate::dense::triangular_solve_vec(&self.r, rhs, true)?;
        crate::dense::triangular_solve_vec(&self.r, &y, false)
    }
}

/// Solve the symmetric positive definite system `s x = rhs`.
pub fn cholesky_solve(s: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    Cholesky::factor(s)?.solve(rhs)
}
