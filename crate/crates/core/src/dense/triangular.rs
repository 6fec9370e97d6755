use crate::arith::{Arith, Binary64};
use crate::dense::Matrix;
use crate::error::{Error, Result};

pub(crate) fn check_triangular_diag(r: &Matrix) -> Result<()> {
    if r.rows() != r.cols() {
        return Err(Error::DimensionMismatch(format!(
            "triangular factor must be square, got {:?}",
            r.shape()
        )));
    }
    for i in 0..r.rows() {
        let d = r[(i, i)];
        if d == 0.0 || !d.is_finite() {
            return Err(Error::SingularTriangular { index: i });
        }
    }
    Ok(())
}

/// In-place `x := R⁻¹ x` (or `R⁻ᵀ x`) for upper triangular `R`. The diagonal
/// must already have been checked.
pub(crate) fn solve_upper_in_place<A: Arith>(r: &Matrix, x: &mut [f64], transposed: bool) {
    let n = r.rows();
    if transposed {
        // Rᵀ is lower triangular; row i of Rᵀ is column i of R.
        for i in 0..n {
            let col = r.col(i);
            let s = A::sub(x[i], A::dot(&col[..i], &x[..i]));
            x[i] = A::div(s, col[i]);
        }
    } else {
        for j in (0..n).rev() {
            let col = r.col(j);
            let xj = A::div(x[j], col[j]);
            x[j] = xj;
            for (xi, &rij) in x[..j].iter_mut().zip(&col[..j]) {
                *xi = A::mul_sub(*xi, xj, rij);
            }
        }
    }
}

/// Solve `R X = rhs` (or `Rᵀ X = rhs`) with `R` upper triangular.
pub fn triangular_solve(r: &Matrix, rhs: &Matrix, transposed: bool) -> Result<Matrix> {
    check_triangular_diag(r)?;
    if rhs.rows() != r.rows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs has {} rows, triangular factor has {}",
            rhs.rows(),
            r.rows()
        )));
    }
    let mut x = rhs.clone();
    for j in 0..x.cols() {
        solve_upper_in_place::<Binary64>(r, x.col_mut(j), transposed);
    }
    Ok(x)
}

pub fn triangular_solve_vec(r: &Matrix, rhs: &[f64], transposed: bool) -> Result<Vec<f64>> {
    check_triangular_diag(r)?;
    if rhs.len() != r.rows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs has length {}, triangular factor has {} rows",
            rhs.len(),
            r.rows()
        )));
    }
    let mut x = rhs.to_vec();
    solve_upper_in_place::<Binary64>(r, &mut x, transposed);
    Ok(x)
}

/// `A R⁻¹` for upper triangular `R`, column by column:
/// `X[:, j] = (A[:, j] - Σ_{i<j} X[:, i] R[i, j]) / R[j, j]`.
pub fn right_divide_upper(a: &Matrix, r: &Matrix) -> Result<Matrix> {
    check_triangular_diag(r)?;
    if a.cols() != r.rows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot right-divide {:?} by {:?}",
            a.shape(),
            r.shape()
        )));
    }
    let mut x = a.clone();
    for j in 0..r.cols() {
        let (done, col) = x.split_col_mut(j);
        let m = col.len();
        for i in 0..j {
            let rij = r[(i, j)];
            if rij != 0.0 {
                let xi = &done[i * m..(i + 1) * m];
                for (c, &v) in col.iter_mut().zip(xi) {
                    *c -= v * rij;
                }
            }
        }
        let d = r[(j, j)];
        for c in col.iter_mut() {
            *c /= d;
        }
    }
    Ok(x)
}
