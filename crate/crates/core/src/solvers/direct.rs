use crate::arith::Binary64;
use crate::dense::qr::Householder;
use crate::dense::{householder_r, lu_solve, triangular_solve_vec, Cholesky, Matrix};
use crate::error::{Error, Result};
use crate::solvers::{Method, SolveReport};
use crate::timing::Stopwatch;

pub(crate) fn check_system(a: &Matrix, b: &[f64]) -> Result<()> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side has {}",
            a.rows(),
            b.len()
        )));
    }
    if a.rows() < a.cols() || a.cols() == 0 {
        return Err(Error::InvalidInput(format!(
            "need an overdetermined system, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// `x̂ = R⁻¹ (Qᵀb)[..n]` from Householder QR.
pub fn solve_qr_baseline(a: &Matrix, b: &[f64]) -> Result<SolveReport> {
    check_system(a, b)?;
    let sw = Stopwatch::start();
    let h = Householder::factor::<Binary64>(a)?;
    let mut qtb = b.to_vec();
    h.apply_qt(&mut qtb);
    qtb.truncate(a.cols());
    let x = triangular_solve_vec(&h.r(), &qtb, false)?;
    let wall = sw.elapsed_ms();
    let mut rep = SolveReport::new(Method::Qr, a, b, x)?;
    rep.wall_ms = wall;
    Ok(rep)
}

/// Cholesky on `AᵀA x = Aᵀb`.
pub fn solve_normal(a: &Matrix, b: &[f64]) -> Result<SolveReport> {
    check_system(a, b)?;
    let sw = Stopwatch::start();
    let x = normal_equations(a, b)?;
    let wall = sw.elapsed_ms();
    let mut rep = SolveReport::new(Method::Ne, a, b, x)?;
    rep.wall_ms = wall;
    Ok(rep)
}

pub(crate) fn normal_equations(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let g = a.gram();
    let c = a.tr_matvec(b)?;
    Cholesky::factor(&g)?.solve(&c)
}

/// `RᵀR x = Aᵀb` with `R` from Householder QR of `A`; `Q` is never formed.
pub fn solve_seminormal(a: &Matrix, b: &[f64]) -> Result<SolveReport> {
    check_system(a, b)?;
    let sw = Stopwatch::start();
    let r = householder_r(a)?;
    let c = a.tr_matvec(b)?;
    let z = triangular_solve_vec(&r, &c, true)?;
    let x = triangular_solve_vec(&r, &z, false)?;
    let wall = sw.elapsed_ms();
    let mut rep = SolveReport::new(Method::Sne, a, b, x)?;
    rep.wall_ms = wall;
    Ok(rep)
}

/// `BᵀA x = Bᵀb` by LU with partial pivoting. A `B` that is bitwise equal to
/// `A` takes the normal-equations path.
pub fn solve_notnormal(a: &Matrix, b_matrix: &Matrix, rhs: &[f64]) -> Result<SolveReport> {
    check_system(a, rhs)?;
    if b_matrix.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "B is {:?}, A is {:?}",
            b_matrix.shape(),
            a.shape()
        )));
    }
    let sw = Stopwatch::start();
    let x = if bitwise_equal(a, b_matrix) {
        normal_equations(a, rhs)?
    } else {
        cross_system(b_matrix, a, rhs)?
    };
    let wall = sw.elapsed_ms();
    let mut rep = SolveReport::new(Method::Nne, a, rhs, x)?;
    rep.wall_ms = wall;
    Ok(rep)
}

/// Solves `BᵀA x = Bᵀ rhs` by LU.
pub(crate) fn cross_system(b: &Matrix, a: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let m = b.tr_matmul(a)?;
    let c = b.tr_matvec(rhs)?;
    lu_solve(&m, &c)
}

fn bitwise_equal(a: &Matrix, b: &Matrix) -> bool {
    a.shape() == b.shape()
        && a.as_slice()
            .iter()
            .zip(b.as_slice())
            .all(|(x, y)| x.to_bits() == y.to_bits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{householder_qr, relative_difference};
    use crate::rng::{gaussian_matrix, gaussian_vec, stream_rng};

    fn graded(m: usize, n: usize, kappa: f64, seed: u64) -> Matrix {
        let u = householder_qr(&gaussian_matrix(&mut stream_rng(seed, 0), m, n))
            .unwrap()
            .q;
        let v = householder_qr(&gaussian_matrix(&mut stream_rng(seed, 1), n, n))
            .unwrap()
            .q;
        let s: Vec<f64> = (0..n)
            .map(|i| kappa.powf(-(i as f64) / (n - 1) as f64))
            .collect();
        u.matmul(&Matrix::diag(&s))
            .unwrap()
            .matmul(&v.transpose())
            .unwrap()
    }

    #[test]
    fn qr_on_identity_returns_rhs() {
        let b = [1.5, -2.0, 0.25];
        let rep = solve_qr_baseline(&Matrix::identity(3), &b).unwrap();
        assert_eq!(rep.x_hat, b);
        assert_eq!(rep.residual_norm, 0.0);
    }

    #[test]
    fn orthonormal_columns_give_projection() {
        let q = householder_qr(&gaussian_matrix(&mut stream_rng(2, 0), 20, 4))
            .unwrap()
            .q;
        let b = gaussian_vec(&mut stream_rng(2, 1), 20);
        let qtb = q.tr_matvec(&b).unwrap();
        for rep in [
            solve_normal(&q, &b).unwrap(),
            solve_seminormal(&q, &b).unwrap(),
            solve_qr_baseline(&q, &b).unwrap(),
        ] {
            assert!(
                relative_difference(&rep.x_hat, &qtb) < 1e-14,
                "{}",
                rep.method
            );
        }
    }

    #[test]
    fn methods_agree_on_well_conditioned_problem() {
        let a = graded(60, 6, 1e2, 3);
        let b = gaussian_vec(&mut stream_rng(3, 5), 60);
        let qr = solve_qr_baseline(&a, &b).unwrap().x_hat;
        let ne = solve_normal(&a, &b).unwrap().x_hat;
        let sne = solve_seminormal(&a, &b).unwrap().x_hat;
        assert!(relative_difference(&ne, &qr) < 1e-10);
        assert!(relative_difference(&sne, &ne) < 1e-10);
    }

    #[test]
    fn normal_equations_break_down_when_ill_conditioned() {
        let a = graded(60, 6, 1e10, 4);
        let b = gaussian_vec(&mut stream_rng(4, 5), 60);
        assert!(matches!(
            solve_normal(&a, &b),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(solve_qr_baseline(&a, &b).is_ok());
    }

    #[test]
    fn notnormal_reductions() {
        let a = graded(40, 5, 10.0, 6);
        let b = gaussian_vec(&mut stream_rng(6, 5), 40);
        let ne = solve_normal(&a, &b).unwrap().x_hat;
        let nne = solve_notnormal(&a, &a.clone(), &b).unwrap();
        assert_eq!(nne.x_hat, ne);
        assert_eq!(nne.method, Method::Nne);
        let q = householder_qr(&a).unwrap().q;
        let via_q = solve_notnormal(&a, &q, &b).unwrap().x_hat;
        let qr = solve_qr_baseline(&a, &b).unwrap().x_hat;
        assert!(relative_difference(&via_q, &qr) < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let a = Matrix::zeros(3, 2);
        assert!(matches!(
            solve_normal(&a, &[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(solve_notnormal(&a, &Matrix::zeros(3, 1), &[0.0; 3]).is_err());
        assert!(matches!(
            solve_qr_baseline(&Matrix::zeros(3, 2), &[0.0; 3]),
            Err(Error::RankDeficient { .. })
        ));
    }
}
