//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Tall inputs are first reduced to their triangular QR factor, which has
//! the same singular values; Jacobi then runs on an n×n matrix.

use serde::{Deserialize, Serialize};

use crate::dense::{dot, householder_r, Matrix};
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 30;
pub const JACOBI_TOL: f64 = 1e-14;

/// Two-norm diagnostics of a full-column-rank matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDiagnostics {
    pub two_norm: f64,
    /// `σ_max / σ_min`; infinite when the smallest singular value is zero.
    pub two_norm_condition: f64,
    /// Descending.
    pub singular_values: Option<Vec<f64>>,
}

impl ConditionDiagnostics {
    pub fn sigma_min(&self) -> Option<f64> {
        self.singular_values
            .as_ref()
            .and_then(|s| s.last().copied())
    }
}

/// Singular values of `a` in descending order.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if m < n || n == 0 {
        return Err(Error::InvalidInput(format!(
            "singular values need rows >= cols >= 1, got {m}x{n}"
        )));
    }
    let work = if m > n {
        match householder_r(a) {
            Ok(r) => r,
            // An exactly zero trailing column; Jacobi copes with it directly.
            Err(Error::RankDeficient { .. }) => a.clone(),
            Err(e) => return Err(e),
        }
    } else {
        a.clone()
    };
    jacobi_singular_values(work)
}

/// Cyclic one-sided Jacobi. A pair of columns is rotated when the cosine of
/// the angle between them exceeds [`JACOBI_TOL`]; the iteration ends after
/// a sweep without rotations.
fn jacobi_singular_values(mut w: Matrix) -> Result<Vec<f64>> {
    let (m, n) = w.shape();
    let mut norms: Vec<f64> = (0..n).map(|j| dot(w.col(j), w.col(j))).collect();
    let mut converged = n < 2;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        converged = true;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (cp, cq) = two_cols(&w, p, q, m);
                let gamma = dot(cp, cq);
                if gamma.abs() <= JACOBI_TOL * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let data = w.as_mut_slice();
                let (lo, hi) = data.split_at_mut(q * m);
                let colp = &mut lo[p * m..(p + 1) * m];
                let colq = &mut hi[..m];
                for (x, y) in colp.iter_mut().zip(colq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
                norms[p] = dot(colp, colp);
                norms[q] = dot(colq, colq);
            }
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| crate::dense::norm2(w.col(j))).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok(sv)
}

fn two_cols(w: &Matrix, p: usize, q: usize, m: usize) -> (&[f64], &[f64]) {
    let d = w.as_slice();
    (&d[p * m..(p + 1) * m], &d[q * m..(q + 1) * m])
}

/// Two-norm and two-norm condition number (w.r.t. left inversion).
pub fn condition_diagnostics(a: &Matrix) -> Result<ConditionDiagnostics> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let sv = singular_values(a)?;
    let smax = sv[0];
    let smin = *sv.last().expect("at least one column");
    let cond = if smax == 0.0 || smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    };
    Ok(ConditionDiagnostics {
        two_norm: smax,
        two_norm_condition: cond,
        singular_values: Some(sv),
    })
}

/// Spectral norm.
pub fn two_norm(a: &Matrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::householder_qr;
    use crate::rng::{gaussian_matrix, stream_rng};

    #[test]
    fn identity() {
        let d = condition_diagnostics(&Matrix::identity(5)).unwrap();
        assert_eq!(d.two_norm, 1.0);
        assert_eq!(d.two_norm_condition, 1.0);
    }

    #[test]
    fn embedded_diagonal() {
        let q = householder_qr(&gaussian_matrix(&mut stream_rng(1, 0), 10, 2))
            .unwrap()
            .q;
        let a = q.matmul(&Matrix::diag(&[1.0, 1e-3])).unwrap();
        let d = condition_diagnostics(&a).unwrap();
        assert!((d.two_norm_condition / 1e3 - 1.0).abs() <= 1e-7);
        assert!((d.two_norm - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn planted_spectrum_recovered() {
        let n = 12;
        let sigma: Vec<f64> = (0..n)
            .map(|i| 10f64.powf(-(i as f64) * 6.0 / (n - 1) as f64))
            .collect();
        let u = householder_qr(&gaussian_matrix(&mut stream_rng(2, 0), 40, n))
            .unwrap()
            .q;
        let v = householder_qr(&gaussian_matrix(&mut stream_rng(3, 0), n, n))
            .unwrap()
            .q;
        let a = u
            .matmul(&Matrix::diag(&sigma))
            .unwrap()
            .matmul(&v.transpose())
            .unwrap();
        let sv = singular_values(&a).unwrap();
        for (s, t) in sv.iter().zip(&sigma) {
            assert!((s / t - 1.0).abs() <= 1e-8, "{s} vs {t}");
        }
    }

    #[test]
    fn rank_deficient_has_infinite_condition() {
        let a = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]]).unwrap();
        let d = condition_diagnostics(&a).unwrap();
        assert!(d.two_norm_condition.is_infinite() || d.two_norm_condition > 1e15);
    }

    #[test]
    fn square_and_wide_inputs() {
        let a = Matrix::from_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).unwrap();
        // singular values of [[3,0],[4,5]] are sqrt(45) and sqrt(5)
        let sv = singular_values(&a).unwrap();
        assert!((sv[0] - 45f64.sqrt()).abs() < 1e-14);
        assert!((sv[1] - 5f64.sqrt()).abs() < 1e-14);
        assert!(singular_values(&Matrix::zeros(2, 3)).is_err());
    }
}
