use crate::dense::Matrix;
use crate::error::{Error, Result};

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Matrix,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Pivot rows are chosen by largest magnitude, lowest row index on ties.
    /// A pivot below `n·u·max|m_ij|` is reported as numerically singular.
    pub fn factor(m: &Matrix) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {:?}",
                m.shape()
            )));
        }
        let threshold = n as f64 * UNIT_ROUNDOFF * m.max_abs();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best >= threshold) || best == 0.0 {
                return Err(Error::NumericallySingular {
                    step: k,
                    pivot: best,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let c = lu.col_mut(j);
                    c.swap(p, k);
                }
            }
            let pivot = lu[(k, k)];
            for v in &mut lu.col_mut(k)[k + 1..] {
                *v /= pivot;
            }
            for j in k + 1..n {
                let (done, col) = lu.split_col_mut(j);
                let lcol = &done[k * n + k + 1..(k + 1) * n];
                let ukj = col[k];
                if ukj != 0.0 {
                    for (c, &l) in col[k + 1..].iter_mut().zip(lcol) {
                        *c -= l * ukj;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {}, system has {n} rows",
                rhs.len()
            )));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        // L y = P b (unit lower)
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                for (xi, &l) in x[j + 1..].iter_mut().zip(&self.lu.col(j)[j + 1..]) {
                    *xi -= l * xj;
                }
            }
        }
        // U x = y
        for j in (0..n).rev() {
            let col = self.lu.col(j);
            let xj = x[j] / col[j];
            x[j] = xj;
            for (xi, &u) in x[..j].iter_mut().zip(&col[..j]) {
                *xi -= u * xj;
            }
        }
        Ok(x)
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}

/// Solve `m x = rhs` by LU with partial pivoting.
pub fn lu_solve(m: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    LuFactors::factor(m)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::norm2;
    use crate::rng::{gaussian_matrix, gaussian_vec, stream_rng};

    #[test]
    fn identity() {
        assert_eq!(
            lu_solve(&Matrix::identity(3), &[1.0, -2.0, 3.5]).unwrap(),
            vec![1.0, -2.0, 3.5]
        );
    }

    #[test]
    fn permutation_forces_pivoting() {
        let m = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(lu_solve(&m, &[3.0, 7.0]).unwrap(), vec![7.0, 3.0]);
    }

    #[test]
    fn ties_pick_lowest_row() {
        let m =
            Matrix::from_rows(&[&[1.0, 2.0, 0.0], &[-1.0, 0.0, 1.0], &[1.0, 1.0, 1.0]]).unwrap();
        let f = LuFactors::factor(&m).unwrap();
        assert_eq!(f.permutation()[0], 0);
    }

    #[test]
    fn diagonally_dominant_residual() {
        let n = 30;
        let g = gaussian_matrix(&mut stream_rng(21, 0), n, n);
        let m = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                n as f64 + g[(i, j)]
            } else {
                g[(i, j)]
            }
        });
        let b = gaussian_vec(&mut stream_rng(22, 0), n);
        let x = lu_solve(&m, &b).unwrap();
        let r: Vec<f64> = m
            .matvec(&x)
            .unwrap()
            .iter()
            .zip(&b)
            .map(|(a, b)| a - b)
            .collect();
        assert!(norm2(&r) / norm2(&b) <= 1e-13);
    }

    #[test]
    fn singular_detected() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(
            lu_solve(&m, &[1.0, 1.0]),
            Err(Error::NumericallySingular { step: 1, .. })
        ));
        assert!(lu_solve(&Matrix::zeros(2, 2), &[1.0, 1.0]).is_err());
    }
}
