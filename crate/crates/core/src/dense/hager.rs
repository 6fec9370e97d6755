use crate::error::Result;

pub const HAGER_MAX_ITERATIONS: usize = 5;

/// Hager's lower estimate of `‖S⁻¹‖₁`.
///
/// `solve(rhs, transposed)` must return `S⁻¹ rhs` (or `S⁻ᵀ rhs`). Every
/// estimate is `‖S⁻¹x‖₁` for some `‖x‖₁ = 1`, so it never exceeds the true
/// norm. Stops after [`HAGER_MAX_ITERATIONS`] or when the gradient test says
/// no vertex can do better; argmax ties go to the lowest index.
pub fn hager_one_norm_inverse_estimate<F>(n: usize, mut solve: F) -> Result<f64>
where
    F: FnMut(&[f64], bool) -> Result<Vec<f64>>,
{
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for iter in 0..HAGER_MAX_ITERATIONS {
        let y = solve(&x, false)?;
        let norm: f64 = y.iter().map(|v| v.abs()).sum();
        if iter > 0 && norm <= est {
            break;
        }
        est = norm;
        let xi: Vec<f64> = y
            .iter()
            .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        let z = solve(&xi, true)?;
        let (mut j, mut zmax) = (0, z[0].abs());
        for (i, v) in z.iter().enumerate().skip(1) {
            if v.abs() > zmax {
                zmax = v.abs();
                j = i;
            }
        }
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if iter > 0 && zmax <= ztx {
            break;
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        x[j] = 1.0;
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{lu_solve, Cholesky, Matrix};
    use crate::rng::{gaussian_matrix, stream_rng};

    fn explicit_inverse_one_norm(s: &Matrix) -> f64 {
        let n = s.rows();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                lu_solve(s, &e).unwrap()
            })
            .collect();
        cols.iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_and_diagonal() {
        let id = |x: &[f64], _| Ok(x.to_vec());
        assert_eq!(hager_one_norm_inverse_estimate(4, id).unwrap(), 1.0);
        let d = [1.0, 0.5, 0.25];
        let diag = |x: &[f64], _| Ok(x.iter().zip(&d).map(|(a, b)| a / b).collect());
        assert_eq!(hager_one_norm_inverse_estimate(3, diag).unwrap(), 4.0);
    }

    #[test]
    fn random_spd_estimate_is_tight_lower_bound() {
        for seed in 0..10 {
            let g = gaussian_matrix(&mut stream_rng(seed, 0), 60, 40);
            let s = g.gram();
            let chol = Cholesky::factor(&s).unwrap();
            let est = hager_one_norm_inverse_estimate(40, |x, _| chol.solve(x)).unwrap();
            let truth = explicit_inverse_one_norm(&s);
            assert!(est <= truth * (1.0 + 1e-12), "seed {seed}: {est} > {truth}");
            assert!(est >= 0.3 * truth, "seed {seed}: {est} << {truth}");
        }
    }

    #[test]
    fn nonsymmetric_uses_transposed_solves() {
        let s = Matrix::from_rows(&[&[1.0, 10.0], &[0.0, 1.0]]).unwrap();
        let st = s.transpose();
        let est = hager_one_norm_inverse_estimate(2, |x, t| lu_solve(if t { &st } else { &s }, x))
            .unwrap();
        // S⁻¹ = [[1, -10], [0, 1]], 1-norm 11
        assert_eq!(est, 11.0);
    }

    #[test]
    fn solver_errors_propagate() {
        let r = hager_one_norm_inverse_estimate(2, |_, _| {
            Err(crate::error::Error::NotPositiveDefinite {
                step: 0,
                pivot: -1.0,
            })
        });
        assert!(r.is_err());
    }
}
