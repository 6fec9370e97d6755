use serde::Serialize;

use crate::dense::{
    condition_diagnostics, lu_solve, right_divide_upper, triangular_solve_vec, Cholesky, Matrix,
};
use crate::error::{Error, Result};
use crate::precision::{
    power_of_two_scale, r_in_precision, round_to_precision, sketch_in_precision, PrecisionLevel,
};
use crate::sketch::{make_sketch, SketchDescriptor, Transform};
use crate::solvers::direct::{check_system, cross_system};
use crate::solvers::{Method, SolveReport};
use crate::timing::Stopwatch;

/// Right preconditioner `R_s`, held in binary64 whatever precision it was
/// computed in.
#[derive(Debug, Clone, Serialize)]
pub struct Preconditioner {
    #[serde(skip_serializing)]
    pub r_s: Matrix,
    pub computed_in: PrecisionLevel,
    pub kappa_rs: f64,
    /// `κ(A R_s⁻¹)`, filled by [`precondition_matrix`].
    pub kappa_ap: Option<f64>,
    pub sketch: Option<SketchDescriptor>,
}

impl Preconditioner {
    /// Wraps a given upper triangular factor.
    pub fn from_r(r_s: Matrix, computed_in: PrecisionLevel) -> Result<Self> {
        if !r_s.is_upper_triangular() {
            return Err(Error::InvalidInput(
                "preconditioner must be upper triangular".into(),
            ));
        }
        crate::dense::triangular::check_triangular_diag(&r_s)?;
        let kappa_rs = condition_diagnostics(&r_s)?.two_norm_condition;
        Ok(Preconditioner {
            r_s,
            computed_in,
            kappa_rs,
            kappa_ap: None,
            sketch: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        Preconditioner {
            r_s: Matrix::identity(n),
            computed_in: PrecisionLevel::Double,
            kappa_rs: 1.0,
            kappa_ap: None,
            sketch: None,
        }
    }
}

/// Number of sketch rows, `⌈d_factor · n⌉`.
pub fn sketch_rows(n: usize, d_factor: f64) -> usize {
    (d_factor * n as f64).ceil() as usize
}

/// Sketch `A` and take the triangular factor of `ΩA`, both in precision
/// `p`, then promote `R_s` to binary64.
///
/// For half precision `A` is first scaled by a power of two so that its
/// largest entry is at most one; `R_s` is scaled back exactly afterwards.
pub fn build_preconditioner(
    a: &Matrix,
    d_factor: f64,
    transform: Transform,
    p: PrecisionLevel,
    seed: u64,
) -> Result<Preconditioner> {
    let (m, n) = a.shape();
    if n == 0 || m < n {
        return Err(Error::InvalidInput(format!(
            "need rows >= cols >= 1, got {m}x{n}"
        )));
    }
    let d = sketch_rows(n, d_factor);
    let len = transform.padded_len(m);
    if !(d_factor.is_finite()) || d < n || d > len {
        return Err(Error::InvalidInput(format!(
            "sketch size d = {d} must lie in [{n}, {len}] (d_factor = {d_factor})"
        )));
    }
    let op = make_sketch(m, d, transform, seed)?;
    let scale = match p {
        PrecisionLevel::Half => power_of_two_scale(a.max_abs()),
        _ => 1.0,
    };
    let scaled = if scale == 1.0 {
        a.clone()
    } else {
        a.scale(scale)
    };
    let demoted = round_to_precision(&scaled, p);
    if demoted.overflowed {
        return Err(Error::Overflow(p.name()));
    }
    let a_s = sketch_in_precision(&op, &demoted.matrix, p)?;
    let mut r_s = r_in_precision(&a_s, p)?;
    if scale != 1.0 {
        r_s = r_s.scale(1.0 / scale);
    }
    let mut pre = Preconditioner::from_r(r_s, p)?;
    pre.sketch = Some(op.descriptor());
    Ok(pre)
}

/// `A_p = A R_s⁻¹` in binary64, without diagnostics.
pub fn apply_preconditioner(a: &Matrix, pre: &Preconditioner) -> Result<Matrix> {
    right_divide_upper(a, &pre.r_s)
}

/// `A_p = A R_s⁻¹` in binary64; records `κ(A_p)` in `pre`.
pub fn precondition_matrix(a: &Matrix, pre: &mut Preconditioner) -> Result<Matrix> {
    let ap = apply_preconditioner(a, pre)?;
    pre.kappa_ap = Some(condition_diagnostics(&ap)?.two_norm_condition);
    Ok(ap)
}

/// `A_pᵀA_p y = A_pᵀb`, then `R_s x = y`.
pub fn solve_pne(a: &Matrix, b: &[f64], pre: &Preconditioner) -> Result<SolveReport> {
    check_system(a, b)?;
    let sw = Stopwatch::start();
    let ap = apply_preconditioner(a, pre)?;
    let mut rep = solve_pne_with(a, &ap, b, pre)?;
    rep.wall_ms = sw.elapsed_ms();
    Ok(rep)
}

/// [`solve_pne`] with `A_p` already formed.
pub fn solve_pne_with(
    a: &Matrix,
    ap: &Matrix,
    b: &[f64],
    pre: &Preconditioner,
) -> Result<SolveReport> {
    check_system(a, b)?;
    check_preconditioned(a, ap)?;
    let sw = Stopwatch::start();
    let g = ap.gram();
    let c = ap.tr_matvec(b)?;
    let y = match Cholesky::factor(&g) {
        Ok(ch) => ch.solve(&c)?,
        Err(Error::NotPositiveDefinite { .. }) => lu_solve(&g, &c)?,
        Err(e) => return Err(e),
    };
    let x = triangular_solve_vec(&pre.r_s, &y, false)?;
    let wall = sw.elapsed_ms();
    let mut rep = SolveReport::new(Method::Pne, a, b, x)?;
    rep.y_hat = Some(y);
    rep.preconditioner = Some(pre.clone());
    rep.wall_ms = wall;
    Ok(rep)
}

/// `A_pᵀA x = A_pᵀb` by LU with partial pivoting.
pub fn solve_hpne(a: &Matrix, b: &[f64], pre: &Preconditioner) -> Result<SolveReport> {
    check_system(a, b)?;
    let sw = Stopwatch::start();
    let ap = apply_preconditioner(a, pre)?;
    let mut rep = solve_hpne_with(a, &ap, b, pre)?;
    rep.wall_ms = sw.elapsed_ms();
    Ok(rep)
}

/// [`solve_hpne`] with `A_p` already formed.
pub fn solve_hpne_with(
    a: &Matrix,
    ap: &Matrix,
    b: &[f64],
    pre: &Preconditioner,
) -> Result<SolveReport> {
    check_system(a, b)?;
    check_preconditioned(a, ap)?;
    let sw = Stopwatch::start();
    let x = cross_system(ap, a, b)?;
    let wall = sw.elapsed_ms();
    let mut rep = SolveReport::new(Method::Hpne, a, b, x)?;
    rep.preconditioner = Some(pre.clone());
    rep.wall_ms = wall;
    Ok(rep)
}

fn check_preconditioned(a: &Matrix, ap: &Matrix) -> Result<()> {
    if a.shape() != ap.shape() {
        return Err(Error::DimensionMismatch(format!(
            "A_p is {:?}, A is {:?}",
            ap.shape(),
            a.shape()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{householder_qr, relative_difference};
    use crate::rng::{gaussian_matrix, gaussian_vec, stream_rng};
    use crate::solvers::{solve_normal, solve_notnormal, solve_qr_baseline};

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
    fn identity_preconditioner_reduces_to_normal_equations() {
        let a = graded(80, 6, 1e3, 1);
        let b = gaussian_vec(&mut stream_rng(1, 9), 80);
        let pre = Preconditioner::identity(6);
        let mut p2 = pre.clone();
        assert_eq!(
            precondition_matrix(&a, &mut p2).unwrap().as_slice(),
            a.as_slice()
        );
        let pne = solve_pne(&a, &b, &pre).unwrap();
        let ne = solve_normal(&a, &b).unwrap();
        assert_eq!(pne.x_hat, ne.x_hat);
        let a10 = graded(80, 6, 10.0, 2);
        let hp = solve_hpne(&a10, &b, &pre).unwrap();
        let ne10 = solve_normal(&a10, &b).unwrap();
        assert!(relative_difference(&hp.x_hat, &ne10.x_hat) <= 1e-12);
    }

    #[test]
    fn exact_r_gives_orthonormal_ap() {
        let a = graded(100, 8, 1e6, 3);
        let r = householder_qr(&a).unwrap().r;
        let mut pre = Preconditioner::from_r(r, PrecisionLevel::Double).unwrap();
        precondition_matrix(&a, &mut pre).unwrap();
        assert!(pre.kappa_ap.unwrap() <= 1.0 + 1e-6);
    }

    #[test]
    fn sketched_preconditioners_in_each_precision() {
        let a = graded(512, 16, 1e2, 4);
        for p in PrecisionLevel::ALL {
            let mut pre = build_preconditioner(&a, 3.0, Transform::Dct2, p, 7).unwrap();
            assert_eq!(pre.computed_in, p);
            assert!(pre.r_s.is_upper_triangular());
            precondition_matrix(&a, &mut pre).unwrap();
            assert!(pre.kappa_ap.unwrap() < 10.0, "{p}: {:?}", pre.kappa_ap);
        }
    }

    #[test]
    fn half_precision_cannot_resolve_ill_conditioning() {
        let a = graded(512, 16, 1e6, 5);
        match build_preconditioner(&a, 3.0, Transform::Dct2, PrecisionLevel::Half, 1) {
            Err(Error::RankDeficient { .. }) | Err(Error::SingularTriangular { .. }) => {}
            Err(e) => panic!("unexpected {e}"),
            Ok(mut pre) => {
                precondition_matrix(&a, &mut pre).unwrap();
                assert!(pre.kappa_ap.unwrap() > 100.0, "{:?}", pre.kappa_ap);
            }
        }
    }

    #[test]
    fn notnormal_with_ap_matches_hpne() {
        let a = graded(300, 10, 1e4, 6);
        let b = gaussian_vec(&mut stream_rng(6, 9), 300);
        let pre =
            build_preconditioner(&a, 3.0, Transform::Dct2, PrecisionLevel::Double, 2).unwrap();
        let ap = apply_preconditioner(&a, &pre).unwrap();
        let hp = solve_hpne_with(&a, &ap, &b, &pre).unwrap();
        let nn = solve_notnormal(&a, &ap, &b).unwrap();
        assert_eq!(hp.x_hat, nn.x_hat);
        let qr = solve_qr_baseline(&a, &b).unwrap();
        assert!(relative_difference(&hp.x_hat, &qr.x_hat) < 1e-9);
    }

    #[test]
    fn sketch_size_validation() {
        let a = graded(40, 10, 10.0, 7);
        assert!(build_preconditioner(&a, 0.5, Transform::Dct2, PrecisionLevel::Double, 0).is_err());
        assert!(build_preconditioner(&a, 5.0, Transform::Dct2, PrecisionLevel::Double, 0).is_err());
        // WHT pads 40 rows to 64, so 50 samples fit but 70 do not.
        assert!(build_preconditioner(&a, 5.0, Transform::Wht, PrecisionLevel::Double, 0).is_ok());
        assert!(build_preconditioner(&a, 7.0, Transform::Wht, PrecisionLevel::Double, 0).is_err());
    }
}
