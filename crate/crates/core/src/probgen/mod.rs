//! Least-squares test problems with a planted condition number, a unit-norm
//! solution and a residual of prescribed norm orthogonal to `range(A)`.

mod archive;

use serde::{Deserialize, Serialize};

use crate::dense::{householder_qr, householder_r, norm2, Matrix};
use crate::error::{Error, Result};
use crate::rng::{gaussian_matrix, gaussian_vec, stream, stream_rng};

pub use archive::{load_problem, save_problem, ProblemMeta, ARCHIVE_FORMAT_VERSION};

/// Residual directions shorter than this are redrawn.
pub const MIN_RESIDUAL_DIRECTION: f64 = 1e-12;
pub const RESIDUAL_RETRIES: usize = 3;

#[derive(Debug, Clone)]
pub struct LeastSquaresProblem {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub x_star: Vec<f64>,
    pub rho: f64,
    pub kappa: f64,
    pub seed: u64,
}

impl LeastSquaresProblem {
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn meta(&self) -> ProblemMeta {
        ProblemMeta {
            m: self.m(),
            n: self.n(),
            kappa: self.kappa,
            rho: self.rho,
            seed: self.seed,
            format_version: ARCHIVE_FORMAT_VERSION,
        }
    }
}

/// How the planted singular values are spread between 1 and `1/κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spectrum {
    /// `σ_i = κ^{-(i-1)/(n-1)}`.
    #[default]
    Logarithmic,
    /// `σ_1 = … = σ_{n-1} = 1`, `σ_n = 1/κ`.
    SingleSmall,
}

impl Spectrum {
    pub fn values(self, n: usize, kappa: f64) -> Vec<f64> {
        if n == 1 {
            return vec![1.0];
        }
        match self {
            Spectrum::Logarithmic => (0..n)
                .map(|i| kappa.powf(-(i as f64) / (n - 1) as f64))
                .collect(),
            Spectrum::SingleSmall => (0..n)
                .map(|i| if i + 1 == n { 1.0 / kappa } else { 1.0 })
                .collect(),
        }
    }
}

fn orthonormal_from_stream(m: usize, k: usize, seed: u64, id: u64) -> Result<Matrix> {
    if k > m {
        return Err(Error::InvalidInput(format!(
            "cannot fit {k} orthonormal columns in R^{m}"
        )));
    }
    let g = gaussian_matrix(&mut stream_rng(seed, id), m, k);
    Ok(householder_qr(&g)?.q)
}

/// Orthonormal `m×k` factor of a seeded Gaussian matrix.
pub fn random_orthogonal_columns(m: usize, k: usize, seed: u64) -> Result<Matrix> {
    orthonormal_from_stream(m, k, seed, stream::PROBLEM_BASIS)
}

/// Upper triangular `R` with `‖R‖ = 1` and `κ(R) = κ`: the triangular
/// factor of `U Σ Vᵀ` for random orthogonal `U`, `V` and log-spaced `Σ`.
pub fn triangular_with_condition(n: usize, kappa: f64, seed: u64) -> Result<Matrix> {
    triangular_with_spectrum(n, kappa, seed, Spectrum::Logarithmic)
}

pub fn triangular_with_spectrum(
    n: usize,
    kappa: f64,
    seed: u64,
    spectrum: Spectrum,
) -> Result<Matrix> {
    if n == 0 || !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need n >= 1 and finite kappa >= 1, got n={n}, kappa={kappa}"
        )));
    }
    let u = orthonormal_from_stream(n, n, seed, stream::PROBLEM_LEFT)?;
    let v = orthonormal_from_stream(n, n, seed, stream::PROBLEM_RIGHT)?;
    let mut us = u;
    for (j, s) in spectrum.values(n, kappa).into_iter().enumerate() {
        us.col_mut(j).iter_mut().for_each(|x| *x *= s);
    }
    let m = us.matmul(&v.transpose())?;
    householder_r(&m)
}

pub fn generate_problem(
    m: usize,
    n: usize,
    kappa: f64,
    rho: f64,
    seed: u64,
) -> Result<LeastSquaresProblem> {
    generate_problem_with(m, n, kappa, rho, seed, Spectrum::Logarithmic)
}

/// `A = Q₁R`, `x*` a normalized Gaussian, `b = Ax* + ρ e_r/‖e_r‖` with `e_r`
/// a Gaussian projected twice onto the orthogonal complement of `range(Q₁)`.
pub fn generate_problem_with(
    m: usize,
    n: usize,
    kappa: f64,
    rho: f64,
    seed: u64,
    spectrum: Spectrum,
) -> Result<LeastSquaresProblem> {
    if n == 0 || m <= n {
        return Err(Error::InvalidInput(format!(
            "need m > n >= 1, got m={m}, n={n}"
        )));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::InvalidInput(format!(
            "residual norm must be finite and >= 0, got {rho}"
        )));
    }
    let q1 = random_orthogonal_columns(m, n, seed)?;
    let r = triangular_with_spectrum(n, kappa, seed, spectrum)?;
    let a = q1.matmul(&r)?;

    let mut x_star = gaussian_vec(&mut stream_rng(seed, stream::PROBLEM_SOLUTION), n);
    let xn = norm2(&x_star);
    x_star.iter_mut().for_each(|v| *v /= xn);

    let mut b = a.matvec(&x_star)?;
    if rho > 0.0 {
        let e = residual_direction(&q1, seed)?;
        for (bi, ei) in b.iter_mut().zip(&e) {
            *bi += rho * ei;
        }
    }
    Ok(LeastSquaresProblem {
        a,
        b,
        x_star,
        rho,
        kappa,
        seed,
    })
}

/// Unit vector orthogonal to `range(q1)`.
fn residual_direction(q1: &Matrix, seed: u64) -> Result<Vec<f64>> {
    let mut rng = stream_rng(seed, stream::PROBLEM_RESIDUAL);
    let mut last = 0.0;
    for _ in 0..=RESIDUAL_RETRIES {
        let mut e = gaussian_vec(&mut rng, q1.rows());
        let g = norm2(&e);
        for _ in 0..2 {
            let c = q1.tr_matvec(&e)?;
            let qc = q1.matvec(&c)?;
            e.iter_mut().zip(&qc).for_each(|(x, y)| *x -= y);
        }
        let en = norm2(&e);
        last = en / g;
        if last >= MIN_RESIDUAL_DIRECTION {
            e.iter_mut().for_each(|x| *x /= en);
            return Ok(e);
        }
    }
    Err(Error::DegenerateResidual(last))
}
