use crate::arith::{Arith, Binary64};
use crate::dense::Matrix;
use crate::error::{Error, Result};

/// Thin QR factors: `q` is m×n with orthonormal columns, `r` is n×n upper
/// triangular.
#[derive(Debug, Clone)]
pub struct QrFactors {
    pub q: Matrix,
    pub r: Matrix,
}

/// Householder reflectors in compact form. Column `k` of `packed` holds
/// `R[..=k, k]` on and above the diagonal and the tail of the `k`-th
/// reflector (`v[0] = 1` implied) below it.
pub(crate) struct Householder {
    packed: Matrix,
    tau: Vec<f64>,
}

impl Householder {
    /// Householder QR with every arithmetic result rounded by `A`.
    ///
    /// A column whose trailing part is already zero is left alone (`tau = 0`),
    /// so e.g. the identity factors as `Q = R = I`.
    pub(crate) fn factor<A: Arith>(a: &Matrix) -> Result<Self> {
        let (m, n) = a.shape();
        if m < n {
            return Err(Error::InvalidInput(format!(
                "QR needs rows >= cols, got {m}x{n}"
            )));
        }
        let mut w = a.clone();
        let mut tau = vec![0.0; n];
        for k in 0..n {
            let (x0, tail_ss) = {
                let col = &w.col(k)[k..];
                let tail_ss = col[1..].iter().fold(0.0, |acc, &v| A::mul_add(acc, v, v));
                (col[0], tail_ss)
            };
            if !tail_ss.is_finite() {
                return Err(Error::Overflow(A::NAME));
            }
            if tail_ss == 0.0 {
                if x0 == 0.0 {
                    return Err(Error::RankDeficient { column: k });
                }
                continue;
            }
            let norm = A::sqrt(A::mul_add(tail_ss, x0, x0));
            if !norm.is_finite() {
                return Err(Error::Overflow(A::NAME));
            }
            let beta = if x0 >= 0.0 { -norm } else { norm };
            let t = A::div(A::sub(beta, x0), beta);
            let denom = A::sub(x0, beta);
            {
                let col = &mut w.col_mut(k)[k..];
                col[0] = beta;
                for v in &mut col[1..] {
                    *v = A::div(*v, denom);
                }
            }
            tau[k] = t;
            for j in k + 1..n {
                apply_reflector::<A>(&mut w, k, j, t);
            }
        }
        Ok(Self { packed: w, tau })
    }

    pub(crate) fn r(&self) -> Matrix {
        let n = self.packed.cols();
        Matrix::from_fn(n, n, |i, j| if i <= j { self.packed[(i, j)] } else { 0.0 })
    }

    /// Overwrites `y` (length m) with `Qᵀ y` for the full orthogonal `Q`.
    pub(crate) fn apply_qt(&self, y: &mut [f64]) {
        let n = self.packed.cols();
        for k in 0..n {
            let t = self.tau[k];
            if t == 0.0 {
                continue;
            }
            let v = &self.packed.col(k)[k + 1..];
            let tail = &mut y[k..];
            let s = t * (tail[0] + crate::dense::dot(v, &tail[1..]));
            tail[0] -= s;
            for (c, &vi) in tail[1..].iter_mut().zip(v) {
                *c -= s * vi;
            }
        }
    }

    /// Explicit thin Q by backward accumulation.
    pub(crate) fn q<A: Arith>(&self) -> Matrix {
        let (m, n) = self.packed.shape();
        let mut q = Matrix::eye(m, n);
        for k in (0..n).rev() {
            let t = self.tau[k];
            if t == 0.0 {
                continue;
            }
            let v = &self.packed.col(k)[k + 1..];
            for j in k..n {
                let col = &mut q.col_mut(j)[k..];
                let w = A::add(col[0], A::dot(v, &col[1..]));
                let s = A::mul(t, w);
                col[0] = A::sub(col[0], s);
                for (c, &vi) in col[1..].iter_mut().zip(v) {
                    *c = A::mul_sub(*c, s, vi);
                }
            }
        }
        q
    }
}

/// Apply reflector `k` (stored in column `k` of `w`) to column `j > k`.
#[inline]
fn apply_reflector<A: Arith>(w: &mut Matrix, k: usize, j: usize, t: f64) {
    let (left, target) = w.split_col_mut(j);
    let m = target.len();
    let v = &left[k * m + k + 1..(k + 1) * m];
    let col = &mut target[k..];
    let s = A::mul(t, A::add(col[0], A::dot(v, &col[1..])));
    col[0] = A::sub(col[0], s);
    for (c, &vi) in col[1..].iter_mut().zip(v) {
        *c = A::mul_sub(*c, s, vi);
    }
}

/// Thin Householder QR in binary64.
pub fn householder_qr(a: &Matrix) -> Result<QrFactors> {
    qr_with::<Binary64>(a)
}

/// Only the triangular factor; skips forming Q.
pub fn householder_r(a: &Matrix) -> Result<Matrix> {
    Ok(Householder::factor::<Binary64>(a)?.r())
}

pub(crate) fn r_with<A: Arith>(a: &Matrix) -> Result<Matrix> {
    Ok(Householder::factor::<A>(a)?.r())
}

pub(crate) fn qr_with<A: Arith>(a: &Matrix) -> Result<QrFactors> {
    let h = Householder::factor::<A>(a)?;
    Ok(QrFactors {
        q: h.q::<A>(),
        r: h.r(),
    })
}
