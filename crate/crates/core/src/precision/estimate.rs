use serde::{Deserialize, Serialize};

use crate::arith::{Arith, Binary32};
use crate::dense::qr::r_with;
use crate::dense::triangular::solve_upper_in_place;
use crate::dense::{hager_one_norm_inverse_estimate, Matrix};
use crate::error::{Error, Result};
use crate::precision::{round_to_precision, PrecisionLevel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    /// `0.5 · log10(n ‖G‖₁ est‖G⁻¹‖₁)` with `G = AᵀA`, an estimate of
    /// `log10 κ(A)` from above.
    pub kappa0: f64,
    pub overflowed: bool,
}

impl ConditionEstimate {
    fn overflow() -> Self {
        ConditionEstimate {
            kappa0: f64::INFINITY,
            overflowed: true,
        }
    }
}

/// Single-precision estimate of `log10 κ(A)` through
/// `κ(A)² ≤ n ‖AᵀA‖₁ ‖(AᵀA)⁻¹‖₁`.
///
/// `‖G‖₁` comes from `G = AᵀA` formed in binary32. `‖G⁻¹‖₁` is Hager's
/// estimate with solves `Rᵀ(R x) = y`, where `R` is the binary32 Householder
/// factor of `A`. Going through `R` instead of a Cholesky factor of `G`
/// keeps the estimate usable until `κ(A)` itself, not `κ(A)²`, reaches the
/// binary32 limit. A non-finite intermediate or a breakdown of the binary32
/// QR is reported as overflow.
pub fn estimate_log10_condition(a: &Matrix) -> Result<ConditionEstimate> {
    let (m, n) = a.shape();
    if m < n || n == 0 {
        return Err(Error::InvalidInput(format!(
            "condition estimate needs rows >= cols >= 1, got {m}x{n}"
        )));
    }
    let rounded = round_to_precision(a, PrecisionLevel::Single);
    if rounded.overflowed || !rounded.matrix.is_finite() {
        return Ok(ConditionEstimate::overflow());
    }
    let a32 = rounded.matrix;

    let g_norm = gram_one_norm_binary32(&a32);
    if !g_norm.is_finite() {
        return Ok(ConditionEstimate::overflow());
    }

    let r = match r_with::<Binary32>(&a32) {
        Ok(r) => r,
        Err(Error::RankDeficient { .. }) | Err(Error::Overflow(_)) => {
            return Ok(ConditionEstimate::overflow())
        }
        Err(e) => return Err(e),
    };
    if (0..n).any(|i| r[(i, i)] == 0.0) {
        return Ok(ConditionEstimate::overflow());
    }

    let inv_est = hager_one_norm_inverse_estimate(n, |x, _| {
        let mut y = x.to_vec();
        solve_upper_in_place::<Binary32>(&r, &mut y, true);
        solve_upper_in_place::<Binary32>(&r, &mut y, false);
        Ok(y)
    })?;
    if !inv_est.is_finite() || inv_est <= 0.0 {
        return Ok(ConditionEstimate::overflow());
    }
    let bound = n as f64 * g_norm * inv_est;
    // The product itself is formed in binary64; only its inputs are single.
    let kappa0 = 0.5 * bound.log10();
    if !kappa0.is_finite() {
        return Ok(ConditionEstimate::overflow());
    }
    Ok(ConditionEstimate {
        kappa0,
        overflowed: false,
    })
}

/// `‖AᵀA‖₁` with the product and the column sums rounded to binary32.
fn gram_one_norm_binary32(a: &Matrix) -> f64 {
    let n = a.cols();
    let mut g = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..=j {
            let v = Binary32::dot(a.col(i), a.col(j));
            g[i + j * n] = v;
            g[j + i * n] = v;
        }
    }
    (0..n)
        .map(|j| {
            g[j * n..(j + 1) * n]
                .iter()
                .fold(0.0, |acc, v| Binary32::add(acc, v.abs()))
        })
        .fold(0.0, f64::max)
}
