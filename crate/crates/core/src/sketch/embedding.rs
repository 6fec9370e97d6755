use serde::{Deserialize, Serialize};

use crate::dense::Matrix;
use crate::error::{Error, Result};

/// Parameters of the subspace-embedding sample-size bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    /// Coherence of the transformed orthonormal basis, in `[n/m, 1]`.
    pub coherence_mu: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub n: usize,
    pub m: usize,
}

impl EmbeddingParams {
    pub fn validate(&self) -> Result<()> {
        let p = self;
        if p.n == 0 || p.m < p.n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= n <= m, got n={}, m={}",
                p.n, p.m
            )));
        }
        let floor = p.n as f64 / p.m as f64;
        if !(p.coherence_mu <= 1.0 && p.coherence_mu >= floor * (1.0 - 1e-12)) {
            return Err(Error::InvalidInput(format!(
                "coherence {} outside [{floor}, 1]",
                p.coherence_mu
            )));
        }
        if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon {} outside (0, 1)",
                p.epsilon
            )));
        }
        if !(p.delta > 0.0 && p.delta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "delta {} outside (0, 1)",
                p.delta
            )));
        }
        Ok(())
    }
}

/// `⌈2 m μ (1 + ε/3) ln(n/δ) / ε²⌉`, the number of uniformly sampled rows
/// after which the sketch is an ε-embedding with probability `1 - δ`.
pub fn sample_size_lower_bound(p: &EmbeddingParams) -> Result<usize> {
    p.validate()?;
    let log = (p.n as f64 / p.delta).ln();
    if log <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "ln(n/delta) = {log} is not positive"
        )));
    }
    let d = 2.0 * (p.m as f64 * p.coherence_mu) * (1.0 + p.epsilon / 3.0) * log
        / (p.epsilon * p.epsilon);
    Ok(d.ceil() as usize)
}

/// Largest squared row norm of a matrix with orthonormal columns.
pub fn coherence(q: &Matrix) -> Result<f64> {
    let defect = q.orthonormality_defect();
    if !(defect <= 1e-10) {
        return Err(Error::NotOrthonormal { deviation: defect });
    }
    let mut row_sq = vec![0.0; q.rows()];
    for j in 0..q.cols() {
        for (s, v) in row_sq.iter_mut().zip(q.col(j)) {
            *s += v * v;
        }
    }
    Ok(row_sq.into_iter().fold(0.0, f64::max))
}
