//! Least-squares solvers: QR baseline, normal, seminormal and not-normal
//! equations, and the sketch-preconditioned PNE/HPNE systems.

mod direct;
mod pipeline;
mod precond;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::{norm2, relative_difference, sub_vec, Matrix};
use crate::error::{Error, Result};
use crate::precision::PrecisionDecision;

pub use direct::{solve_normal, solve_notnormal, solve_qr_baseline, solve_seminormal};
pub use pipeline::{
    algorithm1_pipeline, prepare_preconditioner, PipelineMethod, PipelineOptions,
    PreparedPreconditioner,
};
pub use precond::{
    apply_preconditioner, build_preconditioner, precondition_matrix, sketch_rows, solve_hpne,
    solve_hpne_with, solve_pne, solve_pne_with, Preconditioner,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ne,
    Pne,
    Hpne,
    Sne,
    Nne,
    Qr,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Qr,
        Method::Ne,
        Method::Sne,
        Method::Nne,
        Method::Pne,
        Method::Hpne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ne => "ne",
            Method::Pne => "pne",
            Method::Hpne => "hpne",
            Method::Sne => "sne",
            Method::Nne => "nne",
            Method::Qr => "qr",
        }
    }

    pub fn is_preconditioned(self) -> bool {
        matches!(self, Method::Pne | Method::Hpne)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

/// Which norm of `A` the relative residual was divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Two,
    Frobenius,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub method: Method,
    pub x_hat: Vec<f64>,
    /// Solution of the preconditioned system (`ŷ = R_s x̂` solved for), when
    /// there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_hat: Option<Vec<f64>>,
    /// `‖Ax̂ - b‖`.
    pub residual_norm: f64,
    /// `‖Ax̂ - b‖ / (‖A‖ ‖x̂‖)`.
    pub relative_residual: f64,
    pub a_norm: f64,
    pub a_norm_kind: NormKind,
    /// `‖x̂ - x*‖ / ‖x̂‖` when a reference solution is known.
    pub relative_error: Option<f64>,
    pub preconditioner: Option<Preconditioner>,
    pub precision: Option<PrecisionDecision>,
    /// Precision escalations performed while building the preconditioner.
    pub escalations: Vec<String>,
    pub bounds: BTreeMap<String, f64>,
    pub wall_ms: f64,
}

impl SolveReport {
    pub(crate) fn new(method: Method, a: &Matrix, b: &[f64], x_hat: Vec<f64>) -> Result<Self> {
        let ax = a.matvec(&x_hat)?;
        let residual_norm = norm2(&sub_vec(&ax, b));
        let a_norm = a.frobenius_norm();
        let mut rep = SolveReport {
            method,
            x_hat,
            y_hat: None,
            residual_norm,
            relative_residual: 0.0,
            a_norm,
            a_norm_kind: NormKind::Frobenius,
            relative_error: None,
            preconditioner: None,
            precision: None,
            escalations: Vec::new(),
            bounds: BTreeMap::new(),
            wall_ms: 0.0,
        };
        rep.relative_residual = rep.residual_ratio(a_norm);
        Ok(rep)
    }

    fn residual_ratio(&self, a_norm: f64) -> f64 {
        self.residual_norm / (a_norm * norm2(&self.x_hat))
    }

    /// Re-normalize the relative residual by the spectral norm of `A`.
    pub fn set_a_two_norm(&mut self, two_norm: f64) {
        self.a_norm = two_norm;
        self.a_norm_kind = NormKind::Two;
        self.relative_residual = self.residual_ratio(two_norm);
    }

    /// Fill `relative_error` against a known solution.
    pub fn set_reference(&mut self, x_star: &[f64]) {
        self.relative_error = Some(relative_difference(&self.x_hat, x_star));
    }
}
