use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::precision::{decide_precision, PrecisionChoice, PrecisionDecision, PrecisionLevel};
use crate::sketch::{Transform, DEFAULT_D_FACTOR};
use crate::solvers::direct::check_system;
use crate::solvers::{
    apply_preconditioner, build_preconditioner, precondition_matrix, solve_hpne_with,
    solve_pne_with, Preconditioner, SolveReport,
};
use crate::timing::Stopwatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineMethod {
    #[default]
    Pne,
    Hpne,
}

impl fmt::Display for PipelineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PipelineMethod::Pne => "pne",
            PipelineMethod::Hpne => "hpne",
        })
    }
}

impl FromStr for PipelineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pne" => Ok(PipelineMethod::Pne),
            "hpne" => Ok(PipelineMethod::Hpne),
            other => Err(Error::InvalidInput(format!(
                "`{other}` is not a preconditioned method"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub method: PipelineMethod,
    pub precision: PrecisionChoice,
    pub d_factor: f64,
    pub transform: Transform,
    pub seed: u64,
    /// Compute `κ(A_p)` (an SVD of the m×n matrix) and store it in the
    /// report's preconditioner.
    pub diagnostics: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            method: PipelineMethod::Pne,
            precision: PrecisionChoice::Auto,
            d_factor: DEFAULT_D_FACTOR as f64,
            transform: Transform::Dct2,
            seed: 0,
            diagnostics: true,
        }
    }
}

/// A preconditioner together with how its precision was chosen.
#[derive(Debug, Clone)]
pub struct PreparedPreconditioner {
    pub preconditioner: Preconditioner,
    pub decision: Option<PrecisionDecision>,
    pub escalations: Vec<String>,
}

/// Precision choice and preconditioner construction, with one escalation
/// to the next precision if the chosen one loses rank or overflows.
pub fn prepare_preconditioner(
    a: &Matrix,
    opts: &PipelineOptions,
) -> Result<PreparedPreconditioner> {
    let (decision, mut level) = match opts.precision.fixed() {
        Some(p) => (None, p),
        None => {
            let d = decide_precision(a)?;
            (Some(d), d.selected)
        }
    };
    let mut escalations = Vec::new();
    let build =
        |p: PrecisionLevel| build_preconditioner(a, opts.d_factor, opts.transform, p, opts.seed);
    let preconditioner = match build(level) {
        Ok(p) => p,
        Err(
            e @ (Error::RankDeficient { .. }
            | Error::Overflow(_)
            | Error::SingularTriangular { .. }),
        ) => {
            let Some(next) = level.next_higher() else {
                return Err(e);
            };
            escalations.push(format!("{level} -> {next}: {e}"));
            level = next;
            build(level)?
        }
        Err(e) => return Err(e),
    };
    Ok(PreparedPreconditioner {
        preconditioner,
        decision,
        escalations,
    })
}

/// Chooses a precision (estimating `κ(A)` in single precision when asked
/// to), builds the sketched preconditioner in it, promotes `R_s`, forms
/// `A_p` in binary64 and solves PNE or HPNE.
///
/// If the preconditioner cannot be built because the chosen precision loses
/// rank or overflows, it is rebuilt once at the next higher precision; the
/// escalation is recorded in the report.
pub fn algorithm1_pipeline(a: &Matrix, b: &[f64], opts: &PipelineOptions) -> Result<SolveReport> {
    check_system(a, b)?;
    let sw = Stopwatch::start();
    let prepared = prepare_preconditioner(a, opts)?;
    let mut pre = prepared.preconditioner;
    let ap = if opts.diagnostics {
        precondition_matrix(a, &mut pre)?
    } else {
        apply_preconditioner(a, &pre)?
    };
    let mut rep = match opts.method {
        PipelineMethod::Pne => solve_pne_with(a, &ap, b, &pre)?,
        PipelineMethod::Hpne => solve_hpne_with(a, &ap, b, &pre)?,
    };
    rep.precision = prepared.decision;
    rep.escalations = prepared.escalations;
    rep.wall_ms = sw.elapsed_ms();
    if opts.diagnostics {
        crate::bounds::attach_bounds(&mut rep, a, b, Some((&pre, &ap)))?;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{householder_qr, relative_difference};
    use crate::rng::{gaussian_matrix, gaussian_vec, stream_rng};
    use crate::solvers::{solve_qr_baseline, Method};

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
    fn diagnostics_attach_bounds() {
        let a = graded(300, 8, 1e3, 4);
        let b = gaussian_vec(&mut stream_rng(4, 7), 300);
        let opts = PipelineOptions {
            precision: PrecisionChoice::Double,
            ..Default::default()
        };
        let rep = algorithm1_pipeline(&a, &b, &opts).unwrap();
        let keys: Vec<&str> = rep.bounds.keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, ["ls", "pne_new", "pne_old"]);
        assert_eq!(rep.a_norm_kind, crate::solvers::NormKind::Two);
        let quiet = PipelineOptions {
            diagnostics: false,
            ..opts
        };
        assert!(algorithm1_pipeline(&a, &b, &quiet)
            .unwrap()
            .bounds
            .is_empty());
    }

    #[test]
    fn auto_selection_by_condition() {
        for (kappa, want) in [
            (1e2, PrecisionLevel::Half),
            (1e6, PrecisionLevel::Single),
            (1e10, PrecisionLevel::Double),
        ] {
            let a = graded(400, 12, kappa, 1);
            let b = gaussian_vec(&mut stream_rng(1, 7), 400);
            let rep = algorithm1_pipeline(&a, &b, &PipelineOptions::default()).unwrap();
            let d = rep.precision.unwrap();
            assert_eq!(d.selected, want, "κ={kappa}: {d:?}");
            assert_eq!(rep.preconditioner.as_ref().unwrap().computed_in, want);
            assert!(rep.escalations.is_empty());
            assert_eq!(rep.method, Method::Pne);
        }
    }

    #[test]
    fn half_precision_escalates_when_rank_is_lost() {
        // The last column underflows to zero in binary16 but not in binary32.
        let base = gaussian_matrix(&mut stream_rng(2, 0), 200, 4);
        let a = Matrix::from_fn(200, 4, |i, j| {
            if j < 3 {
                base[(i, j)]
            } else {
                1e-9 * base[(i, j)]
            }
        });
        let b = gaussian_vec(&mut stream_rng(2, 1), 200);
        let opts = PipelineOptions {
            precision: PrecisionChoice::Half,
            ..Default::default()
        };
        let rep = algorithm1_pipeline(&a, &b, &opts).unwrap();
        assert_eq!(rep.escalations.len(), 1, "{:?}", rep.escalations);
        assert_eq!(
            rep.preconditioner.unwrap().computed_in,
            PrecisionLevel::Single
        );
    }

    #[test]
    fn hpne_pipeline_is_accurate() {
        let a = graded(500, 10, 1e4, 3);
        let b = gaussian_vec(&mut stream_rng(3, 7), 500);
        let opts = PipelineOptions {
            method: PipelineMethod::Hpne,
            precision: PrecisionChoice::Double,
            ..Default::default()
        };
        let rep = algorithm1_pipeline(&a, &b, &opts).unwrap();
        assert!(rep.precision.is_none());
        let qr = solve_qr_baseline(&a, &b).unwrap();
        assert!(relative_difference(&rep.x_hat, &qr.x_hat) < 1e-9);
        assert!(rep.preconditioner.unwrap().kappa_ap.unwrap() < 10.0);
    }

    #[test]
    fn power_of_two_scaling_is_bitwise_invariant() {
        let a = graded(300, 8, 1e3, 4);
        let b = gaussian_vec(&mut stream_rng(4, 7), 300);
        for method in [PipelineMethod::Pne, PipelineMethod::Hpne] {
            let opts = PipelineOptions {
                method,
                diagnostics: false,
                ..Default::default()
            };
            let x = algorithm1_pipeline(&a, &b, &opts).unwrap().x_hat;
            for k in [-20, 3, 30] {
                let s = 2f64.powi(k);
                let y = algorithm1_pipeline(
                    &a.scale(s),
                    &b.iter().map(|v| v * s).collect::<Vec<_>>(),
                    &opts,
                )
                .unwrap()
                .x_hat;
                assert_eq!(x, y, "{method} k={k}");
            }
        }
    }
}
