use serde::{Deserialize, Serialize};

use crate::bounds::{method_bounds, BoundInputs};
use crate::dense::{condition_diagnostics, norm2, sub_vec, Matrix};
use crate::error::Result;
use crate::solvers::{apply_preconditioner, Preconditioner, SolveReport};

/// Two-norm quantities of `A` and, optionally, of a preconditioner, shared
/// by all solves of one problem.
#[derive(Debug, Clone)]
pub struct MeasuredSystem {
    pub kappa_a: f64,
    pub norm_a: f64,
    pub pre: Option<MeasuredPreconditioner>,
}

#[derive(Debug, Clone)]
pub struct MeasuredPreconditioner {
    pub r_s: Matrix,
    pub ap: Matrix,
    pub kappa_rs: f64,
    pub norm_rs: f64,
    pub kappa_ap: f64,
    pub norm_ap: f64,
    /// Of the explicitly formed n×n product `A_pᵀA`.
    pub kappa_apta: f64,
    pub norm_apta: f64,
}

/// How the ε terms of the bounds are filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonMode {
    /// ε_A = ε_p = ε_B = u₂ and ε_s = u₁.
    #[default]
    UnitRoundoff,
    /// ε_A = ε_p = ε_B = `‖Aᵀ(b - Ax̂)‖ / (‖A‖² ‖x̂‖)`, the normwise backward
    /// error of x̂ as a solution of the normal equations; ε_s = u₁.
    Measured,
}

impl MeasuredSystem {
    pub fn new(a: &Matrix) -> Result<Self> {
        let d = condition_diagnostics(a)?;
        Ok(MeasuredSystem {
            kappa_a: d.two_norm_condition,
            norm_a: d.two_norm,
            pre: None,
        })
    }

    /// Adds diagnostics of `pre` given `A_p = A R_s⁻¹`.
    pub fn with_preconditioner(
        mut self,
        a: &Matrix,
        pre: &Preconditioner,
        ap: Matrix,
    ) -> Result<Self> {
        let rs = condition_diagnostics(&pre.r_s)?;
        let apd = condition_diagnostics(&ap)?;
        let cross = ap.tr_matmul(a)?;
        let cd = condition_diagnostics(&cross)?;
        self.pre = Some(MeasuredPreconditioner {
            r_s: pre.r_s.clone(),
            ap,
            kappa_rs: rs.two_norm_condition,
            norm_rs: rs.two_norm,
            kappa_ap: apd.two_norm_condition,
            norm_ap: apd.two_norm,
            kappa_apta: cd.two_norm_condition,
            norm_apta: cd.two_norm,
        });
        Ok(self)
    }

    /// Bound inputs for one computed solution, ε terms set to unit roundoffs.
    pub fn inputs(
        &self,
        a: &Matrix,
        b: &[f64],
        report: &SolveReport,
        u1: f64,
        u2: f64,
    ) -> Result<BoundInputs> {
        self.inputs_with(a, b, report, u1, u2, EpsilonMode::UnitRoundoff)
    }

    pub fn inputs_with(
        &self,
        a: &Matrix,
        b: &[f64],
        report: &SolveReport,
        u1: f64,
        u2: f64,
        mode: EpsilonMode,
    ) -> Result<BoundInputs> {
        let x = &report.x_hat;
        let xn = norm2(x);
        let r = sub_vec(&a.matvec(x)?, b);
        let res = norm2(&r);
        let eps = match mode {
            EpsilonMode::UnitRoundoff => u2,
            EpsilonMode::Measured => norm2(&a.tr_matvec(&r)?) / (self.norm_a * self.norm_a * xn),
        };
        let mut inp = BoundInputs {
            kappa_a: Some(self.kappa_a),
            u1: Some(u1),
            u2: Some(u2),
            eps_a: Some(eps),
            eps_s: Some(u1),
            eps_p: Some(eps),
            eps_b: Some(eps),
            res_ratio_a: Some(res / (self.norm_a * xn)),
            ..Default::default()
        };
        if let Some(p) = &self.pre {
            let rx = p.r_s.matvec(x)?;
            let y = report.y_hat.clone().unwrap_or_else(|| rx.clone());
            let res_p = norm2(&sub_vec(&p.ap.matvec(&y)?, b));
            inp.kappa_rs = Some(p.kappa_rs);
            inp.kappa_ap = Some(p.kappa_ap);
            inp.kappa_apta = Some(p.kappa_apta);
            inp.nu_pne = Some(norm2(&rx) / (p.norm_rs * xn));
            inp.nu_hpne = Some(p.norm_ap * self.norm_a / p.norm_apta);
            inp.res_ratio_ap = Some(res_p / (p.norm_ap * norm2(&y)));
        }
        Ok(inp)
    }
}

/// All bound inputs for `report`, computed from scratch. ε terms are set to
/// unit roundoffs: `ε_A = ε_p = ε_B = u₂`, `ε_s = u₁`.
pub fn measure_bound_inputs(
    a: &Matrix,
    b: &[f64],
    report: &SolveReport,
    pre: &Preconditioner,
    u1: f64,
    u2: f64,
) -> Result<BoundInputs> {
    let ap = apply_preconditioner(a, pre)?;
    MeasuredSystem::new(a)?
        .with_preconditioner(a, pre, ap)?
        .inputs(a, b, report, u1, u2)
}

/// Measures the bound inputs for `report` and stores the bounds that apply
/// to its method in `report.bounds`; also switches the relative residual to
/// the spectral norm of `A`. `pre` is the preconditioner together with
/// `A_p = A R_s⁻¹`.
pub fn attach_bounds(
    report: &mut SolveReport,
    a: &Matrix,
    b: &[f64],
    pre: Option<(&Preconditioner, &Matrix)>,
) -> Result<()> {
    let mut sys = MeasuredSystem::new(a)?;
    let mut u1 = f64::EPSILON;
    if let Some((p, ap)) = pre {
        sys = sys.with_preconditioner(a, p, ap.clone())?;
        u1 = p.computed_in.bound_u1();
    }
    report.set_a_two_norm(sys.norm_a);
    let inp = sys.inputs(a, b, report, u1, f64::EPSILON)?;
    report.bounds = method_bounds(report.method, &inp)
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    Ok(())
}
