//! Closed-form forward error bounds for the least-squares formulations,
//! evaluated from measured condition numbers, residual ratios and unit
//! roundoffs.

mod measure;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::Method;

pub use measure::{
    attach_bounds, measure_bound_inputs, EpsilonMode, MeasuredPreconditioner, MeasuredSystem,
};

/// Scalars the bounds are built from. Unset fields make the bounds that
/// need them fail with [`Error::MissingField`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub kappa_a: Option<f64>,
    pub kappa_rs: Option<f64>,
    pub kappa_ap: Option<f64>,
    /// `κ(A_pᵀA)`.
    pub kappa_apta: Option<f64>,
    /// `‖R_s x̂‖ / (‖R_s‖ ‖x̂‖)`, at most one.
    pub nu_pne: Option<f64>,
    /// `‖A_p‖ ‖A‖ / ‖A_pᵀA‖`, at least one.
    pub nu_hpne: Option<f64>,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    pub eps_a: Option<f64>,
    pub eps_s: Option<f64>,
    pub eps_p: Option<f64>,
    pub eps_b: Option<f64>,
    /// `‖Ax̂ - b‖ / (‖A‖ ‖x̂‖)`.
    pub res_ratio_a: Option<f64>,
    /// `‖A_p ŷ - b‖ / (‖A_p‖ ‖ŷ‖)`.
    pub res_ratio_ap: Option<f64>,
}

macro_rules! field {
    ($inputs:expr, $name:ident) => {
        $inputs
            .$name
            .ok_or(Error::MissingField(stringify!($name)))?
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVariant {
    Old,
    New,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeKind {
    Normal,
    Seminormal,
}

/// `|κ(R_s) u₁ / (1 - κ(R_s) u₁)|`.
pub fn eta1(kappa_rs: f64, u1: f64) -> Result<f64> {
    let t = kappa_rs * u1;
    let denom = 1.0 - t;
    if denom.abs() <= 1e-15 {
        return Err(Error::PoleAtOne(t));
    }
    Ok((t / denom).abs())
}

/// Least squares: `κ(A) ε_A (1 + κ(A) res_A)`.
pub fn bound_ls(inp: &BoundInputs) -> Result<f64> {
    let k = field!(inp, kappa_a);
    let e = field!(inp, eps_a);
    let r = field!(inp, res_ratio_a);
    Ok(k * e * (1.0 + k * r))
}

/// Normal and seminormal equations share `κ(A)² ε_A (res_A + 1 + ε_A)`.
pub fn bound_ne_family(inp: &BoundInputs, _kind: NeKind) -> Result<f64> {
    let k = field!(inp, kappa_a);
    let e = field!(inp, eps_a);
    let r = field!(inp, res_ratio_a);
    Ok(k * k * e * (r + 1.0 + e))
}

/// Preconditioned normal equations.
///
/// * old: `κ(R_s) κ(A_p) ν (u₂ + κ(A_p) η₁ (res_Ap + u₂))`
/// * new: `κ(R_s) κ(A_p) u₂ (κ(A_p) κ(R_s) res_A + 1 + κ(A) u₂)`
pub fn bound_pne(inp: &BoundInputs, variant: BoundVariant) -> Result<f64> {
    let krs = field!(inp, kappa_rs);
    let kap = field!(inp, kappa_ap);
    let u2 = field!(inp, u2);
    match variant {
        BoundVariant::Old => {
            let nu = field!(inp, nu_pne);
            let res = field!(inp, res_ratio_ap);
            let e1 = eta1(krs, field!(inp, u1))?;
            Ok(krs * kap * nu * (u2 + kap * e1 * (res + u2)))
        }
        BoundVariant::New => {
            let ka = field!(inp, kappa_a);
            let res = field!(inp, res_ratio_a);
            Ok(krs * kap * u2 * (kap * krs * res + 1.0 + ka * u2))
        }
    }
}

/// Half-preconditioned normal equations.
///
/// * old: `κ(A_pᵀA) ν (η₁ res_A + (1 + η₁) u₂)`
/// * new: `κ(A_pᵀA) ν u₂ (κ(R_s) res_A + 1 + κ(A) u₂)`
pub fn bound_hpne(inp: &BoundInputs, variant: BoundVariant) -> Result<f64> {
    let k = field!(inp, kappa_apta);
    let nu = field!(inp, nu_hpne);
    let res = field!(inp, res_ratio_a);
    let u2 = field!(inp, u2);
    let krs = field!(inp, kappa_rs);
    match variant {
        BoundVariant::Old => {
            let e1 = eta1(krs, field!(inp, u1))?;
            Ok(k * nu * (e1 * res + (1.0 + e1) * u2))
        }
        BoundVariant::New => {
            let ka = field!(inp, kappa_a);
            Ok(k * nu * u2 * (krs * res + 1.0 + ka * u2))
        }
    }
}

/// Not-normal equations `BᵀAx = Bᵀb`:
/// `κ(BᵀA) ν_B (ε_B res_A + (1 + ε_B) ε_A)` with `ν_B = ‖B‖‖A‖/‖BᵀA‖`.
pub fn bound_notnormal(inp: &BoundInputs, kappa_bta: f64, nu_b: f64) -> Result<f64> {
    let ea = field!(inp, eps_a);
    let eb = field!(inp, eps_b);
    let res = field!(inp, res_ratio_a);
    Ok(kappa_bta * nu_b * (eb * res + (1.0 + eb) * ea))
}

/// Every bound that the inputs support, keyed by its CSV name.
pub fn evaluate_all(inp: &BoundInputs) -> Vec<(&'static str, f64)> {
    let mut out = Vec::new();
    let mut push = |name, v: Result<f64>| {
        if let Ok(v) = v {
            out.push((name, v));
        }
    };
    push("ls", bound_ls(inp));
    push("ne", bound_ne_family(inp, NeKind::Normal));
    push("pne_old", bound_pne(inp, BoundVariant::Old));
    push("pne_new", bound_pne(inp, BoundVariant::New));
    push("hpne_old", bound_hpne(inp, BoundVariant::Old));
    push("hpne_new", bound_hpne(inp, BoundVariant::New));
    out
}

/// The bounds relevant to `method`: always `ls`, plus `ne` for the normal
/// and seminormal equations and the old and new variants for PNE and HPNE.
/// An old bound at the `η₁` pole is left out.
pub fn method_bounds(method: Method, inp: &BoundInputs) -> Vec<(&'static str, f64)> {
    let mut out = Vec::new();
    if let Ok(v) = bound_ls(inp) {
        out.push(("ls", v));
    }
    let extra: Vec<(&'static str, Result<f64>)> = match method {
        Method::Ne => vec![("ne", bound_ne_family(inp, NeKind::Normal))],
        Method::Sne => vec![("ne", bound_ne_family(inp, NeKind::Seminormal))],
        Method::Pne => vec![
            ("pne_old", bound_pne(inp, BoundVariant::Old)),
            ("pne_new", bound_pne(inp, BoundVariant::New)),
        ],
        Method::Hpne => vec![
            ("hpne_old", bound_hpne(inp, BoundVariant::Old)),
            ("hpne_new", bound_hpne(inp, BoundVariant::New)),
        ],
        Method::Qr | Method::Nne => vec![],
    };
    out.extend(
        extra
            .into_iter()
            .filter_map(|(k, v)| v.ok().map(|v| (k, v))),
    );
    out
}
