//! Computations behind the browser page. Everything here is plain Rust and
//! returns serializable structs; the wasm exports only wrap them in JSON.

use serde::Serialize;
use sketchpne::bounds::{bound_hpne, bound_pne, BoundInputs, BoundVariant};
use sketchpne::dense::condition_diagnostics;
use sketchpne::harness::{log_grid, run_sweep, SweepConfig};
use sketchpne::precision::{decide_precision, PrecisionLevel};
use sketchpne::rng::derive_seed;
use sketchpne::solvers::{build_preconditioner, precondition_matrix, Method};
use sketchpne::{generate_problem, PrecisionChoice, Result, Transform};

/// Relative errors and new/old bounds along a residual sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCurves {
    pub rho: Vec<f64>,
    pub qr: Vec<Option<f64>>,
    pub pne: Vec<Option<f64>>,
    pub hpne: Vec<Option<f64>>,
    pub pne_new: Vec<Option<f64>>,
    pub pne_old: Vec<Option<f64>>,
    pub hpne_new: Vec<Option<f64>>,
    pub hpne_old: Vec<Option<f64>>,
    pub precision: Option<PrecisionLevel>,
    pub kappa_ap: Option<f64>,
}

pub fn residual_sweep(
    m: usize,
    n: usize,
    kappa: f64,
    precision: PrecisionChoice,
    points: usize,
    seed: u64,
) -> Result<SweepCurves> {
    let cfg = SweepConfig {
        m,
        n,
        kappa,
        rho_grid: log_grid(1e-16, 1.0, points),
        methods: vec![Method::Qr, Method::Pne, Method::Hpne],
        precision,
        trials_per_point: 1,
        seed,
        ..Default::default()
    };
    let rows = run_sweep(&cfg)?;
    let pick = |method: Method,
                f: &dyn Fn(&sketchpne::harness::SweepRow) -> Option<f64>|
     -> Vec<Option<f64>> {
        rows.iter().filter(|r| r.method == method).map(f).collect()
    };
    let first_pne = rows.iter().find(|r| r.method == Method::Pne);
    Ok(SweepCurves {
        rho: cfg.rho_grid.clone(),
        qr: pick(Method::Qr, &|r| r.rel_error),
        pne: pick(Method::Pne, &|r| r.rel_error),
        hpne: pick(Method::Hpne, &|r| r.rel_error),
        pne_new: pick(Method::Pne, &|r| r.bound_pne_new),
        pne_old: pick(Method::Pne, &|r| r.bound_pne_old),
        hpne_new: pick(Method::Hpne, &|r| r.bound_hpne_new),
        hpne_old: pick(Method::Hpne, &|r| r.bound_hpne_old),
        precision: first_pne.and_then(|r| r.precision),
        kappa_ap: first_pne.and_then(|r| r.kappa_ap),
    })
}

/// `κ(A_p)` for preconditioners built in each precision over several
/// sketches, plus the automatic choice.
#[derive(Debug, Clone, Serialize)]
pub struct QualityReport {
    pub kappa_a: f64,
    pub kappa0: f64,
    pub overflowed: bool,
    pub selected: PrecisionLevel,
    /// Per precision, `κ(A_p)` of each trial; `None` where the build failed.
    pub trials: Vec<PrecisionTrials>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrecisionTrials {
    pub precision: PrecisionLevel,
    pub kappa_ap: Vec<Option<f64>>,
    pub failures: Vec<Option<String>>,
}

pub fn preconditioner_quality(
    m: usize,
    n: usize,
    kappa: f64,
    d_factor: f64,
    trials: usize,
    seed: u64,
) -> Result<QualityReport> {
    let p = generate_problem(m, n, kappa, 0.0, seed)?;
    let decision = decide_precision(&p.a)?;
    let kappa_a = condition_diagnostics(&p.a)?.two_norm_condition;
    let per = PrecisionLevel::ALL
        .iter()
        .map(|&level| {
            let (kappa_ap, failures) = (0..trials as u64)
                .map(|t| {
                    let s = derive_seed(seed, &[t]);
                    let built = build_preconditioner(&p.a, d_factor, Transform::Dct2, level, s)
                        .and_then(|mut pre| {
                            precondition_matrix(&p.a, &mut pre).map(|_| pre.kappa_ap)
                        });
                    match built {
                        Ok(k) => (k, None),
                        Err(e) => (None, Some(e.to_string())),
                    }
                })
                .unzip();
            PrecisionTrials {
                precision: level,
                kappa_ap,
                failures,
            }
        })
        .collect();
    Ok(QualityReport {
        kappa_a,
        kappa0: decision.kappa0,
        overflowed: decision.overflowed,
        selected: decision.selected,
        trials: per,
    })
}

/// Closed-form bounds against the residual ratio for fixed condition
/// numbers, with `κ(A_pᵀA) ≈ κ(A)`, `ν = 1` and `res_Ap = res_A`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCurves {
    pub residual: Vec<f64>,
    pub pne_new: Vec<f64>,
    pub pne_old: Vec<Option<f64>>,
    pub hpne_new: Vec<f64>,
    pub hpne_old: Vec<Option<f64>>,
}

pub fn bound_curves(
    kappa_a: f64,
    kappa_rs: f64,
    kappa_ap: f64,
    u1: f64,
    u2: f64,
    points: usize,
) -> Result<BoundCurves> {
    let residual = log_grid(1e-16, 1.0, points);
    let mut out = BoundCurves {
        residual: residual.clone(),
        pne_new: Vec::new(),
        pne_old: Vec::new(),
        hpne_new: Vec::new(),
        hpne_old: Vec::new(),
    };
    for &r in &residual {
        let inp = BoundInputs {
            kappa_a: Some(kappa_a),
            kappa_rs: Some(kappa_rs),
            kappa_ap: Some(kappa_ap),
            kappa_apta: Some(kappa_a),
            nu_pne: Some(1.0),
            nu_hpne: Some(1.0),
            u1: Some(u1),
            u2: Some(u2),
            eps_a: Some(u2),
            eps_s: Some(u1),
            eps_p: Some(u2),
            eps_b: Some(u2),
            res_ratio_a: Some(r),
            res_ratio_ap: Some(r),
        };
        out.pne_new.push(bound_pne(&inp, BoundVariant::New)?);
        out.pne_old.push(bound_pne(&inp, BoundVariant::Old).ok());
        out.hpne_new.push(bound_hpne(&inp, BoundVariant::New)?);
        out.hpne_old.push(bound_hpne(&inp, BoundVariant::Old).ok());
    }
    Ok(out)
}
