use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_hpne, bound_ls, bound_ne_family, bound_pne, BoundVariant, MeasuredSystem, NeKind,
};
use crate::dense::householder_qr;
use crate::error::{Error, Result};
use crate::precision::{PrecisionChoice, PrecisionLevel};
use crate::probgen::{generate_problem, LeastSquaresProblem};
use crate::rng::derive_seed;
use crate::sketch::{Transform, DEFAULT_D_FACTOR};
use crate::solvers::{
    apply_preconditioner, prepare_preconditioner, sketch_rows, solve_hpne_with, solve_normal,
    solve_notnormal, solve_pne_with, solve_qr_baseline, solve_seminormal, Method, PipelineOptions,
    PreparedPreconditioner, SolveReport,
};
use crate::timing::Stopwatch;

use super::U2;

pub const SWEEP_COLUMNS: [&str; 21] = [
    "method",
    "m",
    "n",
    "kappa",
    "rho",
    "precision",
    "d",
    "kappa_ap",
    "kappa_rs",
    "rel_error",
    "rel_residual",
    "bound_pne_old",
    "bound_pne_new",
    "bound_hpne_old",
    "bound_hpne_new",
    "bound_ne",
    "bound_ls",
    "seed",
    "trial",
    "wall_ms",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub m: usize,
    pub n: usize,
    pub kappa: f64,
    /// Ascending residual norms.
    pub rho_grid: Vec<f64>,
    pub methods: Vec<Method>,
    /// Precision of the PNE/HPNE preconditioner.
    pub precision: PrecisionChoice,
    pub d_factor: f64,
    pub transform: Transform,
    pub trials_per_point: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            m: 2000,
            n: 50,
            kappa: 1e4,
            rho_grid: log_grid(1e-16, 1.0, 33),
            methods: vec![Method::Qr, Method::Pne, Method::Hpne],
            precision: PrecisionChoice::Double,
            d_factor: DEFAULT_D_FACTOR as f64,
            transform: Transform::Dct2,
            trials_per_point: 1,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_point == 0 {
            return Err(Error::InvalidInput(
                "trials_per_point must be at least 1".into(),
            ));
        }
        if self.rho_grid.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidInput(
                "rho grid must be sorted ascending".into(),
            ));
        }
        if self.n == 0 || self.m <= self.n {
            return Err(Error::InvalidInput(format!(
                "need m > n >= 1, got m={}, n={}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

/// `points` values spaced evenly in log10 between `lo` and `hi`, endpoints
/// included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        hi
                    } else {
                        10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// One CSV record. `None` is written as an empty field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: Method,
    pub m: usize,
    pub n: usize,
    pub kappa: f64,
    pub rho: f64,
    pub precision: Option<PrecisionLevel>,
    pub d: Option<usize>,
    pub kappa_ap: Option<f64>,
    pub kappa_rs: Option<f64>,
    pub rel_error: Option<f64>,
    pub rel_residual: Option<f64>,
    pub bound_pne_old: Option<f64>,
    pub bound_pne_new: Option<f64>,
    pub bound_hpne_old: Option<f64>,
    pub bound_hpne_new: Option<f64>,
    pub bound_ne: Option<f64>,
    pub bound_ls: Option<f64>,
    pub seed: u64,
    pub trial: usize,
    pub wall_ms: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn empty(cfg: &SweepConfig, method: Method, rho: f64, seed: u64, trial: usize) -> Self {
        SweepRow {
            method,
            m: cfg.m,
            n: cfg.n,
            kappa: cfg.kappa,
            rho,
            precision: None,
            d: None,
            kappa_ap: None,
            kappa_rs: None,
            rel_error: None,
            rel_residual: None,
            bound_pne_old: None,
            bound_pne_new: None,
            bound_hpne_old: None,
            bound_hpne_new: None,
            bound_ne: None,
            bound_ls: None,
            seed,
            trial,
            wall_ms: None,
            error: None,
        }
    }
}

/// Generates one problem per (ρ, trial), solves it with every configured
/// method and evaluates the bounds that apply to each method. Failures are
/// recorded in the `error` column. Points run in parallel; each draws from
/// its own seed `derive_seed(seed, [ρ index, trial])`, so the output does
/// not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let points: Vec<(usize, usize)> = (0..cfg.rho_grid.len())
        .flat_map(|i| (0..cfg.trials_per_point).map(move |t| (i, t)))
        .collect();
    let rows = crate::par::map_indices(points.len(), |k| {
        let (i, t) = points[k];
        run_point(cfg, i, t)
    });
    Ok(rows.concat())
}

fn run_point(cfg: &SweepConfig, rho_idx: usize, trial: usize) -> Vec<SweepRow> {
    let rho = cfg.rho_grid[rho_idx];
    let seed = derive_seed(cfg.seed, &[rho_idx as u64, trial as u64]);
    let fail = |msg: String| -> Vec<SweepRow> {
        cfg.methods
            .iter()
            .map(|&m| SweepRow {
                error: Some(msg.clone()),
                ..SweepRow::empty(cfg, m, rho, seed, trial)
            })
            .collect()
    };
    let problem = match generate_problem(cfg.m, cfg.n, cfg.kappa, rho, seed) {
        Ok(p) => p,
        Err(e) => return fail(format!("generate: {e}")),
    };
    let system = match MeasuredSystem::new(&problem.a) {
        Ok(s) => s,
        Err(e) => return fail(format!("diagnostics: {e}")),
    };

    let needs_pre = cfg.methods.iter().any(|m| m.is_preconditioned());
    let pre_state = if needs_pre {
        Some(prepare(cfg, &problem, seed, &system))
    } else {
        None
    };

    cfg.methods
        .iter()
        .map(|&method| {
            let mut row = SweepRow::empty(cfg, method, rho, seed, trial);
            if let Err(e) = fill_row(&mut row, method, &problem, &system, pre_state.as_ref()) {
                row.error = Some(e.to_string());
            }
            row
        })
        .collect()
}

struct PreState {
    prepared: PreparedPreconditioner,
    system: MeasuredSystem,
    build_ms: f64,
    d: usize,
}

fn prepare(
    cfg: &SweepConfig,
    p: &LeastSquaresProblem,
    seed: u64,
    base: &MeasuredSystem,
) -> Result<PreState> {
    let opts = PipelineOptions {
        precision: cfg.precision,
        d_factor: cfg.d_factor,
        transform: cfg.transform,
        seed,
        ..Default::default()
    };
    let sw = Stopwatch::start();
    let prepared = prepare_preconditioner(&p.a, &opts)?;
    let ap = apply_preconditioner(&p.a, &prepared.preconditioner)?;
    let build_ms = sw.elapsed_ms();
    let system = base
        .clone()
        .with_preconditioner(&p.a, &prepared.preconditioner, ap)?;
    Ok(PreState {
        prepared,
        system,
        build_ms,
        d: sketch_rows(cfg.n, cfg.d_factor),
    })
}

fn fill_row(
    row: &mut SweepRow,
    method: Method,
    p: &LeastSquaresProblem,
    system: &MeasuredSystem,
    pre: Option<&Result<PreState>>,
) -> Result<()> {
    let (a, b) = (&p.a, p.b.as_slice());
    let (rep, sys, extra_ms, u1): (SolveReport, &MeasuredSystem, f64, f64) = match method {
        Method::Qr => (solve_qr_baseline(a, b)?, system, 0.0, U2),
        Method::Ne => (solve_normal(a, b)?, system, 0.0, U2),
        Method::Sne => (solve_seminormal(a, b)?, system, 0.0, U2),
        Method::Nne => {
            let sw = Stopwatch::start();
            let q = householder_qr(a)?.q;
            let ms = sw.elapsed_ms();
            (solve_notnormal(a, &q, b)?, system, ms, U2)
        }
        Method::Pne | Method::Hpne => {
            let st = match pre.expect("preconditioner prepared for preconditioned methods") {
                Ok(st) => st,
                Err(e) => return Err(e.clone()),
            };
            let pc = &st.prepared.preconditioner;
            let mp = st.system.pre.as_ref().expect("measured preconditioner");
            row.precision = Some(pc.computed_in);
            row.d = Some(st.d);
            row.kappa_rs = Some(mp.kappa_rs);
            row.kappa_ap = Some(mp.kappa_ap);
            let rep = if method == Method::Pne {
                solve_pne_with(a, &mp.ap, b, pc)?
            } else {
                solve_hpne_with(a, &mp.ap, b, pc)?
            };
            (rep, &st.system, st.build_ms, pc.computed_in.bound_u1())
        }
    };
    let mut rep = rep;
    rep.set_reference(&p.x_star);
    rep.set_a_two_norm(system.norm_a);
    row.rel_error = rep.relative_error;
    row.rel_residual = Some(rep.relative_residual);
    row.wall_ms = Some(rep.wall_ms + extra_ms);

    let inp = sys.inputs(a, b, &rep, u1, U2)?;
    row.bound_ls = Some(bound_ls(&inp)?);
    match method {
        Method::Ne => row.bound_ne = Some(bound_ne_family(&inp, NeKind::Normal)?),
        Method::Sne => row.bound_ne = Some(bound_ne_family(&inp, NeKind::Seminormal)?),
        Method::Pne => {
            row.bound_pne_old = bound_pne(&inp, BoundVariant::Old).ok();
            row.bound_pne_new = Some(bound_pne(&inp, BoundVariant::New)?);
        }
        Method::Hpne => {
            row.bound_hpne_old = bound_hpne(&inp, BoundVariant::Old).ok();
            row.bound_hpne_new = Some(bound_hpne(&inp, BoundVariant::New)?);
        }
        Method::Qr | Method::Nne => {}
    }
    Ok(())
}
