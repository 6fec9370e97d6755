use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::PrecisionChoice;
use crate::probgen::generate_problem;
use crate::rng::derive_seed;
use crate::solvers::{algorithm1_pipeline, solve_qr_baseline, PipelineOptions, SolveReport};
use crate::timing::Stopwatch;

pub const BENCH_COLUMNS: [&str; 9] = [
    "method",
    "m",
    "n",
    "kappa",
    "trials",
    "median_ms",
    "ratio_to_qr",
    "median_rel_error",
    "seed",
];

/// Residual norm of the benchmark problems.
const BENCH_RHO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub m: usize,
    pub n_list: Vec<usize>,
    pub kappa: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    /// `qr`, `pne_double` or `pne_auto`.
    pub method: String,
    pub m: usize,
    pub n: usize,
    pub kappa: f64,
    pub trials: usize,
    pub median_ms: f64,
    /// `median_ms(qr) / median_ms(method)`.
    pub ratio_to_qr: f64,
    pub median_rel_error: f64,
    pub seed: u64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Median wall-clock times of the QR baseline and of PNE with a double and
/// an automatically chosen preconditioner. Runs sequentially; nothing is
/// asserted about the timings.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.trials == 0 || cfg.n_list.is_empty() {
        return Err(Error::InvalidInput(
            "benchmark needs trials >= 1 and at least one n".into(),
        ));
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let labels = ["qr", "pne_double", "pne_auto"];
        let mut times = vec![Vec::new(); 3];
        let mut errors = vec![Vec::new(); 3];
        for t in 0..cfg.trials {
            let seed = derive_seed(cfg.seed, &[n as u64, t as u64]);
            let p = generate_problem(cfg.m, n, cfg.kappa, BENCH_RHO, seed)?;
            for (k, label) in labels.iter().enumerate() {
                let sw = Stopwatch::start();
                let mut rep: SolveReport = match *label {
                    "qr" => solve_qr_baseline(&p.a, &p.b)?,
                    _ => {
                        let precision = if *label == "pne_auto" {
                            PrecisionChoice::Auto
                        } else {
                            PrecisionChoice::Double
                        };
                        let opts = PipelineOptions {
                            precision,
                            seed,
                            diagnostics: false,
                            ..Default::default()
                        };
                        algorithm1_pipeline(&p.a, &p.b, &opts)?
                    }
                };
                // Sub-millisecond runs can read as zero on coarse clocks.
                times[k].push(sw.elapsed_ms().max(1e-6));
                rep.set_reference(&p.x_star);
                errors[k].push(rep.relative_error.expect("reference set"));
            }
        }
        let medians: Vec<f64> = times.into_iter().map(median).collect();
        for (k, label) in labels.iter().enumerate() {
            rows.push(BenchRow {
                method: label.to_string(),
                m: cfg.m,
                n,
                kappa: cfg.kappa,
                trials: cfg.trials,
                median_ms: medians[k],
                ratio_to_qr: medians[0] / medians[k],
                median_rel_error: median(errors[k].clone()),
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}
