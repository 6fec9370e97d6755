//! `sketchpne` command-line driver: generate problems, solve them, run
//! residual sweeps and timing benchmarks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sketchpne::bounds::attach_bounds;
use sketchpne::dense::{householder_qr, read_mtx, Matrix};
use sketchpne::harness::{
    log_grid, run_benchmark, run_sweep, write_csv_file, BenchConfig, SweepConfig, BENCH_COLUMNS,
    SWEEP_COLUMNS,
};
use sketchpne::probgen::{load_problem, save_problem};
use sketchpne::solvers::{
    algorithm1_pipeline, solve_normal, solve_notnormal, solve_qr_baseline, solve_seminormal,
    Method, PipelineMethod, PipelineOptions,
};
use sketchpne::{generate_problem, Error, PrecisionChoice, Transform};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sketchpne",
    version,
    about = "Sketch-preconditioned normal equations for least squares"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a least-squares problem with known solution and residual.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory (A.mtx, b.mtx, xstar.mtx, meta.json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a stored problem and print a JSON report.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value = "pne")]
        method: Method,
        #[arg(long, default_value = "auto")]
        precision: PrecisionChoice,
        #[arg(long, default_value_t = 3.0)]
        d_factor: f64,
        #[arg(long, default_value = "dct2")]
        transform: Transform,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// B for the not-normal equations: a directory holding B.mtx, or a
        /// .mtx file. Defaults to the Q factor of A.
        #[arg(long)]
        b_matrix: Option<PathBuf>,
    },
    /// Sweep the residual norm and write one CSV row per method and trial.
    Sweep {
        #[arg(long, default_value_t = 2000)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 1e4)]
        kappa: f64,
        #[arg(long, default_value_t = 1e-16)]
        rho_min: f64,
        #[arg(long, default_value_t = 1.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 33)]
        rho_points: usize,
        #[arg(long, value_delimiter = ',', default_value = "qr,pne,hpne")]
        methods: Vec<Method>,
        #[arg(long, default_value = "double")]
        precision: PrecisionChoice,
        #[arg(long, default_value_t = 3.0)]
        d_factor: f64,
        #[arg(long, default_value = "dct2")]
        transform: Transform,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Time QR against PNE with double and automatic preconditioners.
    Bench {
        #[arg(long, default_value_t = 4096)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "64,128")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1e6)]
        kappa: f64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn is_numerical(e: &Error) -> bool {
    !matches!(
        e,
        Error::DimensionMismatch { .. }
            | Error::InvalidInput(_)
            | Error::MissingField(_)
            | Error::Io(_)
            | Error::Parse(_)
    )
}

fn fail(e: Error, numerical_code: u8) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if is_numerical(&e) {
        numerical_code
    } else {
        EXIT_INVALID
    })
}

fn read_b_matrix(path: &Path) -> sketchpne::Result<Matrix> {
    if path.is_dir() {
        read_mtx(path.join("B.mtx"))
    } else {
        read_mtx(path)
    }
}

fn solve(
    problem: &Path,
    method: Method,
    precision: PrecisionChoice,
    d_factor: f64,
    transform: Transform,
    seed: u64,
    b_matrix: Option<&Path>,
) -> Result<String, ExitCode> {
    let p = load_problem(problem).map_err(|e| fail(e, EXIT_INVALID))?;
    let (a, b) = (&p.a, p.b.as_slice());
    let pipeline = |m| PipelineOptions {
        method: m,
        precision,
        d_factor,
        transform,
        seed,
        diagnostics: true,
    };
    let result = match method {
        Method::Qr => solve_qr_baseline(a, b),
        Method::Ne => solve_normal(a, b),
        Method::Sne => solve_seminormal(a, b),
        Method::Nne => {
            let bm = match b_matrix {
                Some(path) => read_b_matrix(path).map_err(|e| fail(e, EXIT_INVALID))?,
                None => householder_qr(a).map_err(|e| fail(e, EXIT_NUMERICAL))?.q,
            };
            solve_notnormal(a, &bm, b)
        }
        Method::Pne => algorithm1_pipeline(a, b, &pipeline(PipelineMethod::Pne)),
        Method::Hpne => algorithm1_pipeline(a, b, &pipeline(PipelineMethod::Hpne)),
    };
    let mut report = result.map_err(|e| fail(e, EXIT_NUMERICAL))?;
    if !method.is_preconditioned() {
        attach_bounds(&mut report, a, b, None).map_err(|e| fail(e, EXIT_NUMERICAL))?;
    }
    report.set_reference(&p.x_star);
    serde_json::to_string_pretty(&report)
        .map_err(|e| fail(Error::Parse(e.to_string()), EXIT_FAILURE))
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Gen {
            m,
            n,
            kappa,
            rho,
            seed,
            out,
        } => match generate_problem(m, n, kappa, rho, seed).and_then(|p| save_problem(&out, &p)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e, EXIT_FAILURE),
        },
        Command::Solve {
            problem,
            method,
            precision,
            d_factor,
            transform,
            seed,
            b_matrix,
        } => {
            match solve(
                &problem,
                method,
                precision,
                d_factor,
                transform,
                seed,
                b_matrix.as_deref(),
            ) {
                Ok(json) => {
                    println!("{json}");
                    ExitCode::SUCCESS
                }
                Err(code) => code,
            }
        }
        Command::Sweep {
            m,
            n,
            kappa,
            rho_min,
            rho_max,
            rho_points,
            methods,
            precision,
            d_factor,
            transform,
            trials,
            seed,
            csv,
        } => {
            if !(rho_min > 0.0 && rho_min <= rho_max) {
                return fail(
                    Error::InvalidInput(format!(
                        "need 0 < rho-min <= rho-max, got {rho_min}, {rho_max}"
                    )),
                    EXIT_FAILURE,
                );
            }
            let cfg = SweepConfig {
                m,
                n,
                kappa,
                rho_grid: log_grid(rho_min, rho_max, rho_points),
                methods,
                precision,
                d_factor,
                transform,
                trials_per_point: trials,
                seed,
            };
            match run_sweep(&cfg).and_then(|rows| write_csv_file(&csv, &SWEEP_COLUMNS, &rows)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e, EXIT_FAILURE),
            }
        }
        Command::Bench {
            m,
            n_list,
            kappa,
            trials,
            seed,
            csv,
        } => {
            let cfg = BenchConfig {
                m,
                n_list,
                kappa,
                trials,
                seed,
            };
            match run_benchmark(&cfg).and_then(|rows| write_csv_file(&csv, &BENCH_COLUMNS, &rows)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e, EXIT_FAILURE),
            }
        }
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
