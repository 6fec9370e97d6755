//! Problem directories: `A.mtx`, `b.mtx`, `xstar.mtx` and `meta.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dense::{read_mtx, write_mtx, Matrix};
use crate::error::{Error, Result};
use crate::probgen::LeastSquaresProblem;

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub m: usize,
    pub n: usize,
    pub kappa: f64,
    pub rho: f64,
    pub seed: u64,
    pub format_version: u32,
}

pub fn save_problem(dir: impl AsRef<Path>, p: &LeastSquaresProblem) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_mtx(dir.join("A.mtx"), &p.a)?;
    write_mtx(dir.join("b.mtx"), &Matrix::column_vector(&p.b))?;
    write_mtx(dir.join("xstar.mtx"), &Matrix::column_vector(&p.x_star))?;
    let meta = serde_json::to_string_pretty(&p.meta()).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(dir.join("meta.json"), meta + "\n")?;
    Ok(())
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let v = read_mtx(path)?;
    if v.cols() != 1 {
        return Err(Error::Parse(format!(
            "{}: expected a column vector, got {:?}",
            path.display(),
            v.shape()
        )));
    }
    Ok(v.into_vec())
}

pub fn load_problem(dir: impl AsRef<Path>) -> Result<LeastSquaresProblem> {
    let dir = dir.as_ref();
    let text = fs::read_to_string(dir.join("meta.json"))?;
    let meta: ProblemMeta =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("meta.json: {e}")))?;
    if meta.format_version != ARCHIVE_FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported archive format {}",
            meta.format_version
        )));
    }
    let a = read_mtx(dir.join("A.mtx"))?;
    let b = read_vector(&dir.join("b.mtx"))?;
    let x_star = read_vector(&dir.join("xstar.mtx"))?;
    if a.shape() != (meta.m, meta.n) || b.len() != meta.m || x_star.len() != meta.n {
        return Err(Error::DimensionMismatch(format!(
            "archive contents do not match meta.json ({}x{})",
            meta.m, meta.n
        )));
    }
    Ok(LeastSquaresProblem {
        a,
        b,
        x_star,
        rho: meta.rho,
        kappa: meta.kappa,
        seed: meta.seed,
    })
}
