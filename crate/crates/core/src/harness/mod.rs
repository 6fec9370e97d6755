//! Residual sweeps and a wall-clock benchmark, both writing CSV.

mod bench;
mod sweep;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub use bench::{run_benchmark, BenchConfig, BenchRow, BENCH_COLUMNS};
pub use sweep::{log_grid, run_sweep, SweepConfig, SweepRow, SWEEP_COLUMNS};

/// Working-precision constant used in every bound.
pub const U2: f64 = f64::EPSILON;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Header line followed by one record per row; the header is written even
/// when there are no rows.
pub fn write_csv<W: Write, R: Serialize>(out: W, header: &[&str], rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<R: Serialize>(header: &[&str], rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_csv_file<R: Serialize>(
    path: impl AsRef<Path>,
    header: &[&str],
    rows: &[R],
) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(f), header, rows)
}
