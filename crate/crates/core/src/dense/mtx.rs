//! Matrix Market `array real general` reader and writer.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dense::Matrix;
use crate::error::{Error, Result};

const HEADER: &str = "%%MatrixMarket matrix array real general";

pub fn write_mtx(path: impl AsRef<Path>, a: &Matrix) -> Result<()> {
    let mut out = String::with_capacity(a.as_slice().len() * 26 + 64);
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("{} {}\n", a.rows(), a.cols()));
    for v in a.as_slice() {
        // `{:e}` on f64 prints the shortest representation that round-trips.
        out.push_str(&format!("{v:e}\n"));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_mtx(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_mtx(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_mtx(text: &str) -> Result<Matrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::Parse(format!("bad header `{header}`")));
    }
    if fields[2] != "array" || fields[3] != "real" || fields[4] != "general" {
        return Err(Error::Parse(format!(
            "only `array real general` is supported, got `{}`",
            fields[2..].join(" ")
        )));
    }
    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size = body
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad size line `{size}`")))
        })
        .collect::<Result<_>>()?;
    if dims.len() != 2 {
        return Err(Error::Parse(format!("bad size line `{size}`")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut data = Vec::with_capacity(rows * cols);
    for line in body {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad entry `{tok}`")))?;
            data.push(v);
        }
    }
    if data.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            rows * cols,
            data.len()
        )));
    }
    Matrix::from_col_major(rows, cols, data)
}
