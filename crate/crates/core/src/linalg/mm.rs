//! Matrix Market reader and writer for [`DenseMatrix`].
//!
//! Both `array` and `coordinate` real matrices are read, with `general` or
//! `symmetric` storage (`integer` fields are accepted as real). The writer
//! always emits `array real general` with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse(format!("matrix market line {line}: {}", msg.into()))
}

fn parse_header(line: &str) -> Result<(Layout, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "missing '%%MatrixMarket matrix' banner"));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(1, format!("unsupported format '{other}'"))),
    };
    match tokens[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };
    Ok((layout, symmetry))
}

fn parse_usize(tok: Option<&str>, line: usize) -> Result<usize> {
    tok.ok_or_else(|| parse_err(line, "missing integer"))?
        .parse()
        .map_err(|_| parse_err(line, "bad integer"))
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    tok.ok_or_else(|| parse_err(line, "missing value"))?
        .parse()
        .map_err(|_| parse_err(line, "bad real value"))
}

pub fn read<R: Read>(reader: R) -> Result<DenseMatrix> {
    let mut lines = BufReader::new(reader).lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let (layout, symmetry) = parse_header(&banner?)?;

    let mut body = lines.filter_map(|(no, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('%') => None,
        Ok(s) => Some(Ok((no, s))),
        Err(e) => Some(Err(Error::from(e))),
    });

    let (size_no, size_line) = body.next().ok_or_else(|| parse_err(2, "missing size line"))??;
    let mut toks = size_line.split_whitespace();
    let rows = parse_usize(toks.next(), size_no)?;
    let cols = parse_usize(toks.next(), size_no)?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(size_no, "empty matrix"));
    }
    if symmetry == Symmetry::Symmetric && rows != cols {
        return Err(parse_err(size_no, "symmetric matrix must be square"));
    }
    let mut m = DenseMatrix::zeros(rows, cols);

    match layout {
        Layout::Array => {
            // column-major; symmetric stores the lower triangle only
            let slots: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| {
                    let start = if symmetry == Symmetry::Symmetric { j } else { 0 };
                    (start..rows).map(move |i| (i, j))
                })
                .collect();
            let mut filled = 0;
            for item in body {
                let (no, line) = item?;
                for tok in line.split_whitespace() {
                    let &(i, j) = slots.get(filled).ok_or_else(|| parse_err(no, "too many values"))?;
                    let v = parse_f64(Some(tok), no)?;
                    m.set(i, j, v);
                    if symmetry == Symmetry::Symmetric {
                        m.set(j, i, v);
                    }
                    filled += 1;
                }
            }
            if filled != slots.len() {
                return Err(Error::Parse(format!("expected {} values, found {filled}", slots.len())));
            }
        }
        Layout::Coordinate => {
            let nnz = parse_usize(toks.next(), size_no)?;
            let mut seen = 0;
            for item in body {
                let (no, line) = item?;
                let mut t = line.split_whitespace();
                let i = parse_usize(t.next(), no)?;
                let j = parse_usize(t.next(), no)?;
                let v = parse_f64(t.next(), no)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(no, format!("index ({i}, {j}) out of range")));
                }
                m.set(i - 1, j - 1, v);
                if symmetry == Symmetry::Symmetric {
                    m.set(j - 1, i - 1, v);
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(Error::Parse(format!("expected {nnz} entries, found {seen}")));
            }
        }
    }
    DenseMatrix::from_row_major(rows, cols, m.as_slice().to_vec())
}

pub fn read_path(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read(f)
}

pub fn write<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(w, "{:.16e}", m.get(i, j))?;
        }
    }
    Ok(())
}

pub fn write_path(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf, m)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Writes a vector as an `n x 1` array.
pub fn write_vector_path(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    write_path(path, &DenseMatrix::from_row_major(v.len(), 1, v.to_vec())?)
}
