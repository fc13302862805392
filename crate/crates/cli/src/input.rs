//! CSV readers for datasets, vectors and matrices.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qspline_core::spline::SplineDataset;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct Knot {
    x: f64,
    y: f64,
}

/// Dataset with an `x,y` header; strict monotonicity is checked by the core.
pub fn read_dataset(path: &Path) -> Result<SplineDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y"] {
        bail!(
            "{}: expected header `x,y`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        );
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (line, record) in reader.deserialize::<Knot>().enumerate() {
        let knot = record.with_context(|| format!("{}: data row {}", path.display(), line + 1))?;
        x.push(knot.x);
        y.push(knot.y);
    }
    Ok(SplineDataset::new(x, y)?)
}

/// Numeric rows of a headerless CSV. A leading row that does not parse is
/// taken as a header and skipped.
pub fn read_numeric_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().filter(|f| !f.is_empty()).map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) if !row.is_empty() => rows.push(row),
            Ok(_) => {}
            Err(_) if line == 0 => {}
            Err(e) => bail!("{}: row {}: {e}", path.display(), line + 1),
        }
    }
    if rows.is_empty() {
        bail!("{}: no numeric rows", path.display());
    }
    Ok(rows)
}

/// A vector is one value per row (real), `re,im` per row (complex) or a
/// single row of reals. Returned as `(re, im)` pairs.
pub fn read_vector(path: &Path) -> Result<Vec<(f64, f64)>> {
    let rows = read_numeric_rows(path)?;
    if rows.len() == 1 {
        return Ok(rows[0].iter().map(|&v| (v, 0.0)).collect());
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [re] => Ok((*re, 0.0)),
            [re, im] => Ok((*re, *im)),
            _ => bail!(
                "{}: row {} has {} columns, expected 1 or 2",
                path.display(),
                i + 1,
                r.len()
            ),
        })
        .collect()
}

/// Square real matrix, one row per line.
pub fn read_matrix(path: &Path) -> Result<nalgebra::DMatrix<f64>> {
    let rows = read_numeric_rows(path)?;
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        bail!(
            "{}: row {} has {} entries, matrix must be {n} x {n}",
            path.display(),
            i + 1,
            r.len()
        );
    }
    Ok(nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Real right-hand side: every number in the file, in reading order.
pub fn read_real_vector(path: &Path) -> Result<Vec<f64>> {
    Ok(read_numeric_rows(path)?.into_iter().flatten().collect())
}

/// Inclusive `lo..hi` (also accepts `lo..=hi`).
pub fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo.trim().parse().map_err(|e| format!("bad lower size `{lo}`: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("bad upper size `{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty size range {lo}..{hi}"));
    }
    Ok((lo, hi))
}
