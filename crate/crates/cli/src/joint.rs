//! Joint system-pointer amplitudes read from CSV.
//!
//! Each file has a header and rows `row, col, re, im` with 0-based indices.
//! Entries not listed are zero; the matrix size is the largest index plus one
//! unless fixed by the caller.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use weakecho::{ingest_joint_amplitudes, EntangledState, Readouts};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct JointConfig {
    pub amplitudes: PathBuf,
    pub pointer_dim: Option<usize>,
    /// Explicit readout matrices `(chi, mu)`; required unless the pointer
    /// space is two-dimensional.
    pub readouts: Option<(PathBuf, PathBuf)>,
}

impl JointConfig {
    pub fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.amplitudes);
        if let Some((chi, mu)) = &mut self.readouts {
            join(chi);
            join(mu);
        }
    }

    pub fn load(&self) -> Result<EntangledState, CliError> {
        let gamma = read_matrix(&self.amplitudes, None, self.pointer_dim)?;
        let dim = gamma.ncols();
        let state = ingest_joint_amplitudes(&gamma, dim).map_err(|e| CliError::Input {
            path: self.amplitudes.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        match &self.readouts {
            Some((chi, mu)) => {
                let chi_m = read_matrix(chi, Some(dim), Some(dim))?;
                let mu_m = read_matrix(mu, Some(dim), Some(dim))?;
                let readouts = Readouts::matrices(chi_m, mu_m).map_err(|e| CliError::Input {
                    path: chi.display().to_string(),
                    line: 0,
                    message: e.to_string(),
                })?;
                Ok(state.with_readouts(readouts))
            }
            None if dim == 2 => Ok(state),
            None => Err(CliError::Input {
                path: self.amplitudes.display().to_string(),
                line: 0,
                message: format!("pointer dimension {dim} needs chi and mu readout files"),
            }),
        }
    }
}

fn read_matrix(
    path: &Path,
    rows: Option<usize>,
    cols: Option<usize>,
) -> Result<DMatrix<Complex64>, CliError> {
    let shown = path.display().to_string();
    let bad = |line: usize, message: String| CliError::Input {
        path: shown.clone(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Read {
                path: shown.clone(),
                source,
            },
            other => bad(1, format!("{other:?}")),
        })?;
    let mut entries = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| bad(line, e.to_string()))?;
        if record.len() != 4 {
            return Err(bad(
                line,
                format!("expected 4 fields, found {}", record.len()),
            ));
        }
        let index = |i: usize| {
            record[i]
                .parse::<usize>()
                .map_err(|_| bad(line, format!("`{}` is not an index", &record[i])))
        };
        let value = |i: usize| match record[i].parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(bad(
                line,
                format!("`{}` is not a finite number", &record[i]),
            )),
        };
        entries.push((
            line,
            index(0)?,
            index(1)?,
            Complex64::new(value(2)?, value(3)?),
        ));
    }
    if entries.is_empty() {
        return Err(bad(1, "no entries".into()));
    }
    let extent = |pick: fn(&(usize, usize, usize, Complex64)) -> usize| {
        entries.iter().map(pick).max().unwrap_or(0) + 1
    };
    let nrows = rows.unwrap_or_else(|| extent(|e| e.1));
    let ncols = cols.unwrap_or_else(|| extent(|e| e.2));
    let mut m = DMatrix::from_element(nrows, ncols, Complex64::new(0.0, 0.0));
    let mut seen = DMatrix::from_element(nrows, ncols, false);
    for (line, r, c, v) in entries {
        if r >= nrows || c >= ncols {
            return Err(bad(
                line,
                format!("index ({r}, {c}) outside {nrows}x{ncols}"),
            ));
        }
        if seen[(r, c)] {
            return Err(bad(line, format!("entry ({r}, {c}) given twice")));
        }
        seen[(r, c)] = true;
        m[(r, c)] = v;
    }
    Ok(m)
}
