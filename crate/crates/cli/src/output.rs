//! Deterministic CSV tables.

use std::path::{Path, PathBuf};

use crate::error::CliError;

pub struct Table {
    /// Suffix for the file name; `None` writes to the output path itself.
    pub label: Option<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(label: Option<String>, header: Vec<&'static str>) -> Self {
        Self {
            label,
            header,
            rows: Vec::new(),
        }
    }
}

/// 12 significant digits in scientific notation; `-0` prints as `0`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{:.11e}", if x == 0.0 { 0.0 } else { x })
    } else {
        String::new()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

pub fn table_path(out: &Path, label: Option<&str>) -> PathBuf {
    let Some(label) = label else {
        return out.to_path_buf();
    };
    let stem = out
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    let ext = out
        .extension()
        .map_or_else(|| "csv".into(), |e| e.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}-{label}.{ext}"))
}

pub fn write_tables(out: &Path, tables: &[Table]) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::with_capacity(tables.len());
    for table in tables {
        let path = table_path(out, table.label.as_deref());
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
                path: dir.display().to_string(),
                source,
            })?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-0.0), "0.00000000000e0");
        assert_eq!(num(-1.5e-7), "-1.50000000000e-7");
        assert_eq!(num(f64::NAN), "");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn labelled_paths() {
        let out = Path::new("runs/sweep.csv");
        assert_eq!(table_path(out, None), PathBuf::from("runs/sweep.csv"));
        assert_eq!(
            table_path(out, Some("theta-strong")),
            PathBuf::from("runs/sweep-theta-strong.csv")
        );
    }
}
