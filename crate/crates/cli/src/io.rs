//! Count-file ingestion and CSV emission.
//!
//! Count files are UTF-8 CSV: one row per variable, first column the
//! variable label, remaining columns nonnegative integer counts. A single
//! optional header row of sample ids is detected by its non-numeric count
//! fields.

use crate::error::{CliError, Result};
use countnet_core::CountMatrix;
use std::io::Write;
use std::path::Path;

/// Load a count matrix, rejecting ragged rows and negative or non-integer
/// entries with row/column diagnostics.
pub fn load_counts(path: &Path) -> Result<CountMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let name = path.display();

    let mut labels = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut width: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() < 2 {
            return Err(CliError::input(format!(
                "{name} line {lineno}: expected a label plus at least one count"
            )));
        }
        let count_fields = &fields[1..];
        let parsed: std::result::Result<Vec<u64>, (usize, &str)> = count_fields
            .iter()
            .enumerate()
            .map(|(c, f)| f.trim().parse::<u64>().map_err(|_| (c + 2, f.trim())))
            .collect();
        let counts = match parsed {
            Ok(v) => v,
            Err((col, field)) => {
                let negative = field.starts_with('-')
                    && field.len() > 1
                    && field[1..].chars().all(|c| c.is_ascii_digit());
                // a non-numeric first row is the optional header of sample
                // ids; a negative integer is bad data anywhere
                if !negative && rows.is_empty() && width.is_none() {
                    width = Some(count_fields.len());
                    continue;
                }
                let reason = if negative {
                    "negative count"
                } else {
                    "not a nonnegative integer"
                };
                return Err(CliError::input(format!(
                    "{name} line {lineno}, column {col}: {reason}: {field:?}"
                )));
            }
        };
        match width {
            None => width = Some(counts.len()),
            Some(w) if w != counts.len() => {
                return Err(CliError::input(format!(
                    "{name} line {lineno}: ragged row with {} counts, expected {w}",
                    counts.len()
                )));
            }
            _ => {}
        }
        labels.push(fields[0].trim().to_string());
        rows.push(counts);
    }

    if rows.is_empty() {
        return Err(CliError::input(format!("{name}: no count rows found")));
    }
    CountMatrix::from_rows(rows)
        .and_then(|m| m.with_labels(labels))
        .map_err(|e| CliError::input(format!("{name}: {e}")))
}

/// Write a count matrix in the load format, with a header of sample ids.
pub fn write_counts(path: &Path, counts: &CountMatrix) -> Result<()> {
    let mut out = String::new();
    out.push_str("variable");
    for s in 1..=counts.n_samples() {
        out.push_str(&format!(",s{s}"));
    }
    out.push('\n');
    for i in 0..counts.n_vars() {
        out.push_str(&counts.label(i));
        for &c in counts.row(i) {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}
