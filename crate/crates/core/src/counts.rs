//! Count data container: n variables observed over t sample epochs.

use crate::error::{Error, Result};

/// An n-variable by t-sample matrix of nonnegative event counts.
///
/// Rows are variables, columns are samples. Labels are optional; when absent,
/// the decimal row index serves as the label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    n: usize,
    t: usize,
    data: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl CountMatrix {
    /// Build from per-variable rows. All rows must have equal length >= 1.
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument(
                "count matrix needs at least one row".into(),
            ));
        }
        let t = rows[0].len();
        if t == 0 {
            return Err(Error::InvalidArgument(
                "count matrix rows must be nonempty".into(),
            ));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != t) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has {} samples, expected {t}",
                rows[bad].len()
            )));
        }
        let n = rows.len();
        let mut data = Vec::with_capacity(n * t);
        for r in rows {
            data.extend_from_slice(&r);
        }
        Ok(Self {
            n,
            t,
            data,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} variables",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn n_samples(&self) -> usize {
        self.t
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.t..(i + 1) * self.t]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of row `i`: the stored label, or the decimal row index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// All rows converted to f64, the form the estimators work on.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|&c| c as f64).collect())
            .collect()
    }

    /// Keep only the given rows (in the given order), carrying labels along.
    pub fn select_rows(&self, keep: &[usize]) -> Result<Self> {
        for &i in keep {
            if i >= self.n {
                return Err(Error::VariableOutOfRange {
                    index: i,
                    n: self.n,
                });
            }
        }
        let rows = keep.iter().map(|&i| self.row(i).to_vec()).collect();
        let mut out = Self::from_rows(rows)?;
        if let Some(l) = &self.labels {
            out = out.with_labels(keep.iter().map(|&i| l[i].clone()).collect())?;
        }
        Ok(out)
    }
}
