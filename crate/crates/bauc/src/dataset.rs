//! Training datasets: a feature matrix with binary class labels, plus
//! CSV ingestion and serialization.

use std::fmt;
use std::path::Path;

use crate::numerics::{DenseMatrix, DenseVector};
use crate::{Error, Result};

/// Binary class label. Class 2 is the positive class throughout: higher
/// scores should rank class-2 samples above class-1 samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Class1,
    Class2,
}

impl ClassLabel {
    pub fn other(self) -> ClassLabel {
        match self {
            ClassLabel::Class1 => ClassLabel::Class2,
            ClassLabel::Class2 => ClassLabel::Class1,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            ClassLabel::Class1 => 1,
            ClassLabel::Class2 => 2,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Which column of a CSV file holds the class label.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// Parses "name or index": digits select by position, anything else
    /// by header name.
    pub fn parse(spec: &str) -> LabelColumn {
        match spec.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(spec.to_string()),
        }
    }
}

/// Feature matrix plus per-row class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DenseMatrix,
    labels: Vec<ClassLabel>,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset, checking shape and finiteness.
    pub fn new(
        features: DenseMatrix,
        labels: Vec<ClassLabel>,
        column_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if features.rows() < 2 {
            return Err(Error::InsufficientSamples(format!(
                "dataset needs at least 2 rows, got {}",
                features.rows()
            )));
        }
        if let Some(names) = &column_names {
            if names.len() != features.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "{} column names for {} feature columns",
                    names.len(),
                    features.cols()
                )));
            }
        }
        if !features.entries().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(
                "dataset contains non-finite feature values".to_string(),
            ));
        }
        Ok(Dataset {
            features,
            labels,
            column_names,
        })
    }

    /// Stacks per-class sample vectors (class 1 first, then class 2).
    pub fn from_class_samples(
        class1: &[DenseVector],
        class2: &[DenseVector],
    ) -> Result<Dataset> {
        let first = class1
            .first()
            .or_else(|| class2.first())
            .ok_or_else(|| Error::InsufficientSamples("no samples".to_string()))?;
        let p = first.len();
        let n = class1.len() + class2.len();
        let mut data = Vec::with_capacity(n * p);
        let mut labels = Vec::with_capacity(n);
        for (samples, label) in [(class1, ClassLabel::Class1), (class2, ClassLabel::Class2)] {
            for x in samples {
                if x.len() != p {
                    return Err(Error::DimensionMismatch(
                        "samples have mixed dimensions".to_string(),
                    ));
                }
                data.extend_from_slice(x.entries());
                labels.push(label);
            }
        }
        Dataset::new(DenseMatrix::from_rows(n, p, data)?, labels, None)
    }

    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Feature row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn count(&self, label: ClassLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Row indices belonging to `label`, in dataset order.
    pub fn class_indices(&self, label: ClassLabel) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == label).then_some(i))
            .collect()
    }

    /// Subset of rows, in the order given.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let p = self.dim();
        let mut data = Vec::with_capacity(indices.len() * p);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset::new(
            DenseMatrix::from_rows(indices.len(), p, data)?,
            labels,
            self.column_names.clone(),
        )
    }
}

/// Loads a CSV dataset. The file must have a header row; the label
/// column may be named or given as a 0-based index; the file must
/// contain exactly two distinct label values, and `positive_label` maps
/// to class 2.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &LabelColumn,
    positive_label: &str,
) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse(format!("reading header: {e}")))?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let label_idx = match label_column {
        LabelColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(Error::Parse(format!(
                    "label column index {i} out of range (file has {} columns)",
                    headers.len()
                )));
            }
            *i
        }
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("label column '{name}' not found in header")))?,
    };

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter_map(|(i, h)| (i != label_idx).then(|| h.clone()))
        .collect();
    let p = feature_names.len();
    if p == 0 {
        return Err(Error::Parse("no feature columns".to_string()));
    }

    let mut raw_labels: Vec<String> = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {}: {e}", row_no + 2)))?;
        if record.len() != headers.len() {
            return Err(Error::Parse(format!(
                "row {}: expected {} fields, got {}",
                row_no + 2,
                headers.len(),
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            if col == label_idx {
                if field.is_empty() {
                    return Err(Error::Parse(format!("row {}: empty label", row_no + 2)));
                }
                raw_labels.push(field.to_string());
            } else {
                if field.is_empty() {
                    return Err(Error::Parse(format!(
                        "row {}, column '{}': missing value",
                        row_no + 2,
                        headers[col]
                    )));
                }
                let v: f64 = field.parse().map_err(|_| {
                    Error::Parse(format!(
                        "row {}, column '{}': cannot parse '{field}' as a number",
                        row_no + 2,
                        headers[col]
                    ))
                })?;
                data.push(v);
            }
        }
    }

    let mut distinct: Vec<&String> = Vec::new();
    for l in &raw_labels {
        if !distinct.contains(&l) {
            distinct.push(l);
        }
    }
    if distinct.len() != 2 {
        return Err(Error::Parse(format!(
            "expected exactly 2 distinct label values, found {}: {:?}",
            distinct.len(),
            distinct
        )));
    }
    if !distinct.iter().any(|l| l.as_str() == positive_label) {
        return Err(Error::Parse(format!(
            "positive label '{positive_label}' not present (found {distinct:?})"
        )));
    }

    let labels = raw_labels
        .iter()
        .map(|l| {
            if l == positive_label {
                ClassLabel::Class2
            } else {
                ClassLabel::Class1
            }
        })
        .collect();

    let n = raw_labels.len();
    Dataset::new(
        DenseMatrix::from_rows(n, p, data)?,
        labels,
        Some(feature_names),
    )
}

/// Writes a dataset as CSV with a trailing `label` column holding `1`/`2`.
/// Feature values are printed in shortest round-trip form, so a reload
/// reproduces them exactly.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path.as_ref())
        .map_err(|e| Error::Io(e.to_string()))?;
    let names: Vec<String> = match dataset.column_names() {
        Some(names) => names.to_vec(),
        None => (0..dataset.dim()).map(|j| format!("x{j}")).collect(),
    };
    let mut header = names;
    header.push("label".to_string());
    writer
        .write_record(&header)
        .map_err(|e| Error::Io(e.to_string()))?;
    for i in 0..dataset.n_samples() {
        let mut record: Vec<String> = dataset.row(i).iter().map(|v| format!("{v}")).collect();
        record.push(dataset.labels()[i].to_string());
        writer
            .write_record(&record)
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
