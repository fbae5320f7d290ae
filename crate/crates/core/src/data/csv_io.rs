use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;

use super::LabeledDataset;
use crate::error::{Error, Result};

pub const DEFAULT_LABEL_COLUMN: &str = "label";

/// Read a headered CSV with one row per sample.
///
/// Every column other than `label_column` must parse as a finite number.
/// Rows whose label equals `positive_label` become class 1. Without a
/// positive label the larger of the two tokens (in byte order) is class 1,
/// so `0`/`1` files map naturally.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    positive_label: Option<&str>,
) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers().map_err(malformed)?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Malformed(format!("no column named {label_column:?}")))?;
    let p = headers.len() - 1;
    if p == 0 {
        return Err(Error::Malformed("no feature columns".into()));
    }

    let mut values = Vec::new();
    let mut tokens = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(malformed)?;
        for (col, field) in record.iter().enumerate() {
            if col == label_idx {
                tokens.push(field.to_string());
                continue;
            }
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::NonNumericFeature {
                        row: row + 1,
                        column: headers[col].to_string(),
                        value: field.to_string(),
                    })
                }
            }
        }
    }
    if tokens.is_empty() {
        return Err(Error::Malformed("no data rows".into()));
    }

    let distinct: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
    if distinct.len() > 2 {
        return Err(Error::MoreThanTwoLabels(
            distinct.into_iter().map(String::from).collect(),
        ));
    }
    let positive = match positive_label {
        Some(tok) => tok,
        None => *distinct.iter().next_back().expect("nonempty"),
    };
    if distinct.len() == 2 && !distinct.contains(positive) {
        return Err(Error::Malformed(format!(
            "positive label {positive:?} not among label values {distinct:?}"
        )));
    }
    let labels: Vec<u8> = tokens.iter().map(|t| u8::from(t == positive)).collect();

    // rows were read sample-major, i.e. the column-major layout of p x n
    let samples = DMatrix::from_vec(p, labels.len(), values);
    LabeledDataset::new(samples, labels)
}

fn malformed(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Csv(e),
        _ => Error::Malformed(e.to_string()),
    }
}

/// Write `x1, ..., xp, label` with labels `0`/`1`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header: Vec<String> = (1..=data.p()).map(|i| format!("x{i}")).collect();
    header.push(DEFAULT_LABEL_COLUMN.to_string());
    writer.write_record(&header)?;
    let mut row = Vec::with_capacity(data.p() + 1);
    for (j, &label) in data.labels().iter().enumerate() {
        row.clear();
        row.extend(data.samples().column(j).iter().map(|v| v.to_string()));
        row.push(label.to_string());
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
