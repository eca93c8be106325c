//! CSV ingestion into a typed table with missing cells preserved.

use crate::error::{Error, Result};
use crate::kv::KvFile;
use std::collections::BTreeMap;
use std::path::Path;

/// Missing-value tokens used when a schema does not list its own.
pub const DEFAULT_MISSING: [&str; 4] = ["", "?", "NA", "nan"];

/// How to read one CSV: label column, positive class token, categorical dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub label: String,
    /// Label token mapped to class 1. Without it labels must already be 0/1.
    pub positive: Option<String>,
    pub missing: Vec<String>,
    pub drop: Vec<String>,
    pub mapping: BTreeMap<String, f64>,
}

impl Schema {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            positive: None,
            missing: DEFAULT_MISSING.iter().map(|s| s.to_string()).collect(),
            drop: Vec::new(),
            mapping: BTreeMap::new(),
        }
    }

    /// Reads `label`, `positive`, `missing`, `drop` and `map.<token>` keys.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let label = kv
            .get("label")
            .filter(|v| !v.is_empty())
            .ok_or_else(|| Error::Config("schema has no `label` key".into()))?;
        let mut schema = Schema::new(label);
        schema.positive = kv.get("positive").filter(|v| !v.is_empty()).map(str::to_string);
        if let Some(missing) = kv.list("missing") {
            schema.missing = missing;
            schema.missing.push(String::new());
        }
        schema.drop = kv.list("drop").unwrap_or_default();
        for (token, value) in kv.with_prefix("map.") {
            let v: f64 = value.parse().map_err(|_| {
                Error::Config(format!("schema map.{token} = `{value}` is not a number"))
            })?;
            schema.mapping.insert(token.to_string(), v);
        }
        Ok(schema)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_kv(&KvFile::read(path)?)
    }

    fn is_missing(&self, cell: &str) -> bool {
        self.missing.iter().any(|m| m.eq_ignore_ascii_case(cell))
    }

    fn lookup(&self, token: &str) -> Option<f64> {
        self.mapping.get(token).copied().or_else(|| {
            self.mapping
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(token))
                .map(|(_, &v)| v)
        })
    }
}

/// Feature columns with optional cells, plus binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<String>,
    /// Row-major; `None` marks a missing cell.
    pub cells: Vec<Vec<Option<f64>>>,
    pub labels: Vec<u8>,
    pub label_column: String,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.cells.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn missing_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_none()).count()
    }

    /// Rows restricted to `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> RawTable {
        RawTable {
            columns: self.columns.clone(),
            cells: indices.iter().map(|&i| self.cells[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_column: self.label_column.clone(),
        }
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        [self.labels.len() - pos, pos]
    }
}

pub fn ingest_csv(path: &Path, schema: &Schema) -> Result<RawTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    ingest_str(&text, &path.display().to_string(), schema)
}

/// Parses CSV text; `origin` prefixes error locations.
pub fn ingest_str(text: &str, origin: &str, schema: &Schema) -> Result<RawTable> {
    if text.trim().is_empty() {
        return Err(Error::ingestion(origin, "file is empty"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::ingestion(origin, format!("header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let label_idx = header
        .iter()
        .position(|h| h == &schema.label)
        .ok_or_else(|| {
            Error::ingestion(origin, format!("label column `{}` not in header", schema.label))
        })?;
    for d in &schema.drop {
        if !header.contains(d) {
            return Err(Error::ingestion(origin, format!("drop column `{d}` not in header")));
        }
    }
    let feature_idx: Vec<usize> = (0..header.len())
        .filter(|&i| i != label_idx && !schema.drop.contains(&header[i]))
        .collect();
    if feature_idx.is_empty() {
        return Err(Error::ingestion(origin, "no feature columns"));
    }

    let mut cells = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        // Header is line 1.
        let line = r + 2;
        let record = record.map_err(|e| Error::ingestion(format!("{origin}:{line}"), e.to_string()))?;
        if record.len() != header.len() {
            return Err(Error::ingestion(
                format!("{origin}:{line}"),
                format!("{} fields, header has {}", record.len(), header.len()),
            ));
        }
        let label_cell = &record[label_idx];
        labels.push(parse_label(label_cell, schema).ok_or_else(|| {
            Error::ingestion(
                format!("{origin}:{line}, column `{}`", schema.label),
                format!("label `{label_cell}` is not a valid class"),
            )
        })?);
        let row = feature_idx
            .iter()
            .map(|&c| {
                let cell = &record[c];
                if schema.is_missing(cell) {
                    return Ok(None);
                }
                if let Ok(v) = cell.parse::<f64>() {
                    if v.is_finite() {
                        return Ok(Some(v));
                    }
                }
                schema.lookup(cell).map(Some).ok_or_else(|| {
                    Error::ingestion(
                        format!("{origin}:{line}, column `{}`", header[c]),
                        format!("unknown category `{cell}` with no mapping"),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(Error::ingestion(origin, "no data rows"));
    }
    Ok(RawTable {
        columns: feature_idx.iter().map(|&i| header[i].clone()).collect(),
        cells,
        labels,
        label_column: schema.label.clone(),
    })
}

fn parse_label(cell: &str, schema: &Schema) -> Option<u8> {
    if cell.is_empty() || schema.is_missing(cell) {
        return None;
    }
    match &schema.positive {
        Some(pos) => Some(u8::from(cell.eq_ignore_ascii_case(pos))),
        None => match cell.parse::<f64>().ok()? {
            v if v == 0.0 => Some(0),
            v if v == 1.0 => Some(1),
            _ => None,
        },
    }
}
