use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::failure::Failure;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ColumnData {
    Index(Vec<u64>),
    Real(Vec<f64>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Index(v) => v.len(),
            ColumnData::Real(v) => v.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: ColumnData,
}

/// Equal-length named columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<Column>,
}

impl Table {
    pub fn index(mut self, name: &str, values: Vec<u64>) -> Self {
        self.columns.push(Column { name: name.into(), values: ColumnData::Index(values) });
        self
    }

    pub fn real(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.columns.push(Column { name: name.into(), values: ColumnData::Real(values) });
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn to_csv(&self) -> String {
        debug_assert!(self.columns.iter().all(|c| c.values.len() == self.rows()));
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for r in 0..self.rows() {
            for (i, c) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match &c.values {
                    ColumnData::Index(v) => write!(out, "{}", v[r]),
                    ColumnData::Real(v) => write!(out, "{:.16e}", v[r]),
                }
                .expect("writing to a String cannot fail");
            }
            out.push('\n');
        }
        out
    }
}

/// Reads a one-column CSV signal. A non-numeric first line is taken as a header.
pub fn read_signal(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    parse_signal(&text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

pub fn parse_signal(text: &str) -> Result<Vec<f64>, String> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        if field.contains(',') {
            return Err(format!("line {}: expected one column, got `{field}`", i + 1));
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => samples.push(v),
            Ok(_) => return Err(format!("line {}: non-finite sample `{field}`", i + 1)),
            Err(_) if i == 0 => {}
            Err(_) => return Err(format!("line {}: cannot parse `{field}` as a number", i + 1)),
        }
    }
    if samples.is_empty() {
        return Err("no samples".into());
    }
    Ok(samples)
}
