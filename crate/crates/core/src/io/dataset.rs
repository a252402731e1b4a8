use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::engine::{Design, Statistic, StudyRecord};
use crate::error::{Error, Result};

/// CDR-SB summary statistics of the EMERGE and ENGAGE aducanumab trials.
pub const ADUCANUMAB_CSV: &str = include_str!("../../data/aducanumab.csv");
pub const ADUCANUMAB_NAME: &str = "aducanumab";

const COLUMNS: [&str; 6] = ["trial", "arm", "n", "p", "t", "design"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub records: Vec<StudyRecord>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, records: Vec<StudyRecord>) -> Result<Self> {
        let ds = Dataset {
            name: name.into(),
            records,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::Validation("dataset has no records".into()));
        }
        let mut seen = HashSet::new();
        for r in &self.records {
            r.validate()?;
            if !seen.insert((r.trial.as_str(), r.arm.as_str())) {
                return Err(Error::Validation(format!(
                    "duplicate (trial, arm) pair {}.{}",
                    r.trial, r.arm
                )));
            }
        }
        Ok(())
    }

    pub fn find(&self, trial: &str, arm: &str) -> Option<&StudyRecord> {
        self.records
            .iter()
            .find(|r| r.trial == trial && r.arm == arm)
    }
}

pub fn bundled_aducanumab() -> Dataset {
    let mut ds = parse_dataset(ADUCANUMAB_CSV.as_bytes(), DataFormat::Csv)
        .expect("bundled dataset is valid");
    ds.name = ADUCANUMAB_NAME.to_string();
    ds
}

/// Flat row shared by the CSV and JSON encodings.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Row {
    trial: String,
    arm: String,
    n: u32,
    p: Option<f64>,
    t: Option<f64>,
    design: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n2: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDataset {
    name: String,
    records: Vec<Row>,
}

fn design_label(design: Design) -> (&'static str, Option<u32>) {
    match design {
        Design::TwoSampleEqualArms => ("two_sample", None),
        Design::TwoSampleUnequal { n2 } => ("two_sample", Some(n2)),
        Design::OneSample => ("one_sample", None),
    }
}

fn to_row(r: &StudyRecord) -> Row {
    let (design, n2) = design_label(r.design);
    Row {
        trial: r.trial.clone(),
        arm: r.arm.clone(),
        n: r.n,
        p: r.stat.p_value(),
        t: r.stat.t_value(),
        design: design.to_string(),
        n2,
    }
}

/// Turns a row into a validated record; `row` is the 1-based data row used in errors.
fn from_row(row: Row, line: usize) -> Result<StudyRecord> {
    let err = |column: &str, message: String| Error::Parse {
        row: line,
        column: column.to_string(),
        message,
    };
    let design = match (row.design.trim(), row.n2) {
        ("two_sample" | "two_sample_equal_arms", None) => Design::TwoSampleEqualArms,
        ("two_sample" | "two_sample_unequal", Some(n2)) if n2 == row.n => Design::TwoSampleEqualArms,
        ("two_sample" | "two_sample_unequal", Some(n2)) => Design::TwoSampleUnequal { n2 },
        ("one_sample", None) => Design::OneSample,
        ("one_sample", Some(_)) => {
            return Err(err("n2", "n2 is only meaningful for two_sample designs".into()))
        }
        (other, _) => {
            return Err(err(
                "design",
                format!("unknown design `{other}` (expected two_sample or one_sample)"),
            ))
        }
    };
    let stat = match (row.p, row.t) {
        (Some(_), Some(_)) => {
            return Err(Error::Validation(format!(
                "row {line}: both p and t present for {}.{}; give exactly one",
                row.trial, row.arm
            )))
        }
        (None, None) => {
            return Err(Error::Validation(format!(
                "row {line}: neither p nor t present for {}.{}",
                row.trial, row.arm
            )))
        }
        (Some(p), None) => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Validation(format!(
                    "row {line}: p out of range (0, 1): {p}"
                )));
            }
            Statistic::PValue(p)
        }
        (None, Some(t)) => Statistic::TValue(t),
    };
    if row.trial.is_empty() || row.arm.is_empty() {
        return Err(Error::Validation(format!(
            "row {line}: trial and arm labels must be non-empty"
        )));
    }
    let record = StudyRecord {
        trial: row.trial,
        arm: row.arm,
        n: row.n,
        stat,
        design,
    };
    record
        .validate()
        .map_err(|e| match e {
            Error::Validation(msg) => Error::Validation(format!("row {line}: {msg}")),
            other => other,
        })?;
    Ok(record)
}

pub fn parse_dataset(bytes: &[u8], format: DataFormat) -> Result<Dataset> {
    let ds = match format {
        DataFormat::Csv => parse_csv(bytes)?,
        DataFormat::Json => parse_json(bytes)?,
    };
    ds.validate()?;
    Ok(ds)
}

fn parse_json(bytes: &[u8]) -> Result<Dataset> {
    let raw: JsonDataset = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        row: e.line(),
        column: format!("char {}", e.column()),
        message: e.to_string(),
    })?;
    let records = raw
        .records
        .into_iter()
        .enumerate()
        .map(|(i, row)| from_row(row, i + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        name: raw.name,
        records,
    })
}

fn parse_csv(bytes: &[u8]) -> Result<Dataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        row: 0,
        column: "-".into(),
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        row: 0,
        column: "-".into(),
        message: e.to_string(),
    })?;
    let position = |name: &str| header.iter().position(|h| h == name);
    let mut index = [0usize; 6];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = position(name).ok_or_else(|| Error::Parse {
            row: 0,
            column: name.to_string(),
            message: format!(
                "header must contain the columns {}",
                COLUMNS.join(",")
            ),
        })?;
    }
    let n2_index = position("n2");

    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            row: line,
            column: "-".into(),
            message: e.to_string(),
        })?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let opt_f64 = |k: usize, name: &str| -> Result<Option<f64>> {
            let s = field(k);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                row: line,
                column: name.to_string(),
                message: format!("`{s}` is not a number"),
            })
        };
        let parse_count = |s: &str, name: &str| -> Result<u32> {
            s.parse::<u32>().map_err(|_| Error::Parse {
                row: line,
                column: name.to_string(),
                message: format!("`{s}` is not a positive integer"),
            })
        };
        let n = parse_count(field(index[2]), "n")?;
        let n2 = match n2_index.map(&field) {
            Some(s) if !s.is_empty() => Some(parse_count(s, "n2")?),
            _ => None,
        };
        let row = Row {
            trial: field(index[0]).to_string(),
            arm: field(index[1]).to_string(),
            n,
            p: opt_f64(index[3], "p")?,
            t: opt_f64(index[4], "t")?,
            design: field(index[5]).to_string(),
            n2,
        };
        records.push(from_row(row, line)?);
    }
    Ok(Dataset {
        name: "dataset".to_string(),
        records,
    })
}

pub fn render_dataset(ds: &Dataset, format: DataFormat) -> Result<Vec<u8>> {
    let rows: Vec<Row> = ds.records.iter().map(to_row).collect();
    match format {
        DataFormat::Json => {
            let doc = JsonDataset {
                name: ds.name.clone(),
                records: rows,
            };
            let mut out = serde_json::to_vec_pretty(&doc).expect("dataset serializes");
            out.push(b'\n');
            Ok(out)
        }
        DataFormat::Csv => {
            let with_n2 = rows.iter().any(|r| r.n2.is_some());
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            let mut header: Vec<&str> = COLUMNS.to_vec();
            if with_n2 {
                header.push("n2");
            }
            let io_err = |e: csv::Error| Error::Validation(format!("CSV encoding failed: {e}"));
            w.write_record(&header).map_err(io_err)?;
            for r in &rows {
                let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                let mut fields = vec![
                    r.trial.clone(),
                    r.arm.clone(),
                    r.n.to_string(),
                    num(r.p),
                    num(r.t),
                    r.design.clone(),
                ];
                if with_n2 {
                    fields.push(r.n2.map(|n| n.to_string()).unwrap_or_default());
                }
                w.write_record(&fields).map_err(io_err)?;
            }
            w.into_inner()
                .map_err(|e| Error::Validation(format!("CSV encoding failed: {e}")))
        }
    }
}
