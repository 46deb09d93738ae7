//! Instance JSON and CSV tables.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use prophet_core::{DiscreteDistribution, LinearInstance};
use serde::{Deserialize, Serialize};

/// `{"n", "m", "entries": [[i, j, a], ...], "features": [[[value, prob], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub m: usize,
    pub entries: Vec<(usize, usize, f64)>,
    pub features: Vec<DiscreteDistribution>,
}

impl From<&LinearInstance> for InstanceJson {
    fn from(inst: &LinearInstance) -> Self {
        Self {
            n: inst.n(),
            m: inst.m(),
            entries: inst.entries().iter().map(|e| (e.row, e.col, e.coef)).collect(),
            features: inst.features().to_vec(),
        }
    }
}

impl TryFrom<InstanceJson> for LinearInstance {
    type Error = prophet_core::Error;

    fn try_from(j: InstanceJson) -> Result<Self, Self::Error> {
        LinearInstance::new(j.n, j.m, j.entries, j.features)
    }
}

pub fn instance_to_json(inst: &LinearInstance) -> String {
    serde_json::to_string_pretty(&InstanceJson::from(inst)).expect("instance serializes")
}

pub fn instance_from_json(text: &str) -> Result<LinearInstance> {
    let j: InstanceJson = serde_json::from_str(text).context("parsing instance JSON")?;
    Ok(LinearInstance::try_from(j)?)
}

pub fn read_instance(path: &Path) -> Result<LinearInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    instance_from_json(&text)
}

/// 17 significant digits; `str::parse` recovers the exact value.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus string rows, written as comma-separated LF-terminated CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r.records().map(|rec| rec.map(|r| r.iter().map(String::from).collect())).collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}
