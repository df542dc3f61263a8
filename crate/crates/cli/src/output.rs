use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context as _, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// A plain table; cells are already formatted.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| num(*v)).collect());
    }

    fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Shortest representation that round-trips.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// `value ≤ bound` (or the reverse for lower bounds), as required by `--check`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(quantity: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            quantity: quantity.into(),
            value,
            bound,
            passed: value <= bound,
        }
    }

    pub fn at_least(quantity: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            quantity: quantity.into(),
            value,
            bound,
            passed: value >= bound,
        }
    }
}

pub struct Report {
    /// File stem of the outputs.
    pub name: String,
    pub table: Table,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Writes `<out>/<name>.csv` and `<out>/<name>.json` and prints the summary,
/// or without `out` prints the CSV to stdout and the summary to stderr.
pub fn emit(report: &Report, provenance: Value, out: Option<&Path>) -> Result<()> {
    let summary = json!({
        "run": report.name,
        "provenance": provenance,
        "results": report.results,
        "checks": report.checks,
        "passed": report.passed(),
    });
    let text = serde_json::to_string_pretty(&summary)?;
    match out {
        Some(dir) => {
            let csv_path = dir.join(format!("{}.csv", report.name));
            let file = fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
            report.table.write_csv(io::BufWriter::new(file))?;
            let json_path = dir.join(format!("{}.json", report.name));
            fs::write(&json_path, format!("{text}\n")).with_context(|| format!("writing {}", json_path.display()))?;
            println!("{text}");
        }
        None => {
            report.table.write_csv(io::stdout().lock())?;
            eprintln!("{text}");
        }
    }
    Ok(())
}
