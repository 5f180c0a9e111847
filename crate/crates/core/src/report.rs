//! Report emission in JSON, CSV and Markdown.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::radii::BoundReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(LabError::Parse(format!("unknown format {other:?}"))),
        }
    }
}

pub const REPORT_COLUMNS: [&str; 6] = ["d", "quantity", "direction", "value", "method", "anchor"];

/// A plain table; cells are already formatted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let esc = |c: &str| c.replace('|', "\\|");
        let _ = writeln!(s, "| {} |", self.columns.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(self.columns.len()));
        for r in &self.rows {
            let _ = writeln!(s, "| {} |", r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "));
        }
        s
    }
}

fn reports_table(reports: &[BoundReport], markdown: bool) -> Table {
    let mut t = Table::new(&REPORT_COLUMNS);
    for rep in reports {
        for e in &rep.entries {
            let value = if markdown {
                format!("{:.6}", e.value)
            } else {
                // shortest round-trip representation
                format!("{}", e.value)
            };
            t.push(vec![
                rep.d.to_string(),
                e.quantity.to_string(),
                e.direction.to_string(),
                value,
                e.method.clone(),
                e.anchor.clone(),
            ]);
        }
    }
    t
}

pub fn emit_table(reports: &[BoundReport], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(reports)? + "\n"),
        OutputFormat::Csv => reports_table(reports, false).to_csv(),
        OutputFormat::Markdown => Ok(reports_table(reports, true).to_markdown()),
    }
}

pub fn parse_reports_json(text: &str) -> Result<Vec<BoundReport>> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radii::assemble_report;

    #[test]
    fn empty_list_is_header_only() {
        assert_eq!(emit_table(&[], OutputFormat::Csv).unwrap().lines().count(), 1);
        assert_eq!(emit_table(&[], OutputFormat::Markdown).unwrap().lines().count(), 2);
        assert_eq!(emit_table(&[], OutputFormat::Json).unwrap().trim(), "[]");
    }

    #[test]
    fn one_report_row_count() {
        let rep = assemble_report(3, 1e-10).unwrap();
        let csv = emit_table(std::slice::from_ref(&rep), OutputFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 1 + rep.entries.len());
        let md = emit_table(std::slice::from_ref(&rep), OutputFormat::Markdown).unwrap();
        assert_eq!(md.lines().count(), 2 + rep.entries.len());
    }

    #[test]
    fn json_round_trip() {
        let reps = vec![assemble_report(2, 1e-10).unwrap(), assemble_report(7, 1e-10).unwrap()];
        let text = emit_table(&reps, OutputFormat::Json).unwrap();
        let back = parse_reports_json(&text).unwrap();
        assert_eq!(back, reps);
        assert_eq!(emit_table(&back, OutputFormat::Json).unwrap(), text);
    }
}
