use std::fs;
use std::io::{self, Write};
use std::path::Path;

use askcount::shell::VerificationReport;
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Result of a command: structured data plus a human rendering.
pub struct Output {
    pub json: Value,
    pub table: String,
    pub report: Option<VerificationReport>,
    pub failed: bool,
}

impl Output {
    pub fn new(json: Value, table: impl Into<String>) -> Self {
        Output {
            json,
            table: table.into(),
            report: None,
            failed: false,
        }
    }

    pub fn report(report: VerificationReport) -> Self {
        Output {
            json: serde_json::from_str(&report.to_json()).expect("report json"),
            table: report.to_table(),
            failed: !report.passed(),
            report: Some(report),
        }
    }

    pub fn failing(mut self, failed: bool) -> Self {
        self.failed = failed;
        self
    }

    fn csv(&self) -> String {
        if let Some(r) = &self.report {
            return r.to_csv();
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"]).expect("csv to memory");
        if let Value::Object(map) = &self.json {
            for (k, v) in map {
                let v = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                w.write_record([k.as_str(), v.as_str()]).expect("csv to memory");
            }
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => {
                let mut s = self.table.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => fs::write(path, text),
            None => io::stdout().write_all(text.as_bytes()),
        }
    }
}
