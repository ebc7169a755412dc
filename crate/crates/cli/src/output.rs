//! Rendering of command reports and the run metadata attached to JSON.

use std::fmt::Write as _;

use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::config::Format;
use crate::error::CliError;

/// A command result that can be printed in every output format.
pub trait Report: Serialize {
    fn csv(&self) -> String;
    fn text(&self) -> String;
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub input: String,
    /// RFC 3339, UTC. Taken from `SOURCE_DATE_EPOCH` when it is set.
    pub timestamp: String,
    pub reproducible_timestamp: bool,
}

impl Metadata {
    pub fn new(input: String) -> Result<Self, CliError> {
        let epoch = std::env::var("SOURCE_DATE_EPOCH").ok();
        let (instant, reproducible) = match epoch {
            Some(s) => {
                let secs: i64 = s
                    .trim()
                    .parse()
                    .map_err(|_| CliError::input(format!("SOURCE_DATE_EPOCH is not an integer: {s}")))?;
                let at = OffsetDateTime::from_unix_timestamp(secs)
                    .map_err(|e| CliError::input(format!("SOURCE_DATE_EPOCH out of range: {e}")))?;
                (at, true)
            }
            None => (OffsetDateTime::now_utc(), false),
        };
        let timestamp = instant.format(&Rfc3339).expect("UTC timestamps always format");
        Ok(Self {
            tool: "sigmapi",
            version: env!("CARGO_PKG_VERSION"),
            input,
            timestamp,
            reproducible_timestamp: reproducible,
        })
    }
}

#[derive(Serialize)]
struct Document<'a, R> {
    command: &'a str,
    metadata: &'a Metadata,
    #[serde(flatten)]
    report: &'a R,
}

pub fn render<R: Report>(command: &str, metadata: &Metadata, report: &R, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = Document { command, metadata, report };
            let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => report.csv(),
        Format::Text => report.text(),
    }
}

/// Shortest round-trip decimal, with `-0.0` printed as `0.0`.
pub fn num(v: f64) -> String {
    format!("{:?}", v + 0.0)
}

pub fn csv_line(fields: impl IntoIterator<Item = String>) -> String {
    let mut line = fields.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

/// Quote a CSV field when it needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

pub fn index_list(indices: &[usize]) -> String {
    let mut s = String::from("{");
    for (k, i) in indices.iter().enumerate() {
        if k > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{i}");
    }
    s.push('}');
    s
}
