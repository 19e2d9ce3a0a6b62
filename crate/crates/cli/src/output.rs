use serde::Serialize;
use sha2::{Digest, Sha256};

use qvhs::report::ValidationReport;

use crate::Format;

const CONVENTIONS: &str = include_str!("../../../docs/conventions.md");

pub fn conventions_hash() -> String {
    hex::encode(Sha256::digest(CONVENTIONS.as_bytes()))
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub conventions_sha256: String,
    pub order: u32,
    pub passed: bool,
    #[serde(flatten)]
    pub checks: ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emitted: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &'static str, order: u32, checks: ValidationReport) -> Self {
        Report {
            command,
            conventions_sha256: conventions_hash(),
            order,
            passed: checks.passed(),
            checks,
            emitted: None,
            timing_ms: None,
        }
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Text => {
            let mut out = format!(
                "{}: {}  (order {}, conventions {})\n",
                report.command,
                if report.passed { "pass" } else { "FAIL" },
                report.order,
                &report.conventions_sha256[..12]
            );
            out.push_str(&report.checks.to_string());
            if let Some(path) = &report.emitted {
                out.push_str(&format!("wrote {path}\n"));
            }
            if let Some(ms) = report.timing_ms {
                out.push_str(&format!("time {ms} ms\n"));
            }
            out
        }
    }
}
