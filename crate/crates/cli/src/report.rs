//! Report assembly and the JSON and CSV writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use cantor_dynamics::rational;
use cantor_dynamics::Certificate;
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub suite: String,
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Item {
    pub fn from_result(suite: &str, name: &str, result: Result<Certificate, String>) -> Self {
        let (status, certificate, message) = match result {
            Ok(cert) if cert.passed => (Status::Pass, Some(cert), None),
            Ok(cert) => (Status::Fail, Some(cert), None),
            Err(message) => (Status::Error, None, Some(message)),
        };
        Self {
            suite: suite.to_string(),
            name: name.to_string(),
            status,
            certificate,
            message,
        }
    }

    pub fn skipped(suite: &str, name: &str, reason: &str) -> Self {
        Self {
            suite: suite.to_string(),
            name: name.to_string(),
            status: Status::Skipped,
            certificate: None,
            message: Some(reason.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub items: Vec<Item>,
    /// Wall-clock milliseconds per `suite/name`; the only non-reproducible field.
    pub timings_ms: BTreeMap<String, u64>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.items
            .iter()
            .all(|i| matches!(i.status, Status::Pass | Status::Skipped))
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(self).expect("reports serialize");
        std::fs::write(dir.join("report.json"), json + "\n")?;
        std::fs::write(dir.join("summary.csv"), summary_csv(&self.items))
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// One row per exact rational witness of each certificate, or a single row
/// for items without one.
pub fn summary_csv(items: &[Item]) -> String {
    let mut out = String::from("suite,item,status,verdict,quantity,value\n");
    for item in items {
        let status = serde_json::to_value(item.status).expect("status serializes");
        let status = status.as_str().unwrap_or_default();
        let verdict = item.certificate.as_ref().map_or("", |c| c.verdict.as_str());
        let rationals: Vec<(&String, &str)> = item
            .certificate
            .iter()
            .flat_map(|c| c.witnesses.iter())
            .filter_map(|(k, v)| match v {
                Value::String(s) if rational::parse(s).is_ok() => Some((k, s.as_str())),
                _ => None,
            })
            .collect();
        let prefix = [&item.suite, &item.name, status, verdict]
            .map(csv_field)
            .join(",");
        if rationals.is_empty() {
            writeln!(out, "{prefix},,").expect("string write");
        }
        for (k, v) in rationals {
            writeln!(out, "{prefix},{},{}", csv_field(k), csv_field(v)).expect("string write");
        }
    }
    out
}

/// Human-readable lines for a `report.json`, and whether every item passed.
pub fn describe(report: &Value) -> Result<(String, bool), String> {
    let items = report["items"]
        .as_array()
        .ok_or("report has no `items` array")?;
    let mut out = String::new();
    let mut ok = true;
    for item in items {
        let status = item["status"].as_str().unwrap_or("?");
        ok &= matches!(status, "pass" | "skipped");
        let detail = item["certificate"]["verdict"]
            .as_str()
            .or_else(|| item["message"].as_str())
            .unwrap_or("");
        writeln!(
            out,
            "{:<7} {}/{}: {detail}",
            status.to_uppercase(),
            item["suite"].as_str().unwrap_or("?"),
            item["name"].as_str().unwrap_or("?")
        )
        .expect("string write");
    }
    let count = |s: &str| items.iter().filter(|i| i["status"] == s).count();
    writeln!(
        out,
        "{} items: {} passed, {} failed, {} errors, {} skipped",
        items.len(),
        count("pass"),
        count("fail"),
        count("error"),
        count("skipped")
    )
    .expect("string write");
    Ok((out, ok))
}
