//! Pass/fail summaries and the aggregated JSON report.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// How a measured value is compared with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, measured: f64, comparison: Comparison, threshold: f64) -> Self {
        let passed = match comparison {
            Comparison::Below => measured < threshold,
            Comparison::AtMost => measured <= threshold,
            Comparison::Equal => measured == threshold,
        };
        CheckResult {
            name: name.into(),
            passed,
            measured,
            comparison,
            threshold,
        }
    }

    /// A boolean check recorded as `measured == 1`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Comparison::Equal, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub experiment: String,
    pub status: Status,
    pub checks: Vec<CheckResult>,
    pub duration_seconds: f64,
    pub seed: u64,
    pub version: String,
}

impl RunSummary {
    pub fn new(experiment: impl Into<String>, checks: Vec<CheckResult>, duration_seconds: f64, seed: u64) -> Self {
        let status = if checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        RunSummary {
            experiment: experiment.into(),
            status,
            checks,
            duration_seconds,
            seed,
            version: TOOL_VERSION.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// CSV `name,passed,measured,comparison,threshold`.
    pub fn write_checks_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "name,passed,measured,comparison,threshold")?;
        for c in &self.checks {
            let cmp = match c.comparison {
                Comparison::Below => "<",
                Comparison::AtMost => "<=",
                Comparison::Equal => "==",
            };
            writeln!(
                out,
                "{},{},{:.16e},{cmp},{:.16e}",
                c.name, c.passed, c.measured, c.threshold
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportEntry {
    pub id: String,
    #[serde(flatten)]
    pub summary: RunSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub status: Status,
    pub experiment_count: usize,
    pub experiments: Vec<ReportEntry>,
}

/// Aggregates summaries in the given order. A name that occurs more than
/// once gets `#<run index>` appended on every occurrence after the first.
pub fn build_report(summaries: &[RunSummary]) -> Report {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let experiments: Vec<ReportEntry> = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let count = seen.entry(s.experiment.as_str()).or_insert(0);
            *count += 1;
            let id = if *count == 1 {
                s.experiment.clone()
            } else {
                format!("{}#{i}", s.experiment)
            };
            ReportEntry { id, summary: s.clone() }
        })
        .collect();
    let status = if experiments.iter().all(|e| e.summary.passed()) {
        Status::Pass
    } else {
        Status::Fail
    };
    Report {
        version: TOOL_VERSION.to_string(),
        status,
        experiment_count: experiments.len(),
        experiments,
    }
}

pub fn emit_report<W: Write>(summaries: &[RunSummary], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &build_report(summaries)).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(name: &str, ok: bool) -> RunSummary {
        RunSummary::new(
            name,
            vec![CheckResult::new(
                "x",
                if ok { 0.0 } else { 2.0 },
                Comparison::Below,
                1.0,
            )],
            0.5,
            7,
        )
    }

    fn emitted(summaries: &[RunSummary]) -> serde_json::Value {
        let mut buf = Vec::new();
        emit_report(summaries, &mut buf).unwrap();
        serde_json::from_slice(&buf).unwrap()
    }

    #[test]
    fn empty_report_is_valid() {
        let v = emitted(&[]);
        assert_eq!(v["experiment_count"], 0);
        assert_eq!(v["status"], "pass");
        assert!(v["experiments"].as_array().unwrap().is_empty());
    }

    #[test]
    fn one_failing_check_fails_the_report() {
        let v = emitted(&[summary("theorem", true), summary("baker-verify", false)]);
        assert_eq!(v["status"], "fail");
        assert_eq!(v["experiments"][1]["status"], "fail");
    }

    #[test]
    fn duplicate_names_get_run_index_suffix() {
        let v = emitted(&[
            summary("theorem", true),
            summary("baker-verify", true),
            summary("theorem", true),
        ]);
        let ids: Vec<&str> = v["experiments"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["id"].as_str().unwrap())
            .collect();
        assert_eq!(ids, ["theorem", "baker-verify", "theorem#2"]);
    }

    #[test]
    fn key_order_is_stable() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        emit_report(&[summary("theorem", true)], &mut a).unwrap();
        emit_report(&[summary("theorem", true)], &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let order: Vec<usize> = ["\"version\"", "\"status\"", "\"experiment_count\"", "\"experiments\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn summary_round_trips_through_json() {
        let s = summary("packets-evolve", true);
        let back: RunSummary = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}
