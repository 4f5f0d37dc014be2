//! On-disk formats: the JSON graph file and the CSV discharge profile.
//!
//! The graph file is the single input format. Design points are listed
//! column-1-first (highest power, shortest duration). `battery.alpha_mA_min`
//! is optional and only lifetime estimation needs it; `series_terms`
//! defaults to 10.
//!
//! Profiles serialize as CSV with the exact header
//! `start_min,duration_min,current_mA`, UTF-8, LF line endings. `start_min`
//! is redundant (intervals are back-to-back) and is validated on read.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::battery::{BatteryParams, DischargeProfile, Interval, DEFAULT_SERIES_TERMS};

use crate::error::{Error, Result};
use crate::graph::{DesignPoint, Task, TaskGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub name: String,
    pub deadline_min: f64,
    pub battery: BatteryConfig,
    pub tasks: Vec<TaskEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    pub beta: f64,
    #[serde(rename = "alpha_mA_min", default, skip_serializing_if = "Option::is_none")]
    pub alpha_ma_min: Option<f64>,
    #[serde(default = "default_series_terms")]
    pub series_terms: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub design_points: Vec<DesignPointEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignPointEntry {
    #[serde(rename = "current_mA")]
    pub current_ma: f64,
    pub duration_min: f64,
}

fn default_series_terms() -> u32 {
    DEFAULT_SERIES_TERMS
}

/// Parses the JSON graph format; syntax errors carry serde's line/column
/// context.
pub fn parse_graph_file(json: &str) -> Result<GraphFile> {
    serde_json::from_str(json).map_err(|e| Error::Parse(format!("graph file: {e}")))
}

/// Reads and parses a graph file from disk.
pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    let json = std::fs::read_to_string(path)?;
    parse_graph_file(&json)
}

impl GraphFile {
    /// Validates and builds the task graph the file describes.
    pub fn to_graph(&self) -> Result<TaskGraph> {
        let tasks: Vec<Task> = self
            .tasks
            .iter()
            .map(|t| Task {
                id: t.id.clone(),
                label: t.label.clone(),
                design_points: t
                    .design_points
                    .iter()
                    .map(|dp| DesignPoint {
                        current_ma: dp.current_ma,
                        duration_min: dp.duration_min,
                    })
                    .collect(),
            })
            .collect();
        let edges: Vec<(String, String)> = self
            .tasks
            .iter()
            .flat_map(|t| t.parents.iter().map(move |p| (p.clone(), t.id.clone())))
            .collect();
        TaskGraph::new(tasks, edges, self.deadline_min)
    }

    /// Battery constants from the file's `battery` block, validated.
    pub fn battery_params(&self) -> Result<BatteryParams> {
        let params = BatteryParams {
            beta: self.battery.beta,
            alpha_ma_min: self.battery.alpha_ma_min,
            series_terms: self.battery.series_terms,
        };
        params.validate()?;
        Ok(params)
    }

    /// Serializes back to the on-disk JSON form (pretty-printed, trailing
    /// newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph file serializes");
        s.push('\n');
        s
    }
}

const PROFILE_HEADER: [&str; 3] = ["start_min", "duration_min", "current_mA"];

/// Writes a profile as CSV, one row per interval with the cumulative start
/// time in the first column.
pub fn write_profile_csv<W: Write>(out: W, profile: &DischargeProfile) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_HEADER)
        .map_err(|e| Error::Parse(format!("profile csv: {e}")))?;
    let mut start = 0.0f64;
    for iv in profile.intervals() {
        w.write_record([
            format_float(start),
            format_float(iv.duration_min),
            format_float(iv.current_ma),
        ])
        .map_err(|e| Error::Parse(format!("profile csv: {e}")))?;
        start += iv.duration_min;
    }
    w.flush()?;
    Ok(())
}

/// Reads a profile back, checking the header and that each row's start
/// equals the sum of the preceding durations.
pub fn read_profile_csv<R: std::io::Read>(input: R) -> Result<DischargeProfile> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(|e| Error::Parse(format!("profile csv: {e}")))?;
    if headers != PROFILE_HEADER.as_slice() {
        return Err(Error::Parse(format!(
            "profile csv: expected header {}, got {}",
            PROFILE_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut intervals = Vec::new();
    let mut expected_start = 0.0f64;
    for (row, record) in r.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("profile csv: {e}")))?;
        let field = |k: usize| -> Result<f64> {
            record
                .get(k)
                .ok_or_else(|| Error::Parse(format!("profile csv row {}: missing field", row + 1)))?
                .parse::<f64>()
                .map_err(|e| {
                    Error::Parse(format!(
                        "profile csv row {}, {}: {e}",
                        row + 1,
                        PROFILE_HEADER[k]
                    ))
                })
        };
        let start = field(0)?;
        let duration = field(1)?;
        let current = field(2)?;
        if (start - expected_start).abs() > 1e-9 * expected_start.max(1.0) {
            return Err(Error::Parse(format!(
                "profile csv row {}: start {} does not continue the previous intervals (expected {})",
                row + 1,
                start,
                expected_start
            )));
        }
        intervals.push(Interval { current_ma: current, duration_min: duration });
        expected_start += duration;
    }
    DischargeProfile::new(intervals)
}

/// Shortest decimal form that round-trips the value exactly.
fn format_float(v: f64) -> String {
    let mut buf = ryu_format(v);
    // Integral values print bare (22 rather than 22.0) for readability;
    // both parse back to the same f64.
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(v: f64) -> String {
    // serde_json uses ryu for shortest round-trip formatting; going through
    // a JSON number keeps this file free of a direct ryu dependency while
    // producing the identical digits.
    serde_json::to_string(&v).expect("finite float serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{g3, g3_file};

    #[test]
    fn bundled_graph_parses_and_validates() {
        let gf = g3_file();
        assert_eq!(gf.name, "G3");
        assert_eq!(gf.deadline_min, 230.0);
        assert_eq!(gf.battery.beta, 0.273);
        assert_eq!(gf.battery.series_terms, 10);
        assert_eq!(gf.tasks.len(), 15);
        let g = gf.to_graph().unwrap();
        assert_eq!(g.task_count(), 15);
    }

    #[test]
    fn graph_file_round_trips() {
        let gf = g3_file();
        let again = parse_graph_file(&gf.to_json()).unwrap();
        assert_eq!(gf, again);
    }

    #[test]
    fn parse_errors_carry_context() {
        let err = parse_graph_file("{\"name\": \"x\", \"deadline_min\": }").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let json = g3_file().to_json().replace("\"name\"", "\"nmae\"");
        assert!(parse_graph_file(&json).is_err());
    }

    #[test]
    fn profile_csv_round_trips() {
        let g = g3();
        let intervals: Vec<Interval> = (0..g.task_count())
            .map(|t| Interval { current_ma: g.current(t, 5), duration_min: g.duration(t, 5) })
            .collect();
        let profile = DischargeProfile::new(intervals).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &profile).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("start_min,duration_min,current_mA\n"));
        assert!(!text.contains('\r'));
        let back = read_profile_csv(buf.as_slice()).unwrap();
        assert_eq!(profile, back);
    }

    #[test]
    fn profile_csv_rejects_gaps() {
        let csv = "start_min,duration_min,current_mA\n0,5,100\n9,5,50\n";
        assert!(matches!(read_profile_csv(csv.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn profile_csv_rejects_wrong_header() {
        let csv = "start,dur,current\n0,5,100\n";
        assert!(matches!(read_profile_csv(csv.as_bytes()), Err(Error::Parse(_))));
    }
}
