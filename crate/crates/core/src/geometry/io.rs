//! Point files: a `# n=<n>` first line, further `# key=value` header lines,
//! then one comma-separated point per row.

use std::fmt::Write as _;
use std::path::Path;

use super::PointList;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub dim: usize,
    /// Header entries after `n`, in file order.
    pub meta: Vec<(String, String)>,
    pub points: Vec<Vec<f64>>,
}

impl PointFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Parses a required header value.
    pub fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw =
            self.get(key).ok_or_else(|| Error::Parse { line: 0, message: format!("missing header `# {key}=..`") })?;
        raw.parse().map_err(|_| Error::Parse { line: 0, message: format!("header `{key}` has invalid value `{raw}`") })
    }
}

pub fn parse_point_file(text: &str) -> Result<PointFile> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (first_no, first) = lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty file".into() })?;
    let dim = first
        .strip_prefix('#')
        .and_then(|rest| rest.trim().strip_prefix("n="))
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Parse { line: first_no, message: format!("expected `# n=<n>`, found `{first}`") })?;

    let mut meta = Vec::new();
    let mut points = Vec::new();
    for (line, raw) in lines {
        if raw.is_empty() {
            continue;
        }
        if let Some(rest) = raw.strip_prefix('#') {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("malformed header `{raw}`") })?;
            meta.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        let row = raw
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse { line, message: format!("bad number `{}`", f.trim()) })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != dim {
            return Err(Error::Parse { line, message: format!("row has {} fields, expected {dim}", row.len()) });
        }
        points.push(row);
    }
    Ok(PointFile { dim, meta, points })
}

/// Renders with Rust's shortest round-trip float formatting, so output is
/// byte-stable and re-parses to identical values.
pub fn render_point_file(file: &PointFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n={}", file.dim);
    for (k, v) in &file.meta {
        let _ = writeln!(out, "# {k}={v}");
    }
    for p in &file.points {
        let row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn read_point_list(path: &Path) -> Result<PointList> {
    let file = parse_point_file(&std::fs::read_to_string(path)?)?;
    PointList::new(file.points)
}
