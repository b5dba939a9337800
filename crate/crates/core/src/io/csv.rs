//! Comma-separated feature matrices with an optional header row.

use crate::encoding::RegionFeatures;
use crate::error::{Error, Result};

pub fn features_to_csv(r: &RegionFeatures, header: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(names) = header {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for row in r.iter_rows() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses rows of numbers; a first line that does not parse is taken as a header.
pub fn features_from_csv(text: &str) -> Result<RegionFeatures> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", i + 1))),
        }
    }
    RegionFeatures::from_rows(&rows)
}
