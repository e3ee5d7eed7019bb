//! Deterministic machine-readable outputs: CSV tables and JSON documents.
//!
//! CSV files carry a header row, comma separators, '.' decimals and 17
//! significant digits; an optional footer row holds fitted slopes. JSON is
//! pretty-printed with the struct field order, so identical configurations
//! produce byte-identical files.

use crate::solver::SolutionBundle;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Write a CSV table; the optional footer row is labelled in the first
/// column and padded with its values (blank where a slope is undefined).
pub fn write_csv(
    path: &Path,
    columns: &[&str],
    rows: &[Vec<f64>],
    footer: Option<(&str, &[f64])>,
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some((label, values)) = footer {
        let mut cells = vec![label.to_string()];
        for &v in values {
            cells.push(if v.is_nan() { String::new() } else { fmt_float(v) });
        }
        while cells.len() < columns.len() {
            cells.push(String::new());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Solution profile as `r,u,v` rows.
pub fn write_solution_csv(path: &Path, bundle: &SolutionBundle) -> std::io::Result<()> {
    let mut out = String::from("r,u,v\n");
    for i in 0..bundle.grid.n {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_float(bundle.grid.r(i)),
            fmt_float(bundle.fields.u[i]),
            fmt_float(bundle.fields.v[i])
        ));
    }
    write_atomic(path, out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)
}
