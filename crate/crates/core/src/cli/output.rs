//! Deterministic CSV and JSON writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::config::OutputFormat;
use super::CliError;

/// A named numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Shortest of fixed or exponent notation with 12 significant digits,
/// trailing zeros removed (the `%.12g` convention). `-0` prints as `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// The value a reader of the CSV would see.
pub fn rounded(x: f64) -> f64 {
    format_number(x).parse().unwrap_or(x)
}

pub fn table_csv(table: &Table) -> String {
    let mut out = table.header.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn table_json(table: &Table) -> String {
    let rows: Vec<Vec<Value>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(|&v| json_number(rounded(v))).collect())
        .collect();
    let doc = serde_json::json!({ "columns": table.header, "rows": rows });
    pretty(&doc)
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Write every table plus `summary.json`; returns the file names written.
pub fn write_all(
    dir: &Path,
    format: OutputFormat,
    tables: &[Table],
    summary: &Value,
) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut names = Vec::new();
    for t in tables {
        let (name, text) = match format {
            OutputFormat::Csv => (format!("{}.csv", t.name), table_csv(t)),
            OutputFormat::Json => (format!("{}.json", t.name), table_json(t)),
        };
        write(&dir.join(&name), &text)?;
        names.push(name);
    }
    write(&dir.join("summary.json"), &pretty(summary))?;
    names.push("summary.json".into());
    Ok(names)
}

pub fn write_manifest(dir: &Path, manifest: &Value) -> Result<PathBuf, CliError> {
    let path = dir.join("manifest.json");
    write(&path, &pretty(manifest))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_number(123456.789), "123456.789");
        assert_eq!(format_number(1.5e-7), "1.5e-07");
        assert_eq!(format_number(2.0e15), "2e+15");
        assert_eq!(format_number(0.0001), "0.0001");
        assert_eq!(format_number(7.32), "7.32");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
    }

    #[test]
    fn csv_layout() {
        let t = Table {
            name: "x".into(),
            header: vec!["a".into(), "b".into()],
            rows: vec![vec![0.0, 1.25], vec![2.0, -1e-20]],
        };
        assert_eq!(table_csv(&t), "a,b\n0,1.25\n2,-1e-20\n");
    }
}
