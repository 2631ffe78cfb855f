//! Grid records and their CSV / JSON serialisations.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::Format;
use crate::error::CliError;

/// Shortest text with 17 significant digits; round-trips every double.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0.0000000000000000e0".to_string()
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn raw(x: f64) -> Box<RawValue> {
    let s = if x.is_finite() { fmt_num(x) } else { "null".to_string() };
    RawValue::from_string(s).expect("formatted float is valid json")
}

pub fn raw_opt(x: Option<f64>) -> Box<RawValue> {
    raw(x.unwrap_or(f64::NAN))
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Optional trailing text column (e.g. the sample flag).
    pub tags: Option<(&'static str, Vec<String>)>,
}

pub fn csv(meta: &[(String, String)], table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}: {v}");
    }
    let mut header: Vec<&str> = table.columns.clone();
    if let Some((name, _)) = &table.tags {
        header.push(name);
    }
    let _ = writeln!(out, "{}", header.join(","));
    for (i, row) in table.rows.iter().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|v| v.map(fmt_num).unwrap_or_default()).collect();
        if let Some((_, tags)) = &table.tags {
            cells.push(tags[i].clone());
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn json<M: Serialize>(meta: &M, table: &Table) -> Result<String, CliError> {
    // Records are written by hand so every number keeps its 17-digit form.
    let mut out = String::from("{\"meta\":");
    out.push_str(&serde_json::to_string(meta).map_err(|e| CliError::Invalid(e.to_string()))?);
    out.push_str(",\"records\":[");
    for (i, row) in table.rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('{');
        for (j, (name, v)) in table.columns.iter().zip(row).enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "\"{name}\":{}", raw_opt(*v).get());
        }
        if let Some((name, tags)) = &table.tags {
            let _ = write!(out, ",\"{name}\":{}", serde_json::Value::String(tags[i].clone()));
        }
        out.push('}');
    }
    out.push_str("]}\n");
    Ok(out)
}

pub fn render<M: Serialize>(format: Format, meta_pairs: &[(String, String)], meta: &M, table: &Table) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(csv(meta_pairs, table)),
        Format::Json => json(meta, table),
    }
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(fmt_num(f64::NAN), "");
    }

    #[test]
    fn csv_layout() {
        let t = Table { columns: vec!["z", "w_re"], rows: vec![vec![Some(1.0), None]], tags: Some(("flag", vec!["pole".into()])) };
        let s = csv(&[("ordering".into(), "1234".into())], &t);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines, ["# ordering: 1234", "z,w_re,flag", "1.0000000000000000e0,,pole"]);
    }

    #[test]
    fn json_is_valid_and_keeps_digits() {
        let t = Table { columns: vec!["z"], rows: vec![vec![Some(0.1)], vec![None]], tags: None };
        let s = json(&serde_json::json!({"k": 1}), &t).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["records"][0]["z"].as_f64(), Some(0.1));
        assert!(v["records"][1]["z"].is_null());
        assert!(s.contains("1.0000000000000001e-1"));
    }
}
