//! Distance-matrix files and report rendering.
//!
//! Two input formats are accepted:
//!
//! * JSON `{"labels": [...], "d": [[...], ...]}` (`labels` optional);
//! * CSV whose first line is `n`, followed by `n` rows of `n` numbers
//!   separated by commas or whitespace.
//!
//! Writers emit every distance with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::experiments::ExperimentReport;
use crate::metric::{FiniteMetricSpace, MetricError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error("malformed distance file: {0}")]
    Parse(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Deserialize)]
struct MatrixFile {
    #[serde(default)]
    labels: Option<Vec<String>>,
    d: Vec<Vec<f64>>,
}

pub fn parse_json(text: &str, tol: f64) -> Result<FiniteMetricSpace, IoError> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    Ok(FiniteMetricSpace::validate(&file.d, file.labels, tol)?)
}

pub fn parse_csv(text: &str, tol: f64) -> Result<FiniteMetricSpace, IoError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| IoError::Parse("empty file".into()))?;
    let n: usize = header
        .trim_end_matches(',')
        .parse()
        .map_err(|_| IoError::Parse(format!("header must be the point count, got {header:?}")))?;
    let mut rows = Vec::with_capacity(n);
    for (r, line) in lines.enumerate() {
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|c| !c.is_empty())
            .map(str::parse::<f64>)
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| IoError::Parse(format!("row {r}: {e}")))?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(IoError::Parse(format!("header says {n} rows, found {}", rows.len())));
    }
    Ok(FiniteMetricSpace::validate(&rows, None, tol)?)
}

/// Reads a distance file, choosing the format by extension (`.csv`) or by
/// content (a leading `{`).
pub fn read_space(path: &Path, tol: f64) -> Result<FiniteMetricSpace, IoError> {
    let text = fs::read_to_string(path)
        .map_err(|e| IoError::Read { path: path.display().to_string(), message: e.to_string() })?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if !is_csv && text.trim_start().starts_with('{') {
        parse_json(&text, tol)
    } else {
        parse_csv(&text, tol)
    }
}

fn full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json(space: &FiniteMetricSpace) -> String {
    let labels = serde_json::to_string(space.labels()).expect("strings serialise");
    let mut out = format!("{{\n  \"labels\": {labels},\n  \"d\": [\n");
    for i in 0..space.len() {
        let row: Vec<String> = space.row(i).iter().map(|&v| full(v)).collect();
        let sep = if i + 1 < space.len() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn to_csv(space: &FiniteMetricSpace) -> String {
    let mut out = format!("{}\n", space.len());
    for i in 0..space.len() {
        let row: Vec<String> = space.row(i).iter().map(|&v| full(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes JSON, or CSV when the path ends in `.csv`.
pub fn write_space(path: &Path, space: &FiniteMetricSpace) -> Result<(), IoError> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if is_csv { to_csv(space) } else { to_json(space) };
    fs::write(path, text).map_err(|e| IoError::Write { path: path.display().to_string(), message: e.to_string() })
}

/// `v` with `digits` significant digits, in the style of `%g`.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, v);
        let (mant, e) = s.split_once('e').expect("exponent form");
        format!("{}e{e}", trim(mant.to_string()))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(format!("{v:.decimals$}"))
    }
}

/// Tab-separated table with a header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.headers.join("\t");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Numbers in tables use 12 significant digits.
pub fn num(v: f64) -> String {
    fmt_sig(v, 12)
}

/// One row per step: experiment, i, label, measured, bound, pass.
pub fn report_table(reports: &[ExperimentReport]) -> Table {
    let mut t = Table::new(&["experiment", "i", "label", "measured", "bound", "pass"]);
    for r in reports {
        for s in &r.steps {
            t.push(vec![
                r.name.clone(),
                s.i.to_string(),
                s.label.clone(),
                num(s.measured),
                s.bound.map_or_else(|| "-".to_string(), num),
                s.pass.to_string(),
            ]);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FiniteMetricSpace {
        FiniteMetricSpace::validate(
            &[vec![0.0, 0.1, 1.0 / 3.0], vec![0.1, 0.0, 0.3], vec![1.0 / 3.0, 0.3, 0.0]],
            Some(vec!["a".into(), "b".into(), "c".into()]),
            1e-9,
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let x = sample();
        let text = to_json(&x);
        assert!(text.contains("3.3333333333333331e-1"));
        let y = parse_json(&text, 1e-9).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let x = sample();
        let y = parse_csv(&to_csv(&x), 1e-9).unwrap();
        assert_eq!(x.to_rows(), y.to_rows());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_csv("2\n0,1\n", 1e-9), Err(IoError::Parse(_))));
        assert!(matches!(parse_csv("x\n", 1e-9), Err(IoError::Parse(_))));
        assert!(matches!(
            parse_json(r#"{"d": [[0, 1], [2, 0]]}"#, 1e-9),
            Err(IoError::Metric(MetricError::Asymmetry(0, 1)))
        ));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(1.0, 12), "1");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0 * 1e-6, 12), "6.66666666667e-7");
        assert_eq!(fmt_sig(123456.789, 4), "1.235e5");
        assert_eq!(fmt_sig(-0.5, 12), "-0.5");
    }
}
