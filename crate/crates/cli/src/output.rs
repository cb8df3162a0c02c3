//! Deterministic CSV rendering.

use std::fmt::Write as _;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn render(field: &str, v: &Value) -> Result<String, CliError> {
    Ok(match v {
        Value::Num(x) if !x.is_finite() => {
            return Err(CliError::Compute(format!(
                "non-finite value {x} in {field}"
            )))
        }
        Value::Num(x) => format_float(*x),
        Value::Int(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => s.replace(['\n', '\r'], " "),
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    /// Scalar results, written as `# result.<key> = <value>` lines.
    pub diagnostics: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn diag(&mut self, key: impl Into<String>, v: impl Into<Value>) {
        self.diagnostics.push((key.into(), v.into()));
    }

    pub fn row(&mut self, values: Vec<Value>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    /// Header block (resolved config, then diagnostics), column line, rows.
    pub fn to_csv(&self, resolved_config: &str) -> Result<String, CliError> {
        let mut out = String::new();
        for line in resolved_config.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
        out.push_str("#\n");
        for (key, v) in &self.diagnostics {
            let _ = writeln!(out, "# result.{key} = {}", render(key, v)?);
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells = row
                .iter()
                .zip(&self.columns)
                .map(|(v, c)| render(c, v))
                .collect::<Result<Vec<_>, _>>()?;
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}
