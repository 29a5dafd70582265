//! Table model and deterministic JSON / CSV / text rendering.
//!
//! JSON schema: `{meta: {version, config}, rows: [{inputs, outputs,
//! diagnostics, error?}]}`. CSV flattens the three sections into one header
//! whose column order is first-appearance order across rows. All floats are
//! printed with 17 significant digits so output round-trips exactly.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

#[derive(Debug, Clone, Default)]
pub struct Row {
    pub inputs: Vec<(String, Value)>,
    pub outputs: Vec<(String, Value)>,
    pub diagnostics: Vec<(String, Value)>,
    pub error: Option<String>,
}

impl Row {
    pub fn input(mut self, k: &str, v: Value) -> Self {
        self.inputs.push((k.to_string(), v));
        self
    }
    pub fn output(mut self, k: &str, v: Value) -> Self {
        self.outputs.push((k.to_string(), v));
        self
    }
    pub fn diagnostic(mut self, k: &str, v: Value) -> Self {
        self.diagnostics.push((k.to_string(), v));
        self
    }
    pub fn with_error(mut self, e: String) -> Self {
        self.error = Some(e);
        self
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub config: String,
    pub rows: Vec<Row>,
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn json_value(v: &Value) -> String {
    match v {
        // JSON has no NaN/inf literals; represent them as strings
        Value::Num(x) if x.is_finite() => fmt_num(*x),
        Value::Num(x) => format!("\"{x}\""),
        Value::Int(i) => i.to_string(),
        Value::Str(s) => format!("\"{}\"", json_escape(s)),
        Value::Bool(b) => b.to_string(),
    }
}

fn csv_value(v: &Value) -> String {
    let raw = match v {
        Value::Num(x) => fmt_num(*x),
        Value::Int(i) => i.to_string(),
        Value::Str(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
    };
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn json_section(fields: &[(String, Value)]) -> String {
    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("\"{}\":{}", json_escape(k), json_value(v)))
        .collect();
    format!("{{{}}}", body.join(","))
}

impl Table {
    pub fn new(config: String) -> Self {
        Table {
            config,
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_json(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{{\"meta\":{{\"version\":\"{}\",\"config\":\"{}\"}},\"rows\":[",
            json_escape(env!("CARGO_PKG_VERSION")),
            json_escape(&self.config)
        );
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(
                out,
                "{{\"inputs\":{},\"outputs\":{},\"diagnostics\":{}",
                json_section(&row.inputs),
                json_section(&row.outputs),
                json_section(&row.diagnostics)
            );
            if let Some(e) = &row.error {
                let _ = write!(out, ",\"error\":\"{}\"", json_escape(e));
            }
            out.push('}');
        }
        out.push_str("]}\n");
        out
    }

    /// Column order: inputs, outputs, diagnostics in first-appearance order
    /// across all rows, then `error`.
    fn render_csv(&self) -> String {
        let mut cols: Vec<String> = Vec::new();
        let push_cols = |fields: &[(String, Value)], cols: &mut Vec<String>| {
            for (k, _) in fields {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        };
        for section in [
            |r: &Row| r.inputs.clone(),
            |r: &Row| r.outputs.clone(),
            |r: &Row| r.diagnostics.clone(),
        ] {
            for row in &self.rows {
                push_cols(&section(row), &mut cols);
            }
        }
        let mut out = cols.join(",");
        out.push_str(",error\n");
        for row in &self.rows {
            let lookup = |k: &String| {
                row.inputs
                    .iter()
                    .chain(&row.outputs)
                    .chain(&row.diagnostics)
                    .find(|(n, _)| n == k)
                    .map(|(_, v)| csv_value(v))
                    .unwrap_or_default()
            };
            let cells: Vec<String> = cols.iter().map(lookup).collect();
            out.push_str(&cells.join(","));
            out.push(',');
            if let Some(e) = &row.error {
                out.push_str(&csv_value(&Value::Str(e.clone())));
            }
            out.push('\n');
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.config);
        for row in &self.rows {
            let mut parts: Vec<String> = Vec::new();
            for (k, v) in row.inputs.iter().chain(&row.outputs).chain(&row.diagnostics) {
                let rendered = match v {
                    Value::Num(x) => format!("{x:.12}"),
                    Value::Int(i) => i.to_string(),
                    Value::Str(s) => s.clone(),
                    Value::Bool(b) => b.to_string(),
                };
                parts.push(format!("{k}={rendered}"));
            }
            if let Some(e) = &row.error {
                parts.push(format!("error={e}"));
            }
            let _ = writeln!(out, "{}", parts.join("  "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("cmd=test".into());
        t.rows.push(
            Row::default()
                .input("xi", Value::Num(0.0))
                .output("beta", Value::Num(-0.5))
                .diagnostic("iters", Value::Int(3)),
        );
        t.rows.push(
            Row::default()
                .input("xi", Value::Num(0.5))
                .with_error("complex mu,nu".into()),
        );
        t
    }

    #[test]
    fn json_shape() {
        let s = sample().render(Format::Json);
        assert!(s.starts_with("{\"meta\":{\"version\":"));
        assert!(s.contains("\"rows\":[{\"inputs\":{\"xi\":0.0000000000000000e0}"));
        assert!(s.contains("\"error\":\"complex mu,nu\""));
        assert!(s.ends_with("]}\n"));
    }

    #[test]
    fn csv_columns_and_blanks() {
        let s = sample().render(Format::Csv);
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "xi,beta,iters,error");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.0000000000000000e0,-5.0000000000000000e-1,3,"));
        let second = lines.next().unwrap();
        assert!(second.ends_with(",,complex mu,nu") || second.contains("complex"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = sample().render(Format::Json);
        let b = sample().render(Format::Json);
        assert_eq!(a, b);
    }
}
