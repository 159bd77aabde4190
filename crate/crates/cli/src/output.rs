//! Deterministic CSV and JSON emission plus complex-number parsing.
//!
//! CSV files start with `# key=value` metadata lines, then a mandatory
//! header row, then data rows. Floats are printed in scientific
//! notation with 17 significant digits so regenerated figures never
//! lose precision; identical invocations produce byte-identical files.

use nh_lattice::Complex64;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Complex values render as `a+bi` with full precision.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}i", fmt_f64(z.re), fmt_f64(z.im))
    } else {
        format!("{}-{}i", fmt_f64(z.re), fmt_f64(-z.im))
    }
}

/// Parse `a`, `a+bi`, `a-bi` or `bi` with no whitespace.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // Split off the imaginary mantissa: the last sign that is not
        // an exponent sign and not the leading sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let b = bytes[idx];
            if (b == b'+' || b == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx]
                    .parse()
                    .map_err(|_| format!("bad real part in '{s}'"))?;
                let sign = if bytes[idx] == b'-' { -1.0 } else { 1.0 };
                let imag_str = &body[idx + 1..];
                let im: f64 = if imag_str.is_empty() {
                    1.0
                } else {
                    imag_str
                        .parse()
                        .map_err(|_| format!("bad imaginary part in '{s}'"))?
                };
                Ok(Complex64::new(re, sign * im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| format!("bad imaginary part in '{s}'"))?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| format!("bad complex literal '{s}'"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// One cell of a data row.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    /// Absent value: empty CSV cell, JSON null.
    Blank,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(v) => v.clone(),
            Cell::Blank => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(v) => json!(v),
            Cell::Blank => Value::Null,
        }
    }
}

/// A complete emission: ordered metadata, column names, rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut meta = Map::new();
        for (k, v) in &self.metadata {
            meta.insert(k.clone(), json!(v));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert((*name).to_string(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "metadata": Value::Object(meta), "rows": rows });
        let mut rendered = serde_json::to_string_pretty(&doc).expect("static structure");
        rendered.push('\n');
        rendered
    }
}

#[cfg(test)]
pub type ParsedCsv = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

/// Parse a rendered CSV back into (metadata, header, rows of strings);
/// used by the schema round-trip tests.
#[cfg(test)]
pub fn parse_csv(text: &str) -> Result<ParsedCsv, String> {
    let mut metadata = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| format!("metadata line without '=': {line}"))?;
            metadata.push((k.to_string(), v.to_string()));
        } else if header.is_none() {
            header = Some(line.split(',').map(str::to_string).collect());
        } else {
            let cells: Vec<String> = line.split(',').map(str::to_string).collect();
            let expected = header.as_ref().map(Vec::len).unwrap_or(0);
            if cells.len() != expected {
                return Err(format!("row with {} cells, expected {expected}", cells.len()));
            }
            rows.push(cells);
        }
    }
    let header = header.ok_or("missing header row")?;
    Ok((metadata, header, rows))
}
