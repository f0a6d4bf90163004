//! JSON and CSV rendering with fixed precision, and atomic file output.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde_json::{Map, Value};

use crate::config::Format;

/// What a command produced: a document, optionally with a table view for CSV.
pub struct Report {
    pub document: Value,
    pub rows: Option<Vec<Value>>,
}

impl Report {
    pub fn single(document: Value) -> Self {
        Self { document, rows: None }
    }

    pub fn table(document: Value, rows: Vec<Value>) -> Self {
        Self { document, rows: Some(rows) }
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => {
                let mut out = String::new();
                write_json(&self.document, 0, &mut out);
                out.push('\n');
                Ok(out)
            }
            Format::Csv => match &self.rows {
                Some(rows) => render_csv(rows),
                None => render_csv(std::slice::from_ref(&self.document)),
            },
        }
    }
}

/// x with 17 significant digits, as a JSON number.
pub fn json_number(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    format!("{x:.16e}")
}

/// x with 12 significant digits; plain notation for moderate exponents.
pub fn csv_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => out.push_str(&i.to_string()),
            (_, Some(u)) => out.push_str(&u.to_string()),
            _ => out.push_str(&json_number(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// One-line JSON with the same number formatting.
pub fn json_line(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out.lines().map(str::trim).collect::<Vec<_>>().join(" ")
}

/// Nested objects become dotted column names; arrays are kept as JSON text.
fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, item, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => csv_number(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(_) => json_line(v),
        other => other.to_string(),
    }
}

fn render_csv(rows: &[Value]) -> anyhow::Result<String> {
    let flat: Vec<Map<String, Value>> = rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            flatten("", r, &mut m);
            m
        })
        .collect();
    let header: Vec<String> = flat.first().map(|m| m.keys().cloned().collect()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in &flat {
        w.write_record(header.iter().map(|k| row.get(k).map(csv_cell).unwrap_or_default()))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn emit(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn number_formats() {
        assert_eq!(json_number(0.1), "1.0000000000000001e-1");
        assert_eq!(json_number(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(csv_number(2.598076211353316), "2.59807621135");
        assert_eq!(csv_number(1.0), "1");
        assert_eq!(csv_number(1.5e-9), "1.50000000000e-9");
        assert_eq!(csv_number(-123.0), "-123");
    }

    #[test]
    fn csv_flattens_and_keeps_column_order() {
        let r = Report::single(json!({"b": 1.5, "a": {"x": 2, "y": true}}));
        assert_eq!(r.render(Format::Csv).unwrap(), "b,a.x,a.y\n1.5,2,true\n");
        let t = Report::table(json!({}), vec![json!({"m": 0.5, "ratio": 1.0}), json!({"m": 0.1, "ratio": 2.0})]);
        assert_eq!(t.render(Format::Csv).unwrap(), "m,ratio\n0.5,1\n0.1,2\n");
    }

    #[test]
    fn json_is_valid_and_round_trips() {
        let v = json!({"x": 1.0 / 3.0, "k": [1, 2], "s": "t", "e": []});
        let text = Report::single(v.clone()).render(Format::Json).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(back["k"], v["k"]);
        assert!(serde_json::from_str::<Value>(&json_line(&v)).is_ok());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
