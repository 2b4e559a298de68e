//! Bit-stable CSV and JSON writers.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), lines end in
//! LF, and columns keep their declared order. Non-finite values become the
//! strings `inf`, `-inf` and `nan`; missing values are empty in CSV and
//! `null` in JSON.

use std::io::{self, Write};

use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(v) => Value::from(format_float(*v)),
            Cell::Str(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// Rows with a fixed column layout. `nested` columns are flattened in CSV
/// and grouped under `nested_name` in JSON.
#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub nested_name: &'static str,
    pub nested: Vec<&'static str>,
    pub rows: Vec<(Vec<Cell>, Vec<Cell>)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, nested_name: "", nested: Vec::new(), rows: Vec::new() }
    }

    pub fn with_nested(mut self, name: &'static str, columns: Vec<&'static str>) -> Self {
        self.nested_name = name;
        self.nested = columns;
        self
    }

    pub fn push(&mut self, row: Vec<Cell>, nested: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        assert_eq!(nested.len(), self.nested.len(), "nested width");
        self.rows.push((row, nested));
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let header = table.columns.iter().chain(&table.nested);
    w.write_record(header).map_err(io::Error::other)?;
    for (row, nested) in &table.rows {
        w.write_record(row.iter().chain(nested).map(Cell::text)).map_err(io::Error::other)?;
    }
    w.flush()
}

/// Shortest round-trip output would also be stable, but the column widths
/// then differ from the CSV; keep both at 17 digits.
struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }
}

/// A JSON array with one object per row, followed by a newline.
pub fn write_json<W: Write>(table: &Table, mut out: W) -> io::Result<()> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|(row, nested)| {
            let mut obj = Map::new();
            for (k, c) in table.columns.iter().zip(row) {
                obj.insert((*k).to_string(), c.json());
            }
            if !table.nested.is_empty() {
                let inner: Map<String, Value> =
                    table.nested.iter().zip(nested).map(|(k, c)| ((*k).to_string(), c.json())).collect();
                obj.insert(table.nested_name.to_string(), Value::Object(inner));
            }
            Value::Object(obj)
        })
        .collect();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    serde::Serialize::serialize(&Value::Array(rows), &mut ser).map_err(io::Error::other)?;
    out.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        Table::new(vec!["n", "value", "label"]).with_nested("diagnostics", vec!["flag"])
    }

    #[test]
    fn header_only_when_empty() {
        let mut buf = Vec::new();
        write_csv(&table(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,value,label,flag\n");
        let mut buf = Vec::new();
        write_json(&table(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "[]\n");
    }

    #[test]
    fn one_row() {
        let mut t = table();
        t.push(vec![Cell::from(3u32), Cell::from(0.1), Cell::from("a,b")], vec![Cell::from(true)]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,value,label,flag\n3,1.0000000000000001e-1,\"a,b\",true\n");
        let mut buf = Vec::new();
        write_json(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "[{\"n\":3,\"value\":1.0000000000000001e-1,\"label\":\"a,b\",\"diagnostics\":{\"flag\":true}}]\n"
        );
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[0]["value"].as_f64(), Some(0.1));
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.5e-300, f64::MAX, -7.0] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NAN), "nan");
    }
}
