//! JSON and CSV writers. Every float is printed with 17 significant digits.

use std::fs;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use topexp::{Error, Result};

/// Version tag of the output envelope, matching `docs/output.schema.json`.
pub const SCHEMA: &str = "topexp-output/1";

struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

/// `v` in scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut buf, Digits17)).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub result: &'a R,
}

/// Envelope without a result, echoed at the top of CSV files.
#[derive(Serialize)]
pub struct Echo<'a, C: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    pub config: &'a C,
}

/// A table for CSV output.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Table {
    /// CSV text, preceded by the echoed config as a `#` comment line.
    pub fn render(&self, config_json: &str) -> String {
        let mut s = format!("# {config_json}\n{}\n", self.header.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(f) => fmt_f64(*f),
                    Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&str>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::invalid(format!("cannot write {p}: {e}"))),
        None => {
            let mut out = io::stdout().lock();
            let nl: &[u8] = if text.ends_with('\n') { b"" } else { b"\n" };
            out.write_all(text.as_bytes()).and_then(|_| out.write_all(nl)).map_err(|e| Error::invalid(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(to_json(&vec![2.0, -0.5]).unwrap(), "[2.0000000000000000e0,-5.0000000000000000e-1]");
        let back: Vec<f64> = serde_json::from_str(&to_json(&vec![std::f64::consts::PI]).unwrap()).unwrap();
        assert_eq!(back[0], std::f64::consts::PI);
    }

    #[test]
    fn csv_quotes_text() {
        let t = Table { header: vec!["a", "b"], rows: vec![vec![Cell::Text("x,y".into()), Cell::Int(3)]] };
        assert_eq!(t.render("{}"), "# {}\na,b\n\"x,y\",3\n");
    }
}
