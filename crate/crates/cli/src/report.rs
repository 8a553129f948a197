//! Tabular reports rendered as RFC-4180 CSV or as one JSON object.
//!
//! Numbers are carried as decimal strings with [`SIG_DIGITS`] significant
//! digits. JSON output adds a provenance block and a summary; CSV output is
//! the row table alone.

use std::io::Write;

use primon_core::XReal;
use serde_json::{json, Map, Value};

use crate::config::OutputFormat;

pub const SIG_DIGITS: usize = 20;

/// `x` with [`SIG_DIGITS`] significant digits.
pub fn num(x: &XReal) -> String {
    x.to_sci_string(SIG_DIGITS)
}

/// Run metadata attached to JSON reports.
#[derive(Clone, Debug, Default)]
pub struct Provenance {
    pub precision_bits: u32,
    pub quadrature_tolerance: f64,
    /// CRC32 of the prime table, when one was used.
    pub table_checksum: Option<u32>,
    pub table_primes: Option<usize>,
}

impl Provenance {
    fn to_json(&self) -> Value {
        json!({
            "precision_bits": self.precision_bits,
            "quadrature_tolerance": format!("{:e}", self.quadrature_tolerance),
            "prime_table_checksum": self.table_checksum.map(|c| format!("{c:08x}")),
            "prime_table_primes": self.table_primes,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

/// Whether every checked criterion held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Ordered key/value pairs.
    pub summary: Vec<(String, String)>,
    pub provenance: Provenance,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(command: impl Into<String>, columns: Vec<&'static str>, provenance: Provenance) -> Self {
        Report {
            command: command.into(),
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
            provenance,
            verdict: Verdict::Pass,
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }

    /// Writes the report; CSV summaries go to `diag`.
    pub fn write(&self, format: OutputFormat, out: &mut dyn Write, diag: &mut dyn Write) -> anyhow::Result<()> {
        match format {
            OutputFormat::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(&mut *out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
                drop(w);
                let line: Vec<String> = self.summary.iter().map(|(k, v)| format!("{k}={v}")).collect();
                if line.is_empty() {
                    writeln!(diag, "# {}", self.command)?;
                } else {
                    writeln!(diag, "# {}: {}", self.command, line.join(" "))?;
                }
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let mut m = Map::new();
                        for (c, v) in self.columns.iter().zip(r) {
                            m.insert(c.to_string(), Value::String(v.clone()));
                        }
                        Value::Object(m)
                    })
                    .collect();
                let mut summary = Map::new();
                for (k, v) in &self.summary {
                    summary.insert(k.clone(), Value::String(v.clone()));
                }
                let doc = json!({
                    "command": self.command,
                    "provenance": self.provenance.to_json(),
                    "rows": rows,
                    "summary": summary,
                });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", vec!["n", "label"], Provenance::default());
        r.push_row(vec!["1".into(), "a,b".into()]);
        r.push_row(vec!["2".into(), "say \"hi\"".into()]);
        r.summarize("all_hold", "true");
        r
    }

    #[test]
    fn csv_quotes_fields() {
        let mut out = Vec::new();
        let mut diag = Vec::new();
        sample().write(OutputFormat::Csv, &mut out, &mut diag).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "n,label\r\n1,\"a,b\"\r\n2,\"say \"\"hi\"\"\"\r\n");
        assert_eq!(String::from_utf8(diag).unwrap(), "# demo: all_hold=true\n");
    }

    #[test]
    fn json_is_single_object_with_provenance() {
        let mut out = Vec::new();
        sample().write(OutputFormat::Json, &mut out, &mut Vec::new()).unwrap();
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["rows"][0]["label"], "a,b");
        assert_eq!(v["provenance"]["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(v["summary"]["all_hold"], "true");
        let keys: Vec<_> = v["rows"][0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, vec!["n", "label"]);
    }

    #[test]
    fn numbers_have_twenty_digits() {
        let x = XReal::from_f64(1.0, 128) / 3.0;
        assert_eq!(num(&x), "3.3333333333333333333e-1");
    }
}
