use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::Failure;

pub const UNITS: &str = "rates in bit/s per Hz of main-channel bandwidth; the main channel has unit bandwidth and w is \
                         the side-channel bandwidth relative to it; r is the multiplexing gain per link";

/// Formats `x` with 12 significant digits, switching to exponent notation
/// outside `[1e-5, 1e12)`.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim(&format!("{:.*}", (11 - exp) as usize, x)).to_string()
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

/// A CSV table collected in memory and written in one go.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_to<W: Write>(&self, w: W) -> Result<(), Failure> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header).map_err(|e| Failure::Compute(e.into()))?;
        for r in &self.rows {
            out.write_record(r).map_err(|e| Failure::Compute(e.into()))?;
        }
        out.flush().map_err(|e| Failure::Compute(e.into()))
    }
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    seed: Option<u64>,
    units: &'a str,
    output: String,
    columns: &'a [&'static str],
    #[serde(skip_serializing_if = "Option::is_none")]
    results: Option<&'a Value>,
    timestamp: String,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Everything a subcommand produces.
pub struct Run<C> {
    pub command: &'static str,
    pub config: C,
    pub seed: Option<u64>,
    pub table: Table,
    pub results: Option<Value>,
}

impl<C: Serialize> Run<C> {
    /// Writes the table to `out` plus a manifest next to it, or the table to
    /// standard output when `out` is `None`.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), Failure> {
        let Some(path) = out else {
            return self.table.write_to(io::stdout().lock());
        };
        let io_err = |e: io::Error| Failure::Compute(anyhow::anyhow!("cannot write {}: {e}", path.display()));
        self.table.write_to(File::create(path).map_err(io_err)?)?;
        let m = Manifest {
            command: self.command,
            version: fdnet::VERSION,
            config: &self.config,
            seed: self.seed,
            units: UNITS,
            output: path.display().to_string(),
            columns: &self.table.header,
            results: self.results.as_ref(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        };
        let mp = manifest_path(path);
        let mut text = serde_json::to_string_pretty(&m).map_err(|e| Failure::Compute(e.into()))?;
        text.push('\n');
        std::fs::write(&mp, text).map_err(io_err)?;
        eprintln!("wrote {} and {}", path.display(), mp.display());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(2.0), "2");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(num(123456.789), "123456.789");
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(1.5e13), "1.5e13");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(f64::INFINITY), "inf");
    }
}
