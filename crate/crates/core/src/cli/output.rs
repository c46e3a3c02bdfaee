//! CSV tables and the metadata record.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::design::DesignReport;
use crate::error::{Error, Result};
use crate::linalg::{to_db, CVector};

/// `{:.16e}`: seventeen significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    writer: csv::Writer<BufWriter<File>>,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file = File::create(path)?;
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Writes `key=value` lines in key order.
pub fn write_metadata(path: &Path, entries: &BTreeMap<String, String>) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    for (k, v) in entries {
        writeln!(f, "{k}={v}")?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_metadata(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

/// Objective trace of a design as `(outer_iter, objective_linear, objective_db)`.
pub fn emit_convergence_trace(report: &DesignReport, path: &Path) -> Result<()> {
    let mut t = Table::create(path, &["outer_iter", "objective_linear", "objective_db"])?;
    for (i, v) in report.trace.iter().enumerate() {
        t.row([i.to_string(), num(*v), num(to_db(*v))])?;
    }
    t.finish()
}

pub fn read_convergence_trace(path: &Path) -> Result<Vec<(usize, f64, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Config(format!("{}: short row", path.display())));
        let bad = |e: &dyn std::fmt::Display| Error::Config(format!("{}: {e}", path.display()));
        out.push((
            field(0)?.parse().map_err(|e| bad(&e))?,
            field(1)?.parse().map_err(|e| bad(&e))?,
            field(2)?.parse().map_err(|e| bad(&e))?,
        ));
    }
    Ok(out)
}

/// Header names `{prefix}_re_{i}, {prefix}_im_{i}` for a length-`n` vector.
pub fn complex_header(prefix: &str, n: usize) -> Vec<String> {
    (0..n)
        .flat_map(|i| [format!("{prefix}_re_{i}"), format!("{prefix}_im_{i}")])
        .collect()
}

pub fn complex_fields(v: &CVector) -> Vec<String> {
    v.iter().flat_map(|z| [num(z.re), num(z.im)]).collect()
}

/// Inverse of [`complex_fields`].
pub fn parse_complex(fields: &[&str]) -> Result<CVector> {
    if fields.len() % 2 != 0 {
        return Err(Error::Dimension("interleaved complex fields must come in pairs".into()));
    }
    let vals = fields
        .iter()
        .map(|f| f.parse::<f64>().map_err(|e| Error::Config(format!("bad number `{f}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_fn(vals.len() / 2, |i, _| crate::linalg::cplx(vals[2 * i]) + num_complex::Complex64::i() * vals[2 * i + 1]))
}
