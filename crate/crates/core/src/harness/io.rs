//! CSV input and output.
//!
//! Every file has one header row, `,` separators and `.` decimals. Floats are
//! written in shortest round-trip form, so rereading a file reproduces the
//! in-memory values exactly. An optional `# generated_at=<unix seconds>`
//! line precedes the header; readers skip `#` lines.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;

use super::experiment::{Aggregate, GridRow, SeedSelection};
use super::properties::PropertyReport;
use crate::adapt::{OracleStart, SelectionResult};
use crate::cf_kernel::Orientation;
use crate::error::{invalid, Error, Result};
use crate::estimator::{BoundCurves, GridPoint};
use crate::levy_sim::IncrementSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    /// Write the `# generated_at` line.
    pub timestamp: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { timestamp: true }
    }
}

struct Sink<'a> {
    path: &'a Path,
    inner: csv::Writer<File>,
}

impl<'a> Sink<'a> {
    fn create(path: &'a Path, opts: CsvOptions, header: &[&str]) -> Result<Self> {
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = File::create(path).map_err(io_err)?;
        if opts.timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(file, "# generated_at={secs}").map_err(io_err)?;
        }
        let mut sink = Self {
            path,
            inner: csv::Writer::from_writer(file),
        };
        sink.row(header)?;
        Ok(sink)
    }

    fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> Result<()> {
        self.inner.write_record(fields).map_err(|source| Error::Csv {
            path: self.path.to_path_buf(),
            source,
        })
    }

    fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|source| Error::Io {
            path: self.path.to_path_buf(),
            source,
        })
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn records(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err)?;
    reader.records().collect::<std::result::Result<_, _>>().map_err(csv_err)
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize, name: &'static str) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| invalid(name, "missing column"))?;
    raw.parse().map_err(|_| invalid(name, format!("cannot parse `{raw}`")))
}

/// Two columns `dx1,dx2`.
pub fn write_increments(path: &Path, sample: &IncrementSample, opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(path, opts, &["dx1", "dx2"])?;
    for [a, b] in sample.increments() {
        sink.row(&[a.to_string(), b.to_string()])?;
    }
    sink.finish()
}

pub fn read_increments(path: &Path) -> Result<IncrementSample> {
    let rows = records(path)?
        .iter()
        .map(|r| Ok([field(r, 0, "dx1")?, field(r, 1, "dx2")?]))
        .collect::<Result<Vec<_>>>()?;
    IncrementSample::new(rows)
}

/// ECF values, one row per frequency and orientation: `U,re,im,modulus,orientation`.
pub fn write_cf_curves(path: &Path, points: &[GridPoint], opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(path, opts, &["U", "re", "im", "modulus", "orientation"])?;
    for g in points {
        for (cf, o) in [(g.phi_diag, Orientation::Diag), (g.phi_anti, Orientation::AntiDiag)] {
            sink.row(&[
                g.u.to_string(),
                cf.value.re.to_string(),
                cf.value.im.to_string(),
                cf.modulus().to_string(),
                o.as_str().to_string(),
            ])?;
        }
    }
    sink.finish()
}

/// `U,estimate,s_theo,s_emp,s_env,d,degenerate`; `s_theo` is empty without a model.
pub fn write_bound_curves(path: &Path, points: &[GridPoint], curves: &BoundCurves, opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(
        path,
        opts,
        &["U", "estimate", "s_theo", "s_emp", "s_env", "d", "degenerate"],
    )?;
    for (i, g) in points.iter().enumerate() {
        sink.row(&[
            g.u.to_string(),
            g.estimate.value.to_string(),
            opt(curves.s_theo.as_ref().map(|s| s[i])),
            curves.s_emp[i].to_string(),
            curves.s_env[i].to_string(),
            curves.d[i].to_string(),
            g.estimate.degenerate.to_string(),
        ])?;
    }
    sink.finish()
}

/// `method,j,k,distance,threshold,passed`.
pub fn write_trace(path: &Path, selection: &SelectionResult, opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(path, opts, &["method", "j", "k", "distance", "threshold", "passed"])?;
    for c in &selection.trace {
        sink.row(&[
            selection.method.as_str().to_string(),
            c.j.to_string(),
            c.k.to_string(),
            c.distance.to_string(),
            c.threshold.to_string(),
            c.passed.to_string(),
        ])?;
    }
    sink.finish()
}

/// One-line summary `method,index,U,estimate,u_start,saturated`.
pub fn write_summary(path: &Path, selection: &SelectionResult, oracle: &OracleStart, opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(
        path,
        opts,
        &["method", "index", "U", "estimate", "u_start", "saturated"],
    )?;
    sink.row(&[
        selection.method.as_str().to_string(),
        selection.index.to_string(),
        selection.u.to_string(),
        selection.estimate.to_string(),
        oracle.u_start.to_string(),
        oracle.saturated.to_string(),
    ])?;
    sink.finish()
}

const GRID_HEADER: [&str; 15] = [
    "n",
    "seed",
    "U",
    "diag_re",
    "diag_im",
    "anti_re",
    "anti_im",
    "log_mod_diag",
    "log_mod_anti",
    "log_diff",
    "estimate",
    "degenerate",
    "s_theo",
    "s_emp",
    "admissible",
];

pub fn write_grid_rows(path: &Path, rows: &[GridRow], opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(path, opts, &GRID_HEADER)?;
    for r in rows {
        sink.row(&[
            r.n.to_string(),
            r.seed.to_string(),
            r.u.to_string(),
            r.phi_diag.re.to_string(),
            r.phi_diag.im.to_string(),
            r.phi_anti.re.to_string(),
            r.phi_anti.im.to_string(),
            r.log_mod_diag.to_string(),
            r.log_mod_anti.to_string(),
            r.log_diff.to_string(),
            r.estimate.to_string(),
            r.degenerate.to_string(),
            r.s_theo.to_string(),
            r.s_emp.to_string(),
            r.admissible.to_string(),
        ])?;
    }
    sink.finish()
}

pub fn read_grid_rows(path: &Path) -> Result<Vec<GridRow>> {
    records(path)?
        .iter()
        .map(|r| {
            Ok(GridRow {
                n: field(r, 0, "n")?,
                seed: field(r, 1, "seed")?,
                u: field(r, 2, "U")?,
                phi_diag: Complex64::new(field(r, 3, "diag_re")?, field(r, 4, "diag_im")?),
                phi_anti: Complex64::new(field(r, 5, "anti_re")?, field(r, 6, "anti_im")?),
                log_mod_diag: field(r, 7, "log_mod_diag")?,
                log_mod_anti: field(r, 8, "log_mod_anti")?,
                log_diff: field(r, 9, "log_diff")?,
                estimate: field(r, 10, "estimate")?,
                degenerate: field(r, 11, "degenerate")?,
                s_theo: field(r, 12, "s_theo")?,
                s_emp: field(r, 13, "s_emp")?,
                admissible: field(r, 14, "admissible")?,
            })
        })
        .collect()
}

/// `n,U,mean,median,q25,q75`.
pub fn write_aggregates(path: &Path, aggregates: &[Aggregate], opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(path, opts, &["n", "U", "mean", "median", "q25", "q75"])?;
    for a in aggregates {
        sink.row(&[
            a.n.to_string(),
            a.u.to_string(),
            a.mean.to_string(),
            a.median.to_string(),
            a.q25.to_string(),
            a.q75.to_string(),
        ])?;
    }
    sink.finish()
}

/// `n,seed,method,index,U,estimate,u_start,saturated,u_bal,bound,probability_floor`.
pub fn write_selections(path: &Path, selections: &[SeedSelection], opts: CsvOptions) -> Result<()> {
    let header = [
        "n",
        "seed",
        "method",
        "index",
        "U",
        "estimate",
        "u_start",
        "saturated",
        "u_bal",
        "bound",
        "probability_floor",
    ];
    let mut sink = Sink::create(path, opts, &header)?;
    for s in selections {
        sink.row(&[
            s.n.to_string(),
            s.seed.to_string(),
            s.method.as_str().to_string(),
            s.index.to_string(),
            s.u.to_string(),
            s.estimate.to_string(),
            s.u_start.to_string(),
            s.saturated.to_string(),
            s.u_bal.to_string(),
            s.bound.to_string(),
            s.probability_floor.to_string(),
        ])?;
    }
    sink.finish()
}

/// `check,hits,total,frequency,floor,passed`.
pub fn write_property_report(path: &Path, report: &PropertyReport, opts: CsvOptions) -> Result<()> {
    let mut sink = Sink::create(path, opts, &["check", "hits", "total", "frequency", "floor", "passed"])?;
    for c in &report.checks {
        sink.row(&[
            c.name.to_string(),
            c.hits.to_string(),
            c.total.to_string(),
            c.frequency().to_string(),
            c.floor.to_string(),
            c.passed().to_string(),
        ])?;
    }
    sink.finish()
}
