//! Sweep CSV: header `K,T,alpha,policy,mean_regret,stderr,n_instances,n_runs,seed`,
//! LF line endings, reals with 6 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::report::sweep::SweepRow;

pub const CSV_HEADER: &str = "K,T,alpha,policy,mean_regret,stderr,n_instances,n_runs,seed";

/// Prefix of the footer line written when a sweep aborts.
pub const INCOMPLETE_MARKER: &str = "# INCOMPLETE";

/// Formats `x` with 6 significant digits in the style of C's `%g`.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // `{:e}` rounds correctly; reuse its mantissa digits and exponent
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("round-trips");
    trim_zeros(&format!("{:.*}", decimals, rounded)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn format_row(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.arms,
        row.horizon,
        fmt_sig6(row.alpha),
        row.policy,
        fmt_sig6(row.mean_regret),
        fmt_sig6(row.stderr),
        row.n_instances,
        row.n_runs,
        row.seed
    )
}

fn row_key(row: &SweepRow) -> (usize, u64, u64, String) {
    // alpha >= 0, so the bit pattern orders like the value
    (row.arms, row.horizon, row.alpha.to_bits(), row.policy.clone())
}

/// Writes `rows` sorted by `(K, T, alpha, policy)`.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(row_key);
    let mut sink = CsvSink::create(path)?;
    for row in &sorted {
        sink.write_row(row)?;
    }
    sink.finish()
}

/// Incremental CSV writer used while a sweep is running.
pub struct CsvSink {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvSink {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        let mut sink = CsvSink {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        sink.line(CSV_HEADER)?;
        Ok(sink)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        let path = &self.path;
        writeln!(self.out, "{text}")
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }

    pub fn write_row(&mut self, row: &SweepRow) -> Result<()> {
        self.line(&format_row(row))
    }

    /// Marks the file as a partial result.
    pub fn abort(mut self, reason: &str) -> Result<()> {
        let reason = reason.replace('\n', " ");
        self.line(&format!("{INCOMPLETE_MARKER}: {reason}"))
    }

    pub fn finish(mut self) -> Result<()> {
        let path = self.path.clone();
        self.out
            .flush()
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }
}

/// Parses a sweep CSV produced by [`emit_csv`]. Fails on a file carrying the
/// incomplete-sweep footer.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let bad = |line: &str| Error::InvalidConfig(format!("malformed CSV line `{line}`"));
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::InvalidConfig("missing CSV header".into()));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.starts_with(INCOMPLETE_MARKER) {
            return Err(Error::InvalidConfig(line.to_string()));
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad(line));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad(line));
        rows.push(SweepRow {
            arms: int(f[0])? as usize,
            horizon: int(f[1])?,
            alpha: num(f[2])?,
            policy: f[3].to_string(),
            mean_regret: num(f[4])?,
            stderr: num(f[5])?,
            n_instances: int(f[6])? as usize,
            n_runs: int(f[7])?,
            seed: int(f[8])?,
        });
    }
    Ok(rows)
}
