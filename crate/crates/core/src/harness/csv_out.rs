use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::harness::RunRecord;
use crate::{Error, Result};

/// Fixed CSV schema, in column order.
pub const CSV_COLUMNS: [&str; 11] = [
    "mode",
    "solver",
    "h",
    "tau",
    "gamma_m",
    "gamma_0",
    "gamma_1",
    "error",
    "order",
    "iterations",
    "wall_time_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    /// When false the `wall_time_s` column is left empty so that repeated
    /// runs produce identical files.
    pub include_timing: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { include_timing: true }
    }
}

#[derive(Serialize)]
struct Row<'a> {
    mode: &'a str,
    solver: &'a str,
    h: f64,
    tau: f64,
    gamma_m: f64,
    gamma_0: f64,
    gamma_1: f64,
    error: f64,
    order: Option<f64>,
    iterations: usize,
    wall_time_s: Option<f64>,
}

/// Writes header plus one row per record to any writer.
pub fn write_csv<W: Write>(records: &[RunRecord], out: W, opts: CsvOptions) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.serialize(Row {
            mode: r.mode.as_str(),
            solver: r.solver.as_str(),
            h: r.h,
            tau: r.tau,
            gamma_m: r.gamma_m,
            gamma_0: r.gamma_0,
            gamma_1: r.gamma_1,
            error: r.error,
            order: r.order,
            iterations: r.iterations,
            wall_time_s: opts.include_timing.then_some(r.wall_time_s),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[RunRecord], path: &Path, opts: CsvOptions) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(records, file, opts).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Mode, SolverKind};

    fn record() -> RunRecord {
        RunRecord {
            mode: Mode::ConvergeH,
            solver: SolverKind::Minres,
            n_cells: 50,
            h: 0.02,
            n_steps: 16,
            tau: 0.00125,
            gamma_m: 1.0,
            gamma_0: 1.0,
            gamma_1: 0.0,
            error: 0.2247712845,
            order: Some(0.92),
            iterations: 852,
            converged: true,
            lagrangian: 1e-5,
            wall_time_s: 0.0125,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        emit_csv(&[], &path, CsvOptions::default()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{}\n", CSV_COLUMNS.join(",")));
    }

    #[test]
    fn record_parses_back() {
        let mut buf = Vec::new();
        write_csv(&[record()], &mut buf, CsvOptions::default()).unwrap();
        let mut rdr = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(rdr.headers().unwrap().len(), 11);
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.len(), 11);
        assert_eq!(&row[0], "converge_h");
        assert_eq!(&row[1], "minres");
        assert_eq!(row[7].parse::<f64>().unwrap(), 0.2247712845);
        assert_eq!(row[8].parse::<f64>().unwrap(), 0.92);
        assert_eq!(row[9].parse::<usize>().unwrap(), 852);
        assert_eq!(row[10].parse::<f64>().unwrap(), 0.0125);
    }

    #[test]
    fn missing_order_and_timing_are_empty() {
        let mut r = record();
        r.order = None;
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf, CsvOptions { include_timing: false }).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert!(line.ends_with(",852,"));
        assert_eq!(line.split(',').count(), 11);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let err = emit_csv(&[], Path::new("/nonexistent-dir/x.csv"), CsvOptions::default()).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
