//! CSV tables.

use std::io::Write;
use std::path::Path;

use risbeam_core::evaluation::SweepResult;

use crate::CliError;

pub const SWEEP_HEADER: [&str; 3] = ["power_dbm", "mean_sum_rate_bpshz", "ci95"];

pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for p in &result.points {
        w.write_record([p.power_dbm.to_string(), p.mean_sum_rate.to_string(), p.ci95.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a sweep CSV back as `(power_dbm, mean, ci95)` rows.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if header != SWEEP_HEADER {
        return Err(CliError::Io(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
