//! CSV and JSON emission plus a reader for the toolkit's own CSV files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::monitor::MonitorReport;
use crate::error::{Error, Result};
use crate::sim::Trajectory;
use crate::system::family::ModeFamily;

/// Numeric CSV with a one-line header. Empty cells read back as `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    // `Display` for f64 prints the shortest string that round-trips
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_table(path: &Path, headers: &[String], rows: &[Vec<Option<f64>>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(headers)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| cell(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of mixed text and numbers (used for labelled tables).
pub fn write_records(path: &Path, headers: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(headers)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<CsvTable> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>()
                        .map(Some)
                        .map_err(|e| Error::Domain(format!("bad number {s:?} in {}: {e}", path.display())))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { headers, rows })
}

/// Trajectory schema: `t`, states, outputs, `y_norm`, `q`, `mode`, controls.
/// `stride` keeps every n-th sample plus the last one.
pub fn trajectory_table(family: &dyn ModeFamily, traj: &Trajectory, stride: usize) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut headers = vec!["t".to_string()];
    headers.extend(family.state_names());
    headers.extend(family.output_names());
    headers.push("y_norm".into());
    headers.push("q".into());
    headers.push("mode".into());
    headers.extend(family.control_names());
    let stride = stride.max(1);
    let last = traj.len().saturating_sub(1);
    let rows = (0..traj.len())
        .filter(|&k| k % stride == 0 || k == last)
        .map(|k| {
            let mut row = vec![Some(traj.times[k])];
            row.extend(traj.states[k].iter().map(|&v| Some(v)));
            row.extend(traj.outputs[k].iter().map(|&v| Some(v)));
            row.push(Some(traj.output_norms[k]));
            row.push(traj.intervals[k].map(|q| q as f64));
            row.push(Some(traj.modes[k] as f64));
            row.extend(traj.controls[k].iter().map(|&v| Some(v)));
            row
        })
        .collect();
    (headers, rows)
}

pub fn write_trajectory(path: &Path, family: &dyn ModeFamily, traj: &Trajectory, stride: usize) -> Result<()> {
    let (headers, rows) = trajectory_table(family, traj, stride);
    write_table(path, &headers, &rows)
}

pub fn write_monitor(path: &Path, report: &MonitorReport) -> Result<()> {
    let headers: Vec<String> = ["t", "y_norm", "bound", "margin"].map(String::from).to_vec();
    let rows: Vec<Vec<Option<f64>>> = report
        .rows
        .iter()
        .map(|r| vec![Some(r.t), Some(r.y_norm), Some(r.bound), Some(r.margin)])
        .collect();
    write_table(path, &headers, &rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate, IntegratorConfig, Switching};
    use crate::system::family::LinearFamily;
    use crate::system::norm::Sinusoids;

    #[test]
    fn trajectory_round_trip() {
        let fam = LinearFamily::scalar(&[0.7]);
        let cfg = IntegratorConfig::new(0.013, 1e-6, 2.0).unwrap();
        let (tr, _) = simulate(&fam, Switching::Fixed(0), &[1.0 / 3.0], &Sinusoids::single(0.3, 1.7), &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("traj.csv");
        write_trajectory(&p, &fam, &tr, 1).unwrap();
        let back = read_table(&p).unwrap();
        assert_eq!(back.headers, vec!["t", "x0", "y0", "y_norm", "q", "mode"]);
        assert_eq!(back.rows.len(), tr.len());
        for (k, row) in back.rows.iter().enumerate() {
            assert_eq!(row[0].unwrap().to_bits(), tr.times[k].to_bits());
            assert_eq!(row[1].unwrap().to_bits(), tr.states[k][0].to_bits());
            assert_eq!(row[3].unwrap().to_bits(), tr.output_norms[k].to_bits());
            assert_eq!(row[4], None);
        }
    }

    #[test]
    fn stride_keeps_last_sample() {
        let fam = LinearFamily::scalar(&[1.0]);
        let cfg = IntegratorConfig::new(0.1, 1e-6, 1.05).unwrap();
        let (tr, _) = simulate(&fam, Switching::Fixed(0), &[1.0], &crate::system::norm::NoDisturbance { dim: 1 }, &cfg)
            .unwrap();
        let (_, rows) = trajectory_table(&fam, &tr, 4);
        assert_eq!(rows.last().unwrap()[0], Some(tr.t_end()));
    }
}
