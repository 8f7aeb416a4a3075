//! CSV and JSON artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mobius_core::{Field, GroupId, Trajectory};
use serde::Serialize;

use crate::error::{CliError, Result};

/// First line of every trajectory CSV.
pub const CSV_SCHEMA: &str = "# mobius-trajectory v1";

/// Column names of the flattened matrix entries of an `rows×cols` matrix over `field`.
pub fn entry_columns(field: Field, rows: usize, cols: usize) -> Vec<String> {
    let suffixes: &[&str] = match field {
        Field::Real => &[""],
        Field::Complex => &["_re", "_im"],
        Field::Quaternion => &["_1", "_i", "_j", "_k"],
    };
    let mut out = Vec::with_capacity(rows * cols * suffixes.len());
    for r in 0..rows {
        for c in 0..cols {
            for s in suffixes {
                out.push(format!("g_{r}_{c}{s}"));
            }
        }
    }
    out
}

/// Header row: `t`, the entries of `g`, `energy`, `membership_residual`.
pub fn csv_header(group: &GroupId) -> Vec<String> {
    let m = group.matrix_size();
    let mut h = vec!["t".to_string()];
    h.extend(entry_columns(group.field, m, m));
    h.push("energy".into());
    h.push("membership_residual".into());
    h
}

fn write_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes a trajectory with a versioned comment line naming the group and curve.
pub fn write_trajectory_csv(path: &Path, label: &str, traj: &Trajectory) -> Result<()> {
    let file = File::create(path).map_err(write_error(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{CSV_SCHEMA} group={} curve={label}", traj.group).map_err(write_error(path))?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(csv_header(&traj.group))?;
    for p in &traj.points {
        let mut row = vec![p.t.to_string()];
        row.extend(p.g.flatten_real().iter().map(f64::to_string));
        row.push(p.energy.to_string());
        row.push(p.membership_residual.to_string());
        csv.write_record(&row)?;
    }
    csv.flush().map_err(write_error(path))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(write_error(path))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(write_error(dir))?;
    Ok(dir.to_path_buf())
}
