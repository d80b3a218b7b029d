//! File formats.
//!
//! Curves: CSV with one row per time point and one column per grid sample.
//! A first row that does not parse as numbers is a header. An optional
//! comment line `# grid: x1,x2,...` carries the grid coordinates; without
//! it the columns sit at the midpoints of `[0, 1]`.
//!
//! 3-D fields: the same CSV layout with `G₁·G₂·G₃` columns (voxel `(i, j, l)`
//! at column `(i·G₂ + j)·G₃ + l`) and a sidecar `<stem>.json` holding
//! `{"dims": [G₁, G₂, G₃]}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::report::fmt_num;

/// Curves sampled on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCurves {
    pub grid: Vec<f64>,
    /// `T × G`.
    pub values: DMatrix<f64>,
}

fn parse_row(rec: &csv::StringRecord) -> Option<Vec<f64>> {
    rec.iter().map(|f| f.trim().parse::<f64>().ok()).collect()
}

fn parse_grid_line(line: &str) -> Option<CliResult<Vec<f64>>> {
    let rest = line.trim_start().strip_prefix('#')?.trim_start().strip_prefix("grid:")?;
    Some(
        rest.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::io("read grid", format!("bad grid coordinate '{}'", s.trim()))))
            .collect(),
    )
}

/// Reads a curve CSV.
pub fn read_curves(path: &Path) -> CliResult<RawCurves> {
    let stage = "read input";
    let text = fs::read_to_string(path).map_err(|e| CliError::io(stage, format!("{}: {e}", path.display())))?;
    let mut grid = None;
    for line in text.lines() {
        if let Some(g) = parse_grid_line(line) {
            grid = Some(g?);
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::io(stage, format!("{}: {e}", path.display())))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        match parse_row(&rec) {
            Some(r) => rows.push(r),
            None if i == 0 => continue,
            None => return Err(CliError::io(stage, format!("{}: non-numeric value in row {}", path.display(), i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(CliError::io(stage, format!("{}: no rows", path.display())));
    }
    let g = rows[0].len();
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != g) {
        return Err(CliError::io(stage, format!("{}: row {} has a different number of columns", path.display(), i + 1)));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::io(stage, format!("{}: non-finite value", path.display())));
    }
    let grid = match grid {
        Some(gr) if gr.len() != g => {
            return Err(CliError::io(stage, format!("{}: grid has {} points but rows have {g} columns", path.display(), gr.len())))
        }
        Some(gr) => gr,
        None => (0..g).map(|i| (i as f64 + 0.5) / g as f64).collect(),
    };
    let values = DMatrix::from_fn(rows.len(), g, |t, j| rows[t][j]);
    Ok(RawCurves { grid, values })
}

/// Writes curves, with the grid as a `# grid:` comment.
pub fn write_curves(path: &Path, curves: &RawCurves) -> CliResult<()> {
    let mut out = String::new();
    let grid: Vec<String> = curves.grid.iter().map(|&x| fmt_num(x)).collect();
    out.push_str(&format!("# grid: {}\n", grid.join(",")));
    for row in curves.values.row_iter() {
        let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_text(path, &out)
}

/// Sidecar metadata of a 3-D field file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub dims: [usize; 3],
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// A 3-D field series as time-major voxel data.
#[derive(Debug, Clone, PartialEq)]
pub struct RawField {
    pub data: Vec<f64>,
    pub t_len: usize,
    pub dims: [usize; 3],
}

pub fn read_field(path: &Path) -> CliResult<RawField> {
    let meta_path = sidecar_path(path);
    let meta_text = fs::read_to_string(&meta_path).map_err(|_| {
        CliError::config("read axis metadata", format!("missing axis metadata {} for {}", meta_path.display(), path.display()))
    })?;
    let meta: FieldMeta = serde_json::from_str(&meta_text)
        .map_err(|e| CliError::config("read axis metadata", format!("{}: {e}", meta_path.display())))?;
    let curves = read_curves(path)?;
    let voxels: usize = meta.dims.iter().product();
    if curves.values.ncols() != voxels {
        return Err(CliError::io(
            "read input",
            format!("{}: {} columns but axis metadata gives {voxels} voxels", path.display(), curves.values.ncols()),
        ));
    }
    let t_len = curves.values.nrows();
    let mut data = Vec::with_capacity(t_len * voxels);
    for row in curves.values.row_iter() {
        data.extend(row.iter().copied());
    }
    Ok(RawField { data, t_len, dims: meta.dims })
}

pub fn write_field(path: &Path, field: &RawField) -> CliResult<()> {
    let voxels: usize = field.dims.iter().product();
    let mut out = String::new();
    for t in 0..field.t_len {
        let cells: Vec<String> = field.data[t * voxels..(t + 1) * voxels].iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_text(path, &out)?;
    let meta = serde_json::to_string(&FieldMeta { dims: field.dims }).expect("metadata serializes");
    write_text(&sidecar_path(path), &(meta + "\n"))
}

/// Writes a CSV table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::io("write table", e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("write table", e.to_string()))?;
    write_bytes(path, &bytes)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    write_bytes(path, text.as_bytes())
}

/// Writes through a temporary sibling so readers never see partial files.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io("write output", format!("{}: {e}", dir.display())))?;
    }
    let tmp = path.with_extension("partial");
    let io = |e: std::io::Error| CliError::io("write output", format!("{}: {e}", path.display()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_grid_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        fs::write(&p, "# grid: 0.1, 0.5,0.9\n# a note\na,b,c\n1,2,3\n4,5,6\n").unwrap();
        let c = read_curves(&p).unwrap();
        assert_eq!(c.grid, vec![0.1, 0.5, 0.9]);
        assert_eq!(c.values.nrows(), 2);
        assert_eq!(c.values[(1, 2)], 6.0);
    }

    #[test]
    fn default_grid_is_midpoints() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        fs::write(&p, "1,2\n3,4\n").unwrap();
        assert_eq!(read_curves(&p).unwrap().grid, vec![0.25, 0.75]);
    }

    #[test]
    fn empty_and_ragged_files_are_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        fs::write(&p, "").unwrap();
        let e = read_curves(&p).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("no rows"));
        fs::write(&p, "1,2\n3\n").unwrap();
        assert_eq!(read_curves(&p).unwrap_err().exit_code(), 1);
        fs::write(&p, "1,2\n3,x\n").unwrap();
        assert_eq!(read_curves(&p).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn curves_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let c = RawCurves { grid: vec![0.25, 0.75], values: DMatrix::from_row_slice(2, 2, &[1.5, -2.0, 0.125, 3.0]) };
        write_curves(&p, &c).unwrap();
        assert_eq!(read_curves(&p).unwrap(), c);
    }

    #[test]
    fn field_needs_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        let field = RawField { data: (0..16).map(|v| v as f64).collect(), t_len: 2, dims: [2, 2, 2] };
        write_field(&p, &field).unwrap();
        assert_eq!(read_field(&p).unwrap(), field);
        fs::remove_file(sidecar_path(&p)).unwrap();
        assert_eq!(read_field(&p).unwrap_err().exit_code(), 2);
    }
}
