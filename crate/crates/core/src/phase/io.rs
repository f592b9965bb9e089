//! File formats: tomogram CSV (`X,value`) with a JSON sidecar, phase-space
//! density CSV (`q,p,f`) with an axes sidecar, and wave-function CSV.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::frame::TomographyFrame;
use super::grid::{GridFunction2D, UniformGrid};
use super::tomogram::{DeltaAtom, Tomogram};
use crate::error::{Result, TomoError};

/// JSON metadata stored next to a tomogram CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomogramSidecar {
    pub frame: TomographyFrame,
    pub hbar: Option<f64>,
    pub state: String,
    pub atoms: Vec<DeltaAtom>,
    pub grid: UniformGrid,
    /// Free-form record of the run that produced the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

/// Decimal with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Path of the JSON sidecar belonging to a CSV file.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn tomogram_csv(t: &Tomogram) -> String {
    let mut out = String::from("X,value\n");
    for (i, v) in t.values().iter().enumerate() {
        out.push_str(&fmt_f64(t.grid().point(i)));
        out.push(',');
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

pub fn write_tomogram(
    csv_path: &Path,
    t: &Tomogram,
    hbar: Option<f64>,
    state: &str,
    config: Option<serde_json::Value>,
) -> Result<TomogramSidecar> {
    let sidecar = TomogramSidecar {
        frame: t.frame(),
        hbar,
        state: state.to_string(),
        atoms: t.atoms().to_vec(),
        grid: *t.grid(),
        config,
    };
    write_atomic(csv_path, tomogram_csv(t).as_bytes())?;
    let json = serde_json::to_string_pretty(&sidecar)?;
    write_atomic(&sidecar_path(csv_path), json.as_bytes())?;
    Ok(sidecar)
}

pub fn read_tomogram(csv_path: &Path) -> Result<(Tomogram, TomogramSidecar)> {
    let sidecar: TomogramSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(csv_path))?)?;
    let mut reader = csv::Reader::from_path(csv_path)?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        xs.push(parse_field(&record, 0)?);
        values.push(parse_field(&record, 1)?);
    }
    if xs.len() != sidecar.grid.len() {
        return Err(TomoError::InvalidArgument(format!(
            "CSV has {} rows, sidecar grid declares {}",
            xs.len(),
            sidecar.grid.len()
        )));
    }
    let t = Tomogram::new(sidecar.frame, sidecar.grid, values, sidecar.atoms.clone())?;
    Ok((t, sidecar))
}

fn parse_field(record: &csv::StringRecord, i: usize) -> Result<f64> {
    record
        .get(i)
        .ok_or_else(|| TomoError::InvalidArgument(format!("missing column {i}")))?
        .trim()
        .parse()
        .map_err(|e| TomoError::InvalidArgument(format!("bad number in column {i}: {e}")))
}

/// Axes sidecar for a phase-space density CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityAxes {
    pub q: UniformGrid,
    pub p: UniformGrid,
}

/// Read a `q,p,f` CSV (rows in q-major order) plus its axes sidecar.
pub fn read_density_grid(csv_path: &Path) -> Result<GridFunction2D<f64>> {
    let axes: DensityAxes = serde_json::from_str(&fs::read_to_string(sidecar_path(csv_path))?)?;
    let mut reader = csv::Reader::from_path(csv_path)?;
    let mut values = Vec::with_capacity(axes.q.len() * axes.p.len());
    for record in reader.records() {
        values.push(parse_field(&record?, 2)?);
    }
    GridFunction2D::new(axes.q, axes.p, values)
}

pub fn write_density_grid(csv_path: &Path, f: &GridFunction2D<f64>) -> Result<()> {
    let mut out = String::from("q,p,f\n");
    for i in 0..f.first.len() {
        for j in 0..f.second.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(f.first.point(i)),
                fmt_f64(f.second.point(j)),
                fmt_f64(f.at(i, j))
            ));
        }
    }
    write_atomic(csv_path, out.as_bytes())?;
    let axes = DensityAxes { q: f.first, p: f.second };
    write_atomic(&sidecar_path(csv_path), serde_json::to_string_pretty(&axes)?.as_bytes())
}

/// Read a wave function sampled on a uniform grid: columns `x,re[,im]`.
pub fn read_wavefunction(csv_path: &Path) -> Result<(UniformGrid, Vec<Complex64>)> {
    let mut reader = csv::Reader::from_path(csv_path)?;
    let mut xs = Vec::new();
    let mut psi = Vec::new();
    for record in reader.records() {
        let record = record?;
        xs.push(parse_field(&record, 0)?);
        let re = parse_field(&record, 1)?;
        let im = if record.len() > 2 { parse_field(&record, 2)? } else { 0.0 };
        psi.push(Complex64::new(re, im));
    }
    if xs.len() < 2 {
        return Err(TomoError::InvalidArgument("wave function needs at least 2 samples".into()));
    }
    let grid = UniformGrid::new(xs[0], *xs.last().unwrap(), xs.len())?;
    let h = grid.step();
    for (i, x) in xs.iter().enumerate() {
        if (x - grid.point(i)).abs() > 1e-9 * h.max(x.abs()) {
            return Err(TomoError::InvalidArgument(format!(
                "wave-function grid is not uniform at row {i} (x = {x})"
            )));
        }
    }
    Ok((grid, psi))
}

pub fn write_wavefunction(csv_path: &Path, grid: &UniformGrid, psi: &[Complex64]) -> Result<()> {
    let mut out = String::from("x,re,im\n");
    for (i, v) in psi.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", fmt_f64(grid.point(i)), fmt_f64(v.re), fmt_f64(v.im)));
    }
    write_atomic(csv_path, out.as_bytes())
}

/// Write a real 2-D grid function as `a,b,value` rows.
pub fn grid2d_csv(header: [&str; 3], f: &GridFunction2D<f64>) -> String {
    let mut out = format!("{},{},{}\n", header[0], header[1], header[2]);
    for i in 0..f.first.len() {
        for j in 0..f.second.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(f.first.point(i)),
                fmt_f64(f.second.point(j)),
                fmt_f64(f.at(i, j))
            ));
        }
    }
    out
}

/// Write a complex 2-D grid function as `a,b,re,im` rows.
pub fn grid2d_complex_csv(header: [&str; 2], f: &GridFunction2D<Complex64>) -> String {
    let mut out = format!("{},{},re,im\n", header[0], header[1]);
    for i in 0..f.first.len() {
        for j in 0..f.second.len() {
            let v = f.at(i, j);
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(f.first.point(i)),
                fmt_f64(f.second.point(j)),
                fmt_f64(v.re),
                fmt_f64(v.im)
            ));
        }
    }
    out
}
