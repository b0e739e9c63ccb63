//! CSV curve files and the JSON run manifest.
//!
//! Every CSV has the header `abscissa,value,stderr,stat_name`. Floats are
//! written with 17 significant digits so they read back bit-exact; a missing
//! standard error is an empty field.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fbmre_core::{CurvePoint, StatCurve};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const CSV_HEADER: [&str; 4] = ["abscissa", "value", "stderr", "stat_name"];
pub const MANIFEST_FILE: &str = "manifest.json";

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FBMRE_OUT_DIR";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Curves that share one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub file: String,
    pub curves: Vec<StatCurve>,
}

pub fn write_csv<W: Write>(out: W, curves: &[StatCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for c in curves {
        for p in &c.points {
            let se = p.stderr.map(fmt_f64).unwrap_or_default();
            w.write_record([fmt_f64(p.abscissa), fmt_f64(p.value), se, c.stat_name.clone()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a curve CSV back, splitting rows by `stat_name` in file order.
pub fn read_csv(path: &Path) -> Result<Vec<StatCurve>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    anyhow::ensure!(header == CSV_HEADER, "unexpected header {header:?} in {}", path.display());
    let mut curves: Vec<StatCurve> = Vec::new();
    for row in r.records() {
        let row = row?;
        let name = &row[3];
        let point = CurvePoint {
            abscissa: row[0].parse()?,
            value: row[1].parse()?,
            stderr: if row[2].is_empty() { None } else { Some(row[2].parse()?) },
        };
        if curves.last().map_or(true, |c| c.stat_name != name) {
            curves.push(StatCurve::new(name));
        }
        curves.last_mut().expect("just pushed").push(point)?;
    }
    Ok(curves)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestCurve {
    pub file: String,
    pub stat_name: String,
    pub points: usize,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub library_version: String,
    pub wall_time_seconds: f64,
    pub simulated: bool,
    pub config: ExperimentConfig,
    pub curves: Vec<ManifestCurve>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let m: Manifest = serde_json::from_str(&text)?;
        m.config.validate()?;
        Ok(m)
    }
}

/// Writes each curve file and the manifest into `dir`; returns the paths
/// written, manifest last.
pub fn write_run(dir: &Path, files: &[CurveFile], manifest: &Manifest) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for f in files {
        let path = dir.join(&f.file);
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(std::io::BufWriter::new(file), &f.curves)?;
        written.push(path);
    }
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, serde_json::to_string_pretty(manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_round_trip() {
        let mut a = StatCurve::new("fbmre_cov_exact");
        a.push(CurvePoint { abscissa: 0.1, value: 1.0 / 3.0, stderr: None }).unwrap();
        a.push(CurvePoint { abscissa: 0.2, value: 2.0, stderr: Some(0.01) }).unwrap();
        let mut b = StatCurve::new("rlfbmre_cov_exact");
        b.push(CurvePoint { abscissa: 0.1, value: 7.0, stderr: None }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_csv(fs::File::create(&path).unwrap(), &[a.clone(), b.clone()]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("abscissa,value,stderr,stat_name\n"));
        assert!(text.contains(",,fbmre_cov_exact\n"));
        assert_eq!(read_csv(&path).unwrap(), vec![a, b]);
    }
}
