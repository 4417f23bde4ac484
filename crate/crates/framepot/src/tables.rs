//! CSV tables written by the command-line driver.

use std::fs::File;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use framepot_core::{EnsembleSpec, Family, HaarMode};

use crate::error::{Error, Result};

pub const FRAME_POTENTIAL_CSV: &str = "frame_potential.csv";
pub const LAYERS_CSV: &str = "layers.csv";
pub const SLOPES_CSV: &str = "slopes.csv";
pub const THEORY_CSV: &str = "theory.csv";
pub const DIAGNOSE_CSV: &str = "diagnose.csv";

/// Name of an ensemble in table rows, e.g. `parallel`, `hea-cz`, or
/// `local+phase-param` for the non-default Haar mode.
pub fn ensemble_label(spec: &EnsembleSpec) -> String {
    let mut label = spec.family.name().to_string();
    if let Some(e) = spec.entangler {
        label.push('-');
        label.push_str(e.name());
    }
    if spec.haar_mode != HaarMode::default() {
        label.push('+');
        label.push_str(spec.haar_mode.name());
    }
    label
}

/// The family a label was made from, if any.
pub fn label_family(label: &str) -> Option<Family> {
    let base = label.split(['-', '+']).next()?;
    Family::parse(base)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePotentialRow {
    pub ensemble: String,
    pub n: usize,
    pub l: usize,
    pub k: u32,
    pub value: f64,
    pub std_error: f64,
    pub rel_dev: f64,
    pub boot_median: f64,
    pub boot_p05: f64,
    pub boot_p95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRow {
    pub ensemble: String,
    pub n: usize,
    pub k: u32,
    pub epsilon: f64,
    pub layers_median: f64,
    pub p05: f64,
    pub p95: f64,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub ensemble: String,
    pub k: u32,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub n: usize,
    pub l: usize,
    pub q: u32,
    pub bound_k2: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub ensemble: String,
    pub n: usize,
    pub l: usize,
    pub k: u32,
    pub part: usize,
    pub samples: usize,
    pub value: f64,
    pub std_error: f64,
    pub rel_dev: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r).map_err(|source| Error::Csv { path: path.to_path_buf(), source })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        // header is line 1
        rows.push(rec.map_err(|e: csv::Error| Error::parse(path, i + 2, e.to_string()))?);
    }
    Ok(rows)
}
