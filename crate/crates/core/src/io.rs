//! Dataset manifests, CSV matrices and atomic file writes.
//!
//! A dataset on disk is a JSON manifest naming the views, their dimensions
//! and per-view CSV paths (manifest-relative), plus an optional label CSV.
//! Data CSVs are headerless rows of decimal floats with 17 significant
//! digits, which round-trip `f64` exactly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};

pub const MANIFEST_SCHEMA: &str = "gfamix-dataset";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestView {
    pub name: String,
    pub path: String,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema: String,
    pub version: u32,
    pub n_samples: usize,
    pub views: Vec<ManifestView>,
    pub labels_path: Option<String>,
}

/// One f64 as decimal text with 17 significant digits (exact round-trip).
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes bytes to a temporary file in the target directory and renames it
/// into place, so failed runs never leave partial output files.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = PathBuf::from(dir);
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidData(format!("not a file path: {}", path.display())))?;
    tmp.push(format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Serializes a matrix as headerless CSV rows with LF line endings.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_f64(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    atomic_write(path, matrix_to_csv(m).as_bytes())
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidData(format!(
                        "{}:{}: not a number: {tok:?}",
                        path.display(),
                        ln + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::InvalidData(format!(
                    "{}:{}: ragged row ({} vs {} columns)",
                    path.display(),
                    ln + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidData(format!("{}: empty CSV", path.display())));
    }
    let (n, d) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
}

fn read_labels_csv(path: &Path) -> Result<Vec<u8>> {
    let text = fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t {
            "0" => labels.push(0),
            "1" => labels.push(1),
            other => {
                return Err(Error::InvalidData(format!(
                    "{}:{}: label outside {{0,1}}: {other:?}",
                    path.display(),
                    ln + 1
                )))
            }
        }
    }
    Ok(labels)
}

/// Writes the dataset into `dir` as `manifest.json` plus per-view CSVs
/// (and `labels.csv` when labels are present). Returns the manifest path.
pub fn write_dataset(dir: &Path, dataset: &MultiViewDataset) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut views = Vec::new();
    for (m, name) in dataset.view_names().iter().enumerate() {
        let file = format!("{name}.csv");
        write_matrix_csv(&dir.join(&file), dataset.view(m))?;
        views.push(ManifestView {
            name: name.clone(),
            path: file,
            dim: dataset.view(m).ncols(),
        });
    }
    let labels_path = match dataset.labels() {
        Some(labels) => {
            let mut text = String::new();
            for &l in labels {
                text.push_str(&format!("{l}\n"));
            }
            atomic_write(&dir.join("labels.csv"), text.as_bytes())?;
            Some("labels.csv".to_string())
        }
        None => None,
    };
    let manifest = DatasetManifest {
        schema: MANIFEST_SCHEMA.to_string(),
        version: MANIFEST_VERSION,
        n_samples: dataset.n_samples(),
        views,
        labels_path,
    };
    let manifest_path = dir.join("manifest.json");
    atomic_write(&manifest_path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest_path)
}

/// Reads a dataset from its manifest, rejecting manifests whose declared
/// shapes disagree with the CSV contents.
pub fn read_dataset(manifest_path: &Path) -> Result<MultiViewDataset> {
    let manifest: DatasetManifest = serde_json::from_str(&fs::read_to_string(manifest_path)?)?;
    if manifest.schema != MANIFEST_SCHEMA {
        return Err(Error::InvalidData(format!(
            "unexpected manifest schema {:?}",
            manifest.schema
        )));
    }
    if manifest.version != MANIFEST_VERSION {
        return Err(Error::InvalidData(format!(
            "unsupported manifest version {}",
            manifest.version
        )));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut views = Vec::new();
    let mut names = Vec::new();
    for v in &manifest.views {
        let m = read_matrix_csv(&base.join(&v.path))?;
        if m.nrows() != manifest.n_samples {
            return Err(Error::InvalidData(format!(
                "view {:?}: manifest declares {} samples but file has {} rows",
                v.name,
                manifest.n_samples,
                m.nrows()
            )));
        }
        if m.ncols() != v.dim {
            return Err(Error::InvalidData(format!(
                "view {:?}: manifest declares dim {} but file has {} columns",
                v.name,
                v.dim,
                m.ncols()
            )));
        }
        names.push(v.name.clone());
        views.push(m);
    }
    let labels = match &manifest.labels_path {
        Some(p) => {
            let l = read_labels_csv(&base.join(p))?;
            if l.len() != manifest.n_samples {
                return Err(Error::InvalidData(format!(
                    "labels: manifest declares {} samples but file has {}",
                    manifest.n_samples,
                    l.len()
                )));
            }
            Some(l)
        }
        None => None,
    };
    MultiViewDataset::new(views, names, labels)
}


/// Ground-truth record emitted next to simulated datasets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub schema: String,
    pub version: u32,
    pub params: crate::generative::GenerativeParams,
    pub latents: crate::generative::LatentRecord,
}

pub fn write_ground_truth(
    dir: &Path,
    params: &crate::generative::GenerativeParams,
    latents: &crate::generative::LatentRecord,
) -> Result<PathBuf> {
    let truth = GroundTruth {
        schema: "gfamix-ground-truth".to_string(),
        version: 1,
        params: params.clone(),
        latents: latents.clone(),
    };
    let path = dir.join("ground_truth.json");
    atomic_write(&path, serde_json::to_string_pretty(&truth)?.as_bytes())?;
    Ok(path)
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth> {
    let truth: GroundTruth = serde_json::from_str(&fs::read_to_string(path)?)?;
    if truth.schema != "gfamix-ground-truth" {
        return Err(Error::InvalidData(format!("unexpected schema {:?}", truth.schema)));
    }
    Ok(truth)
}
