//! Run-directory artifacts: the training manifest handed to the trainer and
//! atomic JSON reports.
//!
//! Manifest paths may be absolute (dataset files) or relative; relative
//! paths resolve against the manifest's directory, which keeps run
//! directories relocatable and byte-comparable across same-dataset runs.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::atomic::atomic_write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainEntry {
    pub id: String,
    pub image: PathBuf,
    pub mask: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictEntry {
    pub id: String,
    pub image: PathBuf,
}

/// What the trainer sees: labeled (real plus synthetic) pairs to fit on and
/// unlabeled frames to produce probability stacks for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrainingManifest {
    pub train: Vec<TrainEntry>,
    pub predict: Vec<PredictEntry>,
}

impl TrainingManifest {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.train {
            out.push_str(&format!(
                "train\t{}\t{}\t{}\n",
                e.id,
                e.image.display(),
                e.mask.display()
            ));
        }
        for e in &self.predict {
            out.push_str(&format!("predict\t{}\t{}\n", e.id, e.image.display()));
        }
        out
    }

    pub fn from_tsv(raw: &str) -> Result<Self> {
        let mut manifest = TrainingManifest::default();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["train", id, image, mask] => manifest.train.push(TrainEntry {
                    id: id.to_string(),
                    image: PathBuf::from(image),
                    mask: PathBuf::from(mask),
                }),
                ["predict", id, image] => manifest.predict.push(PredictEntry {
                    id: id.to_string(),
                    image: PathBuf::from(image),
                }),
                _ => {
                    return Err(Error::FormatError(format!(
                        "training manifest line {}: unrecognised record {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(manifest)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_tsv().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_tsv(&std::fs::read_to_string(path)?)
    }
}

/// Resolves a manifest path against the directory the manifest lives in.
pub fn resolve_manifest_path(manifest_path: &Path, entry: &Path) -> PathBuf {
    if entry.is_absolute() {
        entry.to_path_buf()
    } else {
        manifest_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(entry)
    }
}

/// Pretty-printed JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| Error::FormatError(e.to_string()))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}
