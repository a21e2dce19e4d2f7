//! Dataset layout: a root directory with `images/`, `masks/`, an optional
//! `backgrounds/` set and a newline-delimited manifest of
//! `id <TAB> image_path <TAB> mask_path <TAB> split` records.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use image::ImageReader;

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const BACKGROUNDS_DIR: &str = "backgrounds";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ManifestRecord {
    pub id: String,
    /// Paths resolved against the dataset root.
    pub image_path: PathBuf,
    pub mask_path: PathBuf,
    pub split: Split,
}

#[derive(Clone, Debug)]
pub struct DatasetLayout {
    pub root: PathBuf,
    pub records: Vec<ManifestRecord>,
    /// Background-only frames, sorted by file name.
    pub backgrounds: Vec<PathBuf>,
}

impl DatasetLayout {
    pub fn train_records(&self) -> impl Iterator<Item = &ManifestRecord> {
        self.records.iter().filter(|r| r.split == Split::Train)
    }

    pub fn test_records(&self) -> impl Iterator<Item = &ManifestRecord> {
        self.records.iter().filter(|r| r.split == Split::Test)
    }
}

fn parse_manifest(root: &Path, raw: &str, violations: &mut Vec<String>) -> Vec<ManifestRecord> {
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            violations.push(format!(
                "manifest line {}: expected 4 tab-separated fields, got {}",
                lineno + 1,
                fields.len()
            ));
            continue;
        }
        let id = fields[0].to_string();
        if id.is_empty() {
            violations.push(format!("manifest line {}: empty id", lineno + 1));
            continue;
        }
        if !seen.insert(id.clone()) {
            violations.push(format!("duplicate manifest id {id:?}"));
            continue;
        }
        let split = match fields[3] {
            "train" => Split::Train,
            "test" => Split::Test,
            other => {
                violations.push(format!(
                    "manifest line {}: unknown split {other:?}",
                    lineno + 1
                ));
                continue;
            }
        };
        records.push(ManifestRecord {
            id,
            image_path: root.join(fields[1]),
            mask_path: root.join(fields[2]),
            split,
        });
    }
    records
}

/// Every problem found in a dataset tree; empty means the layout is valid.
pub fn lint_dataset(root: &Path) -> Vec<String> {
    let mut violations = Vec::new();
    if !root.is_dir() {
        return vec![format!("dataset root {} does not exist", root.display())];
    }
    let manifest_path = root.join(MANIFEST_FILE);
    let raw = match std::fs::read_to_string(&manifest_path) {
        Ok(raw) => raw,
        Err(e) => return vec![format!("cannot read {}: {e}", manifest_path.display())],
    };
    let records = parse_manifest(root, &raw, &mut violations);
    if records.is_empty() && violations.is_empty() {
        violations.push("manifest lists no records".into());
    }

    let mut frame_dims: Option<(u32, u32)> = None;
    for record in &records {
        let image_dims = match probe_png(&record.image_path) {
            Ok(dims) => Some(dims),
            Err(msg) => {
                violations.push(format!("{}: {msg}", record.id));
                None
            }
        };
        match check_mask(&record.mask_path) {
            Ok(mask_dims) => {
                if let Some(img) = image_dims {
                    if img != mask_dims {
                        violations.push(format!(
                            "{}: image is {}x{} but mask is {}x{}",
                            record.id, img.0, img.1, mask_dims.0, mask_dims.1
                        ));
                    }
                }
            }
            Err(msg) => violations.push(format!("{}: {msg}", record.id)),
        }
        if record.split == Split::Train {
            if let Some(dims) = image_dims {
                frame_dims.get_or_insert(dims);
            }
        }
    }

    for path in list_backgrounds(root) {
        match probe_png(&path) {
            Ok(dims) => {
                if let Some(frame) = frame_dims {
                    if dims != frame {
                        violations.push(format!(
                            "background {}: is {}x{} but the training frame is {}x{}",
                            path.display(),
                            dims.0,
                            dims.1,
                            frame.0,
                            frame.1
                        ));
                    }
                }
            }
            Err(msg) => violations.push(format!("background {}: {msg}", path.display())),
        }
    }

    violations
}

fn probe_png(path: &Path) -> std::result::Result<(u32, u32), String> {
    if !path.is_file() {
        return Err(format!("missing file {}", path.display()));
    }
    let reader = ImageReader::open(path)
        .map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    reader
        .into_dimensions()
        .map_err(|e| format!("cannot decode {}: {e}", path.display()))
}

/// A mask must decode to strictly binary values: 0 or 255.
fn check_mask(path: &Path) -> std::result::Result<(u32, u32), String> {
    if !path.is_file() {
        return Err(format!("missing mask {}", path.display()));
    }
    let gray = ImageReader::open(path)
        .map_err(|e| format!("cannot open {}: {e}", path.display()))?
        .decode()
        .map_err(|e| format!("cannot decode {}: {e}", path.display()))?
        .to_luma8();
    for &v in gray.iter() {
        if v != 0 && v != 255 {
            return Err(format!(
                "non-binary mask {} contains value {v}",
                path.display()
            ));
        }
    }
    Ok((gray.width(), gray.height()))
}

fn list_backgrounds(root: &Path) -> Vec<PathBuf> {
    let dir = root.join(BACKGROUNDS_DIR);
    let mut paths: Vec<PathBuf> = match std::fs::read_dir(&dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.extension()
                    .map(|ext| ext.eq_ignore_ascii_case("png"))
                    .unwrap_or(false)
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    paths.sort();
    paths
}

/// Loads and fully validates a dataset tree, or reports every violation.
pub fn load_dataset(root: &Path) -> Result<DatasetLayout> {
    let violations = lint_dataset(root);
    if !violations.is_empty() {
        return Err(Error::DatasetError(violations));
    }
    let raw = std::fs::read_to_string(root.join(MANIFEST_FILE))?;
    let mut ignored = Vec::new();
    let records = parse_manifest(root, &raw, &mut ignored);
    Ok(DatasetLayout {
        root: root.to_path_buf(),
        records,
        backgrounds: list_backgrounds(root),
    })
}
