//! File formats and dataset layout: PNG image/mask carriers, the committee
//! probability-stack format, run configuration, dataset manifests and
//! atomic writes.

pub mod atomic;
pub mod config;
pub mod dataset;
pub mod manifest;
pub mod png;
pub mod stack;

pub use atomic::atomic_write;
pub use config::RunConfig;
pub use dataset::{lint_dataset, load_dataset, DatasetLayout, ManifestRecord, Split};
pub use manifest::{resolve_manifest_path, write_json, TrainingManifest};
pub use png::{read_image, read_mask, write_image, write_mask};
pub use stack::{read_stack, write_stack, STACK_MAGIC, STACK_VERSION};
