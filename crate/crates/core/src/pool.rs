//! Pool bookkeeping for the active-learning loop.
//!
//! Unlabeled images expose only their frames; their masks stay behind the
//! pool API until [`PoolState::reveal`] moves the image to the labeled pool.
//! Nothing else can read a hidden mask, and every reveal is logged, so label
//! leakage is structurally impossible and auditable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inpaint::BackgroundPool;
use crate::io::dataset::DatasetLayout;
use crate::io::png::read_image;
use crate::inpaint::{BackgroundImage, BackgroundOrigin};

/// Paths of a labeled image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolEntry {
    pub image_path: PathBuf,
    pub mask_path: PathBuf,
}

/// Reference to a synthetic sample stored in the run directory, with the
/// provenance that would regenerate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticRef {
    pub id: String,
    pub image_path: String,
    pub mask_path: String,
    pub provenance: crate::synth::Provenance,
}

#[derive(Debug)]
pub struct PoolState {
    unlabeled: BTreeMap<String, PathBuf>,
    hidden_masks: BTreeMap<String, PathBuf>,
    labeled: BTreeMap<String, PoolEntry>,
    synthetic: Vec<SyntheticRef>,
    backgrounds: BackgroundPool<f64>,
    reveal_log: Vec<String>,
}

impl PoolState {
    /// Builds the pools from a validated dataset: every training image is
    /// unlabeled with its mask hidden; external backgrounds are loaded when
    /// enabled.
    pub fn from_layout(layout: &DatasetLayout, load_external_backgrounds: bool) -> Result<Self> {
        let mut unlabeled = BTreeMap::new();
        let mut hidden_masks = BTreeMap::new();
        for record in layout.train_records() {
            unlabeled.insert(record.id.clone(), record.image_path.clone());
            hidden_masks.insert(record.id.clone(), record.mask_path.clone());
        }
        let mut backgrounds = BackgroundPool::new();
        if load_external_backgrounds {
            for path in &layout.backgrounds {
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                backgrounds.push(BackgroundImage {
                    id: format!("bg{:05}_real_{stem}", backgrounds.len()),
                    image: read_image(path)?,
                    origin: BackgroundOrigin::RealExternal,
                });
            }
        }
        Ok(Self {
            unlabeled,
            hidden_masks,
            labeled: BTreeMap::new(),
            synthetic: Vec::new(),
            backgrounds,
            reveal_log: Vec::new(),
        })
    }

    pub fn unlabeled_len(&self) -> usize {
        self.unlabeled.len()
    }

    pub fn labeled_len(&self) -> usize {
        self.labeled.len()
    }

    /// Unlabeled ids in ascending order.
    pub fn unlabeled_ids(&self) -> Vec<String> {
        self.unlabeled.keys().cloned().collect()
    }

    /// Labeled ids in ascending order.
    pub fn labeled_ids(&self) -> Vec<String> {
        self.labeled.keys().cloned().collect()
    }

    pub fn unlabeled_image_path(&self, id: &str) -> Option<&Path> {
        self.unlabeled.get(id).map(PathBuf::as_path)
    }

    pub fn labeled_entry(&self, id: &str) -> Option<&PoolEntry> {
        self.labeled.get(id)
    }

    /// Reveals the annotation of an unlabeled image, moving it to the
    /// labeled pool. This is the only way a hidden mask becomes readable.
    pub fn reveal(&mut self, id: &str) -> Result<&PoolEntry> {
        let image_path = self.unlabeled.remove(id).ok_or_else(|| {
            Error::InvalidInput(format!("{id:?} is not in the unlabeled pool"))
        })?;
        let mask_path = self
            .hidden_masks
            .remove(id)
            .ok_or_else(|| Error::DatasetError(vec![format!("{id:?} has no hidden mask")]))?;
        self.reveal_log.push(id.to_string());
        self.labeled.insert(
            id.to_string(),
            PoolEntry {
                image_path,
                mask_path,
            },
        );
        Ok(&self.labeled[id])
    }

    /// Ids revealed so far, in reveal order.
    pub fn reveal_log(&self) -> &[String] {
        &self.reveal_log
    }

    pub fn synthetic(&self) -> &[SyntheticRef] {
        &self.synthetic
    }

    pub fn add_synthetic(&mut self, sample: SyntheticRef) {
        self.synthetic.push(sample);
    }

    pub fn backgrounds(&self) -> &BackgroundPool<f64> {
        &self.backgrounds
    }

    pub fn backgrounds_mut(&mut self) -> &mut BackgroundPool<f64> {
        &mut self.backgrounds
    }
}

/// How many real annotations a run may reveal and when.
///
/// Half the budget (rounded down) is revealed up front at random; the rest
/// is split as evenly as possible across the query iterations with earlier
/// iterations taking the remainder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetSchedule {
    pub total: usize,
    pub initial_random: usize,
    pub per_iteration: Vec<usize>,
}

impl BudgetSchedule {
    /// Schedule for a fractional budget. The total is twice the half count
    /// `floor(fraction * train_size / 2)`, so the random and queried halves
    /// match exactly; a fraction of 1 labels everything up front and
    /// disables querying.
    pub fn from_fraction(fraction: f64, train_size: usize, al_iterations: usize) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "budget fraction must lie in (0, 1], got {fraction}"
            )));
        }
        if fraction >= 1.0 {
            return Ok(Self::full(train_size));
        }
        let half = (fraction * train_size as f64 / 2.0).floor() as usize;
        Self::from_halves(half, half, train_size, al_iterations)
    }

    /// Schedule for an explicit image count: `floor(total / 2)` random, the
    /// rest queried.
    pub fn from_count(total: usize, train_size: usize, al_iterations: usize) -> Result<Self> {
        let initial = total / 2;
        Self::from_halves(initial, total - initial, train_size, al_iterations)
    }

    /// Everything labeled at once; no query iterations.
    pub fn full(train_size: usize) -> Self {
        Self {
            total: train_size,
            initial_random: train_size,
            per_iteration: Vec::new(),
        }
    }

    /// The whole budget spread across the iterations, nothing up front
    /// (interleaved random mode; each iteration mixes its own random picks).
    pub fn from_halves_spread(total: usize, al_iterations: usize) -> Result<Self> {
        if total == 0 {
            return Err(Error::InvalidParameter(
                "budget resolves to zero images".into(),
            ));
        }
        Self::from_halves(0, total, total, al_iterations)
    }

    fn from_halves(
        initial: usize,
        queried: usize,
        train_size: usize,
        al_iterations: usize,
    ) -> Result<Self> {
        let total = initial + queried;
        if total == 0 {
            return Err(Error::InvalidParameter(
                "budget resolves to zero images".into(),
            ));
        }
        if total > train_size {
            return Err(Error::InvalidParameter(format!(
                "budget of {total} exceeds the training set of {train_size}"
            )));
        }
        if queried > 0 && al_iterations == 0 {
            return Err(Error::InvalidParameter(
                "queried budget requires at least one iteration".into(),
            ));
        }
        let mut per_iteration = Vec::with_capacity(al_iterations);
        if queried > 0 {
            let base = queried / al_iterations;
            let extra = queried % al_iterations;
            for i in 0..al_iterations {
                per_iteration.push(base + usize::from(i < extra));
            }
        }
        Ok(Self {
            total,
            initial_random: initial,
            per_iteration,
        })
    }

    /// True when the whole training set is labeled at initialisation.
    pub fn is_full_budget(&self) -> bool {
        self.per_iteration.is_empty() && self.initial_random == self.total
    }
}
