//! Instrument-free background synthesis.
//!
//! A labeled frame can donate its own background: the frame is flipped or
//! rotated and, when the transformed fusion mask clears the original one,
//! the instrument pixels are filled from the transformed copy. When every
//! self-transform collides, a donor drawn from the background pool fills the
//! masked region instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{dilate, ensure_same_dims, fusion_mask, BlurKind, RasterImage, SoftMask};
use crate::scalar::Scalar;
use crate::synth::{blend, LabeledImage, SynthesisConfig};

/// Rigid self-transforms usable for self-inpainting. The quarter rotations
/// only apply to square frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfTransform {
    FlipH,
    FlipV,
    Rot90,
    Rot180,
    Rot270,
}

impl SelfTransform {
    /// Trial order used by [`acquire_background`].
    pub const ALL: [SelfTransform; 5] = [
        SelfTransform::FlipH,
        SelfTransform::FlipV,
        SelfTransform::Rot90,
        SelfTransform::Rot180,
        SelfTransform::Rot270,
    ];

    pub fn requires_square(self) -> bool {
        matches!(self, SelfTransform::Rot90 | SelfTransform::Rot270)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SelfTransform::FlipH => "flip_h",
            SelfTransform::FlipV => "flip_v",
            SelfTransform::Rot90 => "rot90",
            SelfTransform::Rot180 => "rot180",
            SelfTransform::Rot270 => "rot270",
        }
    }

    fn check_frame(self, width: usize, height: usize) -> Result<()> {
        if self.requires_square() && width != height {
            return Err(Error::InvalidParameter(format!(
                "{} requires a square frame, got {width}x{height}",
                self.as_str()
            )));
        }
        Ok(())
    }

    /// Source coordinates feeding output pixel `(x, y)`.
    #[inline]
    fn source(self, x: usize, y: usize, width: usize, height: usize) -> (usize, usize) {
        match self {
            SelfTransform::FlipH => (width - 1 - x, y),
            SelfTransform::FlipV => (x, height - 1 - y),
            SelfTransform::Rot90 => (y, height - 1 - x),
            SelfTransform::Rot180 => (width - 1 - x, height - 1 - y),
            SelfTransform::Rot270 => (width - 1 - y, x),
        }
    }
}

/// Applies a self-transform to an image.
pub fn apply_self_transform<T: Scalar>(
    image: &RasterImage<T>,
    t: SelfTransform,
) -> Result<RasterImage<T>> {
    let (width, height) = image.dims();
    t.check_frame(width, height)?;
    RasterImage::from_fn(width, height, |x, y| {
        let (sx, sy) = t.source(x, y, width, height);
        image.pixel(sx, sy)
    })
}

/// Applies a self-transform to a soft mask.
pub fn apply_self_transform_soft<T: Scalar>(
    mask: &SoftMask<T>,
    t: SelfTransform,
) -> Result<SoftMask<T>> {
    let (width, height) = mask.dims();
    t.check_frame(width, height)?;
    SoftMask::from_fn(width, height, |x, y| {
        let (sx, sy) = t.source(x, y, width, height);
        mask.get(sx, sy)
    })
}

/// How a background entered the pool.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackgroundOrigin {
    RealExternal,
    SelfInpainted {
        source: String,
        transform: SelfTransform,
    },
    ExternalInpainted {
        source: String,
        donor: String,
    },
}

/// Instrument-free frame, real or synthesised.
#[derive(Clone, Debug)]
pub struct BackgroundImage<T> {
    pub id: String,
    pub image: RasterImage<T>,
    pub origin: BackgroundOrigin,
}

/// Ordered pool of backgrounds. Append order is part of the deterministic
/// run state, so entries are never reordered or removed.
#[derive(Clone, Debug, Default)]
pub struct BackgroundPool<T> {
    items: Vec<BackgroundImage<T>>,
}

impl<T: Scalar> BackgroundPool<T> {
    pub fn new() -> Self {
        Self { items: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, bg: BackgroundImage<T>) {
        self.items.push(bg);
    }

    pub fn get(&self, index: usize) -> Option<&BackgroundImage<T>> {
        self.items.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BackgroundImage<T>> {
        self.items.iter()
    }

    /// Uniform draw; `None` on an empty pool.
    pub fn choose<R: Rng>(&self, rng: &mut R) -> Option<&BackgroundImage<T>> {
        if self.items.is_empty() {
            return None;
        }
        let idx = rng.random_range(0..self.items.len());
        self.items.get(idx)
    }
}

/// Checks whether the fusion mask and its transformed copy stay disjoint:
/// no pixel may be positive in both.
pub fn masks_disjoint<T: Scalar>(fusion: &SoftMask<T>, transformed: &SoftMask<T>) -> bool {
    fusion
        .data()
        .iter()
        .zip(transformed.data())
        .all(|(&a, &b)| !(a > T::zero() && b > T::zero()))
}

/// Fills the fusion-mask region from a flipped or rotated copy of the frame
/// itself. Returns `None` when the transformed mask overlaps the original,
/// in which case the caller should fall back to external inpainting.
pub fn self_inpaint<T: Scalar>(
    image: &RasterImage<T>,
    fusion: &SoftMask<T>,
    t: SelfTransform,
) -> Result<Option<RasterImage<T>>> {
    ensure_same_dims(image.dims(), fusion.dims())?;
    let transformed_mask = apply_self_transform_soft(fusion, t)?;
    if !masks_disjoint(fusion, &transformed_mask) {
        return Ok(None);
    }
    let transformed_image = apply_self_transform(image, t)?;
    Ok(Some(blend(&transformed_image, image, fusion)?))
}

/// Fills the fusion-mask region from a donor background.
pub fn external_inpaint<T: Scalar>(
    image: &RasterImage<T>,
    fusion: &SoftMask<T>,
    donor: &RasterImage<T>,
) -> Result<RasterImage<T>> {
    ensure_same_dims(image.dims(), donor.dims())?;
    blend(donor, image, fusion)
}

/// Produces an instrument-free background for a labeled sample.
///
/// With inpainting enabled the five self-transforms are tried in the fixed
/// order flip_h, flip_v, rot90, rot180, rot270 (quarter rotations skipped on
/// non-square frames) and the first accepted one wins; inpainted results are
/// appended to the pool. Otherwise, or when every self-transform is
/// rejected, a donor drawn uniformly from the pool fills the masked region.
/// External fills are appended to the pool only while inpainting is enabled,
/// so a disabled-inpainting pool keeps real backgrounds only.
pub fn acquire_background<T: Scalar>(
    sample: &LabeledImage<T>,
    pool: &mut BackgroundPool<T>,
    cfg: &SynthesisConfig<T>,
    seed: u64,
) -> Result<BackgroundImage<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fusion_params = cfg.sample_fusion(&mut rng, BlurKind::Average);
    let dilated = dilate(&sample.mask, fusion_params.dilation)?;
    let fusion = fusion_mask(&dilated, &fusion_params)?;
    let (width, height) = sample.image.dims();

    if cfg.use_inpainting {
        for t in SelfTransform::ALL {
            if t.requires_square() && width != height {
                continue;
            }
            if let Some(image) = self_inpaint(&sample.image, &fusion, t)? {
                let bg = BackgroundImage {
                    id: format!("bg{:05}_self_{}_{}", pool.len(), t.as_str(), sample.id),
                    image,
                    origin: BackgroundOrigin::SelfInpainted {
                        source: sample.id.clone(),
                        transform: t,
                    },
                };
                pool.push(bg.clone());
                return Ok(bg);
            }
        }
    }

    let donor = pool.choose(&mut rng).ok_or(Error::NoBackgroundAvailable)?;
    let donor_id = donor.id.clone();
    let image = external_inpaint(&sample.image, &fusion, &donor.image)?;
    let bg = BackgroundImage {
        id: format!("bg{:05}_ext_{}", pool.len(), sample.id),
        image,
        origin: BackgroundOrigin::ExternalInpainted {
            source: sample.id.clone(),
            donor: donor_id,
        },
    };
    if cfg.use_inpainting {
        pool.push(bg.clone());
    }
    Ok(bg)
}
