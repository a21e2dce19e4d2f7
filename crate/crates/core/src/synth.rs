//! Synthetic sample generation: colour/brightness matching, fusion blending,
//! trimming, and the Type-1 / Type-2 compositing pipelines.
//!
//! A Type-1 sample keeps the instrument of the source image and places it on
//! a background drawn from the pool; a Type-2 sample keeps the (inpainted)
//! background of the source image and borrows an instrument from a donor.
//! Generation is deterministic given `(inputs, config, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{
    dilate, ensure_same_dims, fusion_mask, transform, trim, BinaryMask, BlurKind, FusionParams,
    RasterImage, SoftMask, TransformParams, TrimShape, TrimSpec,
};
use crate::inpaint::{acquire_background, BackgroundImage, BackgroundPool};
use crate::scalar::Scalar;

/// Fraction of the original foreground that must survive the geometric
/// transform; below this the parameters are resampled.
const MIN_RETAINED_FOREGROUND: f64 = 0.01;
const MAX_SAMPLING_ATTEMPTS: usize = 10;

/// Labeled instrument image: frame plus its binary instrument mask.
#[derive(Clone, Debug)]
pub struct LabeledImage<T> {
    pub id: String,
    pub image: RasterImage<T>,
    pub mask: BinaryMask,
}

impl<T: Scalar> LabeledImage<T> {
    pub fn new(id: impl Into<String>, image: RasterImage<T>, mask: BinaryMask) -> Result<Self> {
        ensure_same_dims(image.dims(), mask.dims())?;
        Ok(Self {
            id: id.into(),
            image,
            mask,
        })
    }
}

/// Colour and brightness matching factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorAdjustParams<T> {
    /// Colour-adjustment factor in `[0, 1]`; 1 leaves the hue ratio fully applied.
    pub alpha: T,
    /// Brightness factor; 1 leaves brightness unchanged.
    pub beta: T,
}

impl<T: Scalar> ColorAdjustParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero() && self.alpha <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "color alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.beta > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "brightness beta must be positive, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Pulls the instrument's colour statistics towards the background's.
///
/// Per channel the instrument is scaled by the per-channel background/instrument
/// sum ratio (weighted by `alpha`) and by the total-sum ratio times `beta`,
/// then clamped to `[0, 1]`. Sums are taken over every pixel of each image.
pub fn adjust_color_brightness<T: Scalar>(
    instrument: &RasterImage<T>,
    background: &RasterImage<T>,
    params: &ColorAdjustParams<T>,
) -> Result<RasterImage<T>> {
    params.validate()?;
    ensure_same_dims(instrument.dims(), background.dims())?;

    let eps = T::of(1e-9);
    let instr_total = instrument.total_sum();
    if !(instr_total > eps) {
        return Err(Error::DegenerateInput(
            "instrument image sum is near zero".into(),
        ));
    }
    let total_ratio = background.total_sum() / instr_total;

    let mut channel_ratio = [T::zero(); 3];
    for (c, ratio) in channel_ratio.iter_mut().enumerate() {
        let instr_chn = instrument.channel_sum(c);
        if !(instr_chn > eps) {
            return Err(Error::DegenerateInput(format!(
                "instrument channel {c} sum is near zero"
            )));
        }
        *ratio = background.channel_sum(c) / instr_chn;
    }

    let one = T::one();
    let (width, height) = instrument.dims();
    RasterImage::from_fn(width, height, |x, y| {
        let px = instrument.pixel(x, y);
        let mut out = [T::zero(); 3];
        for c in 0..3 {
            let v = px[c];
            out[c] = params.beta
                * total_ratio
                * (params.alpha * channel_ratio[c] * v + (one - params.alpha) * v);
        }
        out
    })
}

/// Per-pixel convex combination `M_F ⊙ instrument + (1 − M_F) ⊙ background`.
///
/// Every output channel is clamped into `[min(a, b), max(a, b)]`, so the
/// convexity contract holds exactly and the all-ones / all-zeros fusion
/// masks return the instrument / background bit for bit.
pub fn blend<T: Scalar>(
    instrument: &RasterImage<T>,
    background: &RasterImage<T>,
    fusion: &SoftMask<T>,
) -> Result<RasterImage<T>> {
    ensure_same_dims(instrument.dims(), background.dims())?;
    ensure_same_dims(instrument.dims(), fusion.dims())?;

    let one = T::one();
    let (width, height) = instrument.dims();
    RasterImage::from_fn(width, height, |x, y| {
        let m = fusion.get(x, y);
        let a = instrument.pixel(x, y);
        let b = background.pixel(x, y);
        let mut out = [T::zero(); 3];
        for c in 0..3 {
            let v = m * a[c] + (one - m) * b[c];
            out[c] = v.max(a[c].min(b[c])).min(a[c].max(b[c]));
        }
        out
    })
}

/// Which of the two composition families a sample belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthType {
    Type1,
    Type2,
}

/// One or two blended variants per generated sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiBlend {
    Single,
    Pair,
}

impl MultiBlend {
    pub fn factor(self) -> usize {
        match self {
            MultiBlend::Single => 1,
            MultiBlend::Pair => 2,
        }
    }

    pub fn from_count(n: u8) -> Result<Self> {
        match n {
            1 => Ok(MultiBlend::Single),
            2 => Ok(MultiBlend::Pair),
            other => Err(Error::InvalidParameter(format!(
                "multi_blend must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Sampling ranges for the trim region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrimRanges {
    Circle {
        center_x: (usize, usize),
        center_y: (usize, usize),
        radius: (usize, usize),
    },
    Rect {
        top: (usize, usize),
        bottom: (usize, usize),
        left: (usize, usize),
        right: (usize, usize),
    },
    None,
}

/// Every tunable of the synthesis pipeline. Two-element ranges are sampled
/// uniformly per generated sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisConfig<T> {
    pub resize_ratio: (T, T),
    pub move_w: (T, T),
    pub move_h: (T, T),
    pub rotation_deg: (T, T),
    /// Dilation kernel size used for fusion masks.
    pub dilation: usize,
    /// Fusion blur kernel size range (inclusive).
    pub fusion_kernel: (usize, usize),
    pub color_alpha: (T, T),
    pub brightness_beta: (T, T),
    pub trim: TrimRanges,
    /// Final border blur `(kernel, sigma)`; kernel 1 disables it.
    pub final_blur: (usize, T),
    pub type1_per_query: u32,
    pub type2_per_query: u32,
    pub multi_blend: MultiBlend,
    pub use_external_backgrounds: bool,
    pub use_inpainting: bool,
}

impl<T: Scalar> SynthesisConfig<T> {
    pub fn validate(&self) -> Result<()> {
        fn ordered<S: PartialOrd + std::fmt::Debug>(name: &str, r: (S, S)) -> Result<()> {
            if r.0 > r.1 {
                return Err(Error::InvalidParameter(format!(
                    "{name} range is reversed: {:?} > {:?}",
                    r.0, r.1
                )));
            }
            Ok(())
        }
        ordered("resize_ratio", self.resize_ratio)?;
        if !(self.resize_ratio.0 > T::zero()) {
            return Err(Error::InvalidParameter(
                "resize_ratio range must be strictly positive".into(),
            ));
        }
        ordered("move_w", self.move_w)?;
        ordered("move_h", self.move_h)?;
        ordered("rotation_deg", self.rotation_deg)?;
        ordered("fusion_k", self.fusion_kernel)?;
        ordered("color_alpha", self.color_alpha)?;
        ordered("brightness_beta", self.brightness_beta)?;
        if self.dilation == 0 || self.dilation.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "dilation kernel size must be odd and positive, got {}",
                self.dilation
            )));
        }
        if self.fusion_kernel.0 == 0 {
            return Err(Error::InvalidParameter(
                "fusion kernel range must start at 1 or above".into(),
            ));
        }
        match self.trim {
            TrimRanges::Circle {
                center_x,
                center_y,
                radius,
            } => {
                ordered("trim center_x", center_x)?;
                ordered("trim center_y", center_y)?;
                ordered("trim radius", radius)?;
                if radius.0 == 0 {
                    return Err(Error::InvalidParameter(
                        "trim radius range must be positive".into(),
                    ));
                }
            }
            TrimRanges::Rect {
                top,
                bottom,
                left,
                right,
            } => {
                ordered("trim top", top)?;
                ordered("trim bottom", bottom)?;
                ordered("trim left", left)?;
                ordered("trim right", right)?;
            }
            TrimRanges::None => {}
        }
        if self.final_blur.0 == 0 {
            return Err(Error::InvalidParameter(
                "final blur kernel size must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn sample_transform(&self, rng: &mut ChaCha8Rng) -> TransformParams<T> {
        TransformParams {
            scale: sample_scalar(rng, self.resize_ratio),
            shift_x: sample_scalar(rng, self.move_w),
            shift_y: sample_scalar(rng, self.move_h),
            rotate_deg: sample_scalar(rng, self.rotation_deg),
        }
    }

    fn sample_color(&self, rng: &mut ChaCha8Rng) -> ColorAdjustParams<T> {
        ColorAdjustParams {
            alpha: sample_scalar(rng, self.color_alpha),
            beta: sample_scalar(rng, self.brightness_beta),
        }
    }

    fn sample_trim(&self, rng: &mut ChaCha8Rng) -> TrimSpec<T> {
        let shape = match self.trim {
            TrimRanges::Circle {
                center_x,
                center_y,
                radius,
            } => TrimShape::Circle {
                center_x: T::of(sample_usize(rng, center_x) as f64),
                center_y: T::of(sample_usize(rng, center_y) as f64),
                radius: T::of(sample_usize(rng, radius) as f64),
            },
            TrimRanges::Rect {
                top,
                bottom,
                left,
                right,
            } => TrimShape::Rect {
                top: sample_usize(rng, top),
                bottom: sample_usize(rng, bottom),
                left: sample_usize(rng, left),
                right: sample_usize(rng, right),
            },
            TrimRanges::None => TrimShape::None,
        };
        TrimSpec {
            shape,
            blur_kernel: self.final_blur.0,
            blur_sigma: self.final_blur.1,
        }
    }

    /// Fusion parameters with the blur kind fixed; the kernel size is drawn
    /// independently per call.
    pub(crate) fn sample_fusion(&self, rng: &mut ChaCha8Rng, blur: BlurKind) -> FusionParams<T> {
        FusionParams {
            dilation: self.dilation,
            blur,
            kernel: sample_usize(rng, self.fusion_kernel),
            sigma: None,
        }
    }
}

fn sample_scalar<T: Scalar>(rng: &mut ChaCha8Rng, range: (T, T)) -> T {
    if range.0 == range.1 {
        return range.0;
    }
    rng.random_range(range.0..=range.1)
}

fn sample_usize(rng: &mut ChaCha8Rng, range: (usize, usize)) -> usize {
    if range.0 == range.1 {
        return range.0;
    }
    rng.random_range(range.0..=range.1)
}

/// Concrete values drawn for one sample, in replayable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub scale: f64,
    pub shift_x: f64,
    pub shift_y: f64,
    pub rotate_deg: f64,
    pub dilation: usize,
    pub blur: String,
    pub fusion_kernel: usize,
    pub fusion_sigma: f64,
    pub color_alpha: f64,
    pub color_beta: f64,
    pub trim: TrimRecord,
    pub final_blur_kernel: usize,
    pub final_blur_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum TrimRecord {
    Circle {
        center_x: f64,
        center_y: f64,
        radius: f64,
    },
    Rect {
        top: usize,
        bottom: usize,
        left: usize,
        right: usize,
    },
    None,
}

/// Typed view of a [`ParamsRecord`], suitable for replaying the pipeline.
#[derive(Clone, Debug)]
pub struct SampledParams<T> {
    pub transform: TransformParams<T>,
    pub fusion: FusionParams<T>,
    pub color: ColorAdjustParams<T>,
    pub trim: TrimSpec<T>,
}

impl<T: Scalar> SampledParams<T> {
    pub fn record(&self) -> ParamsRecord {
        let t = |v: T| v.to_f64().expect("scalar fits f64");
        ParamsRecord {
            scale: t(self.transform.scale),
            shift_x: t(self.transform.shift_x),
            shift_y: t(self.transform.shift_y),
            rotate_deg: t(self.transform.rotate_deg),
            dilation: self.fusion.dilation,
            blur: self.fusion.blur.as_str().to_string(),
            fusion_kernel: self.fusion.kernel,
            fusion_sigma: t(self.fusion.effective_sigma()),
            color_alpha: t(self.color.alpha),
            color_beta: t(self.color.beta),
            trim: match self.trim.shape {
                TrimShape::Circle {
                    center_x,
                    center_y,
                    radius,
                } => TrimRecord::Circle {
                    center_x: t(center_x),
                    center_y: t(center_y),
                    radius: t(radius),
                },
                TrimShape::Rect {
                    top,
                    bottom,
                    left,
                    right,
                } => TrimRecord::Rect {
                    top,
                    bottom,
                    left,
                    right,
                },
                TrimShape::None => TrimRecord::None,
            },
            final_blur_kernel: self.trim.blur_kernel,
            final_blur_sigma: t(self.trim.blur_sigma),
        }
    }
}

impl ParamsRecord {
    pub fn to_params<T: Scalar>(&self) -> Result<SampledParams<T>> {
        let blur = match self.blur.as_str() {
            "average" => BlurKind::Average,
            "gaussian" => BlurKind::Gaussian,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown blur kind {other:?}"
                )))
            }
        };
        Ok(SampledParams {
            transform: TransformParams {
                scale: T::of(self.scale),
                shift_x: T::of(self.shift_x),
                shift_y: T::of(self.shift_y),
                rotate_deg: T::of(self.rotate_deg),
            },
            fusion: FusionParams {
                dilation: self.dilation,
                blur,
                kernel: self.fusion_kernel,
                sigma: Some(T::of(self.fusion_sigma)),
            },
            color: ColorAdjustParams {
                alpha: T::of(self.color_alpha),
                beta: T::of(self.color_beta),
            },
            trim: TrimSpec {
                shape: match self.trim {
                    TrimRecord::Circle {
                        center_x,
                        center_y,
                        radius,
                    } => TrimShape::Circle {
                        center_x: T::of(center_x),
                        center_y: T::of(center_y),
                        radius: T::of(radius),
                    },
                    TrimRecord::Rect {
                        top,
                        bottom,
                        left,
                        right,
                    } => TrimShape::Rect {
                        top,
                        bottom,
                        left,
                        right,
                    },
                    TrimRecord::None => TrimShape::None,
                },
                blur_kernel: self.final_blur_kernel,
                blur_sigma: T::of(self.final_blur_sigma),
            },
        })
    }
}

/// Where a synthetic sample came from and every value that shaped it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub instrument_id: String,
    pub background_id: String,
    pub synth_type: SynthType,
    pub seed: u64,
    pub params: ParamsRecord,
}

/// A generated image/mask pair. The mask is exactly the trimmed transformed
/// instrument mask; fusion parameters never touch it.
#[derive(Clone, Debug)]
pub struct SyntheticSample<T> {
    pub image: RasterImage<T>,
    pub mask: BinaryMask,
    pub provenance: Provenance,
}

/// Draws geometric parameters until at least 1% of the instrument's
/// foreground stays in frame, resampling up to ten times.
fn transform_with_retry<T: Scalar>(
    instrument: &LabeledImage<T>,
    cfg: &SynthesisConfig<T>,
    rng: &mut ChaCha8Rng,
) -> Result<(TransformParams<T>, RasterImage<T>, BinaryMask)> {
    let original = instrument.mask.count_ones();
    let threshold = (original as f64 * MIN_RETAINED_FOREGROUND).max(1.0);
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let params = cfg.sample_transform(rng);
        let (img, mask) = transform(&instrument.image, &instrument.mask, &params)?;
        if mask.count_ones() as f64 >= threshold {
            return Ok((params, img, mask));
        }
    }
    Err(Error::GenerationFailed(format!(
        "instrument {} retained less than {:.0}% foreground after {MAX_SAMPLING_ATTEMPTS} attempts",
        instrument.id,
        MIN_RETAINED_FOREGROUND * 100.0
    )))
}

/// Runs the post-transform stages: dilation, fusion mask, colour matching,
/// blending and trimming.
fn finish_composite<T: Scalar>(
    transformed_img: &RasterImage<T>,
    transformed_mask: &BinaryMask,
    background: &RasterImage<T>,
    params: &SampledParams<T>,
) -> Result<(RasterImage<T>, BinaryMask)> {
    let dilated = dilate(transformed_mask, params.fusion.dilation)?;
    let soft = fusion_mask(&dilated, &params.fusion)?;
    let adjusted = adjust_color_brightness(transformed_img, background, &params.color)?;
    let fused = blend(&adjusted, background, &soft)?;
    trim(&fused, transformed_mask, &params.trim)
}

fn check_nonempty_mask(sample: &LabeledImage<impl Scalar>) -> Result<()> {
    if sample.mask.is_empty() {
        return Err(Error::DegenerateInput(format!(
            "instrument mask of {} is empty",
            sample.id
        )));
    }
    Ok(())
}

fn generate_on<T: Scalar>(
    instrument: &LabeledImage<T>,
    background: &RasterImage<T>,
    background_id: &str,
    synth_type: SynthType,
    cfg: &SynthesisConfig<T>,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Result<SyntheticSample<T>> {
    let (tp, timg, tmask) = transform_with_retry(instrument, cfg, rng)?;
    let color = cfg.sample_color(rng);
    let trim_spec = cfg.sample_trim(rng);
    let blur = if rng.random_bool(0.5) {
        BlurKind::Average
    } else {
        BlurKind::Gaussian
    };
    let fusion = cfg.sample_fusion(rng, blur);
    let params = SampledParams {
        transform: tp,
        fusion,
        color,
        trim: trim_spec,
    };
    let (image, mask) = finish_composite(&timg, &tmask, background, &params)?;
    Ok(SyntheticSample {
        image,
        mask,
        provenance: Provenance {
            instrument_id: instrument.id.clone(),
            background_id: background_id.to_string(),
            synth_type,
            seed,
            params: params.record(),
        },
    })
}

fn generate_pair_on<T: Scalar>(
    instrument: &LabeledImage<T>,
    background: &RasterImage<T>,
    background_id: &str,
    synth_type: SynthType,
    cfg: &SynthesisConfig<T>,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Result<(SyntheticSample<T>, SyntheticSample<T>)> {
    let (tp, timg, tmask) = transform_with_retry(instrument, cfg, rng)?;
    let color = cfg.sample_color(rng);
    let trim_spec = cfg.sample_trim(rng);
    // The two members share geometry, colour and trim; only the blur kind
    // and its independently drawn kernel size differ.
    let fusion_avg = cfg.sample_fusion(rng, BlurKind::Average);
    let fusion_gauss = cfg.sample_fusion(rng, BlurKind::Gaussian);

    let emit = |fusion: FusionParams<T>| -> Result<SyntheticSample<T>> {
        let params = SampledParams {
            transform: tp,
            fusion,
            color,
            trim: trim_spec,
        };
        let (image, mask) = finish_composite(&timg, &tmask, background, &params)?;
        Ok(SyntheticSample {
            image,
            mask,
            provenance: Provenance {
                instrument_id: instrument.id.clone(),
                background_id: background_id.to_string(),
                synth_type,
                seed,
                params: params.record(),
            },
        })
    };

    Ok((emit(fusion_avg)?, emit(fusion_gauss)?))
}

/// Generates a Type-1 sample: the given instrument composited onto a
/// background from the pool.
pub fn generate_type1<T: Scalar>(
    instrument: &LabeledImage<T>,
    background: &BackgroundImage<T>,
    cfg: &SynthesisConfig<T>,
    seed: u64,
) -> Result<SyntheticSample<T>> {
    cfg.validate()?;
    check_nonempty_mask(instrument)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_on(
        instrument,
        &background.image,
        &background.id,
        SynthType::Type1,
        cfg,
        &mut rng,
        seed,
    )
}

/// Generates a Type-2 sample: a donor instrument composited onto the
/// inpainted background of the original image. Newly built backgrounds are
/// appended to the pool.
pub fn generate_type2<T: Scalar>(
    original: &LabeledImage<T>,
    donor: &LabeledImage<T>,
    pool: &mut BackgroundPool<T>,
    cfg: &SynthesisConfig<T>,
    seed: u64,
) -> Result<SyntheticSample<T>> {
    cfg.validate()?;
    check_nonempty_mask(donor)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bg_seed: u64 = rng.random();
    let background = acquire_background(original, pool, cfg, bg_seed)?;
    generate_on(
        donor,
        &background.image,
        &background.id,
        SynthType::Type2,
        cfg,
        &mut rng,
        seed,
    )
}

/// Type-1 multi-blend pair: identical geometry, colour and trim, one member
/// blended with the average kernel and one with the Gaussian kernel. The two
/// masks are bit-identical.
pub fn multi_blend_pair_type1<T: Scalar>(
    instrument: &LabeledImage<T>,
    background: &BackgroundImage<T>,
    cfg: &SynthesisConfig<T>,
    seed: u64,
) -> Result<(SyntheticSample<T>, SyntheticSample<T>)> {
    cfg.validate()?;
    check_nonempty_mask(instrument)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_pair_on(
        instrument,
        &background.image,
        &background.id,
        SynthType::Type1,
        cfg,
        &mut rng,
        seed,
    )
}

/// Type-2 multi-blend pair; see [`multi_blend_pair_type1`].
pub fn multi_blend_pair_type2<T: Scalar>(
    original: &LabeledImage<T>,
    donor: &LabeledImage<T>,
    pool: &mut BackgroundPool<T>,
    cfg: &SynthesisConfig<T>,
    seed: u64,
) -> Result<(SyntheticSample<T>, SyntheticSample<T>)> {
    cfg.validate()?;
    check_nonempty_mask(donor)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bg_seed: u64 = rng.random();
    let background = acquire_background(original, pool, cfg, bg_seed)?;
    generate_pair_on(
        donor,
        &background.image,
        &background.id,
        SynthType::Type2,
        cfg,
        &mut rng,
        seed,
    )
}
