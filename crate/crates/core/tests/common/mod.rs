//! Shared test support: naive scalar reference implementations and seeded
//! input generators.
//!
//! Every oracle re-derives its operation from the stated contract with
//! straight-line scalar code: sequential coordinate maps instead of
//! composed matrices, direct 2-D convolution instead of separable passes,
//! offset double-loops instead of sliding windows, triple loops instead of
//! fused accumulation. They share no computation path with the library.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use synthal_core::imaging::{
    BinaryMask, BlurKind, FusionParams, RasterImage, SoftMask, TransformParams, TrimShape,
    TrimSpec,
};
use synthal_core::inpaint::SelfTransform;
use synthal_core::query::ProbabilityStack;
use synthal_core::synth::{ColorAdjustParams, SampledParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "comparing unequal lengths");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

pub fn random_image(rng: &mut ChaCha8Rng, width: usize, height: usize) -> RasterImage<f64> {
    RasterImage::from_fn(width, height, |_, _| {
        [rng.random(), rng.random(), rng.random()]
    })
    .unwrap()
}

pub fn random_mask(rng: &mut ChaCha8Rng, width: usize, height: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(width, height, |_, _| rng.random::<f64>() < density).unwrap()
}

/// Random mask whose density is itself drawn from `lo..hi`.
pub fn random_mask_varied(
    rng: &mut ChaCha8Rng,
    width: usize,
    height: usize,
    lo: f64,
    hi: f64,
) -> BinaryMask {
    let density = rng.random_range(lo..hi);
    random_mask(rng, width, height, density)
}

/// Random filled rectangle: a connected instrument-like blob.
pub fn random_blob(rng: &mut ChaCha8Rng, width: usize, height: usize) -> BinaryMask {
    let x0 = rng.random_range(0..width.saturating_sub(2).max(1));
    let y0 = rng.random_range(0..height.saturating_sub(2).max(1));
    let x1 = rng.random_range((x0 + 1)..=(width - 1).min(x0 + width / 2 + 1));
    let y1 = rng.random_range((y0 + 1)..=(height - 1).min(y0 + height / 2 + 1));
    BinaryMask::from_fn(width, height, |x, y| {
        (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
    })
    .unwrap()
}

pub fn random_soft(rng: &mut ChaCha8Rng, width: usize, height: usize) -> SoftMask<f64> {
    SoftMask::from_fn(width, height, |_, _| rng.random()).unwrap()
}

/// Random probability stack with rows normalised to one.
pub fn random_stack(
    rng: &mut ChaCha8Rng,
    members: usize,
    classes: usize,
    height: usize,
    width: usize,
) -> ProbabilityStack<f64> {
    let mut raw = vec![0.0f64; members * classes * height * width];
    for v in &mut raw {
        *v = rng.random_range(1e-3..1.0);
    }
    let idx = |t: usize, c: usize, y: usize, x: usize| ((t * classes + c) * height + y) * width + x;
    for t in 0..members {
        for y in 0..height {
            for x in 0..width {
                let total: f64 = (0..classes).map(|c| raw[idx(t, c, y, x)]).sum();
                for c in 0..classes {
                    raw[idx(t, c, y, x)] /= total;
                }
            }
        }
    }
    ProbabilityStack::new(members, classes, height, width, raw).unwrap()
}

pub fn random_transform_params(rng: &mut ChaCha8Rng) -> TransformParams<f64> {
    TransformParams {
        scale: rng.random_range(0.8..1.3),
        shift_x: rng.random_range(-0.15..0.15),
        shift_y: rng.random_range(-0.15..0.15),
        rotate_deg: rng.random_range(-40.0..40.0),
    }
}

pub fn random_fusion_params(rng: &mut ChaCha8Rng) -> FusionParams<f64> {
    let blur = if rng.random_bool(0.5) {
        BlurKind::Average
    } else {
        BlurKind::Gaussian
    };
    FusionParams {
        dilation: 2 * rng.random_range(0..3usize) + 1,
        blur,
        kernel: rng.random_range(1..7usize),
        sigma: None,
    }
}

pub fn random_trim_spec(rng: &mut ChaCha8Rng, width: usize, height: usize) -> TrimSpec<f64> {
    let shape = match rng.random_range(0..3u8) {
        0 => TrimShape::Circle {
            center_x: rng.random_range(0.0..width as f64),
            center_y: rng.random_range(0.0..height as f64),
            radius: rng.random_range(1.0..(width.max(height) as f64)),
        },
        1 => TrimShape::Rect {
            top: rng.random_range(0..height / 3),
            bottom: rng.random_range(0..height / 3),
            left: rng.random_range(0..width / 3),
            right: rng.random_range(0..width / 3),
        },
        _ => TrimShape::None,
    };
    let blur_kernel = [1usize, 3, 5][rng.random_range(0..3usize)];
    TrimSpec {
        shape,
        blur_kernel,
        blur_sigma: rng.random_range(0.5..2.0),
    }
}

pub fn random_color_params(rng: &mut ChaCha8Rng) -> ColorAdjustParams<f64> {
    ColorAdjustParams {
        alpha: rng.random_range(0.0..1.0),
        beta: rng.random_range(0.8..1.4),
    }
}

// ---------------------------------------------------------------------------
// Geometry oracle
// ---------------------------------------------------------------------------

/// Inverse map applied step by step: un-rotate, un-translate, un-scale,
/// each about the frame centre `((W-1)/2, (H-1)/2)`.
fn inverse_map(
    params: &TransformParams<f64>,
    width: usize,
    height: usize,
    x: f64,
    y: f64,
) -> (f64, f64) {
    let cx = (width - 1) as f64 / 2.0;
    let cy = (height - 1) as f64 / 2.0;
    let rad = -params.rotate_deg.to_radians();
    let (sin, cos) = rad.sin_cos();
    let rx = cx + cos * (x - cx) - sin * (y - cy);
    let ry = cy + sin * (x - cx) + cos * (y - cy);
    let tx = rx - params.shift_x * width as f64;
    let ty = ry - params.shift_y * height as f64;
    let sx = cx + (tx - cx) / params.scale;
    let sy = cy + (ty - cy) / params.scale;
    (sx, sy)
}

fn bilinear_zero(fetch: &dyn Fn(isize, isize) -> f64, sx: f64, sy: f64) -> f64 {
    let x0 = sx.floor() as isize;
    let y0 = sy.floor() as isize;
    let fx = sx - sx.floor();
    let fy = sy - sy.floor();
    let mut acc = 0.0;
    for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
        for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
            acc += wx * wy * fetch(x0 + dx, y0 + dy);
        }
    }
    acc
}

pub fn transform_oracle(
    image: &RasterImage<f64>,
    mask: &BinaryMask,
    params: &TransformParams<f64>,
) -> (RasterImage<f64>, BinaryMask) {
    let (width, height) = image.dims();
    let in_frame = |x: isize, y: isize| {
        x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height
    };
    let out_image = RasterImage::from_fn(width, height, |x, y| {
        let (sx, sy) = inverse_map(params, width, height, x as f64, y as f64);
        let mut px = [0.0; 3];
        for (c, v) in px.iter_mut().enumerate() {
            *v = bilinear_zero(
                &|ix, iy| {
                    if in_frame(ix, iy) {
                        image.get(ix as usize, iy as usize, c)
                    } else {
                        0.0
                    }
                },
                sx,
                sy,
            );
        }
        px
    })
    .unwrap();
    let out_mask = BinaryMask::from_fn(width, height, |x, y| {
        let (sx, sy) = inverse_map(params, width, height, x as f64, y as f64);
        bilinear_zero(
            &|ix, iy| {
                if in_frame(ix, iy) && mask.get(ix as usize, iy as usize) {
                    1.0
                } else {
                    0.0
                }
            },
            sx,
            sy,
        ) >= 0.5
    })
    .unwrap();
    (out_image, out_mask)
}

// ---------------------------------------------------------------------------
// Morphology and blur oracles
// ---------------------------------------------------------------------------

pub fn dilate_oracle(mask: &BinaryMask, d: usize) -> BinaryMask {
    let r = (d as isize - 1) / 2;
    let (width, height) = mask.dims();
    BinaryMask::from_fn(width, height, |x, y| {
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = x as isize + dx;
                let sy = y as isize + dy;
                if sx >= 0
                    && sy >= 0
                    && (sx as usize) < width
                    && (sy as usize) < height
                    && mask.get(sx as usize, sy as usize)
                {
                    return true;
                }
            }
        }
        false
    })
    .unwrap()
}

pub fn erode_oracle(mask: &BinaryMask, d: usize) -> BinaryMask {
    let r = (d as isize - 1) / 2;
    let (width, height) = mask.dims();
    BinaryMask::from_fn(width, height, |x, y| {
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = x as isize + dx;
                let sy = y as isize + dy;
                if sx < 0
                    || sy < 0
                    || sx as usize >= width
                    || sy as usize >= height
                    || !mask.get(sx as usize, sy as usize)
                {
                    return false;
                }
            }
        }
        true
    })
    .unwrap()
}

/// Direct 2-D kernel: a box of `1/k²` weights or the normalised 2-D
/// Gaussian. The equivalence with the separable form is what the tests
/// establish.
fn kernel_2d(kind: BlurKind, k: usize, sigma: f64) -> Vec<Vec<f64>> {
    let r = (k as isize - 1) / 2;
    let mut w = vec![vec![0.0; k]; k];
    let mut total = 0.0;
    for (i, row) in w.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let dy = i as isize - r;
            let dx = j as isize - r;
            *v = match kind {
                BlurKind::Average => 1.0,
                BlurKind::Gaussian => {
                    (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp()
                }
            };
            total += *v;
        }
    }
    for row in &mut w {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    w
}

fn convolve_2d_replicate(
    fetch: &dyn Fn(usize, usize) -> f64,
    width: usize,
    height: usize,
    weights: &[Vec<f64>],
) -> Vec<f64> {
    let k = weights.len();
    let r = (k as isize - 1) / 2;
    let mut out = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (i, row) in weights.iter().enumerate() {
                for (j, &w) in row.iter().enumerate() {
                    let sy = (y as isize + i as isize - r).clamp(0, height as isize - 1) as usize;
                    let sx = (x as isize + j as isize - r).clamp(0, width as isize - 1) as usize;
                    acc += w * fetch(sx, sy);
                }
            }
            out[y * width + x] = acc.clamp(0.0, 1.0);
        }
    }
    out
}

pub fn fusion_mask_oracle(dilated: &BinaryMask, params: &FusionParams<f64>) -> SoftMask<f64> {
    let k = params.effective_kernel();
    let weights = kernel_2d(params.blur, k, params.effective_sigma());
    let (width, height) = dilated.dims();
    let data = convolve_2d_replicate(
        &|x, y| if dilated.get(x, y) { 1.0 } else { 0.0 },
        width,
        height,
        &weights,
    );
    SoftMask::from_fn(width, height, |x, y| data[y * width + x]).unwrap()
}

pub fn gaussian_blur_rgb_oracle(image: &RasterImage<f64>, k: usize, sigma: f64) -> RasterImage<f64> {
    let k = if k.is_multiple_of(2) { k + 1 } else { k };
    if k == 1 {
        return image.clone();
    }
    let weights = kernel_2d(BlurKind::Gaussian, k, sigma);
    let (width, height) = image.dims();
    let mut planes = Vec::new();
    for c in 0..3 {
        planes.push(convolve_2d_replicate(
            &|x, y| image.get(x, y, c),
            width,
            height,
            &weights,
        ));
    }
    RasterImage::from_fn(width, height, |x, y| {
        [
            planes[0][y * width + x],
            planes[1][y * width + x],
            planes[2][y * width + x],
        ]
    })
    .unwrap()
}

pub fn trim_keeps(spec: &TrimSpec<f64>, x: usize, y: usize, width: usize, height: usize) -> bool {
    match spec.shape {
        TrimShape::Circle {
            center_x,
            center_y,
            radius,
        } => {
            let dx = x as f64 - center_x;
            let dy = y as f64 - center_y;
            (dx * dx + dy * dy).sqrt() <= radius
        }
        TrimShape::Rect {
            top,
            bottom,
            left,
            right,
        } => x >= left && x < width - right && y >= top && y < height - bottom,
        TrimShape::None => true,
    }
}

pub fn trim_oracle(
    image: &RasterImage<f64>,
    mask: &BinaryMask,
    spec: &TrimSpec<f64>,
) -> (RasterImage<f64>, BinaryMask) {
    let (width, height) = image.dims();
    let zeroed = RasterImage::from_fn(width, height, |x, y| {
        if trim_keeps(spec, x, y, width, height) {
            image.pixel(x, y)
        } else {
            [0.0; 3]
        }
    })
    .unwrap();
    let out_mask = BinaryMask::from_fn(width, height, |x, y| {
        mask.get(x, y) && trim_keeps(spec, x, y, width, height)
    })
    .unwrap();
    let blurred = if spec.blur_kernel > 1 {
        let b = gaussian_blur_rgb_oracle(&zeroed, spec.blur_kernel, spec.blur_sigma);
        RasterImage::from_fn(width, height, |x, y| {
            if trim_keeps(spec, x, y, width, height) {
                b.pixel(x, y)
            } else {
                [0.0; 3]
            }
        })
        .unwrap()
    } else {
        zeroed
    };
    (blurred, out_mask)
}

// ---------------------------------------------------------------------------
// Synthesis oracles
// ---------------------------------------------------------------------------

pub fn color_adjust_oracle(
    instrument: &RasterImage<f64>,
    background: &RasterImage<f64>,
    params: &ColorAdjustParams<f64>,
) -> RasterImage<f64> {
    let (width, height) = instrument.dims();
    let mut instr_total = 0.0;
    let mut bg_total = 0.0;
    let mut instr_chn = [0.0; 3];
    let mut bg_chn = [0.0; 3];
    for y in 0..height {
        for x in 0..width {
            for c in 0..3 {
                instr_total += instrument.get(x, y, c);
                bg_total += background.get(x, y, c);
                instr_chn[c] += instrument.get(x, y, c);
                bg_chn[c] += background.get(x, y, c);
            }
        }
    }
    RasterImage::from_fn(width, height, |x, y| {
        let mut out = [0.0; 3];
        for c in 0..3 {
            let v = instrument.get(x, y, c);
            out[c] = params.beta
                * (bg_total / instr_total)
                * (params.alpha * (bg_chn[c] / instr_chn[c]) * v + (1.0 - params.alpha) * v);
        }
        out
    })
    .unwrap()
}

pub fn blend_oracle(
    instrument: &RasterImage<f64>,
    background: &RasterImage<f64>,
    fusion: &SoftMask<f64>,
) -> RasterImage<f64> {
    let (width, height) = instrument.dims();
    RasterImage::from_fn(width, height, |x, y| {
        let m = fusion.get(x, y);
        let mut out = [0.0; 3];
        for (c, slot) in out.iter_mut().enumerate() {
            let a = instrument.get(x, y, c);
            let b = background.get(x, y, c);
            let v = m * a + (1.0 - m) * b;
            *slot = v.max(a.min(b)).min(a.max(b));
        }
        out
    })
    .unwrap()
}

/// Replays the whole composition pipeline from recorded parameters.
pub fn pipeline_oracle(
    instrument_image: &RasterImage<f64>,
    instrument_mask: &BinaryMask,
    background: &RasterImage<f64>,
    params: &SampledParams<f64>,
) -> (RasterImage<f64>, BinaryMask) {
    let (timg, tmask) = transform_oracle(instrument_image, instrument_mask, &params.transform);
    let dilated = dilate_oracle(&tmask, params.fusion.dilation);
    let fusion = fusion_mask_oracle(&dilated, &params.fusion);
    let adjusted = color_adjust_oracle(&timg, background, &params.color);
    let fused = blend_oracle(&adjusted, background, &fusion);
    trim_oracle(&fused, &tmask, &params.trim)
}

// ---------------------------------------------------------------------------
// Inpainting oracles
// ---------------------------------------------------------------------------

/// Self-transforms rebuilt from flip and transpose compositions.
pub fn self_transform_oracle(soft: &SoftMask<f64>, t: SelfTransform) -> SoftMask<f64> {
    let (width, height) = soft.dims();
    let flip_h = |m: &SoftMask<f64>| {
        SoftMask::from_fn(width, height, |x, y| m.get(width - 1 - x, y)).unwrap()
    };
    let flip_v = |m: &SoftMask<f64>| {
        SoftMask::from_fn(width, height, |x, y| m.get(x, height - 1 - y)).unwrap()
    };
    let transpose = |m: &SoftMask<f64>| {
        // Square frames only, which is what the quarter rotations require.
        SoftMask::from_fn(width, height, |x, y| m.get(y, x)).unwrap()
    };
    match t {
        SelfTransform::FlipH => flip_h(soft),
        SelfTransform::FlipV => flip_v(soft),
        SelfTransform::Rot180 => flip_v(&flip_h(soft)),
        // Clockwise quarter turn: transpose then mirror horizontally.
        SelfTransform::Rot90 => flip_h(&transpose(soft)),
        // Counter-clockwise quarter turn: transpose then mirror vertically.
        SelfTransform::Rot270 => flip_v(&transpose(soft)),
    }
}

pub fn overlap_oracle(fusion: &SoftMask<f64>, transformed: &SoftMask<f64>) -> bool {
    let (width, height) = fusion.dims();
    for y in 0..height {
        for x in 0..width {
            if fusion.get(x, y) > 0.0 && transformed.get(x, y) > 0.0 {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Acquisition oracles
// ---------------------------------------------------------------------------

pub fn entropy_oracle(stack: &ProbabilityStack<f64>) -> Vec<f64> {
    let (members, classes) = (stack.members(), stack.classes());
    let mut out = Vec::with_capacity(stack.height() * stack.width());
    for y in 0..stack.height() {
        for x in 0..stack.width() {
            let mut h = 0.0;
            for c in 0..classes {
                let mut mean = 0.0;
                for t in 0..members {
                    mean += stack.get(t, c, y, x);
                }
                mean /= members as f64;
                if mean > 0.0 {
                    h -= mean * mean.ln();
                }
            }
            out.push(h);
        }
    }
    out
}

pub fn bald_oracle(stack: &ProbabilityStack<f64>) -> Vec<f64> {
    let (members, classes) = (stack.members(), stack.classes());
    let mut out = Vec::with_capacity(stack.height() * stack.width());
    for y in 0..stack.height() {
        for x in 0..stack.width() {
            let mut mean_entropy = 0.0;
            for c in 0..classes {
                let mut mean = 0.0;
                for t in 0..members {
                    mean += stack.get(t, c, y, x);
                }
                mean /= members as f64;
                if mean > 0.0 {
                    mean_entropy -= mean * mean.ln();
                }
            }
            let mut member_entropy_sum = 0.0;
            for t in 0..members {
                for c in 0..classes {
                    let p = stack.get(t, c, y, x);
                    if p > 0.0 {
                        member_entropy_sum += p * p.ln();
                    }
                }
            }
            out.push((mean_entropy + member_entropy_sum / members as f64).max(0.0));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Metric oracles
// ---------------------------------------------------------------------------

pub fn mask_counts(s: &BinaryMask, g: &BinaryMask) -> (usize, usize, usize) {
    let (width, height) = s.dims();
    let mut inter = 0;
    let mut s_count = 0;
    let mut g_count = 0;
    for y in 0..height {
        for x in 0..width {
            let a = s.get(x, y);
            let b = g.get(x, y);
            if a && b {
                inter += 1;
            }
            if a {
                s_count += 1;
            }
            if b {
                g_count += 1;
            }
        }
    }
    (inter, s_count, g_count)
}

pub fn dsc_oracle(s: &BinaryMask, g: &BinaryMask) -> f64 {
    let (inter, sc, gc) = mask_counts(s, g);
    if sc + gc == 0 {
        1.0
    } else {
        2.0 * inter as f64 / (sc + gc) as f64
    }
}

pub fn iou_oracle(s: &BinaryMask, g: &BinaryMask) -> f64 {
    let (inter, sc, gc) = mask_counts(s, g);
    let union = sc + gc - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Band membership via Chebyshev distance to the boundary: within `width/2`
/// of a foreground pixel and within `width/2` of background (out-of-frame
/// counts as background).
pub fn boundary_band_oracle(g: &BinaryMask, band_width: usize) -> BinaryMask {
    let r = (band_width / 2) as isize;
    let (width, height) = g.dims();
    BinaryMask::from_fn(width, height, |x, y| {
        let mut near_fg = false;
        let mut near_bg = false;
        for dy in -r..=r {
            for dx in -r..=r {
                let sx = x as isize + dx;
                let sy = y as isize + dy;
                let inside =
                    sx >= 0 && sy >= 0 && (sx as usize) < width && (sy as usize) < height;
                if inside && g.get(sx as usize, sy as usize) {
                    near_fg = true;
                } else {
                    near_bg = true;
                }
            }
        }
        near_fg && near_bg
    })
    .unwrap()
}

pub fn iou_nb_oracle(s: &BinaryMask, g: &BinaryMask, band_width: usize) -> f64 {
    let band = boundary_band_oracle(g, band_width);
    let (width, height) = s.dims();
    let mut num = 0;
    let mut den = 0;
    for y in 0..height {
        for x in 0..width {
            if band.get(x, y) {
                if s.get(x, y) && g.get(x, y) {
                    num += 1;
                }
                if s.get(x, y) || g.get(x, y) {
                    den += 1;
                }
            }
        }
    }
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

// ---------------------------------------------------------------------------
// Toy dataset and run-directory helpers
// ---------------------------------------------------------------------------

use std::collections::BTreeMap;
use std::path::Path;

use synthal_core::io::atomic_write;
use synthal_core::io::png::{write_image, write_mask};

/// Writes a small synthetic surgical-style dataset: bright low-saturation
/// instrument bars over reddish tissue, binary masks, a few background-only
/// frames and a manifest.
pub fn build_toy_dataset(
    dir: &Path,
    n_train: usize,
    n_test: usize,
    n_backgrounds: usize,
    size: usize,
    seed: u64,
) {
    let mut r = rng(seed);
    let tissue = |r: &mut ChaCha8Rng, size: usize| {
        let base_r = r.random_range(0.45..0.7);
        let base_g = r.random_range(0.15..0.3);
        let base_b = r.random_range(0.1..0.25);
        let phase = r.random_range(0.0..std::f64::consts::TAU);
        RasterImage::from_fn(size, size, |x, y| {
            let ripple = 0.08 * ((x as f64 * 0.7 + y as f64 * 0.4 + phase).sin());
            [
                (base_r + ripple).clamp(0.05, 0.95),
                (base_g + 0.5 * ripple).clamp(0.05, 0.95),
                (base_b - 0.3 * ripple).clamp(0.05, 0.95),
            ]
        })
        .unwrap()
    };

    let mut manifest = String::new();
    for i in 0..(n_train + n_test) {
        let split = if i < n_train { "train" } else { "test" };
        let id = format!("frame_{i:03}");
        let background = tissue(&mut r, size);

        // Instrument: a bright bar, sometimes hugging a border so that
        // self-inpainting succeeds, sometimes central so it fails.
        let bar_w = r.random_range(size / 6..size / 3).max(2);
        let bar_h = r.random_range(size / 4..size / 2).max(2);
        let x0 = r.random_range(0..size - bar_w);
        let y0 = r.random_range(0..size - bar_h);
        let mask = BinaryMask::from_fn(size, size, |x, y| {
            x >= x0 && x < x0 + bar_w && y >= y0 && y < y0 + bar_h
        })
        .unwrap();
        let shade = r.random_range(0.75..0.95);
        let image = RasterImage::from_fn(size, size, |x, y| {
            if mask.get(x, y) {
                [shade, shade, shade - 0.05]
            } else {
                background.pixel(x, y)
            }
        })
        .unwrap();

        write_image(&dir.join(format!("images/{id}.png")), &image).unwrap();
        write_mask(&dir.join(format!("masks/{id}.png")), &mask).unwrap();
        manifest.push_str(&format!("{id}\timages/{id}.png\tmasks/{id}.png\t{split}\n"));
    }
    for b in 0..n_backgrounds {
        let image = tissue(&mut r, size);
        write_image(&dir.join(format!("backgrounds/bg_{b:02}.png")), &image).unwrap();
    }
    atomic_write(&dir.join("manifest.tsv"), manifest.as_bytes()).unwrap();
}

/// Recursive listing of relative path → file bytes.
pub fn dir_snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path.strip_prefix(base).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// Minimal mock-loop configuration against a toy dataset of `size`×`size`
/// frames.
pub fn toy_loop_config(
    dataset_root: &Path,
    fraction: f64,
    iterations: usize,
    size: usize,
) -> String {
    let c = size / 2;
    format!(
        r#"
[dataset]
root = "{root}"

[budget]
fraction = {fraction}
al_iterations = {iterations}

[synthesis]
type1_per_query = 1
type2_per_query = 1
multi_blend = 1
external_backgrounds = true
background_inpainting = true
resize_ratio = [0.9, 1.2]
move_w = [-0.1, 0.1]
move_h = [-0.1, 0.1]
rotation_deg = [-30.0, 30.0]
color_alpha = [0.4, 1.0]
brightness_beta = [0.9, 1.3]

[fusion]
dilation_d = 3
fusion_k = [3, 5]

[trim]
shape = "circle"
trim_circle = {{ center_x = [{cx_lo}, {cx_hi}], center_y = [{cx_lo}, {cx_hi}], radius = [{r_lo}, {r_hi}] }}
final_blur = [3, 1.0]

[query]
strategy = "bald"
aggregator = "mean"

[trainer]
mode = "mock"
committee = 3
"#,
        root = dataset_root.display(),
        fraction = fraction,
        iterations = iterations,
        cx_lo = c - 1,
        cx_hi = c + 1,
        r_lo = c - 2,
        r_hi = c + 2,
    )
}
