//! Pixel-level primitives shared by synthesis and inpainting: geometric
//! transform, binary morphology, blur-based fusion masks and frame trimming.
//!
//! All values live in `[0, 1]`. Every operation is a pure function of its
//! inputs; nothing here holds interior mutability.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// H×W×3 raster with intensities in `[0, 1]`, row-major interleaved RGB.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> RasterImage<T> {
    /// All-zero (black) image. Dimensions must be at least 1×1.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![T::zero(); width * height * 3],
        })
    }

    /// Builds an image from a per-pixel closure; values are clamped to `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [T; 3],
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                data.extend(px.iter().map(|v| v.unit()));
            }
        }
        Ok(Self { width, height, data })
    }

    /// Constant-color image.
    pub fn filled(width: usize, height: usize, rgb: [T; 3]) -> Result<Self> {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, channel: usize) -> T {
        self.data[(y * self.width + x) * 3 + channel]
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [T; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Stores a pixel, clamping each channel to `[0, 1]`.
    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [T; 3]) {
        let i = (y * self.width + x) * 3;
        for (c, v) in rgb.iter().enumerate() {
            self.data[i + c] = v.unit();
        }
    }

    /// Raw interleaved channel data.
    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Sum of every stored value across all pixels and channels.
    pub fn total_sum(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    /// Sum of one channel across all pixels.
    pub fn channel_sum(&self, channel: usize) -> T {
        let mut acc = T::zero();
        for y in 0..self.height {
            for x in 0..self.width {
                acc += self.get(x, y, channel);
            }
        }
        acc
    }
}

/// H×W mask with strictly binary values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    /// All-background mask.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![false; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    /// Number of foreground pixels.
    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&v| !v)
    }

    /// Lifts the mask into a soft mask with values exactly 0 or 1.
    pub fn to_soft<T: Scalar>(&self) -> SoftMask<T> {
        SoftMask {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .map(|&v| if v { T::one() } else { T::zero() })
                .collect(),
        }
    }
}

/// H×W real-valued mask in `[0, 1]`; carries fusion weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftMask<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> SoftMask<T> {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![T::zero(); width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).unit());
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v.unit();
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!(
            "dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    Ok(())
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::shape(a, b));
    }
    Ok(())
}

/// Geometric placement of an instrument: resize ratio, shift as a fraction of
/// the frame, and rotation in degrees. Applied in the order
/// resize → translate → rotate, all about the frame centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformParams<T> {
    /// Resize ratio; ratio of the new size to the original.
    pub scale: T,
    /// Horizontal shift as a fraction of the frame width.
    pub shift_x: T,
    /// Vertical shift as a fraction of the frame height.
    pub shift_y: T,
    /// Rotation angle in degrees.
    pub rotate_deg: T,
}

impl<T: Scalar> TransformParams<T> {
    pub fn identity() -> Self {
        Self {
            scale: T::one(),
            shift_x: T::zero(),
            shift_y: T::zero(),
            rotate_deg: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "resize ratio must be positive, got {}",
                self.scale
            )));
        }
        for (name, v) in [
            ("shift_x", self.shift_x),
            ("shift_y", self.shift_y),
            ("rotate_deg", self.rotate_deg),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Row-major 2×3 affine map `p' = M p + t`.
#[derive(Clone, Copy, Debug)]
struct Affine<T> {
    a: T,
    b: T,
    c: T,
    d: T,
    e: T,
    f: T,
}

impl<T: Scalar> Affine<T> {
    fn scale_about(cx: T, cy: T, s: T) -> Self {
        Self {
            a: s,
            b: T::zero(),
            c: cx - s * cx,
            d: T::zero(),
            e: s,
            f: cy - s * cy,
        }
    }

    fn translate(dx: T, dy: T) -> Self {
        Self {
            a: T::one(),
            b: T::zero(),
            c: dx,
            d: T::zero(),
            e: T::one(),
            f: dy,
        }
    }

    fn rotate_about(cx: T, cy: T, deg: T) -> Self {
        let rad = deg.to_radians();
        let (sin, cos) = rad.sin_cos();
        Self {
            a: cos,
            b: -sin,
            c: cx - cos * cx + sin * cy,
            d: sin,
            e: cos,
            f: cy - sin * cx - cos * cy,
        }
    }

    /// `self ∘ other`: applies `other` first.
    fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.d,
            b: self.a * other.b + self.b * other.e,
            c: self.a * other.c + self.b * other.f + self.c,
            d: self.d * other.a + self.e * other.d,
            e: self.d * other.b + self.e * other.e,
            f: self.d * other.c + self.e * other.f + self.f,
        }
    }

    fn inverse(&self) -> Self {
        let det = self.a * self.e - self.b * self.d;
        let ia = self.e / det;
        let ib = -self.b / det;
        let id = -self.d / det;
        let ie = self.a / det;
        Self {
            a: ia,
            b: ib,
            c: -(ia * self.c + ib * self.f),
            d: id,
            e: ie,
            f: -(id * self.c + ie * self.f),
        }
    }

    #[inline]
    fn apply(&self, x: T, y: T) -> (T, T) {
        (
            self.a * x + self.b * y + self.c,
            self.d * x + self.e * y + self.f,
        )
    }
}

/// Bilinear sample with out-of-frame pixels contributing zero.
#[inline]
fn sample_bilinear_zero<T: Scalar, F: Fn(usize, usize) -> T>(
    width: usize,
    height: usize,
    sx: T,
    sy: T,
    fetch: F,
) -> T {
    let x0f = sx.floor();
    let y0f = sy.floor();
    let fx = sx - x0f;
    let fy = sy - y0f;
    let x0 = x0f.to_isize().unwrap_or(isize::MIN);
    let y0 = y0f.to_isize().unwrap_or(isize::MIN);

    let at = |x: isize, y: isize| -> T {
        if x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height {
            fetch(x as usize, y as usize)
        } else {
            T::zero()
        }
    };

    let one = T::one();
    (one - fx) * (one - fy) * at(x0, y0)
        + fx * (one - fy) * at(x0 + 1, y0)
        + (one - fx) * fy * at(x0, y0 + 1)
        + fx * fy * at(x0 + 1, y0 + 1)
}

/// Applies resize → translate → rotate to an image and its mask, keeping the
/// original canvas size. Pixels mapped from outside the source are zero.
/// Images are sampled bilinearly; the mask is re-binarised at 0.5 after
/// interpolation so both follow the same geometric map.
pub fn transform<T: Scalar>(
    image: &RasterImage<T>,
    mask: &BinaryMask,
    params: &TransformParams<T>,
) -> Result<(RasterImage<T>, BinaryMask)> {
    params.validate()?;
    ensure_same_dims(image.dims(), mask.dims())?;

    let (width, height) = image.dims();
    let cx = T::of((width - 1) as f64) / T::of(2.0);
    let cy = T::of((height - 1) as f64) / T::of(2.0);
    let dx = params.shift_x * T::of(width as f64);
    let dy = params.shift_y * T::of(height as f64);

    let forward = Affine::rotate_about(cx, cy, params.rotate_deg)
        .compose(&Affine::translate(dx, dy))
        .compose(&Affine::scale_about(cx, cy, params.scale));
    let inverse = forward.inverse();

    let out_image = RasterImage::from_fn(width, height, |x, y| {
        let (sx, sy) = inverse.apply(T::of(x as f64), T::of(y as f64));
        [
            sample_bilinear_zero(width, height, sx, sy, |px, py| image.get(px, py, 0)),
            sample_bilinear_zero(width, height, sx, sy, |px, py| image.get(px, py, 1)),
            sample_bilinear_zero(width, height, sx, sy, |px, py| image.get(px, py, 2)),
        ]
    })?;

    let half = T::of(0.5);
    let out_mask = BinaryMask::from_fn(width, height, |x, y| {
        let (sx, sy) = inverse.apply(T::of(x as f64), T::of(y as f64));
        let v = sample_bilinear_zero(width, height, sx, sy, |px, py| {
            if mask.get(px, py) {
                T::one()
            } else {
                T::zero()
            }
        });
        v >= half
    })?;

    Ok((out_image, out_mask))
}

fn check_odd_kernel(name: &str, k: usize) -> Result<usize> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be odd and positive, got {k}"
        )));
    }
    Ok((k - 1) / 2)
}

/// Binary dilation with a d×d structuring element centred at the origin:
/// the union of all translates of the mask by offsets inside the element.
pub fn dilate(mask: &BinaryMask, d: usize) -> Result<BinaryMask> {
    let radius = check_odd_kernel("dilation kernel size", d)?;
    Ok(box_morph(mask, radius, true))
}

/// Binary erosion with a d×d structuring element; pixels outside the frame
/// count as background, so foreground touching the border shrinks.
pub fn erode(mask: &BinaryMask, d: usize) -> Result<BinaryMask> {
    let radius = check_odd_kernel("erosion kernel size", d)?;
    Ok(box_morph(mask, radius, false))
}

/// Separable square-window morphology. `or_mode` selects dilation (window
/// OR) versus erosion (window AND with out-of-frame treated as background).
fn box_morph(mask: &BinaryMask, radius: usize, or_mode: bool) -> BinaryMask {
    let (width, height) = mask.dims();
    let r = radius as isize;

    let window = |lo: isize, hi: isize, len: usize, probe: &dyn Fn(usize) -> bool| -> bool {
        if or_mode {
            (lo..=hi).any(|i| i >= 0 && (i as usize) < len && probe(i as usize))
        } else {
            (lo..=hi).all(|i| i >= 0 && (i as usize) < len && probe(i as usize))
        }
    };

    let mut horizontal = vec![false; width * height];
    for y in 0..height {
        for x in 0..width {
            let xi = x as isize;
            horizontal[y * width + x] =
                window(xi - r, xi + r, width, &|i: usize| mask.get(i, y));
        }
    }

    let mut out = BinaryMask {
        width,
        height,
        data: vec![false; width * height],
    };
    for y in 0..height {
        let yi = y as isize;
        for x in 0..width {
            let v = window(yi - r, yi + r, height, &|i: usize| horizontal[i * width + x]);
            out.set(x, y, v);
        }
    }
    out
}

/// Blur flavour used to build fusion masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlurKind {
    Average,
    Gaussian,
}

impl BlurKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BlurKind::Average => "average",
            BlurKind::Gaussian => "gaussian",
        }
    }
}

/// Parameters of the dilation + blur that turn a binary instrument mask into
/// a soft fusion mask.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionParams<T> {
    /// Dilation kernel size in pixels (odd).
    pub dilation: usize,
    pub blur: BlurKind,
    /// Blur kernel size in pixels; even sizes are bumped to the next odd.
    pub kernel: usize,
    /// Gaussian standard deviation; defaults to `kernel / 3` when absent.
    pub sigma: Option<T>,
}

impl<T: Scalar> FusionParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.dilation == 0 {
            return Err(Error::InvalidParameter(
                "dilation kernel size must be at least 1".into(),
            ));
        }
        if self.kernel == 0 {
            return Err(Error::InvalidParameter(
                "blur kernel size must be at least 1".into(),
            ));
        }
        if let Some(s) = self.sigma {
            if !(s > T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "gaussian sigma must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }

    /// Kernel size actually applied: even sampled sizes become odd.
    pub fn effective_kernel(&self) -> usize {
        if self.kernel.is_multiple_of(2) {
            self.kernel + 1
        } else {
            self.kernel
        }
    }

    pub fn effective_sigma(&self) -> T {
        self.sigma
            .unwrap_or_else(|| T::of(self.effective_kernel() as f64) / T::of(3.0))
    }
}

/// Normalised 1-D blur kernel; the separable 2-D kernel is its outer product,
/// so the 2-D weights also sum to one.
pub fn blur_kernel_weights<T: Scalar>(kind: BlurKind, kernel: usize, sigma: T) -> Result<Vec<T>> {
    let radius = check_odd_kernel("blur kernel size", kernel)?;
    match kind {
        BlurKind::Average => {
            let w = T::one() / T::of(kernel as f64);
            Ok(vec![w; kernel])
        }
        BlurKind::Gaussian => {
            if !(sigma > T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "gaussian sigma must be positive, got {sigma}"
                )));
            }
            let two = T::of(2.0);
            let denom = two * sigma * sigma;
            let mut weights = Vec::with_capacity(kernel);
            let mut sum = T::zero();
            for i in 0..kernel {
                let offset = T::of(i as f64) - T::of(radius as f64);
                let w = (-(offset * offset) / denom).exp();
                weights.push(w);
                sum += w;
            }
            for w in &mut weights {
                *w /= sum;
            }
            Ok(weights)
        }
    }
}

/// Separable convolution over interleaved channel data with replicated
/// border values.
fn convolve_separable<T: Scalar>(
    data: &[T],
    width: usize,
    height: usize,
    channels: usize,
    weights: &[T],
) -> Vec<T> {
    let radius = (weights.len() - 1) / 2;
    let r = radius as isize;

    let mut pass_h = vec![T::zero(); data.len()];
    for y in 0..height {
        for x in 0..width {
            let xi = x as isize;
            for c in 0..channels {
                let mut acc = T::zero();
                for (wi, &w) in weights.iter().enumerate() {
                    let sx = (xi + wi as isize - r).clamp(0, width as isize - 1) as usize;
                    acc += w * data[(y * width + sx) * channels + c];
                }
                pass_h[(y * width + x) * channels + c] = acc;
            }
        }
    }

    let mut out = vec![T::zero(); data.len()];
    for y in 0..height {
        let yi = y as isize;
        for x in 0..width {
            for c in 0..channels {
                let mut acc = T::zero();
                for (wi, &w) in weights.iter().enumerate() {
                    let sy = (yi + wi as isize - r).clamp(0, height as isize - 1) as usize;
                    acc += w * pass_h[(sy * width + x) * channels + c];
                }
                out[(y * width + x) * channels + c] = acc.unit();
            }
        }
    }
    out
}

/// Soft fusion mask: the dilated instrument mask blurred with the configured
/// kernel. Values are 1 where the whole blur window sits inside the dilated
/// mask, 0 where the window misses it entirely, and in between across the
/// transition band.
pub fn fusion_mask<T: Scalar>(dilated: &BinaryMask, params: &FusionParams<T>) -> Result<SoftMask<T>> {
    params.validate()?;
    let kernel = params.effective_kernel();
    let weights = blur_kernel_weights(params.blur, kernel, params.effective_sigma())?;
    let soft: SoftMask<T> = dilated.to_soft();
    let data = convolve_separable(soft.data(), soft.width(), soft.height(), 1, &weights);
    Ok(SoftMask {
        width: soft.width(),
        height: soft.height(),
        data,
    })
}

/// Gaussian blur of an RGB image with replicated borders. A kernel size of 1
/// is the identity.
pub fn gaussian_blur_image<T: Scalar>(
    image: &RasterImage<T>,
    kernel: usize,
    sigma: T,
) -> Result<RasterImage<T>> {
    let k = if kernel.is_multiple_of(2) { kernel + 1 } else { kernel };
    if k == 1 {
        return Ok(image.clone());
    }
    let weights = blur_kernel_weights(BlurKind::Gaussian, k, sigma)?;
    let data = convolve_separable(image.data(), image.width(), image.height(), 3, &weights);
    Ok(RasterImage {
        width: image.width(),
        height: image.height(),
        data,
    })
}

/// Region kept by frame trimming.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrimShape<T> {
    /// Keep pixels within `radius` of the centre.
    Circle { center_x: T, center_y: T, radius: T },
    /// Keep pixels inside the four margins.
    Rect {
        top: usize,
        bottom: usize,
        left: usize,
        right: usize,
    },
    /// No trimming.
    None,
}

/// Frame trimming plus the final border blur applied to the image only.
///
/// The blur runs after the outside region has been cleared and the cleared
/// region is zeroed again afterwards, so the black border never bleeds back
/// into the kept frame. The mask is trimmed but never blurred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrimSpec<T> {
    pub shape: TrimShape<T>,
    /// Kernel size of the final Gaussian blur; 1 disables it.
    pub blur_kernel: usize,
    pub blur_sigma: T,
}

impl<T: Scalar> TrimSpec<T> {
    /// Trim spec that leaves the image untouched.
    pub fn none() -> Self {
        Self {
            shape: TrimShape::None,
            blur_kernel: 1,
            blur_sigma: T::one(),
        }
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        match self.shape {
            TrimShape::Circle { radius, .. } => {
                if !(radius > T::zero()) {
                    return Err(Error::InvalidParameter(format!(
                        "trim radius must be positive, got {radius}"
                    )));
                }
            }
            TrimShape::Rect {
                top,
                bottom,
                left,
                right,
            } => {
                if left + right >= width || top + bottom >= height {
                    return Err(Error::InvalidParameter(format!(
                        "trim margins ({top}, {bottom}, {left}, {right}) leave no interior in a {width}x{height} frame"
                    )));
                }
            }
            TrimShape::None => {}
        }
        if self.blur_kernel == 0 {
            return Err(Error::InvalidParameter(
                "final blur kernel size must be at least 1".into(),
            ));
        }
        if self.blur_kernel > 1 && !(self.blur_sigma > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "final blur sigma must be positive, got {}",
                self.blur_sigma
            )));
        }
        Ok(())
    }

    /// Whether the pixel survives trimming.
    #[inline]
    pub fn keeps(&self, x: usize, y: usize, width: usize, height: usize) -> bool {
        match self.shape {
            TrimShape::Circle {
                center_x,
                center_y,
                radius,
            } => {
                let dx = T::of(x as f64) - center_x;
                let dy = T::of(y as f64) - center_y;
                dx * dx + dy * dy <= radius * radius
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
}

/// Clears everything outside the trim region in both image and mask, then
/// applies the final Gaussian blur to the image alone.
pub fn trim<T: Scalar>(
    image: &RasterImage<T>,
    mask: &BinaryMask,
    spec: &TrimSpec<T>,
) -> Result<(RasterImage<T>, BinaryMask)> {
    ensure_same_dims(image.dims(), mask.dims())?;
    let (width, height) = image.dims();
    spec.validate(width, height)?;

    let mut trimmed = image.clone();
    let mut out_mask = mask.clone();
    for y in 0..height {
        for x in 0..width {
            if !spec.keeps(x, y, width, height) {
                trimmed.set_pixel(x, y, [T::zero(); 3]);
                out_mask.set(x, y, false);
            }
        }
    }

    let mut out_image = if spec.blur_kernel > 1 {
        gaussian_blur_image(&trimmed, spec.blur_kernel, spec.blur_sigma)?
    } else {
        trimmed
    };
    if spec.blur_kernel > 1 {
        for y in 0..height {
            for x in 0..width {
                if !spec.keeps(x, y, width, height) {
                    out_image.set_pixel(x, y, [T::zero(); 3]);
                }
            }
        }
    }

    Ok((out_image, out_mask))
}
