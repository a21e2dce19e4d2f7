//! Segmentation evaluation: Dice, IoU, and IoU restricted to a band
//! straddling the ground-truth boundary.

use crate::error::{Error, Result};
use crate::imaging::{dilate, ensure_same_dims, erode, BinaryMask};
use crate::scalar::Scalar;

fn ratio<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        // Both-empty convention: an empty prediction of an empty truth is
        // perfect, which keeps instrument-free frames from dragging means down.
        T::one()
    } else {
        T::of(num as f64) / T::of(den as f64)
    }
}

fn pair_counts(s: &BinaryMask, g: &BinaryMask) -> Result<(usize, usize, usize)> {
    ensure_same_dims(s.dims(), g.dims())?;
    let mut inter = 0;
    let mut s_count = 0;
    let mut g_count = 0;
    for (&a, &b) in s.data().iter().zip(g.data()) {
        inter += (a && b) as usize;
        s_count += a as usize;
        g_count += b as usize;
    }
    Ok((inter, s_count, g_count))
}

/// Dice similarity coefficient `2|S∩G| / (|S| + |G|)`; both empty gives 1.
pub fn dsc<T: Scalar>(s: &BinaryMask, g: &BinaryMask) -> Result<T> {
    let (inter, s_count, g_count) = pair_counts(s, g)?;
    Ok(ratio(2 * inter, s_count + g_count))
}

/// Intersection over union `|S∩G| / |S∪G|`; both empty gives 1.
pub fn iou<T: Scalar>(s: &BinaryMask, g: &BinaryMask) -> Result<T> {
    let (inter, s_count, g_count) = pair_counts(s, g)?;
    Ok(ratio(inter, s_count + g_count - inter))
}

/// Band of total width `width` straddling the ground-truth boundary, split
/// half inside and half outside: `dilate(G) AND NOT erode(G)` with a
/// `(width + 1)`-sized square element. Width must be even and at least 2.
pub fn boundary_band(g: &BinaryMask, width: usize) -> Result<BinaryMask> {
    if width < 2 || !width.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "band width must be even and at least 2, got {width}"
        )));
    }
    let kernel = width + 1;
    let grown = dilate(g, kernel)?;
    let shrunk = erode(g, kernel)?;
    BinaryMask::from_fn(g.width(), g.height(), |x, y| {
        grown.get(x, y) && !shrunk.get(x, y)
    })
}

/// IoU restricted to the near-boundary band of the ground truth. An empty
/// band (empty ground truth) gives 1.
pub fn iou_nb<T: Scalar>(s: &BinaryMask, g: &BinaryMask, width: usize) -> Result<T> {
    ensure_same_dims(s.dims(), g.dims())?;
    let band = boundary_band(g, width)?;
    let mut num = 0;
    let mut den = 0;
    for ((&a, &b), &inband) in s.data().iter().zip(g.data()).zip(band.data()) {
        if inband {
            num += (a && b) as usize;
            den += (a || b) as usize;
        }
    }
    Ok(ratio(num, den))
}

/// Scores for one prediction/ground-truth pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageEval<T> {
    pub dsc: T,
    pub iou: T,
    pub iou_nb: T,
}

pub fn evaluate_pair<T: Scalar>(
    s: &BinaryMask,
    g: &BinaryMask,
    band_width: usize,
) -> Result<ImageEval<T>> {
    Ok(ImageEval {
        dsc: dsc(s, g)?,
        iou: iou(s, g)?,
        iou_nb: iou_nb(s, g, band_width)?,
    })
}

/// Per-image scores plus unweighted means over the set.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult<T> {
    pub per_image: Vec<(String, ImageEval<T>)>,
    pub mean_dsc: T,
    pub mean_iou: T,
    pub mean_iou_nb: T,
}

/// Evaluates a set of prediction/ground-truth pairs. Means are reduced in
/// ascending image-id order.
pub fn evaluate_set<T: Scalar>(
    items: Vec<(String, BinaryMask, BinaryMask)>,
    band_width: usize,
) -> Result<EvalResult<T>> {
    if items.is_empty() {
        return Err(Error::InvalidInput("no image pairs to evaluate".into()));
    }
    let mut items = items;
    items.sort_by(|a, b| a.0.cmp(&b.0));

    let mut per_image = Vec::with_capacity(items.len());
    let mut sums = [T::zero(); 3];
    for (id, s, g) in items {
        let eval = evaluate_pair::<T>(&s, &g, band_width)?;
        sums[0] += eval.dsc;
        sums[1] += eval.iou;
        sums[2] += eval.iou_nb;
        per_image.push((id, eval));
    }
    let n = T::of(per_image.len() as f64);
    Ok(EvalResult {
        per_image,
        mean_dsc: sums[0] / n,
        mean_iou: sums[1] / n,
        mean_iou_nb: sums[2] / n,
    })
}
