//! Acquisition scoring over committee probability maps.
//!
//! A committee of `T` stochastic predictors yields per-pixel class
//! probabilities. The entropy map scores overall uncertainty of the mean
//! prediction; the mutual-information map (BALD) keeps only the share of
//! that uncertainty the members disagree about, so pixels where every member
//! is equally unsure score zero.

use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Allowed deviation of per-pixel class sums from one.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-4;

/// `T` committee members × `C` classes of H×W softmax maps, member-major,
/// then class-major, then row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityStack<T> {
    members: usize,
    classes: usize,
    height: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> ProbabilityStack<T> {
    pub fn new(
        members: usize,
        classes: usize,
        height: usize,
        width: usize,
        data: Vec<T>,
    ) -> Result<Self> {
        let expected = members
            .checked_mul(classes)
            .and_then(|n| n.checked_mul(height))
            .and_then(|n| n.checked_mul(width))
            .ok_or_else(|| Error::InvalidStack("stack dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidStack(format!(
                "payload holds {} values, dimensions require {expected}",
                data.len()
            )));
        }
        Ok(Self {
            members,
            classes,
            height,
            width,
            data,
        })
    }

    pub fn from_fn(
        members: usize,
        classes: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(members * classes * height * width);
        for t in 0..members {
            for c in 0..classes {
                for y in 0..height {
                    for x in 0..width {
                        data.push(f(t, c, y, x));
                    }
                }
            }
        }
        Self::new(members, classes, height, width, data)
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, member: usize, class: usize, y: usize, x: usize) -> T {
        self.data[((member * self.classes + class) * self.height + y) * self.width + x]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Checks the stack invariants: at least one member, at least two
    /// classes, probabilities in `[0, 1]` and per-pixel class sums within
    /// [`PROBABILITY_SUM_TOLERANCE`] of one.
    pub fn validate(&self) -> Result<()> {
        if self.members < 1 {
            return Err(Error::InvalidStack("committee must have a member".into()));
        }
        if self.classes < 2 {
            return Err(Error::InvalidStack(format!(
                "need at least two classes, got {}",
                self.classes
            )));
        }
        if self.height == 0 || self.width == 0 {
            return Err(Error::InvalidStack("empty spatial dimensions".into()));
        }
        if !self
            .data
            .iter()
            .all(|&p| p >= T::zero() && p <= T::one())
        {
            return Err(Error::InvalidStack(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        let tol = T::of(PROBABILITY_SUM_TOLERANCE);
        for t in 0..self.members {
            for y in 0..self.height {
                for x in 0..self.width {
                    let mut sum = T::zero();
                    for c in 0..self.classes {
                        sum += self.get(t, c, y, x);
                    }
                    if (sum - T::one()).abs() > tol {
                        return Err(Error::InvalidStack(format!(
                            "member {t} pixel ({x}, {y}) class sum is {sum}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Per-pixel real-valued score map.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMap<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> ScoreMap<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

/// `p ln p` with the `0 ln 0 = 0` convention enforced by an explicit guard.
#[inline]
fn p_log_p<T: Scalar>(p: T) -> T {
    if p > T::zero() {
        p * p.ln()
    } else {
        T::zero()
    }
}

/// Entropy of the committee-mean prediction at every pixel, in nats.
pub fn entropy_map<T: Scalar>(stack: &ProbabilityStack<T>) -> Result<ScoreMap<T>> {
    stack.validate()?;
    let inv_members = T::one() / T::of(stack.members() as f64);
    let mut data = Vec::with_capacity(stack.height() * stack.width());
    for y in 0..stack.height() {
        for x in 0..stack.width() {
            let mut h = T::zero();
            for c in 0..stack.classes() {
                let mut mean = T::zero();
                for t in 0..stack.members() {
                    mean += stack.get(t, c, y, x);
                }
                mean *= inv_members;
                h -= p_log_p(mean);
            }
            data.push(h);
        }
    }
    Ok(ScoreMap {
        width: stack.width(),
        height: stack.height(),
        data,
    })
}

/// Mutual information between prediction and committee at every pixel: the
/// entropy of the mean prediction minus the mean member entropy, clamped at
/// zero to absorb rounding.
///
/// A pixel where every member agrees bit for bit scores exactly zero; the
/// analytic value is used there because the two entropy terms would
/// otherwise differ by rounding residue of either sign.
pub fn bald_map<T: Scalar>(stack: &ProbabilityStack<T>) -> Result<ScoreMap<T>> {
    stack.validate()?;
    let inv_members = T::one() / T::of(stack.members() as f64);
    let mut data = Vec::with_capacity(stack.height() * stack.width());
    for y in 0..stack.height() {
        for x in 0..stack.width() {
            let members_agree = (1..stack.members()).all(|t| {
                (0..stack.classes()).all(|c| stack.get(t, c, y, x) == stack.get(0, c, y, x))
            });
            if members_agree {
                data.push(T::zero());
                continue;
            }
            let mut mean_entropy = T::zero();
            let mut member_term = T::zero();
            for c in 0..stack.classes() {
                let mut mean = T::zero();
                for t in 0..stack.members() {
                    let p = stack.get(t, c, y, x);
                    mean += p;
                    member_term += p_log_p(p);
                }
                mean *= inv_members;
                mean_entropy -= p_log_p(mean);
            }
            let mi = mean_entropy + member_term * inv_members;
            data.push(mi.max(T::zero()));
        }
    }
    Ok(ScoreMap {
        width: stack.width(),
        height: stack.height(),
        data,
    })
}

/// Reduction from a per-pixel map to one image-level score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Aggregator {
    /// Mean pixel score (scale-free across image sizes; the default).
    Mean,
    Sum,
    /// Mean of the top fraction `q` of pixel scores, `0 < q <= 1`.
    TopFraction(f64),
}

pub fn image_score<T: Scalar>(map: &ScoreMap<T>, aggregator: Aggregator) -> Result<T> {
    if map.data.is_empty() {
        return Err(Error::InvalidInput("score map is empty".into()));
    }
    if !map.data.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("score map must be finite".into()));
    }
    let n = map.data.len();
    match aggregator {
        Aggregator::Mean => {
            let sum = map.data.iter().fold(T::zero(), |acc, &v| acc + v);
            Ok(sum / T::of(n as f64))
        }
        Aggregator::Sum => Ok(map.data.iter().fold(T::zero(), |acc, &v| acc + v)),
        Aggregator::TopFraction(q) => {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::InvalidInput(format!(
                    "top fraction must lie in (0, 1], got {q}"
                )));
            }
            let count = ((q * n as f64).ceil() as usize).clamp(1, n);
            let mut sorted = map.data.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
            let sum = sorted[..count].iter().fold(T::zero(), |acc, &v| acc + v);
            Ok(sum / T::of(count as f64))
        }
    }
}

/// Query strategies exposed by the loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Entropy,
    Bald,
    Random,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Entropy => "entropy",
            Strategy::Bald => "bald",
            Strategy::Random => "random",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Strategy::Entropy),
            "bald" => Ok(Strategy::Bald),
            "random" => Ok(Strategy::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy {other:?}, expected entropy, bald or random"
            ))),
        }
    }
}

/// Image-level acquisition score.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageScore<T> {
    pub image_id: String,
    pub score: T,
    pub strategy: Strategy,
}

/// Picks the `n` highest-scoring images. Ties break towards the
/// lexicographically smaller id; the result is ordered by descending score.
pub fn select_query_batch<T: Scalar>(
    scores: &[ImageScore<T>],
    n: usize,
) -> Result<Vec<ImageScore<T>>> {
    if n > scores.len() {
        return Err(Error::InsufficientPool {
            requested: n,
            available: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.score.is_finite()) {
        return Err(Error::InvalidInput("scores must be finite".into()));
    }
    let mut ranked: Vec<ImageScore<T>> = scores.to_vec();
    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.image_id.cmp(&b.image_id))
    });
    ranked.truncate(n);
    Ok(ranked)
}
