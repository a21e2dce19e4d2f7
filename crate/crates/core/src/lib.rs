//! Active generation of synthetic segmentation training images.
//!
//! The crate covers the full pool-based loop around an external segmentation
//! trainer: copy-paste compositing of instruments onto backgrounds with
//! boundary fusion ([`synth`]), instrument-free background synthesis by
//! self- or external inpainting ([`inpaint`]), mutual-information and
//! entropy acquisition over committee probability maps ([`query`]),
//! boundary-aware evaluation ([`metrics`]), and the orchestrated
//! train-query-reveal-synthesise loop ([`orchestrator`]). File formats and
//! the trainer contract live in [`io`].
//!
//! Pixel and scoring math is generic over the floating-point [`Scalar`];
//! the aliases below pin the `f64` instantiation the CLI and orchestrator
//! use, with `f32` variants where memory matters more than precision.

// Negated comparisons like `!(x > 0)` are load-bearing: they reject NaN
// parameters that `x <= 0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod imaging;
pub mod inpaint;
pub mod io;
pub mod metrics;
pub mod orchestrator;
pub mod pool;
pub mod query;
mod scalar;
pub mod seed;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Raster64 = imaging::RasterImage<f64>;
pub type Raster32 = imaging::RasterImage<f32>;
pub type Soft64 = imaging::SoftMask<f64>;
pub type Soft32 = imaging::SoftMask<f32>;
pub type Stack64 = query::ProbabilityStack<f64>;
pub type Stack32 = query::ProbabilityStack<f32>;
pub type Labeled64 = synth::LabeledImage<f64>;
pub type Background64 = inpaint::BackgroundImage<f64>;
pub type SynthesisConfig64 = synth::SynthesisConfig<f64>;
