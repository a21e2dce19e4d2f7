//! Run configuration file: TOML with one section per concern. Two-element
//! arrays `[lo, hi]` denote ranges sampled uniformly per generated sample.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::atomic::atomic_write;
use crate::query::{Aggregator, Strategy};
use crate::synth::{MultiBlend, SynthesisConfig, TrimRanges};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSection,
    #[serde(default)]
    pub budget: BudgetSection,
    #[serde(default)]
    pub synthesis: SynthesisSection,
    #[serde(default)]
    pub fusion: FusionSection,
    #[serde(default)]
    pub trim: TrimSection,
    #[serde(default)]
    pub query: QuerySection,
    #[serde(default)]
    pub trainer: TrainerSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    /// Dataset root holding `manifest.tsv`, `images/`, `masks/` and
    /// optionally `backgrounds/`.
    pub root: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    /// Fraction of the training set whose annotations may be revealed.
    pub fraction: f64,
    pub al_iterations: usize,
    /// `init` reveals the random half up front; `interleaved` spreads the
    /// random picks across the iterations instead.
    pub random_mode: RandomMode,
}

impl Default for BudgetSection {
    fn default() -> Self {
        Self {
            fraction: 0.1,
            al_iterations: 3,
            random_mode: RandomMode::Init,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomMode {
    Init,
    Interleaved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthesisSection {
    pub type1_per_query: u32,
    pub type2_per_query: u32,
    pub multi_blend: u8,
    pub external_backgrounds: bool,
    pub background_inpainting: bool,
    pub resize_ratio: [f64; 2],
    pub move_w: [f64; 2],
    pub move_h: [f64; 2],
    pub rotation_deg: [f64; 2],
    pub color_alpha: [f64; 2],
    pub brightness_beta: [f64; 2],
}

impl Default for SynthesisSection {
    fn default() -> Self {
        Self {
            type1_per_query: 2,
            type2_per_query: 0,
            multi_blend: 1,
            external_backgrounds: true,
            background_inpainting: false,
            resize_ratio: [0.9, 1.2],
            move_w: [-0.1, 0.1],
            move_h: [-0.1, 0.1],
            rotation_deg: [-30.0, 30.0],
            color_alpha: [0.4, 1.0],
            brightness_beta: [0.9, 1.3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionSection {
    pub dilation_d: usize,
    pub fusion_k: [usize; 2],
}

impl Default for FusionSection {
    fn default() -> Self {
        Self {
            dilation_d: 15,
            fusion_k: [10, 15],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrimSection {
    /// `circle`, `rect` or `none`; the matching range table must be present.
    pub shape: String,
    pub trim_circle: Option<CircleRanges>,
    pub trim_rect: Option<RectRanges>,
    /// Final border blur `(kernel, sigma)`; kernel 1 disables it.
    pub final_blur: (usize, f64),
}

impl Default for TrimSection {
    fn default() -> Self {
        Self {
            shape: "none".into(),
            trim_circle: None,
            trim_rect: None,
            final_blur: (3, 3.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleRanges {
    pub center_x: [usize; 2],
    pub center_y: [usize; 2],
    pub radius: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectRanges {
    pub top: [usize; 2],
    pub bottom: [usize; 2],
    pub left: [usize; 2],
    pub right: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuerySection {
    pub strategy: String,
    /// `mean`, `sum` or `top_fraction`.
    pub aggregator: String,
    pub top_fraction: f64,
}

impl Default for QuerySection {
    fn default() -> Self {
        Self {
            strategy: "bald".into(),
            aggregator: "mean".into(),
            top_fraction: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainerSection {
    /// `mock` for the built-in predictor, `external` to shell out.
    pub mode: String,
    /// Command template for external mode; `{manifest_path}`, `{output_dir}`,
    /// `{seed}` and `{T}` are substituted before execution.
    pub command: Option<String>,
    /// Committee size T.
    pub committee: usize,
    pub timeout_secs: u64,
}

impl Default for TrainerSection {
    fn default() -> Self {
        Self {
            mode: "mock".into(),
            command: None,
            committee: 3,
            timeout_secs: 600,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(raw: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(raw).map_err(|e| Error::ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        Self::from_toml_str(&raw)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::ConfigError(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_toml_string()?.as_bytes())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.budget.fraction > 0.0 && self.budget.fraction <= 1.0) {
            return Err(Error::ConfigError(format!(
                "budget fraction must lie in (0, 1], got {}",
                self.budget.fraction
            )));
        }
        self.synthesis_config()?;
        self.strategy()?;
        self.aggregator()?;
        if self.trainer.mode == "external" && self.trainer.command.is_none() {
            return Err(Error::ConfigError(
                "external trainer mode requires a command".into(),
            ));
        }
        if !matches!(self.trainer.mode.as_str(), "mock" | "external") {
            return Err(Error::ConfigError(format!(
                "trainer mode must be mock or external, got {:?}",
                self.trainer.mode
            )));
        }
        if self.trainer.committee == 0 {
            return Err(Error::ConfigError("committee size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn strategy(&self) -> Result<Strategy> {
        self.query
            .strategy
            .parse()
            .map_err(|e: Error| Error::ConfigError(e.to_string()))
    }

    pub fn aggregator(&self) -> Result<Aggregator> {
        match self.query.aggregator.as_str() {
            "mean" => Ok(Aggregator::Mean),
            "sum" => Ok(Aggregator::Sum),
            "top_fraction" => Ok(Aggregator::TopFraction(self.query.top_fraction)),
            other => Err(Error::ConfigError(format!(
                "unknown aggregator {other:?}, expected mean, sum or top_fraction"
            ))),
        }
    }

    /// Lowers the file sections into the typed synthesis configuration.
    pub fn synthesis_config(&self) -> Result<SynthesisConfig<f64>> {
        let pair = |r: [f64; 2]| (r[0], r[1]);
        let upair = |r: [usize; 2]| (r[0], r[1]);
        let trim = match self.trim.shape.as_str() {
            "circle" => {
                let c = self.trim.trim_circle.as_ref().ok_or_else(|| {
                    Error::ConfigError("trim shape circle requires [trim.trim_circle]".into())
                })?;
                TrimRanges::Circle {
                    center_x: upair(c.center_x),
                    center_y: upair(c.center_y),
                    radius: upair(c.radius),
                }
            }
            "rect" => {
                let r = self.trim.trim_rect.as_ref().ok_or_else(|| {
                    Error::ConfigError("trim shape rect requires [trim.trim_rect]".into())
                })?;
                TrimRanges::Rect {
                    top: upair(r.top),
                    bottom: upair(r.bottom),
                    left: upair(r.left),
                    right: upair(r.right),
                }
            }
            "none" => TrimRanges::None,
            other => {
                return Err(Error::ConfigError(format!(
                    "unknown trim shape {other:?}, expected circle, rect or none"
                )))
            }
        };
        let cfg = SynthesisConfig {
            resize_ratio: pair(self.synthesis.resize_ratio),
            move_w: pair(self.synthesis.move_w),
            move_h: pair(self.synthesis.move_h),
            rotation_deg: pair(self.synthesis.rotation_deg),
            dilation: self.fusion.dilation_d,
            fusion_kernel: upair(self.fusion.fusion_k),
            color_alpha: pair(self.synthesis.color_alpha),
            brightness_beta: pair(self.synthesis.brightness_beta),
            trim,
            final_blur: (self.trim.final_blur.0, self.trim.final_blur.1),
            type1_per_query: self.synthesis.type1_per_query,
            type2_per_query: self.synthesis.type2_per_query,
            multi_blend: MultiBlend::from_count(self.synthesis.multi_blend)
                .map_err(|e| Error::ConfigError(e.to_string()))?,
            use_external_backgrounds: self.synthesis.external_backgrounds,
            use_inpainting: self.synthesis.background_inpainting,
        };
        cfg.validate()
            .map_err(|e| Error::ConfigError(e.to_string()))?;
        Ok(cfg)
    }
}
