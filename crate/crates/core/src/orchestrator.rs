//! The pool-based active-learning loop: train, score, query, reveal labels,
//! inpaint backgrounds, synthesise, and iterate until the budget runs out.
//!
//! Every artifact lands in a run directory with deterministic content:
//! training manifests under `manifests/`, probability stacks under
//! `stacks/`, synthetic pairs and their provenance under `synthetic/`,
//! the background pool under `backgrounds/`, one JSON report per iteration
//! under `reports/`, plus `pool_state.json` and `summary.json`. Two runs
//! with the same dataset, configuration and seed produce byte-identical
//! artifacts.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inpaint::acquire_background;
use crate::io::config::{RandomMode, RunConfig};
use crate::io::manifest::{write_json, PredictEntry, TrainEntry, TrainingManifest};
use crate::io::png::{read_image, read_mask, write_image, write_mask};
use crate::io::stack::read_stack;
use crate::pool::{BudgetSchedule, PoolState, SyntheticRef};
use crate::query::{
    bald_map, entropy_map, image_score, select_query_batch, Aggregator, ImageScore, Strategy,
};
use crate::seed::{derive_rng, derive_seed};
use crate::synth::{
    generate_type1, generate_type2, multi_blend_pair_type1, multi_blend_pair_type2, LabeledImage,
    MultiBlend, SynthesisConfig, SyntheticSample,
};
use crate::trainer::TrainerAdapter;

#[derive(Clone, Debug, Serialize)]
pub struct SelectedImage {
    pub id: String,
    pub score: f64,
    pub strategy: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkipNote {
    pub id: String,
    pub reason: String,
}

/// What one loop step did; iteration 0 is the initial random pass.
#[derive(Clone, Debug, Serialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub strategy: String,
    pub requested: usize,
    pub selected: Vec<SelectedImage>,
    pub labeled_total: usize,
    pub unlabeled_total: usize,
    pub synthetic_added: Vec<String>,
    pub backgrounds_added: usize,
    pub skipped: Vec<SkipNote>,
}

impl IterationReport {
    fn new(iteration: usize, strategy: &str, requested: usize) -> Self {
        Self {
            iteration,
            strategy: strategy.to_string(),
            requested,
            selected: Vec::new(),
            labeled_total: 0,
            unlabeled_total: 0,
            synthetic_added: Vec::new(),
            backgrounds_added: 0,
            skipped: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub schedule: BudgetSchedule,
    pub iterations: Vec<IterationReport>,
    pub labeled_final: usize,
    pub unlabeled_final: usize,
    pub synthetic_total: usize,
    pub backgrounds_total: usize,
}

#[derive(Serialize)]
struct BackgroundNote<'a> {
    id: &'a str,
    origin: &'a crate::inpaint::BackgroundOrigin,
}

#[derive(Serialize)]
struct PoolSnapshot<'a> {
    labeled: Vec<String>,
    unlabeled: Vec<String>,
    synthetic: &'a [SyntheticRef],
    backgrounds: Vec<BackgroundNote<'a>>,
    reveal_log: &'a [String],
}

fn report_path(run_dir: &Path, iteration: usize) -> PathBuf {
    run_dir.join(format!("reports/iteration_{iteration:02}.json"))
}

/// Writes every pool background as `<id>.png` plus a `manifest.json` of ids
/// and origins into `dir`. Files already present are left alone (ids are
/// unique and content deterministic). Returns the number of entries.
pub fn export_backgrounds(
    pool: &crate::inpaint::BackgroundPool<f64>,
    dir: &Path,
) -> Result<usize> {
    let mut notes = Vec::new();
    for bg in pool.iter() {
        let path = dir.join(format!("{}.png", bg.id));
        if !path.exists() {
            write_image(&path, &bg.image)?;
        }
        notes.push(BackgroundNote {
            id: &bg.id,
            origin: &bg.origin,
        });
    }
    write_json(&dir.join("manifest.json"), &notes)?;
    Ok(notes.len())
}

fn write_pool_artifacts(pool: &PoolState, run_dir: &Path) -> Result<()> {
    export_backgrounds(pool.backgrounds(), &run_dir.join("backgrounds"))?;
    write_json(&run_dir.join("synthetic/manifest.json"), &pool.synthetic())?;
    write_json(
        &run_dir.join("pool_state.json"),
        &PoolSnapshot {
            labeled: pool.labeled_ids(),
            unlabeled: pool.unlabeled_ids(),
            synthetic: pool.synthetic(),
            backgrounds: pool
                .backgrounds()
                .iter()
                .map(|bg| BackgroundNote {
                    id: &bg.id,
                    origin: &bg.origin,
                })
                .collect(),
            reveal_log: pool.reveal_log(),
        },
    )
}

fn load_labeled(pool: &PoolState, id: &str) -> Result<LabeledImage<f64>> {
    let entry = pool
        .labeled_entry(id)
        .ok_or_else(|| Error::InvalidInput(format!("{id:?} is not labeled")))?;
    LabeledImage::new(
        id.to_string(),
        read_image(&entry.image_path)?,
        read_mask(&entry.mask_path)?,
    )
}

fn write_sample(
    run_dir: &Path,
    name: &str,
    sample: &SyntheticSample<f64>,
) -> Result<SyntheticRef> {
    let image_path = format!("synthetic/{name}.png");
    let mask_path = format!("synthetic/{name}_mask.png");
    write_image(&run_dir.join(&image_path), &sample.image)?;
    write_mask(&run_dir.join(&mask_path), &sample.mask)?;
    Ok(SyntheticRef {
        id: name.to_string(),
        image_path,
        mask_path,
        provenance: sample.provenance.clone(),
    })
}

/// Inpaints backgrounds from the newly labeled images (when enabled) and
/// generates the configured synthetic samples for each of them. Generation
/// failures are recorded and skipped, never fatal.
fn augment_newly_labeled(
    pool: &mut PoolState,
    ids: &[String],
    cfg: &SynthesisConfig<f64>,
    master_seed: u64,
    run_dir: &Path,
    report: &mut IterationReport,
) -> Result<()> {
    for id in ids {
        let sample = load_labeled(pool, id)?;

        if cfg.use_inpainting {
            let seed = derive_seed(master_seed, &["inpaint", id]);
            match acquire_background(&sample, pool.backgrounds_mut(), cfg, seed) {
                Ok(_) => report.backgrounds_added += 1,
                Err(e) => report.skipped.push(SkipNote {
                    id: id.clone(),
                    reason: format!("inpaint: {e}"),
                }),
            }
        }

        for j in 0..cfg.type1_per_query {
            let js = j.to_string();
            let background = {
                let mut rng = derive_rng(master_seed, &["type1-background", id, &js]);
                pool.backgrounds().choose(&mut rng).cloned()
            };
            let Some(background) = background else {
                report.skipped.push(SkipNote {
                    id: id.clone(),
                    reason: "type1: no background available".into(),
                });
                break;
            };
            let seed = derive_seed(master_seed, &["type1", id, &js]);
            let base = format!("syn_{id}_t1_{j}");
            let generated = match cfg.multi_blend {
                MultiBlend::Single => {
                    generate_type1(&sample, &background, cfg, seed).map(|s| vec![(base.clone(), s)])
                }
                MultiBlend::Pair => {
                    multi_blend_pair_type1(&sample, &background, cfg, seed).map(|(a, g)| {
                        vec![(format!("{base}_avg"), a), (format!("{base}_gauss"), g)]
                    })
                }
            };
            record_generated(pool, run_dir, report, id, "type1", generated)?;
        }

        for j in 0..cfg.type2_per_query {
            let js = j.to_string();
            let donor_id = {
                let mut rng = derive_rng(master_seed, &["type2-donor", id, &js]);
                let labeled = pool.labeled_ids();
                labeled[rng.random_range(0..labeled.len())].clone()
            };
            let donor = load_labeled(pool, &donor_id)?;
            let seed = derive_seed(master_seed, &["type2", id, &js]);
            let base = format!("syn_{id}_t2_{j}");
            let generated = match cfg.multi_blend {
                MultiBlend::Single => {
                    generate_type2(&sample, &donor, pool.backgrounds_mut(), cfg, seed)
                        .map(|s| vec![(base.clone(), s)])
                }
                MultiBlend::Pair => {
                    multi_blend_pair_type2(&sample, &donor, pool.backgrounds_mut(), cfg, seed)
                        .map(|(a, g)| {
                            vec![(format!("{base}_avg"), a), (format!("{base}_gauss"), g)]
                        })
                }
            };
            record_generated(pool, run_dir, report, id, "type2", generated)?;
        }
    }
    Ok(())
}

fn record_generated(
    pool: &mut PoolState,
    run_dir: &Path,
    report: &mut IterationReport,
    source_id: &str,
    kind: &str,
    generated: Result<Vec<(String, SyntheticSample<f64>)>>,
) -> Result<()> {
    match generated {
        Ok(samples) => {
            for (name, sample) in samples {
                let sref = write_sample(run_dir, &name, &sample)?;
                report.synthetic_added.push(sref.id.clone());
                pool.add_synthetic(sref);
            }
        }
        Err(
            e @ (Error::GenerationFailed(_)
            | Error::NoBackgroundAvailable
            | Error::DegenerateInput(_)),
        ) => {
            report.skipped.push(SkipNote {
                id: source_id.to_string(),
                reason: format!("{kind}: {e}"),
            });
        }
        Err(other) => return Err(other),
    }
    Ok(())
}

fn build_training_manifest(pool: &PoolState) -> TrainingManifest {
    let mut manifest = TrainingManifest::default();
    for id in pool.labeled_ids() {
        let entry = pool.labeled_entry(&id).expect("labeled id");
        manifest.train.push(TrainEntry {
            id,
            image: entry.image_path.clone(),
            mask: entry.mask_path.clone(),
        });
    }
    for sref in pool.synthetic() {
        // Synthetic paths are run-relative; the manifest lives one level
        // below the run directory.
        manifest.train.push(TrainEntry {
            id: sref.id.clone(),
            image: Path::new("..").join(&sref.image_path),
            mask: Path::new("..").join(&sref.mask_path),
        });
    }
    for id in pool.unlabeled_ids() {
        let image = pool.unlabeled_image_path(&id).expect("unlabeled id");
        manifest.predict.push(PredictEntry {
            id,
            image: image.to_path_buf(),
        });
    }
    manifest
}

fn score_unlabeled(
    stacks_dir: &Path,
    strategy: Strategy,
    aggregator: Aggregator,
    candidates: &[String],
) -> Result<Vec<ImageScore<f64>>> {
    candidates
        .par_iter()
        .map(|id| {
            let path = stacks_dir.join(format!("{id}.pmap"));
            if !path.is_file() {
                return Err(Error::TrainerError(format!(
                    "adapter produced no stack for {id:?} at {}",
                    path.display()
                )));
            }
            let stack = read_stack(&path)?;
            let map = match strategy {
                Strategy::Bald => bald_map(&stack)?,
                Strategy::Entropy => entropy_map(&stack)?,
                Strategy::Random => unreachable!("random strategy never reads stacks"),
            };
            Ok(ImageScore {
                image_id: id.clone(),
                score: image_score(&map, aggregator)?,
                strategy,
            })
        })
        .collect()
}

/// Uniform scores make top-n selection a uniform draw without replacement.
fn random_scores(master_seed: u64, context: &str, candidates: &[String]) -> Vec<ImageScore<f64>> {
    let mut rng = derive_rng(master_seed, &["random-scores", context]);
    candidates
        .iter()
        .map(|id| ImageScore {
            image_id: id.clone(),
            score: rng.random::<f64>(),
            strategy: Strategy::Random,
        })
        .collect()
}

/// One query iteration: train, score the unlabeled pool, select, reveal,
/// inpaint and synthesise. `random_share` picks that many of the quota
/// uniformly before the strategy fills the rest (interleaved mode).
#[allow(clippy::too_many_arguments)]
pub fn run_iteration(
    pool: &mut PoolState,
    iteration: usize,
    quota: usize,
    random_share: usize,
    adapter: &TrainerAdapter,
    cfg: &SynthesisConfig<f64>,
    strategy: Strategy,
    aggregator: Aggregator,
    run_dir: &Path,
    master_seed: u64,
) -> Result<IterationReport> {
    let mut report = IterationReport::new(iteration, strategy.as_str(), quota);
    let iter_tag = iteration.to_string();

    let manifest = build_training_manifest(pool);
    let manifest_path = run_dir.join(format!("manifests/train_iter_{iteration:02}.tsv"));
    manifest.write(&manifest_path)?;

    let stacks_dir = run_dir.join(format!("stacks/iter_{iteration:02}"));
    adapter.run(
        &manifest_path,
        &stacks_dir,
        derive_seed(master_seed, &["train", &iter_tag]),
    )?;

    let mut candidates = pool.unlabeled_ids();
    let mut picked: Vec<SelectedImage> = Vec::new();

    let uniform_picks = if strategy == Strategy::Random {
        quota
    } else {
        random_share.min(quota)
    };
    if uniform_picks > 0 {
        let scores = random_scores(master_seed, &iter_tag, &candidates);
        for s in select_query_batch(&scores, uniform_picks)? {
            picked.push(SelectedImage {
                id: s.image_id,
                score: s.score,
                strategy: Strategy::Random.as_str().into(),
            });
        }
        let taken: std::collections::BTreeSet<&String> =
            picked.iter().map(|s| &s.id).collect();
        candidates.retain(|id| !taken.contains(id));
    }

    let strategy_quota = quota - uniform_picks;
    if strategy_quota > 0 {
        let scores = score_unlabeled(&stacks_dir, strategy, aggregator, &candidates)?;
        for s in select_query_batch(&scores, strategy_quota)? {
            picked.push(SelectedImage {
                id: s.image_id,
                score: s.score,
                strategy: strategy.as_str().into(),
            });
        }
    }

    for s in &picked {
        pool.reveal(&s.id)?;
    }
    report.selected = picked;

    let mut newly: Vec<String> = report.selected.iter().map(|s| s.id.clone()).collect();
    newly.sort();
    augment_newly_labeled(pool, &newly, cfg, master_seed, run_dir, &mut report)?;

    report.labeled_total = pool.labeled_len();
    report.unlabeled_total = pool.unlabeled_len();
    write_json(&report_path(run_dir, iteration), &report)?;
    write_pool_artifacts(pool, run_dir)?;
    Ok(report)
}

/// One-shot synthesis over already-labeled images, outside the loop. Writes
/// the same `synthetic/` and `backgrounds/` artifacts as a loop run plus a
/// batch report.
pub fn synthesize_batch(
    pool: &mut PoolState,
    ids: &[String],
    cfg: &SynthesisConfig<f64>,
    master_seed: u64,
    out_dir: &Path,
) -> Result<IterationReport> {
    let mut report = IterationReport::new(0, "batch", ids.len());
    let mut ids = ids.to_vec();
    ids.sort();
    augment_newly_labeled(pool, &ids, cfg, master_seed, out_dir, &mut report)?;
    report.labeled_total = pool.labeled_len();
    report.unlabeled_total = pool.unlabeled_len();
    write_json(&out_dir.join("batch_report.json"), &report)?;
    write_pool_artifacts(pool, out_dir)?;
    Ok(report)
}

/// Reveals the initial random picks and runs the first synthesis pass over
/// them. Reported as iteration 0.
fn initial_pass(
    pool: &mut PoolState,
    schedule: &BudgetSchedule,
    cfg: &SynthesisConfig<f64>,
    run_dir: &Path,
    master_seed: u64,
) -> Result<IterationReport> {
    let mut report = IterationReport::new(0, "random_init", schedule.initial_random);
    if schedule.initial_random > 0 {
        let candidates = pool.unlabeled_ids();
        let mut rng = derive_rng(master_seed, &["init-random"]);
        let chosen = rand::seq::index::sample(&mut rng, candidates.len(), schedule.initial_random);
        let mut ids: Vec<String> = chosen.iter().map(|i| candidates[i].clone()).collect();
        ids.sort();
        for id in &ids {
            pool.reveal(id)?;
            report.selected.push(SelectedImage {
                id: id.clone(),
                score: 0.0,
                strategy: "random_init".into(),
            });
        }
        augment_newly_labeled(pool, &ids, cfg, master_seed, run_dir, &mut report)?;
    }
    report.labeled_total = pool.labeled_len();
    report.unlabeled_total = pool.unlabeled_len();
    write_json(&report_path(run_dir, 0), &report)?;
    write_pool_artifacts(pool, run_dir)?;
    Ok(report)
}

/// Builds the schedule for a run configuration and training-set size.
pub fn schedule_for(config: &RunConfig, train_size: usize) -> Result<BudgetSchedule> {
    let schedule = BudgetSchedule::from_fraction(
        config.budget.fraction,
        train_size,
        config.budget.al_iterations,
    )?;
    match config.budget.random_mode {
        RandomMode::Init => Ok(schedule),
        RandomMode::Interleaved => {
            if schedule.is_full_budget() {
                return Ok(schedule);
            }
            // Fold the random half into the iterations; each iteration then
            // takes half of its quota uniformly.
            BudgetSchedule::from_halves_spread(schedule.total, config.budget.al_iterations)
        }
    }
}

/// Runs the whole loop on a validated configuration. The dataset root in
/// `config` must already be resolved relative to the caller's working
/// directory.
pub fn run_loop(config: &RunConfig, run_dir: &Path, master_seed: u64) -> Result<RunSummary> {
    config.validate()?;
    let cfg = config.synthesis_config()?;
    let strategy = config.strategy()?;
    let aggregator = config.aggregator()?;
    let adapter = match config.trainer.mode.as_str() {
        "mock" => TrainerAdapter::Mock {
            committee: config.trainer.committee,
        },
        "external" => TrainerAdapter::External {
            command: config
                .trainer
                .command
                .clone()
                .ok_or_else(|| Error::ConfigError("external trainer needs a command".into()))?,
            committee: config.trainer.committee,
            timeout: std::time::Duration::from_secs(config.trainer.timeout_secs),
        },
        other => {
            return Err(Error::ConfigError(format!(
                "unknown trainer mode {other:?}"
            )))
        }
    };

    // Manifest entries for real frames must stay resolvable from inside the
    // run directory, so the dataset root is made absolute up front.
    let root = std::path::absolute(Path::new(&config.dataset.root))?;
    let layout = crate::io::dataset::load_dataset(&root)?;
    let train_size = layout.train_records().count();
    let schedule = schedule_for(config, train_size)?;

    std::fs::create_dir_all(run_dir)?;
    let mut pool = PoolState::from_layout(&layout, cfg.use_external_backgrounds)?;

    let mut iterations = Vec::with_capacity(schedule.per_iteration.len() + 1);
    iterations.push(initial_pass(
        &mut pool,
        &schedule,
        &cfg,
        run_dir,
        master_seed,
    )?);

    let interleaved = config.budget.random_mode == RandomMode::Interleaved;
    for (idx, &quota) in schedule.per_iteration.iter().enumerate() {
        let random_share = if interleaved { quota / 2 } else { 0 };
        iterations.push(run_iteration(
            &mut pool,
            idx + 1,
            quota,
            random_share,
            &adapter,
            &cfg,
            strategy,
            aggregator,
            run_dir,
            master_seed,
        )?);
    }

    let summary = RunSummary {
        seed: master_seed,
        schedule,
        labeled_final: pool.labeled_len(),
        unlabeled_final: pool.unlabeled_len(),
        synthetic_total: pool.synthetic().len(),
        backgrounds_total: pool.backgrounds().len(),
        iterations,
    };
    write_json(&run_dir.join("summary.json"), &summary)?;
    Ok(summary)
}
