//! `synthal` command line: synthetic-sample generation, background
//! inpainting, acquisition queries, segmentation metrics, the full
//! active-learning loop, the mock trainer and dataset validation.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use synthal_core::error::{Error, Result};
use synthal_core::inpaint::acquire_background;
use synthal_core::io::atomic_write;
use synthal_core::io::config::RunConfig;
use synthal_core::io::dataset::{lint_dataset, load_dataset};
use synthal_core::io::png::{read_image, read_mask};
use synthal_core::io::stack::read_stack;
use synthal_core::metrics::evaluate_set;
use synthal_core::orchestrator::{export_backgrounds, run_loop, synthesize_batch};
use synthal_core::pool::PoolState;
use synthal_core::query::{
    bald_map, entropy_map, image_score, select_query_batch, Aggregator, ImageScore, Strategy,
};
use synthal_core::seed::{derive_rng, derive_seed, resolve_master_seed};
use synthal_core::synth::LabeledImage;
use synthal_core::trainer::run_mock_inference;

use rand::Rng;

#[derive(Parser)]
#[command(
    name = "synthal",
    version,
    about = "Active generation of synthetic segmentation training data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic image/mask pairs for the labeled images of a dataset
    Synth(SynthArgs),
    /// Build a background pool by inpainting labeled images
    Inpaint(InpaintArgs),
    /// Score probability stacks and emit the top-n query list
    Query(QueryArgs),
    /// Evaluate prediction masks against ground truth
    Metrics(MetricsArgs),
    /// Run the full active-learning loop
    #[command(name = "loop")]
    Loop(LoopArgs),
    /// Trainer-adapter-compatible mock predictor
    MockTrain(MockTrainArgs),
    /// Validate a dataset tree and report every violation
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Run configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Master seed; falls back to SYNTHAL_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Generate only for the first N labeled images
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct InpaintArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the background pool
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Inpaint only the first N labeled images
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Entropy,
    Bald,
    Random,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Entropy => Strategy::Entropy,
            StrategyArg::Bald => Strategy::Bald,
            StrategyArg::Random => Strategy::Random,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AggregatorArg {
    Mean,
    Sum,
    TopFraction,
}

#[derive(Args)]
struct QueryArgs {
    /// Directory of .pmap probability stacks, one per image id
    #[arg(long)]
    stacks: PathBuf,
    /// How many images to query
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Bald)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = AggregatorArg::Mean)]
    aggregator: AggregatorArg,
    /// Fraction for the top-fraction aggregator
    #[arg(long, default_value_t = 0.1)]
    top_fraction: f64,
    /// Query list output file (id <TAB> score per line)
    #[arg(long, default_value = "query_list.tsv")]
    out: PathBuf,
    /// Seed for the random strategy
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Directory of prediction masks
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth masks
    #[arg(long)]
    gt: PathBuf,
    /// Near-boundary band width in pixels (even)
    #[arg(long, default_value_t = 20)]
    band: usize,
    /// Report file with per-image rows and the means
    #[arg(long, default_value = "metrics_report.tsv")]
    out: PathBuf,
}

#[derive(Args)]
struct LoopArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the configured budget fraction
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory for all artifacts
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MockTrainArgs {
    /// Training manifest written by the orchestrator
    #[arg(long)]
    manifest: PathBuf,
    /// Where the probability stacks go
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Committee size T
    #[arg(long, default_value_t = 3)]
    committee: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// Dataset root
    #[arg(long)]
    dataset: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Inpaint(args) => cmd_inpaint(args),
        Command::Query(args) => cmd_query(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Loop(args) => cmd_loop(args),
        Command::MockTrain(args) => cmd_mock_train(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

/// Loads a config and resolves a relative dataset root against the config
/// file's directory.
fn load_config(path: &Path) -> Result<RunConfig> {
    let mut config = RunConfig::load(path)?;
    let root = PathBuf::from(&config.dataset.root);
    if root.is_relative() {
        if let Some(dir) = path.parent() {
            config.dataset.root = dir.join(root).display().to_string();
        }
    }
    Ok(config)
}

fn labeled_pool_for_batch(
    config: &RunConfig,
    limit: Option<usize>,
) -> Result<(PoolState, Vec<String>)> {
    let layout = load_dataset(Path::new(&config.dataset.root))?;
    let cfg = config.synthesis_config()?;
    let mut pool = PoolState::from_layout(&layout, cfg.use_external_backgrounds)?;
    let mut ids = pool.unlabeled_ids();
    if let Some(limit) = limit {
        ids.truncate(limit);
    }
    for id in &ids {
        pool.reveal(id)?;
    }
    Ok((pool, ids))
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode> {
    let seed = resolve_master_seed(args.seed)?;
    let config = load_config(&args.config)?;
    let cfg = config.synthesis_config()?;
    let (mut pool, ids) = labeled_pool_for_batch(&config, args.limit)?;
    let report = synthesize_batch(&mut pool, &ids, &cfg, seed, &args.out)?;
    println!(
        "generated {} synthetic samples from {} labeled images ({} skipped)",
        report.synthetic_added.len(),
        ids.len(),
        report.skipped.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_inpaint(args: InpaintArgs) -> Result<ExitCode> {
    let seed = resolve_master_seed(args.seed)?;
    let mut config = load_config(&args.config)?;
    // This subcommand exists to build inpainted pools.
    config.synthesis.background_inpainting = true;
    let cfg = config.synthesis_config()?;
    let (mut pool, ids) = labeled_pool_for_batch(&config, args.limit)?;
    let mut inpainted = 0usize;
    let mut rejected = 0usize;
    for id in &ids {
        let entry = pool.labeled_entry(id).expect("just revealed");
        let sample = LabeledImage::new(
            id.clone(),
            read_image(&entry.image_path)?,
            read_mask(&entry.mask_path)?,
        )?;
        match acquire_background(
            &sample,
            pool.backgrounds_mut(),
            &cfg,
            derive_seed(seed, &["inpaint", id]),
        ) {
            Ok(_) => inpainted += 1,
            Err(Error::NoBackgroundAvailable) => rejected += 1,
            Err(other) => return Err(other),
        }
    }
    let total = export_backgrounds(pool.backgrounds(), &args.out)?;
    println!(
        "background pool holds {total} entries ({inpainted} inpainted, {rejected} unusable images)"
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_query(args: QueryArgs) -> Result<ExitCode> {
    let aggregator = match args.aggregator {
        AggregatorArg::Mean => Aggregator::Mean,
        AggregatorArg::Sum => Aggregator::Sum,
        AggregatorArg::TopFraction => Aggregator::TopFraction(args.top_fraction),
    };
    let strategy: Strategy = args.strategy.into();

    let mut stack_paths: Vec<(String, PathBuf)> = std::fs::read_dir(&args.stacks)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|ext| ext.eq_ignore_ascii_case("pmap"))
                .unwrap_or(false)
        })
        .filter_map(|p| {
            p.file_stem()
                .map(|s| (s.to_string_lossy().into_owned(), p.clone()))
        })
        .collect();
    stack_paths.sort();

    let scores: Vec<ImageScore<f64>> = match strategy {
        Strategy::Random => {
            let seed = resolve_master_seed(args.seed)?;
            let mut rng = derive_rng(seed, &["query-random"]);
            stack_paths
                .iter()
                .map(|(id, _)| ImageScore {
                    image_id: id.clone(),
                    score: rng.random::<f64>(),
                    strategy,
                })
                .collect()
        }
        _ => {
            let mut scores = Vec::with_capacity(stack_paths.len());
            for (id, path) in &stack_paths {
                let stack = read_stack(path)?;
                let map = match strategy {
                    Strategy::Bald => bald_map(&stack)?,
                    Strategy::Entropy => entropy_map(&stack)?,
                    Strategy::Random => unreachable!(),
                };
                scores.push(ImageScore {
                    image_id: id.clone(),
                    score: image_score(&map, aggregator)?,
                    strategy,
                });
            }
            scores
        }
    };

    let selected = select_query_batch(&scores, args.n)?;
    let mut out = String::new();
    for s in &selected {
        let line = format!("{}\t{:.12}", s.image_id, s.score);
        println!("{line}");
        out.push_str(&line);
        out.push('\n');
    }
    atomic_write(&args.out, out.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn list_mask_ids(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut items: Vec<(String, PathBuf)> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|ext| ext.eq_ignore_ascii_case("png"))
                .unwrap_or(false)
        })
        .filter_map(|p| {
            p.file_stem()
                .map(|s| (s.to_string_lossy().into_owned(), p.clone()))
        })
        .collect();
    items.sort();
    Ok(items)
}

fn cmd_metrics(args: MetricsArgs) -> Result<ExitCode> {
    let gt = list_mask_ids(&args.gt)?;
    if gt.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no ground-truth masks in {}",
            args.gt.display()
        )));
    }
    let mut items = Vec::with_capacity(gt.len());
    for (id, gt_path) in gt {
        let pred_path = args.pred.join(format!("{id}.png"));
        if !pred_path.is_file() {
            return Err(Error::InvalidInput(format!(
                "missing prediction for {id:?} at {}",
                pred_path.display()
            )));
        }
        items.push((id, read_mask(&pred_path)?, read_mask(&gt_path)?));
    }
    let result = evaluate_set::<f64>(items, args.band)?;

    let mut report = String::from("id\tdsc\tiou\tiou_nb\n");
    for (id, eval) in &result.per_image {
        report.push_str(&format!(
            "{id}\t{:.6}\t{:.6}\t{:.6}\n",
            eval.dsc, eval.iou, eval.iou_nb
        ));
    }
    report.push_str(&format!(
        "MEAN\t{:.6}\t{:.6}\t{:.6}\n",
        result.mean_dsc, result.mean_iou, result.mean_iou_nb
    ));
    atomic_write(&args.out, report.as_bytes())?;

    println!(
        "mDSC={:.6} mIoU={:.6} mIoU_NB={:.6}",
        result.mean_dsc, result.mean_iou, result.mean_iou_nb
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_loop(args: LoopArgs) -> Result<ExitCode> {
    let seed = resolve_master_seed(args.seed)?;
    let mut config = load_config(&args.config)?;
    if let Some(budget) = args.budget {
        config.budget.fraction = budget;
    }
    config.validate()?;
    let summary = run_loop(&config, &args.out, seed)?;
    for report in &summary.iterations {
        println!(
            "iteration {:02} [{}]: +{} labeled ({} total), +{} synthetic, {} skipped",
            report.iteration,
            report.strategy,
            report.selected.len(),
            report.labeled_total,
            report.synthetic_added.len(),
            report.skipped.len()
        );
    }
    println!(
        "done: {} labeled, {} synthetic, {} backgrounds (seed {})",
        summary.labeled_final, summary.synthetic_total, summary.backgrounds_total, summary.seed
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_mock_train(args: MockTrainArgs) -> Result<ExitCode> {
    let seed = resolve_master_seed(args.seed)?;
    let written = run_mock_inference(&args.manifest, &args.output_dir, seed, args.committee)?;
    println!("wrote {written} probability stacks");
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let violations = lint_dataset(&args.dataset);
    if violations.is_empty() {
        let layout = load_dataset(&args.dataset)?;
        println!(
            "ok: {} train, {} test, {} backgrounds",
            layout.train_records().count(),
            layout.test_records().count(),
            layout.backgrounds.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        Err(Error::DatasetError(vec![format!(
            "{} violation(s) found",
            violations.len()
        )]))
    }
}
