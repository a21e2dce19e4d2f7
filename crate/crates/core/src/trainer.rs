//! Trainer adapter: the seam where model training and committee inference
//! happen outside this crate.
//!
//! The orchestrator writes a training manifest and expects one probability
//! stack per `predict` record in the output directory, named `<id>.pmap`.
//! External mode shells out to a command template; mock mode runs a
//! GPU-free heuristic predictor that makes end-to-end runs testable.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imaging::RasterImage;
use crate::io::manifest::{resolve_manifest_path, TrainingManifest};
use crate::io::png::read_image;
use crate::io::stack::write_stack;
use crate::query::ProbabilityStack;
use crate::seed::derive_seed;

#[derive(Clone, Debug)]
pub enum TrainerAdapter {
    /// Built-in heuristic committee.
    Mock { committee: usize },
    /// External command; `{manifest_path}`, `{output_dir}`, `{seed}` and
    /// `{T}` are substituted before the command runs under `sh -c`.
    External {
        command: String,
        committee: usize,
        timeout: Duration,
    },
}

impl TrainerAdapter {
    pub fn committee(&self) -> usize {
        match self {
            TrainerAdapter::Mock { committee } => *committee,
            TrainerAdapter::External { committee, .. } => *committee,
        }
    }

    /// Trains on the manifest's `train` records and writes one stack per
    /// `predict` record into `output_dir`. External commands get one retry.
    pub fn run(&self, manifest_path: &Path, output_dir: &Path, seed: u64) -> Result<()> {
        std::fs::create_dir_all(output_dir)?;
        match self {
            TrainerAdapter::Mock { committee } => {
                run_mock_inference(manifest_path, output_dir, seed, *committee)?;
                Ok(())
            }
            TrainerAdapter::External {
                command,
                committee,
                timeout,
            } => {
                let rendered = command
                    .replace("{manifest_path}", &manifest_path.display().to_string())
                    .replace("{output_dir}", &output_dir.display().to_string())
                    .replace("{seed}", &seed.to_string())
                    .replace("{T}", &committee.to_string());
                match run_command(&rendered, *timeout) {
                    Ok(()) => Ok(()),
                    Err(first) => run_command(&rendered, *timeout).map_err(|second| {
                        Error::TrainerError(format!(
                            "command failed twice; first: {first}; retry: {second}"
                        ))
                    }),
                }
            }
        }
    }
}

fn run_command(rendered: &str, timeout: Duration) -> std::result::Result<(), String> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(rendered)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("cannot spawn {rendered:?}: {e}"))?;

    // Drain the pipes on threads so a chatty trainer cannot deadlock us.
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let err_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let started = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if started.elapsed() > timeout {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(format!(
                        "timed out after {}s: {rendered:?}",
                        timeout.as_secs()
                    ));
                }
                std::thread::sleep(Duration::from_millis(25));
            }
            Err(e) => return Err(format!("wait failed: {e}")),
        }
    };
    let stderr_tail = String::from_utf8_lossy(&err_reader.join().unwrap_or_default())
        .chars()
        .rev()
        .take(2000)
        .collect::<String>()
        .chars()
        .rev()
        .collect::<String>();
    let _ = out_reader.join();
    if !status.success() {
        return Err(format!(
            "exit status {status}: {rendered:?}; stderr: {stderr_tail}"
        ));
    }
    Ok(())
}

/// Deterministic heuristic committee prediction for one frame.
///
/// The foreground evidence per pixel combines brightness with low
/// saturation (instruments are bright and metallic against reddish tissue),
/// squashed through a logistic into an open-interval probability. Each
/// committee member perturbs the logit with seeded noise; class 0 is
/// background, class 1 instrument, and rows sum to one by construction.
pub fn mock_predict(
    image: &RasterImage<f64>,
    committee: usize,
    seed: u64,
) -> Result<ProbabilityStack<f64>> {
    if committee == 0 {
        return Err(Error::InvalidParameter(
            "committee size must be at least 1".into(),
        ));
    }
    let (width, height) = image.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(committee * 2 * height * width);
    let mut foreground = vec![0.0f64; height * width];
    for _ in 0..committee {
        for y in 0..height {
            for x in 0..width {
                let [r, g, b] = image.pixel(x, y);
                let brightness = (r + g + b) / 3.0;
                let saturation = r.max(g).max(b) - r.min(g).min(b);
                let evidence = 0.5 * brightness + 0.5 * (1.0 - saturation);
                let noise: f64 = rng.random_range(-0.5..0.5);
                let logit = 4.0 * (evidence - 0.5) + noise;
                let p_fg = 1.0 / (1.0 + (-logit).exp());
                foreground[y * width + x] = p_fg;
            }
        }
        // Member-major, class-major layout: background plane then foreground.
        data.extend(foreground.iter().map(|p| 1.0 - p));
        data.extend(foreground.iter().copied());
    }
    ProbabilityStack::new(committee, 2, height, width, data)
}

/// Mock inference over every `predict` record of a training manifest.
/// Returns the number of stacks written. Also the engine behind the
/// `mock-train` CLI subcommand, so external-adapter plumbing can be
/// exercised against it.
pub fn run_mock_inference(
    manifest_path: &Path,
    output_dir: &Path,
    seed: u64,
    committee: usize,
) -> Result<usize> {
    if committee == 0 {
        return Err(Error::InvalidParameter(
            "committee size must be at least 1".into(),
        ));
    }
    let manifest = TrainingManifest::read(manifest_path)?;
    std::fs::create_dir_all(output_dir)?;
    let results: Vec<Result<()>> = manifest
        .predict
        .par_iter()
        .map(|entry| {
            let image = read_image(&resolve_manifest_path(manifest_path, &entry.image))?;
            let stack = mock_predict(
                &image,
                committee,
                derive_seed(seed, &["mock", &entry.id]),
            )?;
            write_stack(&output_dir.join(format!("{}.pmap", entry.id)), &stack)
        })
        .collect();
    for result in results {
        result?;
    }
    Ok(manifest.predict.len())
}
