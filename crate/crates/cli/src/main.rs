//! `cropforge`: generate crop-row datasets, compose training mixes, run the
//! baseline detector and score predictions.
//!
//! Data (reports, JSON) goes to stdout; progress and diagnostics go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde_json::json;

use cropforge::baseline::{detect_rows, LineSidecar};
use cropforge::config::ToolConfig;
use cropforge::dataset::{
    self, generate_dataset, io, manifest_root, mix, plan_sample, DatasetManifest, MixSpec, MANIFEST_FILE,
};
use cropforge::metrics::{curve_csv, curve_series, evaluate_manifest, score_curve, CurveRun, EvalOptions};
use cropforge::render::{render_frame, write_depth_ppm};
use cropforge::Category;

#[derive(Parser, Debug)]
#[command(name = "cropforge", version, about = "Synthetic crop-row datasets and evaluation")]
struct Cli {
    /// Tool configuration (JSON, `"schema": 1`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "CROPFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(short = 'j', long, global = true)]
    jobs: Option<usize>,
    /// Print a machine-readable summary on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render photo/mask pairs into a dataset directory.
    Generate(GenerateArgs),
    /// Compose a training manifest from a simulated and a real dataset.
    Mix(MixArgs),
    /// Run the ExG + Hough baseline over a dataset.
    Detect(DetectArgs),
    /// Score prediction masks against a ground-truth dataset.
    Eval(EvalArgs),
    /// Performance score against real-data percentage.
    Curve(CurveArgs),
    /// Check a dataset manifest (and the config file, when given).
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Single field-condition category (a..j).
    #[arg(long, conflicts_with = "categories")]
    category: Option<Category>,
    /// Comma-separated categories; images are split evenly between them.
    #[arg(long, value_delimiter = ',')]
    categories: Vec<Category>,
    /// Style preset: `sim` or `real`.
    #[arg(long, default_value = "sim")]
    style: String,
    /// Write the four corner crops of every render.
    #[arg(long)]
    augment: bool,
    /// Also dump camera depth as `depth/<index>.ppm`.
    #[arg(long)]
    depth: bool,
}

#[derive(Args, Debug)]
struct MixArgs {
    #[arg(long)]
    sim: PathBuf,
    #[arg(long)]
    real: PathBuf,
    /// Named composition: A1..A6, B1..B6 or R.
    #[arg(long, conflicts_with_all = ["sim_count", "real_count"])]
    preset: Option<String>,
    #[arg(long)]
    sim_count: Option<usize>,
    #[arg(long)]
    real_count: Option<usize>,
    #[arg(long)]
    model_id: Option<String>,
    /// Manifest file, or a directory to hold `manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DetectArgs {
    /// Dataset directory or manifest file.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Directory holding predicted masks at the dataset's relative paths.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth dataset directory or manifest file.
    #[arg(long)]
    gt: PathBuf,
    /// Attach the per-category scorecard.
    #[arg(long)]
    per_category: bool,
    /// Grey level at or above which a mask pixel counts as positive.
    #[arg(long, default_value_t = 128)]
    threshold: u8,
    #[arg(long)]
    success_threshold: Option<f64>,
    #[arg(long)]
    model_id: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// JSON array of `{model_id, sim_count, real_count, iou}`.
    runs: PathBuf,
    /// CSV output; the JSON series is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Dataset directory or manifest file.
    path: PathBuf,
    /// Also decode every image and check sizes and mask values.
    #[arg(long)]
    deep: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(false)` reports a check that ran but found problems.
fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let config = match &cli.config {
        Some(p) => ToolConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
        None => ToolConfig::default(),
    };
    let out = match &cli.command {
        Command::Generate(a) => generate(&cli, &config, a)?,
        Command::Mix(a) => mix_cmd(&cli, a)?,
        Command::Detect(a) => detect(&config, a)?,
        Command::Eval(a) => eval(&cli, &config, a)?,
        Command::Curve(a) => curve(&config, a)?,
        Command::Validate(a) => return validate(&cli, a),
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    }
    Ok(true)
}

fn generate(cli: &Cli, config: &ToolConfig, a: &GenerateArgs) -> Result<serde_json::Value> {
    let mut opts = config.generate_options(a.count, &a.style, cli.seed)?;
    opts.categories = match a.category {
        Some(c) => vec![c],
        None => a.categories.clone(),
    };
    opts.augment = a.augment;
    info!("rendering {} pairs into {}", a.count, a.out.display());
    let manifest = generate_dataset(&opts, &a.out)?;
    if a.depth {
        let dir = a.out.join("depth");
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        (0..a.count).into_par_iter().try_for_each(|i| -> Result<()> {
            let plan = plan_sample(&opts, i)?;
            let frame = render_frame(&plan.layout, &plan.pose, &opts.intrinsics, &opts.style)?;
            write_depth_ppm(
                &frame.depth,
                opts.intrinsics.width_px,
                opts.intrinsics.height_px,
                &dir.join(format!("{i:06}.ppm")),
            )?;
            Ok(())
        })?;
    }
    info!("wrote {} entries", manifest.entries.len());
    Ok(json!({
        "out": a.out,
        "entries": manifest.entries.len(),
        "seed": cli.seed,
        "style": opts.style.style_id,
    }))
}

fn mix_cmd(cli: &Cli, a: &MixArgs) -> Result<serde_json::Value> {
    let mut spec = match (&a.preset, a.sim_count, a.real_count) {
        (Some(p), _, _) => MixSpec::preset(p, cli.seed)?,
        (None, None, None) => bail!("give --preset or --sim-count/--real-count"),
        (None, s, r) => MixSpec::new("custom", s.unwrap_or(0), r.unwrap_or(0), cli.seed),
    };
    if let Some(id) = &a.model_id {
        spec.model_id = id.clone();
    }
    let out_file = if a.out.extension().is_some_and(|e| e == "json") {
        a.out.clone()
    } else {
        a.out.join(MANIFEST_FILE)
    };
    let out_dir = out_file.parent().map(Path::to_path_buf).unwrap_or_default();
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let load = |p: &Path| -> Result<DatasetManifest> {
        let m = DatasetManifest::load(p).with_context(|| format!("loading {}", p.display()))?;
        Ok(m.rebased(&manifest_root(p), &out_dir)?)
    };
    let mixed = mix(&load(&a.sim)?, &load(&a.real)?, &spec)?;
    mixed.save(&out_file)?;
    info!("{}: {} sim + {} real", spec.model_id, spec.sim_count, spec.real_count);
    Ok(json!({
        "out": out_file,
        "model_id": spec.model_id,
        "sim_count": spec.sim_count,
        "real_count": spec.real_count,
        "relative_pct": dataset::relative_percentage(&spec).ok(),
    }))
}

fn detect(config: &ToolConfig, a: &DetectArgs) -> Result<serde_json::Value> {
    let manifest = DatasetManifest::load(&a.dataset)?;
    let root = manifest_root(&a.dataset);
    let params = config.detector;
    let lines: Vec<usize> = manifest
        .entries
        .par_iter()
        .map(|e| -> Result<usize> {
            let rgb = io::read_rgb(&root.join(&e.image))?;
            let det = detect_rows(&rgb, &params)?;
            let mask_path = a.out.join(&e.mask);
            io::write_png(&det.mask, &mask_path)?;
            let sidecar = LineSidecar {
                width: rgb.width(),
                height: rgb.height(),
                lines: det.lines,
            };
            let n = sidecar.lines.len();
            let side_path = mask_path.with_extension("json");
            std::fs::write(&side_path, serde_json::to_string_pretty(&sidecar)? + "\n")
                .with_context(|| format!("writing {}", side_path.display()))?;
            Ok(n)
        })
        .collect::<Result<_>>()?;
    let run = json!({
        "dataset": a.dataset,
        "images": lines.len(),
        "lines": lines.iter().sum::<usize>(),
        "detector": params,
    });
    std::fs::create_dir_all(&a.out)?;
    std::fs::write(a.out.join("run.json"), serde_json::to_string_pretty(&run)? + "\n")?;
    if lines.contains(&0) {
        warn!("{} images without any detected row", lines.iter().filter(|&&n| n == 0).count());
    }
    Ok(run)
}

fn eval(cli: &Cli, config: &ToolConfig, a: &EvalArgs) -> Result<serde_json::Value> {
    let gt = DatasetManifest::load(&a.gt)?;
    let opts = EvalOptions {
        params: config.score,
        success_threshold: a.success_threshold.unwrap_or(config.success_threshold),
        binarize_threshold: a.threshold,
        per_category: a.per_category,
        model_id: a.model_id.clone().or_else(|| gt.model_id.clone()),
    };
    let report = evaluate_manifest(&gt, &manifest_root(&a.gt), &a.pred, &opts)?;
    if let Some(p) = &a.out {
        std::fs::write(p, report.to_json()?).with_context(|| format!("writing {}", p.display()))?;
    }
    if !cli.json {
        print!("{}", report.to_table());
    }
    Ok(serde_json::to_value(&report)?)
}

fn curve(config: &ToolConfig, a: &CurveArgs) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(&a.runs).with_context(|| format!("reading {}", a.runs.display()))?;
    let runs: Vec<CurveRun> = serde_json::from_str(&text).context("parsing runs")?;
    let points = score_curve(&runs, &config.score)?;
    std::fs::write(&a.out, curve_csv(&points)).with_context(|| format!("writing {}", a.out.display()))?;
    let series = curve_series(&points);
    std::fs::write(a.out.with_extension("json"), serde_json::to_string_pretty(&series)? + "\n")?;
    Ok(series)
}

fn validate(cli: &Cli, a: &ValidateArgs) -> Result<bool> {
    let manifest = DatasetManifest::load(&a.path)?;
    let report = dataset::validate(&manifest, &manifest_root(&a.path), a.deep);
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for f in &report.missing_files {
            println!("missing: {f}");
        }
        for d in &report.duplicate_ids {
            println!("duplicate: {d}");
        }
        for c in &report.content_errors {
            println!("content: {c}");
        }
        println!("{} entries, {}", report.entries, if report.is_ok() { "ok" } else { "INVALID" });
    }
    Ok(report.is_ok())
}
