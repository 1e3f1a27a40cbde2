//! Batch command-line interface over the denoising library.
//!
//! Four subcommands: `simulate` builds a scene and writes a calibrated
//! noisy observation, `denoise` filters a recorded field, `evaluate`
//! scores an estimate against the clean field, and `benchmark` runs the
//! full Monte-Carlo grid. Outputs are the native field container, CSV
//! tables, and a JSON manifest per command; every CSV row carries the
//! manifest hash that describes how it was produced.
//!
//! Identical argv, inputs, and seed produce identical output bytes. The
//! env var `CDID_THREADS` caps the worker count; errors leave a single
//! machine-readable JSON line on stderr and a nonzero exit code.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use cdid_core::bench::{
    aggregate_rows, boxplot_cells, read_rows_csv, run_benchmark, write_aggregate_csv,
    write_boxplot_csv, write_rows_csv, BenchPlan, BenchRow, DEFAULT_SIGMA_LIST, NOISY_BASELINE,
};
use cdid_core::error::{CdidError, Result};
use cdid_core::io::cfd;
use cdid_core::io::pgm::load_gray_image;
use cdid_core::metrics::{
    psnr_ampl, psnr_phi, rmse, rmse_abs_phase, snr_abs_phase, snr_c, MetricKind, MetricReport,
};
use cdid_core::noise::{make_noisy, NoiseSpec};
use cdid_core::phase::unwrap_field;
use cdid_core::pipeline::{run_named_algorithm, ALGORITHM_NAMES};
use cdid_core::scene::{build_scene, scene_by_name, SceneKind, TestScene};
use cdid_core::stats::boxplot_deltas;
use cdid_core::{Config64, Field64};

#[derive(Parser)]
#[command(
    name = "cdid",
    version,
    about = "Group-wise sparse denoising of complex-valued images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Denoise a recorded complex field
    Denoise(DenoiseArgs),
    /// Build a scene, add calibrated noise, write the observation
    Simulate(SimulateArgs),
    /// Score an estimate against a clean field, writing a one-row CSV table
    Evaluate(EvaluateArgs),
    /// Monte-Carlo grid: scenes x noise levels x algorithms x runs
    Benchmark(BenchmarkArgs),
}

/// Scene interpretation: principal-valued or multi-turn phase.
#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    /// Phase spans [0, pi/2]; metrics compare principal values
    Interf,
    /// Phase is a smooth multi-turn surface; absolute metrics unwrap
    Abs,
}

impl From<KindArg> for SceneKind {
    fn from(k: KindArg) -> SceneKind {
        match k {
            KindArg::Interf => SceneKind::Interferometric,
            KindArg::Abs => SceneKind::Absolute,
        }
    }
}

#[derive(Args)]
struct DenoiseArgs {
    /// Input observation (.cfd)
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Algorithm name, e.g. imre-it (cd|imre|pham x ht|wi|it)
    #[arg(long)]
    algo: String,
    /// Noise standard deviation of the input field, complex units
    #[arg(long)]
    sigma: f64,
    /// Output estimate (.cfd)
    #[arg(long)]
    out: PathBuf,
    /// TOML file overriding the default filter configuration
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in generator (gauss, hills) or file:image.pgm
    #[arg(long)]
    scene: String,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Target phase-noise standard deviation, radians
    #[arg(long = "sigma-phi")]
    sigma_phi: f64,
    /// RNG seed; with --run it pins the noise realization exactly
    #[arg(long)]
    seed: u64,
    /// Monte-Carlo run index inside the seed's stream
    #[arg(long, default_value_t = 0)]
    run: usize,
    /// Side length of built-in scenes (file scenes keep their own size)
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Output noisy observation (.cfd)
    #[arg(long)]
    out: PathBuf,
    /// Also write the clean field here (.cfd)
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Estimate to score (.cfd)
    #[arg(long)]
    est: PathBuf,
    /// Clean reference field (.cfd)
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Results CSV to write (one row, benchmark schema)
    #[arg(long)]
    csv: PathBuf,
    /// Image label stamped into the row
    #[arg(long, default_value = "unknown")]
    image: String,
    /// Noise level label stamped into the row
    #[arg(long = "sigma-phi", default_value_t = 0.0)]
    sigma_phi: f64,
    /// Algorithm label stamped into the row
    #[arg(long, default_value = "external")]
    algorithm: String,
    /// Run index stamped into the row
    #[arg(long, default_value_t = 0)]
    run: usize,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Comma-separated scenes: built-ins (gauss, hills) or file:img.pgm
    #[arg(long, value_delimiter = ',')]
    scenes: Vec<String>,
    #[arg(long, value_enum, default_value = "interf")]
    kind: KindArg,
    /// Comma-separated noise levels; default 0.05,0.1,0.2,0.3,0.5,0.9
    #[arg(long, value_delimiter = ',')]
    sigmas: Vec<f64>,
    /// Comma-separated algorithms; default: noisy baseline plus all nine
    #[arg(long, value_delimiter = ',')]
    algos: Vec<String>,
    /// Monte-Carlo runs per cell
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Side length of built-in scenes
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Per-run results CSV
    #[arg(long)]
    csv: PathBuf,
    /// Run-mean aggregates CSV
    #[arg(long)]
    aggregate: Option<PathBuf>,
    /// Per-algorithm box-plot deltas CSV
    #[arg(long)]
    boxplot: Option<PathBuf>,
    /// Criterion for the box plot
    #[arg(long, default_value = "psnr_phi")]
    metric: String,
    /// Extra results CSVs (same schema) merged before aggregation,
    /// e.g. externally computed methods joining the box plot
    #[arg(long, value_delimiter = ',')]
    import: Vec<PathBuf>,
    /// TOML file overriding the default filter configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved plan as JSON and exit without computing
    #[arg(long, default_value_t = false)]
    dry_run: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            emit_error(&e.to_string());
            return ExitCode::from(2);
        }
        Err(e) => {
            // --help / --version go to stdout and exit clean.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if let Err(e) = configure_threads() {
        emit_error(&e.to_string());
        return ExitCode::FAILURE;
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            emit_error(&e.to_string());
            ExitCode::FAILURE
        }
    }
}

/// One machine-readable line on stderr; scripts can parse it as JSON.
fn emit_error(message: &str) {
    eprintln!("{}", serde_json::json!({ "error": message }));
}

/// Applies the CDID_THREADS cap to the global worker pool before any
/// parallel code runs.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CDID_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().map_err(|_| {
        CdidError::InvalidConfig(format!("CDID_THREADS must be a positive integer, got {raw:?}"))
    })?;
    if n == 0 {
        return Err(CdidError::InvalidConfig(
            "CDID_THREADS must be a positive integer, got 0".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CdidError::InvalidConfig(format!("thread pool setup failed: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Denoise(args) => run_denoise(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Benchmark(args) => run_benchmark_cmd(args),
    }
}

// ---------------------------------------------------------------------------
// Manifests

/// The reproducibility record of one command, minus timing: this part is
/// hashed, and the hash is stamped into every CSV row the command writes.
/// Timing stays outside the hash because rows are written before the
/// command's total wall clock is known.
#[derive(serde::Serialize)]
struct ManifestCore {
    tool: String,
    command: &'static str,
    argv: Vec<String>,
    seed: Option<u64>,
    config: Option<Config64>,
    /// Input path -> SHA-256 of its bytes.
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
    parameters: serde_json::Value,
}

#[derive(serde::Serialize)]
struct RunManifest {
    #[serde(flatten)]
    core: ManifestCore,
    manifest_hash: String,
    timing_s: f64,
}

impl ManifestCore {
    fn new(command: &'static str) -> Self {
        ManifestCore {
            tool: format!("cdid {}", env!("CARGO_PKG_VERSION")),
            command,
            argv: std::env::args().skip(1).collect(),
            seed: None,
            config: None,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            parameters: serde_json::Value::Null,
        }
    }

    fn hash(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)
            .map_err(|e| CdidError::InvalidConfig(format!("manifest serialization: {e}")))?;
        Ok(hex_digest(&bytes))
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn hash_file(path: &Path) -> Result<String> {
    Ok(hex_digest(&fs::read(path).map_err(|e| name_path(e, path))?))
}

/// Stamps the offending path onto an I/O error so the CLI's one-line JSON
/// error names the file instead of just the OS failure.
fn name_path(err: std::io::Error, path: &Path) -> std::io::Error {
    std::io::Error::new(err.kind(), format!("{}: {err}", path.display()))
}

/// Wraps a fallible read so any I/O failure in it names `path`.
fn with_path<T>(result: Result<T>, path: &Path) -> Result<T> {
    result.map_err(|e| match e {
        CdidError::Io(io) => CdidError::Io(name_path(io, path)),
        other => other,
    })
}

/// Writes `<primary>.manifest.json` next to the command's main output.
fn write_manifest(primary: &Path, core: ManifestCore, hash: String, started: Instant) -> Result<()> {
    let manifest = RunManifest {
        core,
        manifest_hash: hash,
        timing_s: started.elapsed().as_secs_f64(),
    };
    let mut name = primary.as_os_str().to_owned();
    name.push(".manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CdidError::InvalidConfig(format!("manifest serialization: {e}")))?;
    fs::write(PathBuf::from(name), text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared pieces

fn load_config(path: Option<&Path>, inputs: &mut BTreeMap<String, String>) -> Result<Config64> {
    let Some(path) = path else {
        return Ok(Config64::default());
    };
    inputs.insert(path.display().to_string(), hash_file(path)?);
    let text = fs::read_to_string(path).map_err(|e| name_path(e, path))?;
    let cfg: Config64 = toml::from_str(&text)
        .map_err(|e| CdidError::InvalidConfig(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

/// Builds a scene from a CLI spec: a built-in generator name, or
/// `file:image.pgm` for a grayscale phase source (normalized to [0, 1]
/// before rescaling; absolute file scenes use the default multi-turn span).
fn resolve_scene(
    spec: &str,
    size: usize,
    kind: SceneKind,
    inputs: &mut BTreeMap<String, String>,
) -> Result<TestScene<f64>> {
    if let Some(path) = spec.strip_prefix("file:") {
        let path = Path::new(path);
        inputs.insert(path.display().to_string(), hash_file(path)?);
        let (source, height, width) = with_path(load_gray_image(path, true), path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "file".to_string());
        build_scene(&name, &source, height, width, kind)
    } else {
        scene_by_name(spec, size, size, kind)
    }
}

// ---------------------------------------------------------------------------
// Subcommands

fn run_denoise(args: DenoiseArgs) -> Result<()> {
    let started = Instant::now();
    let mut core = ManifestCore::new("denoise");
    core.inputs
        .insert(args.input.display().to_string(), hash_file(&args.input)?);

    let observation = with_path(cfd::read_field(&args.input), &args.input)?;
    let mut cfg = load_config(args.config.as_deref(), &mut core.inputs)?;
    cfg.sigma = args.sigma;
    cfg.validate()?;

    let estimate = run_named_algorithm(&observation, &args.algo, &cfg)?;
    cfd::write_field(&estimate, &args.out)?;

    core.config = Some(cfg);
    core.outputs = vec![args.out.display().to_string()];
    core.parameters = serde_json::json!({
        "algo": args.algo,
        "sigma": args.sigma,
    });
    let hash = core.hash()?;
    write_manifest(&args.out, core, hash, started)
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let started = Instant::now();
    let mut core = ManifestCore::new("simulate");
    core.seed = Some(args.seed);

    let scene = resolve_scene(&args.scene, args.size, args.kind.into(), &mut core.inputs)?;
    let spec = NoiseSpec {
        sigma_phi: args.sigma_phi,
        seed: args.seed,
        runs: args.run + 1,
    };
    let observation = make_noisy(&scene, &spec, args.run)?;
    cfd::write_field(&observation, &args.out)?;
    core.outputs = vec![args.out.display().to_string()];
    if let Some(truth) = &args.truth {
        cfd::write_field(&scene.complex_field()?, truth)?;
        core.outputs.push(truth.display().to_string());
    }

    core.parameters = serde_json::json!({
        "scene": args.scene,
        "kind": format!("{:?}", SceneKind::from(args.kind)),
        "sigma_phi": args.sigma_phi,
        "run": args.run,
        "height": scene.height,
        "width": scene.width,
    });
    let hash = core.hash()?;
    write_manifest(&args.out, core, hash, started)
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let started = Instant::now();
    let mut core = ManifestCore::new("evaluate");
    core.inputs
        .insert(args.est.display().to_string(), hash_file(&args.est)?);
    core.inputs
        .insert(args.truth.display().to_string(), hash_file(&args.truth)?);

    let est = with_path(cfd::read_field(&args.est), &args.est)?;
    let truth = with_path(cfd::read_field(&args.truth), &args.truth)?;
    if est.height() != truth.height() || est.width() != truth.width() {
        return Err(CdidError::DimensionMismatch(format!(
            "estimate {}x{} against truth {}x{}",
            est.height(),
            est.width(),
            truth.height(),
            truth.width()
        )));
    }
    let report = score_fields(&est, &truth, args.kind.into())?;
    let row = BenchRow {
        image: args.image.clone(),
        sigma_phi: args.sigma_phi,
        algorithm: args.algorithm.clone(),
        run: args.run,
        report,
        wall_clock_s: 0.0,
    };

    core.outputs = vec![args.csv.display().to_string()];
    core.parameters = serde_json::json!({
        "kind": format!("{:?}", SceneKind::from(args.kind)),
        "image": args.image,
        "sigma_phi": args.sigma_phi,
        "algorithm": args.algorithm,
        "run": args.run,
    });
    let hash = core.hash()?;
    let file = fs::File::create(&args.csv)?;
    write_rows_csv(file, &[row], &hash)?;
    write_manifest(&args.csv, core, hash, started)
}

/// Scores an estimate against a clean field when only the fields are
/// available (no generator truth). For multi-turn scenes both phases are
/// unwrapped with the same path-following unwrapper, since the container
/// carries only principal values; the in-process benchmark, which has the
/// generator's exact surface, does not take this detour.
fn score_fields(est: &Field64, truth: &Field64, kind: SceneKind) -> Result<MetricReport<f64>> {
    let est_phase = est.phase();
    let truth_phase = truth.phase();
    let (est_abs, truth_abs) = match kind {
        SceneKind::Interferometric => (est_phase.clone(), truth_phase.clone()),
        SceneKind::Absolute => (
            unwrap_field(&est_phase, est.height(), est.width())?,
            unwrap_field(&truth_phase, truth.height(), truth.width())?,
        ),
    };
    let est_ampl = est.amplitude();
    let truth_ampl = truth.amplitude();
    let (rmse_phi_abs, delta_phi_shift) = rmse_abs_phase(&est_abs, &truth_abs)?;
    Ok(MetricReport {
        psnr_phi: psnr_phi(&est_phase, &truth_phase)?,
        psnr_ampl: psnr_ampl(&est_ampl, &truth_ampl)?,
        rmse_phi_abs,
        rmse_a: rmse(&est_ampl, &truth_ampl)?,
        snr_c: snr_c(est, truth)?,
        snr_phi_abs: snr_abs_phase(&est_abs, &truth_abs)?,
        delta_phi_shift,
    })
}

fn run_benchmark_cmd(args: BenchmarkArgs) -> Result<()> {
    let started = Instant::now();
    let mut core = ManifestCore::new("benchmark");
    core.seed = Some(args.seed);

    let scene_specs: Vec<String> = if args.scenes.is_empty() {
        vec!["gauss".to_string(), "hills".to_string()]
    } else {
        args.scenes.clone()
    };
    let sigmas: Vec<f64> = if args.sigmas.is_empty() {
        DEFAULT_SIGMA_LIST.to_vec()
    } else {
        args.sigmas.clone()
    };
    let algorithms: Vec<String> = if args.algos.is_empty() {
        std::iter::once(NOISY_BASELINE)
            .chain(ALGORITHM_NAMES)
            .map(String::from)
            .collect()
    } else {
        args.algos.clone()
    };
    let metric = MetricKind::parse(&args.metric)?;

    let mut scenes = Vec::with_capacity(scene_specs.len());
    for spec in &scene_specs {
        scenes.push(resolve_scene(spec, args.size, args.kind.into(), &mut core.inputs)?);
    }
    let base = load_config(args.config.as_deref(), &mut core.inputs)?;
    base.validate()?;

    if args.dry_run {
        let plan = serde_json::json!({
            "scenes": scenes
                .iter()
                .map(|s| serde_json::json!({
                    "name": s.name,
                    "height": s.height,
                    "width": s.width,
                }))
                .collect::<Vec<_>>(),
            "kind": format!("{:?}", SceneKind::from(args.kind)),
            "sigmas": sigmas,
            "algorithms": algorithms,
            "runs": args.runs,
            "seed": args.seed,
        });
        println!("{plan}");
        return Ok(());
    }

    // Imported tables are hashed (and parsed) before the hash is fixed.
    let mut imported: Vec<BenchRow<f64>> = Vec::new();
    for path in &args.import {
        let bytes = fs::read(path).map_err(|e| name_path(e, path))?;
        core.inputs
            .insert(path.display().to_string(), hex_digest(&bytes));
        imported.extend(read_rows_csv::<_, f64>(&bytes[..])?);
    }

    core.config = Some(base.clone());
    core.outputs = vec![args.csv.display().to_string()];
    if let Some(p) = &args.aggregate {
        core.outputs.push(p.display().to_string());
    }
    if let Some(p) = &args.boxplot {
        core.outputs.push(p.display().to_string());
    }
    core.parameters = serde_json::json!({
        "scenes": scene_specs,
        "kind": format!("{:?}", SceneKind::from(args.kind)),
        "sigmas": sigmas,
        "algorithms": algorithms,
        "runs": args.runs,
        "size": args.size,
        "metric": metric.name(),
    });
    let hash = core.hash()?;

    let plan = BenchPlan {
        scenes: &scenes,
        sigmas: &sigmas,
        algorithms: &algorithms,
        runs: args.runs,
        seed: args.seed,
        base,
    };
    let mut rows = run_benchmark(&plan)?;
    rows.extend(imported);

    let file = fs::File::create(&args.csv)?;
    write_rows_csv(file, &rows, &hash)?;

    let aggregates = aggregate_rows(&rows);
    if let Some(path) = &args.aggregate {
        let file = fs::File::create(path)?;
        write_aggregate_csv(file, &aggregates, &hash)?;
    }
    if let Some(path) = &args.boxplot {
        let summaries = boxplot_deltas(&boxplot_cells(&aggregates, metric))?;
        let file = fs::File::create(path)?;
        write_boxplot_csv(file, &summaries, metric)?;
    }
    write_manifest(&args.csv, core, hash, started)
}
