//! The `privsamp` command line.
//!
//! Exit codes: 0 success, 2 usage/IO/parse error, 3 reduced space ill conditioned,
//! 4 shrinkage program infeasible, 5 marginal bound violated.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use privsamp_core::bounds::{
    feasibility_report, figure1_data, relaxed_bounds_with, table3, BoundInputs, FeasibilityReport, Log10,
    RelaxedConstants, RelaxedRow,
};
use privsamp_core::encode::{empirical_stats, BinaryEncoding, DatasetStats};
use privsamp_core::lp::{build_lambda_lp, DEFAULT_TOL};
use privsamp_core::qp::build_proximal_qp;
use privsamp_core::rng::Stream;
use privsamp_core::sampler::{
    run_observed, verify_marginals, MarginalReport, PrivateSamplingResult, RunStatus, SamplingConfig, Shrinkage,
    Stage,
};
use privsamp_core::walsh::{empirical_coeffs, enumerate_indices, LowFreqCoefficients};
use privsamp_core::{CubePoint, DataMatrix};
use serde::{Deserialize, Serialize};

use crate::bench::bench;
use crate::config::{GenerateSettings, ResolvedGenerate};
use crate::dump::{dump_lp, dump_qp};
use crate::io::{
    atomic_write, cube_csv_bytes, load_data, read_cube_csv, read_json, sha256_file, write_csv, write_json, CsvOptions,
    EncodeOptions, InputFormat,
};
use crate::manifest::{DensityArtifact, InputDigest, RunManifest, StreamSeed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_CONDITION_FAILURE: i32 = 3;
pub const EXIT_SHRINKAGE_INFEASIBLE: i32 = 4;
pub const EXIT_BOUND_VIOLATED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "privsamp", version, about = "Private sampling on the Boolean cube and its feasibility bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset summary: n, p, log10 2^p and the largest point mass.
    Stats(StatsArgs),
    /// Run the private sampler and write synthetic points.
    Generate(GenerateArgs),
    /// Compare the marginals of synthetic points with a reference.
    Verify(VerifyArgs),
    /// Evaluate the privacy and accuracy bounds.
    Analyze(AnalyzeArgs),
    /// Time random dense QPs and extrapolate to large sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input file layout.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Columns to drop before encoding (repeatable or comma separated).
    #[arg(long = "drop", value_delimiter = ',')]
    pub drop: Vec<String>,
    /// Encode two-category columns as a single coordinate.
    #[arg(long)]
    pub binary_single: bool,
    /// Field delimiter, `,` by default; `\t` for tabs.
    #[arg(long)]
    pub delimiter: Option<String>,
    /// The first line is data, not column names.
    #[arg(long)]
    pub no_header: bool,
}

impl InputArgs {
    fn encode_options(&self) -> anyhow::Result<EncodeOptions> {
        Ok(EncodeOptions {
            format: self.format.unwrap_or_default(),
            csv: CsvOptions {
                has_header: !self.no_header,
                delimiter: parse_delimiter(self.delimiter.as_deref().unwrap_or(","))?,
            },
            drop_columns: self.drop.clone(),
            binary: if self.binary_single { BinaryEncoding::SingleCoordinate } else { BinaryEncoding::OneHot },
        })
    }
}

fn parse_delimiter(s: &str) -> anyhow::Result<u8> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 => Ok(s.as_bytes()[0]),
        _ => bail!("delimiter must be a single byte, got `{s}`"),
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub input_args: InputArgs,
    /// Dataset name in the output row; defaults to the file stem.
    #[arg(long)]
    pub name: Option<String>,
    /// CSV file for the summary row.
    #[arg(long, short)]
    pub output: PathBuf,
    /// JSON stats file; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Categorical or `+-1` CSV with the true data.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// TOML file with generation settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Re-run the configuration recorded in a manifest; flags and --config take precedence.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Density cap; defaults to 2^p times the largest point mass.
    #[arg(long = "Delta")]
    pub cap: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub retries: Option<u32>,
    #[arg(long)]
    pub skip_condition_check: bool,
    /// KKT tolerance for both programs.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write plain-text dumps of the LP and QP here.
    #[arg(long)]
    pub dump_dir: Option<PathBuf>,
    #[command(flatten)]
    pub input_args: InputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Against {
    /// `(1 - lambda) f_n + lambda u_S`, which the fitted density matches exactly.
    Mixture,
    /// The reference data itself.
    Raw,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub synthetic: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Shrinkage weight; taken from --density when omitted there, else 0.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub bound: f64,
    /// `density.json` from `generate`, supplying lambda and the reduced space.
    #[arg(long)]
    pub density: Option<PathBuf>,
    /// `+-1` CSV of the reduced space, for the mixture target.
    #[arg(long)]
    pub reduced_space: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Against::Mixture)]
    pub against: Against,
    /// JSON report path.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub input_args: InputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Stats JSON written by `stats` (repeatable).
    #[arg(long)]
    pub stats_json: Vec<PathBuf>,
    /// CSV with columns `p`, `n`, `max_density` and optionally `dataset` (repeatable).
    #[arg(long)]
    pub stats_csv: Vec<PathBuf>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub max_density: Option<f64>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.125)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "Delta")]
    pub cap: Option<f64>,
    /// Reduced-space size for the report's privacy cap.
    #[arg(long)]
    pub m: Option<f64>,
    /// Relaxed-system constants recomputed from delta and gamma instead of 5.6e4 / 9.7e-3.
    #[arg(long)]
    pub exact_constants: bool,
    #[arg(long)]
    pub table2: bool,
    #[arg(long)]
    pub table3: bool,
    #[arg(long)]
    pub figure1: bool,
    #[arg(long)]
    pub report: bool,
    /// Sample sizes for the crossing table and the figure thresholds.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 100, 1000, 10000])]
    pub k_values: Vec<u64>,
    #[arg(long, default_value_t = 400)]
    pub p_max: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub figure_p_min: u32,
    #[arg(long, default_value_t = 100)]
    pub figure_p_max: u32,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [200usize, 400, 800])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 1.2e8)]
    pub target_m: f64,
    #[arg(long)]
    pub assume_exponent: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Stats(a) => cmd_stats(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn sci(x: Log10) -> String {
    x.sci()
}

fn log(x: Log10) -> String {
    format!("{:.6}", x.log10())
}

/// Stats file contents: the dataset statistics plus a name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsArtifact {
    #[serde(default)]
    pub dataset: String,
    #[serde(flatten)]
    pub stats: DatasetStats,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub const STATS_HEADER: [&str; 6] = ["dataset", "p", "n", "log10_cube_size", "cube_size", "max_density"];

fn cmd_stats(a: &StatsArgs) -> anyhow::Result<i32> {
    let loaded = load_data(&a.input, &a.input_args.encode_options()?)?;
    let stats = empirical_stats(&loaded.data)?;
    let name = a.name.clone().unwrap_or_else(|| file_stem(&a.input));
    let row = vec![
        name.clone(),
        stats.p.to_string(),
        stats.n.to_string(),
        format!("{:.3}", stats.log10_cube_size),
        Log10(stats.log10_cube_size).sci(),
        format!("{}", stats.max_density),
    ];
    let json = a.json.clone().unwrap_or_else(|| a.output.with_extension("json"));
    let warnings = loaded.encoding.map(|e| e.warnings).unwrap_or_default();
    let artifact = StatsArtifact { dataset: name, stats, warnings };
    write_csv(&a.output, &STATS_HEADER, std::slice::from_ref(&row))?;
    write_json(&json, &artifact)?;
    println!("{}", row.join(", "));
    Ok(EXIT_OK)
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data".into())
}

fn resolve_generate(a: &GenerateArgs) -> anyhow::Result<(GenerateSettings, Vec<PathBuf>)> {
    let mut sources = Vec::new();
    let flags = GenerateSettings {
        input: a.input.clone(),
        p: a.p,
        d: a.d,
        m: a.m,
        k: a.k,
        delta: a.delta,
        cap: a.cap,
        seed: a.seed,
        retries: a.retries,
        condition_check: a.skip_condition_check.then_some(false),
        tol: a.tol,
        format: a.input_args.format,
        drop: (!a.input_args.drop.is_empty()).then(|| a.input_args.drop.clone()),
        binary_single: a.input_args.binary_single.then_some(true),
        delimiter: a.input_args.delimiter.clone(),
        no_header: a.input_args.no_header.then_some(true),
    };
    let file = match &a.config {
        Some(path) => {
            sources.push(path.clone());
            GenerateSettings::from_toml_file(path)?
        }
        None => GenerateSettings::default(),
    };
    let replay = match &a.replay {
        Some(path) => {
            sources.push(path.clone());
            let m: RunManifest = read_json(path)?;
            m.config.to_settings()
        }
        None => GenerateSettings::default(),
    };
    Ok((flags.over(file.over(replay)), sources))
}

fn cmd_generate(a: &GenerateArgs) -> anyhow::Result<i32> {
    let (settings, config_files) = resolve_generate(a)?;
    let input = settings.input.clone().ok_or_else(|| anyhow!("no input file given"))?;
    let format = settings.format.unwrap_or_default();
    let drop = settings.drop.clone().unwrap_or_default();
    let binary_single = settings.binary_single.unwrap_or(false);
    let delimiter = settings.delimiter.clone().unwrap_or_else(|| ",".into());
    let no_header = settings.no_header.unwrap_or(false);
    let opts = EncodeOptions {
        format,
        csv: CsvOptions { has_header: !no_header, delimiter: parse_delimiter(&delimiter)? },
        drop_columns: drop.clone(),
        binary: if binary_single { BinaryEncoding::SingleCoordinate } else { BinaryEncoding::OneHot },
    };
    let started = Instant::now();
    let loaded = load_data(&input, &opts)?;
    let load_secs = started.elapsed().as_secs_f64();
    let data = loaded.data;
    let p = data.dim();
    if let Some(want) = settings.p {
        if want != p {
            bail!("--p {want} does not match the encoded input dimension {p}");
        }
    }
    let stats = empirical_stats(&data)?;
    let (cap, cap_defaulted) = match settings.cap {
        Some(c) => (c, false),
        None => (2f64.powi(p as i32) * stats.max_density, true),
    };
    let resolved = ResolvedGenerate {
        input: input.clone(),
        p,
        d: settings.d.unwrap_or(2),
        m: settings.m.ok_or_else(|| anyhow!("--m is required"))?,
        k: settings.k.ok_or_else(|| anyhow!("--k is required"))?,
        delta: settings.delta.unwrap_or(0.25),
        cap,
        cap_defaulted,
        seed: settings.seed.unwrap_or(0),
        retries: settings.retries.unwrap_or(0),
        condition_check: settings.condition_check.unwrap_or(true),
        tol: settings.tol.unwrap_or(DEFAULT_TOL),
        format,
        drop,
        binary_single,
        delimiter,
        no_header,
    };
    let config = SamplingConfig {
        p,
        d: resolved.d,
        m: resolved.m,
        k: resolved.k,
        delta: resolved.delta,
        cap: resolved.cap,
        seed: resolved.seed,
        condition_check: resolved.condition_check,
        retries: resolved.retries,
        tol: resolved.tol,
    };
    config.validate()?;

    let mut timings = BTreeMap::new();
    timings.insert("load".to_string(), load_secs);
    let mut current: Option<(Stage, Instant)> = None;
    let result = run_observed(&config, &data, &mut |stage| {
        if let Some((prev, t)) = current.take() {
            timings.insert(stage_name(prev).to_string(), t.elapsed().as_secs_f64());
        }
        if stage != Stage::Done {
            current = Some((stage, Instant::now()));
        }
    })?;

    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let y_path = a.out_dir.join("Y.csv");
    let density_path = a.out_dir.join("density.json");
    let manifest_path = a.out_dir.join("manifest.json");
    let mut outputs = Vec::new();

    let marginals = match &result.density {
        Some(d) => {
            let u = result.reduced_space.uniform_coeffs();
            Some(verify_marginals(
                &result.data_coeffs,
                &result.synthetic_matrix(),
                Some(Shrinkage { lambda: d.lambda, toward: &u }),
                4.0 * resolved.delta,
            )?)
        }
        None => None,
    };
    if result.status == RunStatus::Success {
        atomic_write(&y_path, &cube_csv_bytes(&result.synthetic_matrix()))?;
        outputs.push(y_path);
        write_json(&density_path, &DensityArtifact::from_result(&result, resolved.d))?;
        outputs.push(density_path);
    }
    if let Some(dir) = &a.dump_dir {
        outputs.extend(write_dumps(dir, &result, data.len(), &resolved)?);
    }

    let mut inputs = vec![InputDigest { sha256: sha256_file(&input)?, path: input }];
    for c in config_files {
        inputs.push(InputDigest { sha256: sha256_file(&c)?, path: c });
    }
    let mut streams: Vec<StreamSeed> =
        (0..result.attempts.len() as u32).map(|i| Stream::reduced_space_attempt(i).into()).collect();
    if result.status == RunStatus::Success {
        streams.push(Stream::Sampling.into());
    }
    let density = result.density.as_ref();
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        root_seed: resolved.seed,
        config: resolved,
        streams,
        inputs,
        timings,
        outputs,
        status: result.status,
        lambda: density.map(|d| d.lambda),
        sigma_min: result.reduced_space.sigma_min(),
        condition_threshold: result.reduced_space.threshold(),
        lp: density.and_then(|d| d.lp.clone()),
        qp: density.map(|d| d.qp.clone()),
        marginals,
    };
    write_json(&manifest_path, &manifest)?;

    let last = result.attempts.last().expect("at least one draw");
    match result.status {
        RunStatus::Success => {
            let d = density.expect("density on success");
            println!(
                "success: lambda = {:.6}, sigma_min = {:.4} (threshold {:.4}), {} points written",
                d.lambda,
                last.sigma_min,
                last.threshold,
                result.synthetic.len()
            );
            Ok(EXIT_OK)
        }
        RunStatus::ConditionFailure => {
            eprintln!(
                "condition failure: sigma_min = {:.4} < {:.4} after {} draw(s)",
                last.sigma_min,
                last.threshold,
                result.attempts.len()
            );
            Ok(EXIT_CONDITION_FAILURE)
        }
        RunStatus::ShrinkageInfeasible => {
            eprintln!("shrinkage infeasible: no lambda in [0, 1] fits the box; check delta and Delta");
            Ok(EXIT_SHRINKAGE_INFEASIBLE)
        }
    }
}

fn stage_name(s: Stage) -> &'static str {
    match s {
        Stage::Coefficients => "coefficients",
        Stage::ReducedSpace => "reduced-space",
        Stage::Shrinkage => "shrinkage-lp",
        Stage::Projection => "proximal-qp",
        Stage::Sampling => "sampling",
        Stage::Done => "done",
    }
}

fn write_dumps(
    dir: &Path,
    result: &PrivateSamplingResult,
    n: usize,
    cfg: &ResolvedGenerate,
) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let s = &result.reduced_space;
    let mut out = Vec::new();
    let lp = build_lambda_lp(s.walsh(), &result.data_coeffs, s.m(), n, cfg.delta, cfg.cap)?;
    let lp_path = dir.join("lp.txt");
    atomic_write(&lp_path, dump_lp(&lp).as_bytes())?;
    out.push(lp_path);
    if let Some(d) = &result.density {
        let qp = build_proximal_qp(s.walsh(), &result.data_coeffs, d.lambda, s.m(), cfg.delta, cfg.cap)?;
        let qp_path = dir.join("qp.txt");
        atomic_write(&qp_path, dump_qp(&qp).as_bytes())?;
        out.push(qp_path);
    }
    Ok(out)
}

fn cmd_verify(a: &VerifyArgs) -> anyhow::Result<i32> {
    if a.bound.is_nan() || a.bound < 0.0 {
        bail!("--bound must be non-negative");
    }
    let reference = load_data(&a.reference, &a.input_args.encode_options()?)?.data;
    let synthetic = read_cube_csv(&a.synthetic)?;
    if synthetic.dim() != reference.dim() {
        bail!("reference has p = {} but synthetic has p = {}", reference.dim(), synthetic.dim());
    }
    let p = reference.dim();
    let set = enumerate_indices(p, a.d)?;
    let ref_coeffs = empirical_coeffs(reference.points(), &set)?;

    let density: Option<DensityArtifact> = a.density.as_deref().map(read_json).transpose()?;
    let space_points: Option<Vec<CubePoint>> = match (&a.reduced_space, &density) {
        (Some(path), _) => Some(read_cube_csv(path)?.points().to_vec()),
        (None, Some(d)) => Some(d.reduced_space.iter().map(|r| CubePoint::new(r.clone())).collect::<Result<_, _>>()?),
        (None, None) => None,
    };
    let lambda = a.lambda.or(density.as_ref().and_then(|d| d.lambda)).unwrap_or(0.0);

    let mut warnings = Vec::new();
    let toward = match &space_points {
        Some(points) => {
            let space = DataMatrix::new(p, points.clone())?;
            empirical_coeffs(space.points(), &set)?
        }
        None => {
            if lambda > 0.0 && a.against == Against::Mixture {
                warnings.push("no reduced space given; mixing toward the uniform density on the cube".to_string());
            }
            LowFreqCoefficients::uniform_cube(set.clone())
        }
    };
    let shrinkage = match a.against {
        Against::Mixture => Some(Shrinkage { lambda, toward: &toward }),
        Against::Raw => None,
    };
    let report = verify_marginals(&ref_coeffs, &synthetic, shrinkage, a.bound)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    if let Some(out) = &a.output {
        write_json(out, &VerifyArtifact { report: &report, warnings })?;
    }
    let by_degree: Vec<String> = report.max_deviation_by_degree.iter().map(|x| format!("{x:.3e}")).collect();
    println!(
        "max deviation {:.3e} (by degree [{}]) vs bound {}: {}",
        report.max_deviation,
        by_degree.join(", "),
        report.bound,
        if report.passed { "pass" } else { "FAIL" }
    );
    Ok(if report.passed { EXIT_OK } else { EXIT_BOUND_VIOLATED })
}

#[derive(Serialize)]
struct VerifyArtifact<'a> {
    #[serde(flatten)]
    report: &'a MarginalReport,
    warnings: Vec<String>,
}

/// One named row of analyzer input.
#[derive(Debug, Clone)]
struct NamedInputs {
    name: String,
    inputs: BoundInputs,
}

#[derive(Debug, Deserialize)]
struct StatsCsvRow {
    #[serde(default)]
    dataset: Option<String>,
    p: u32,
    n: f64,
    max_density: f64,
}

fn analyzer_inputs(a: &AnalyzeArgs) -> anyhow::Result<Vec<NamedInputs>> {
    let mut rows = Vec::new();
    for path in &a.stats_json {
        let s: StatsArtifact = read_json(path)?;
        let name = if s.dataset.is_empty() { file_stem(path) } else { s.dataset.clone() };
        rows.push((name, s.stats.p, s.stats.n as f64, s.stats.max_density));
    }
    for path in &a.stats_csv {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("reading {}", path.display()))?;
        for (i, rec) in reader.deserialize::<StatsCsvRow>().enumerate() {
            let r = rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
            rows.push((r.dataset.unwrap_or_else(|| format!("{}-{}", file_stem(path), i + 1)), r.p, r.n, r.max_density));
        }
    }
    match (a.p, a.n, a.max_density) {
        (Some(p), Some(n), Some(f)) => rows.push((a.name.clone().unwrap_or_else(|| "input".into()), p, n, f)),
        (None, None, None) => {}
        _ => bail!("--p, --n and --max-density must be given together"),
    }
    rows.into_iter()
        .map(|(name, p, n, f)| {
            let mut inputs = BoundInputs::new(p, n, f)
                .with_epsilon(a.epsilon)
                .with_delta(a.delta)
                .with_gamma(a.gamma)
                .with_degree(a.d);
            if let Some(c) = a.cap {
                inputs = inputs.with_cap(c);
            }
            if let Some(m) = a.m {
                inputs = inputs.with_m(m);
            }
            inputs.validate().with_context(|| format!("dataset `{name}`"))?;
            Ok(NamedInputs { name, inputs })
        })
        .collect()
}

pub const TABLE2_HEADER: [&str; 11] = [
    "dataset",
    "p",
    "n",
    "max_density",
    "epsilon",
    "k_coefficient",
    "m_lower",
    "m_upper",
    "log10_k_coefficient",
    "log10_m_lower",
    "log10_m_upper",
];

pub const TABLE3_HEADER: [&str; 11] = [
    "k",
    "epsilon",
    "p",
    "reference_p",
    "discrepancy",
    "m_lower",
    "two_pow_p_quarter",
    "two_pow_p",
    "log10_m_lower",
    "log10_two_pow_p_quarter",
    "log10_two_pow_p",
];

pub const FIGURE1_HEADER: [&str; 3] = ["p", "epsilon", "log10_k_upper"];
pub const FIGURE1_THRESHOLD_HEADER: [&str; 2] = ["k", "log10_k"];

#[derive(Serialize)]
struct NamedRow<'a, T> {
    dataset: &'a str,
    #[serde(flatten)]
    row: T,
}

fn cmd_analyze(a: &AnalyzeArgs) -> anyhow::Result<i32> {
    if !(a.table2 || a.table3 || a.figure1 || a.report) {
        bail!("nothing to do: pass --table2, --table3, --figure1 or --report");
    }
    let needs_data = a.table2 || a.report;
    let rows = if needs_data { analyzer_inputs(a)? } else { Vec::new() };
    if needs_data && rows.is_empty() {
        bail!("--table2 and --report need --stats-json, --stats-csv or --p/--n/--max-density");
    }
    if a.epsilon.is_nan() || a.epsilon <= 0.0 {
        bail!("--epsilon must be positive");
    }
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;

    if a.table2 {
        let consts = if a.exact_constants { RelaxedConstants::exact(a.delta, a.gamma) } else { RelaxedConstants::ROUNDED };
        let table: Vec<(String, RelaxedRow)> = rows
            .iter()
            .map(|r| (r.name.clone(), relaxed_bounds_with(r.inputs.p, r.inputs.n, r.inputs.max_density, a.epsilon, consts)))
            .collect();
        let csv_rows: Vec<Vec<String>> = table
            .iter()
            .map(|(name, r)| {
                vec![
                    name.clone(),
                    r.p.to_string(),
                    sci(r.n),
                    sci(r.max_density),
                    r.epsilon.to_string(),
                    sci(r.k_coefficient),
                    sci(r.m_lower),
                    sci(r.m_upper),
                    log(r.k_coefficient),
                    log(r.m_lower),
                    log(r.m_upper),
                ]
            })
            .collect();
        write_csv(&a.out_dir.join("table2.csv"), &TABLE2_HEADER, &csv_rows)?;
        let json: Vec<NamedRow<&RelaxedRow>> = table.iter().map(|(n, r)| NamedRow { dataset: n, row: r }).collect();
        write_json(&a.out_dir.join("table2.json"), &json)?;
        for r in &csv_rows {
            println!("{}: k <= {} / m^(3/4), m in [{}, {}]", r[0], r[5], r[6], r[7]);
        }
    }

    if a.table3 {
        let table = table3(a.epsilon, &a.k_values, a.p_max)?;
        let csv_rows: Vec<Vec<String>> = table
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.epsilon.to_string(),
                    r.p.to_string(),
                    r.reference_p.map(|x| x.to_string()).unwrap_or_default(),
                    r.discrepancy.to_string(),
                    sci(r.m_lower),
                    sci(r.two_pow_p_quarter),
                    sci(r.two_pow_p),
                    log(r.m_lower),
                    log(r.two_pow_p_quarter),
                    log(r.two_pow_p),
                ]
            })
            .collect();
        write_csv(&a.out_dir.join("table3.csv"), &TABLE3_HEADER, &csv_rows)?;
        write_json(&a.out_dir.join("table3.json"), &table)?;
        for r in &table {
            let flag = match (r.reference_p, r.discrepancy) {
                (Some(rp), true) => format!("  (differs from reference {rp})"),
                _ => String::new(),
            };
            println!("k = {}: p >= {}, m >= {}{flag}", r.k, r.p, r.m_lower);
        }
    }

    if a.figure1 {
        if a.figure_p_min > a.figure_p_max {
            bail!("--figure-p-min exceeds --figure-p-max");
        }
        let thresholds: Vec<f64> = a.k_values.iter().map(|&k| k as f64).collect();
        let fig = figure1_data(a.figure_p_min..=a.figure_p_max, &a.epsilons, &thresholds)?;
        let curve_rows: Vec<Vec<String>> = fig
            .curves
            .iter()
            .map(|c| vec![c.p.to_string(), c.epsilon.to_string(), format!("{:.12}", c.log10_k_upper)])
            .collect();
        write_csv(&a.out_dir.join("figure1.csv"), &FIGURE1_HEADER, &curve_rows)?;
        let threshold_rows: Vec<Vec<String>> =
            fig.thresholds.iter().map(|(k, lk)| vec![k.to_string(), format!("{lk:.12}")]).collect();
        write_csv(&a.out_dir.join("figure1_thresholds.csv"), &FIGURE1_THRESHOLD_HEADER, &threshold_rows)?;
        println!("figure 1: {} curve points, {} threshold lines", fig.curves.len(), fig.thresholds.len());
    }

    if a.report {
        let reports: Vec<NamedRow<FeasibilityReport>> = rows
            .iter()
            .map(|r| Ok(NamedRow { dataset: &r.name, row: feasibility_report(&r.inputs)? }))
            .collect::<anyhow::Result<_>>()?;
        write_json(&a.out_dir.join("report.json"), &reports)?;
        for r in &reports {
            println!("{}: {}", r.dataset, r.row.verdict);
            for w in &r.row.warnings {
                println!("  warning: {w}");
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_bench(a: &BenchArgs) -> anyhow::Result<i32> {
    if a.sizes.is_empty() || a.sizes.iter().any(|&s| s < 2) {
        bail!("--sizes needs entries of at least 2");
    }
    if a.sizes.len() < 2 && a.assume_exponent.is_none() {
        bail!("give at least two sizes or --assume-exponent");
    }
    if a.repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    let report = bench(&a.sizes, a.repeats, a.target_m, a.assume_exponent, a.seed)?;
    for t in &report.timings {
        println!("size {:>6}: median {:.4} s", t.size, t.median_seconds);
    }
    let e = &report.extrapolation;
    let years = e.predicted_seconds / (365.25 * 86400.0);
    println!(
        "t = {:.3e} * size^{:.3}{}; predicted at {:.3e}: {:.3e} s ({:.3e} years)",
        e.coefficient,
        e.exponent,
        if e.fitted { "" } else { " (assumed)" },
        e.target,
        e.predicted_seconds,
        years
    );
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let rows: Vec<Vec<String>> = report
            .timings
            .iter()
            .map(|t| vec![t.size.to_string(), t.median_seconds.to_string(), t.seconds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";")])
            .collect();
        write_csv(&dir.join("bench.csv"), &["size", "median_seconds", "seconds"], &rows)?;
        write_json(&dir.join("bench.json"), &report)?;
    }
    Ok(EXIT_OK)
}
