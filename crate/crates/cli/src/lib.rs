//! `anm` command-line interface.
//!
//! Exit codes: `infer` returns 0 (X→Y), 1 (Y→X) or 2 (abstain); 3 is any
//! runtime failure, 1 a failed `verify` tolerance, and 64 a usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anm_core::bench::{emit_results, ingest_csv, run_sweep_with_jobs, write_csv, SweepAxis, SweepSpec};
use anm_core::oracle::{verify_entropy, verify_lemma1, Check};
use anm_core::{sample_anm, score_direction, AnmSpec, InferenceConfig};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 64;

/// Quadrature grid and Monte Carlo size for `verify --lemma1`.
pub const VERIFY_GRID_POINTS: usize = 4001;
pub const VERIFY_MONTE_CARLO: usize = 100_000;
/// Sample size for `verify --entropy`.
pub const VERIFY_ENTROPY_N: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "anm",
    version,
    about = "Causal direction inference under the additive noise model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score both directions on a two-column CSV sample.
    Infer {
        #[arg(long)]
        data: PathBuf,
        /// key=value config file; omitted keys take the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Draw a sample from a generator and write it as CSV.
    Simulate(SimulateArgs),
    /// Run a simulation sweep and write rows.csv and aggregates.csv.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Output directory; defaults to the spec's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the available processors.
        #[arg(long)]
        jobs: Option<usize>,
        /// Starting bandwidth of a bandwidth-geometric axis, in covariate
        /// standard deviations.
        #[arg(long)]
        h0: Option<f64>,
    },
    /// Run the oracle checks.
    Verify {
        /// Entropy decomposition identity, closed form and numeric.
        #[arg(long)]
        lemma1: bool,
        /// Entropy estimator accuracy on reference distributions.
        #[arg(long)]
        entropy: bool,
        /// Both groups (the default when no flag is given).
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Cubic,
    LinearGaussian,
    Custom,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    generator: GeneratorArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Cubic coefficient.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Noise power.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// Linear slope.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Linear noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Model file (x_dist, f, noise keys) for the custom generator.
    #[arg(long, required_if_eq("generator", "custom"))]
    spec: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<anm_core::Error> for Failure {
    fn from(e: anm_core::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn require_file(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("no such file: {}", path.display())))
    }
}

fn infer(data: &Path, config: Option<&Path>) -> Result<i32, Failure> {
    require_file(data)?;
    let config = match config {
        Some(p) => InferenceConfig::parse_with_base(&read_input(p)?, InferenceConfig::cli_default())?,
        None => InferenceConfig::cli_default(),
    };
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    let sample = ingest_csv(data)?;
    let score = score_direction(&sample, &config)?;
    print!("{}", score.to_kv_string());
    Ok(score.decision.exit_code())
}

fn simulate(args: &SimulateArgs) -> Result<i32, Failure> {
    let spec = match args.generator {
        GeneratorArg::Cubic => AnmSpec::cubic(args.b, args.q),
        GeneratorArg::LinearGaussian => AnmSpec::linear_gaussian(args.a, args.s),
        GeneratorArg::Custom => {
            let path = args.spec.as_deref().expect("clap enforces --spec");
            read_input(path)?.parse()?
        }
    };
    let sample = sample_anm(&spec, args.n, args.seed)?;
    write_csv(&sample, &args.out)?;
    Ok(0)
}

fn sweep(spec: &Path, out: Option<&Path>, jobs: Option<usize>, h0: Option<f64>) -> Result<i32, Failure> {
    require_file(spec)?;
    let mut parsed = SweepSpec::parse(&read_input(spec)?)?;
    if let (Some(h), SweepAxis::BandwidthGeometric { start, .. }) = (h0, &mut parsed.axis) {
        *start = h;
    }
    let out = out
        .map(Path::to_path_buf)
        .or_else(|| parsed.out_dir.clone())
        .ok_or_else(|| Failure::Usage("no output directory: pass --out or set out_dir".into()))?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let result = run_sweep_with_jobs(&parsed, jobs)?;
    for (i, e) in &result.failures {
        eprintln!("warning: row {i} failed: {e}");
    }
    emit_results(&result, &out)?;
    Ok(0)
}

fn verify(lemma1: bool, entropy: bool, seed: u64) -> Result<i32, Failure> {
    let mut checks: Vec<Check> = Vec::new();
    if lemma1 {
        checks.extend(verify_lemma1(VERIFY_GRID_POINTS, VERIFY_MONTE_CARLO, seed)?);
    }
    if entropy {
        checks.extend(verify_entropy(VERIFY_ENTROPY_N, seed)?);
    }
    for c in &checks {
        println!("{c}");
    }
    Ok(if checks.iter().all(|c| c.passed) {
        0
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let outcome = match &cli.command {
        Command::Infer { data, config } => infer(data, config.as_deref()),
        Command::Simulate(args) => simulate(args),
        Command::Sweep { spec, out, jobs, h0 } => sweep(spec, out.as_deref(), *jobs, *h0),
        Command::Verify {
            lemma1,
            entropy,
            all,
            seed,
        } => {
            let none = !lemma1 && !entropy;
            verify(*lemma1 || *all || none, *entropy || *all || none, *seed)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!(
                "error: {msg}\n\nUsage: anm <infer|simulate|sweep|verify> [OPTIONS]\nRun `anm --help` for details."
            );
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}
