//! Simulation sweeps, CSV ingestion and results persistence.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::infer::score_direction;
use crate::model::{
    mean, parse_key_values, sample_sd, validate_sample, BandwidthSpec, Direction, DirectionScore, EstimationMode,
    InferenceConfig, PairedSample, Scale, CONFIG_KEYS,
};
use crate::regress::{average_excess_risk, fit, resolve_bandwidth};
use crate::synth::{sample_anm, AnmSpec};

/// Default undersmoothed starting bandwidth of a geometric sweep, in units
/// of the covariate standard deviation.
pub const DEFAULT_SWEEP_H0: f64 = 0.05;

pub const ROWS_HEADER: [&str; 8] = [
    "axis_value",
    "mode",
    "repetition",
    "seed",
    "c_xy",
    "c_yx",
    "gap",
    "decision",
];
pub const AGGREGATES_HEADER: [&str; 6] = ["axis_value", "mode", "mean_gap", "sd_gap", "frac_xtoy", "n_rows"];

pub const SWEEP_KEYS: [&str; 9] = [
    "axis",
    "axis_values",
    "generator",
    "b",
    "q",
    "n",
    "repetitions",
    "compare_modes",
    "out_dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `b X^3 + X + |N|^q sign(N)`, `X ~ Uniform(-2.5, 2.5)`.
    Cubic,
    /// `b X + q N'`, `X, N'` standard normal (`b` is the slope, `q` the
    /// noise standard deviation).
    LinearGaussian,
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cubic" => Ok(Generator::Cubic),
            "linear-gaussian" => Ok(Generator::LinearGaussian),
            other => Err(Error::config(format!("unknown sweep generator `{other}`"))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Cubic => "cubic",
            Generator::LinearGaussian => "linear-gaussian",
        })
    }
}

/// Data-generating settings before the axis is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseModel {
    pub generator: Generator,
    pub b: f64,
    pub q: f64,
    pub n: usize,
}

impl BaseModel {
    pub fn anm(&self) -> AnmSpec {
        match self.generator {
            Generator::Cubic => AnmSpec::cubic(self.b, self.q),
            Generator::LinearGaussian => AnmSpec::linear_gaussian(self.b, self.q),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Fixed regression bandwidths `start * factor^k`, `k < steps`, in
    /// units of the covariate standard deviation.
    BandwidthGeometric {
        start: f64,
        factor: f64,
        steps: usize,
    },
    SampleSize(Vec<usize>),
    NoisePower(Vec<f64>),
    Nonlinearity(Vec<f64>),
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepAxis::BandwidthGeometric { start, factor, steps } => {
                (0..*steps).map(|k| start * factor.powi(k as i32)).collect()
            }
            SweepAxis::SampleSize(v) => v.iter().map(|&n| n as f64).collect(),
            SweepAxis::NoisePower(v) | SweepAxis::Nonlinearity(v) => v.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            SweepAxis::BandwidthGeometric { start, factor, steps } => {
                *start > 0.0 && *factor > 0.0 && start.is_finite() && factor.is_finite() && *steps >= 1
            }
            SweepAxis::SampleSize(v) => !v.is_empty() && v.iter().all(|&n| n >= 1),
            SweepAxis::NoisePower(v) => !v.is_empty() && v.iter().all(|q| *q > 0.0 && q.is_finite()),
            SweepAxis::Nonlinearity(v) => !v.is_empty() && v.iter().all(|b| b.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid sweep axis {self:?}")))
        }
    }

    fn parse(kind: &str, values: &str) -> Result<Self> {
        let reals = || {
            values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::config(format!("`{}` is not a number", v.trim())))
                })
                .collect::<Result<Vec<f64>>>()
        };
        let axis = match kind.trim() {
            "bandwidth-geometric" => match reals()?.as_slice() {
                [start, factor, steps] if steps.fract() == 0.0 && *steps >= 1.0 && *steps <= 1e4 => {
                    SweepAxis::BandwidthGeometric {
                        start: *start,
                        factor: *factor,
                        steps: *steps as usize,
                    }
                }
                _ => return Err(Error::config("bandwidth-geometric takes start,factor,steps")),
            },
            "sample-size" => SweepAxis::SampleSize(
                values
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::config(format!("`{}` is not a sample size", v.trim())))
                    })
                    .collect::<Result<_>>()?,
            ),
            "noise-power" => SweepAxis::NoisePower(reals()?),
            "nonlinearity" => SweepAxis::Nonlinearity(reals()?),
            other => return Err(Error::config(format!("unknown sweep axis `{other}`"))),
        };
        axis.validate()?;
        Ok(axis)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub base: BaseModel,
    pub infer_config: InferenceConfig,
    pub repetitions: usize,
    /// Run every cell in both coupled and decoupled mode.
    pub compare_modes: bool,
    pub out_dir: Option<PathBuf>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis.validate()?;
        self.infer_config.validate()?;
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.base.n == 0 {
            return Err(Error::config("n must be at least 1"));
        }
        self.base.anm().validate()
    }

    /// Estimation modes run per cell, in output order.
    pub fn modes(&self, seed: u64) -> Vec<EstimationMode> {
        let decoupled = EstimationMode::Decoupled { split_seed: seed };
        if self.compare_modes {
            vec![EstimationMode::Coupled, decoupled]
        } else {
            match self.infer_config.mode {
                EstimationMode::Coupled => vec![EstimationMode::Coupled],
                EstimationMode::Decoupled { .. } => vec![decoupled],
            }
        }
    }

    /// Parses a sweep file: the inference config keys plus the sweep keys.
    /// Config keys absent from the file take the command-line defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = parse_key_values(text)?;
        let mut config_text = String::new();
        for (i, line) in text.lines().enumerate() {
            let keep = entries
                .iter()
                .find(|e| e.line == i + 1)
                .is_some_and(|e| CONFIG_KEYS.contains(&e.key.as_str()));
            if keep {
                config_text.push_str(line);
            }
            config_text.push('\n');
        }
        let infer_config = InferenceConfig::parse_with_base(&config_text, InferenceConfig::cli_default())?;

        let get = |k: &str| entries.iter().find(|e| e.key == k);
        for e in &entries {
            if !CONFIG_KEYS.contains(&e.key.as_str()) && !SWEEP_KEYS.contains(&e.key.as_str()) {
                return Err(Error::parse(e.line, format!("unknown key `{}`", e.key)));
            }
        }
        let at = |k: &str, err: Error| match get(k) {
            Some(e) => Error::parse(e.line, err.to_string()),
            None => err,
        };
        let num = |k: &str, default: f64| -> Result<f64> {
            match get(k) {
                None => Ok(default),
                Some(e) => e
                    .value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(e.line, format!("`{}` is not a finite number", e.value))),
            }
        };
        let count = |k: &str, default: usize| -> Result<usize> {
            match get(k) {
                None => Ok(default),
                Some(e) => e
                    .value
                    .parse::<usize>()
                    .map_err(|_| Error::parse(e.line, format!("`{}` is not a non-negative integer", e.value))),
            }
        };

        let axis_kind = get("axis").ok_or_else(|| Error::config("missing key `axis`"))?;
        let axis_values = get("axis_values").ok_or_else(|| Error::config("missing key `axis_values`"))?;
        let axis = SweepAxis::parse(&axis_kind.value, &axis_values.value).map_err(|e| at("axis_values", e))?;
        let generator = match get("generator") {
            Some(e) => e.value.parse().map_err(|err| at("generator", err))?,
            None => Generator::Cubic,
        };
        let compare_modes = match get("compare_modes") {
            None => false,
            Some(e) => match e.value.as_str() {
                "true" => true,
                "false" => false,
                other => return Err(Error::parse(e.line, format!("`{other}` is not true/false"))),
            },
        };
        let spec = SweepSpec {
            axis,
            base: BaseModel {
                generator,
                b: num("b", 1.0)?,
                q: num("q", 1.0)?,
                n: count("n", 1000)?,
            },
            infer_config,
            repetitions: count("repetitions", 10)?,
            compare_modes,
            out_dir: get("out_dir").map(|e| PathBuf::from(&e.value)),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub mode: &'static str,
    pub repetition: usize,
    pub seed: u64,
    pub c_xy: f64,
    pub c_yx: f64,
    pub gap: f64,
    /// `None` for a failed replicate.
    pub decision: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub axis_value: f64,
    pub mode: &'static str,
    pub mean_gap: f64,
    pub sd_gap: f64,
    pub frac_xtoy: f64,
    /// Successful rows in the cell.
    pub n_rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<Aggregate>,
    /// Messages of failed replicates, aligned with their row index.
    pub failures: Vec<(usize, Error)>,
}

impl SweepResult {
    pub fn aggregate_for(&self, axis_value: f64, mode: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.axis_value == axis_value && a.mode == mode)
    }
}

/// Per-cell summaries, in order of first appearance. Failed rows are
/// excluded; the standard deviation uses the n - 1 denominator.
pub fn aggregate(rows: &[SweepRow]) -> Vec<Aggregate> {
    let mut cells: Vec<(f64, &'static str, Vec<&SweepRow>)> = Vec::new();
    for row in rows {
        match cells
            .iter_mut()
            .find(|c| c.0.to_bits() == row.axis_value.to_bits() && c.1 == row.mode)
        {
            Some(c) => c.2.push(row),
            None => cells.push((row.axis_value, row.mode, vec![row])),
        }
    }
    cells
        .into_iter()
        .map(|(axis_value, mode, members)| {
            let ok: Vec<&SweepRow> = members.into_iter().filter(|r| r.decision.is_some()).collect();
            let gaps: Vec<f64> = ok.iter().map(|r| r.gap).collect();
            let xtoy = ok.iter().filter(|r| r.decision == Some(Direction::XtoY)).count();
            Aggregate {
                axis_value,
                mode,
                mean_gap: if gaps.is_empty() { f64::NAN } else { mean(&gaps) },
                sd_gap: sample_sd(&gaps),
                frac_xtoy: if ok.is_empty() {
                    f64::NAN
                } else {
                    xtoy as f64 / ok.len() as f64
                },
                n_rows: ok.len(),
            }
        })
        .collect()
}

struct Task {
    axis_value: f64,
    mode: EstimationMode,
    repetition: usize,
    seed: u64,
}

fn run_task(spec: &SweepSpec, task: &Task) -> Result<DirectionScore> {
    let mut base = spec.base;
    let mut config = spec.infer_config.clone();
    match &spec.axis {
        SweepAxis::BandwidthGeometric { .. } => {
            config.regression_bandwidth = BandwidthSpec::Fixed {
                value: task.axis_value,
                scale: Scale::SampleSd,
            };
        }
        SweepAxis::SampleSize(_) => base.n = task.axis_value as usize,
        SweepAxis::NoisePower(_) => base.q = task.axis_value,
        SweepAxis::Nonlinearity(_) => base.b = task.axis_value,
    }
    config.mode = task.mode;
    config.seed = task.seed;
    let sample = sample_anm(&base.anm(), base.n, task.seed)?;
    score_direction(&sample, &config)
}

/// Runs every (axis value, mode, repetition) cell on the current rayon
/// pool. Replicate `r` uses seed `config.seed + r` for both data and
/// inference. Row order is deterministic.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for axis_value in spec.axis.values() {
        for mode_index in 0..spec.modes(0).len() {
            for repetition in 0..spec.repetitions {
                let seed = spec.infer_config.seed.wrapping_add(repetition as u64);
                tasks.push(Task {
                    axis_value,
                    mode: spec.modes(seed)[mode_index],
                    repetition,
                    seed,
                });
            }
        }
    }
    let outcomes: Vec<Result<DirectionScore>> = tasks.par_iter().map(|t| run_task(spec, t)).collect();

    let mut rows = Vec::with_capacity(tasks.len());
    let mut failures = Vec::new();
    for (i, (task, outcome)) in tasks.iter().zip(outcomes).enumerate() {
        let row = |c_xy, c_yx, gap, decision| SweepRow {
            axis_value: task.axis_value,
            mode: task.mode.name(),
            repetition: task.repetition,
            seed: task.seed,
            c_xy,
            c_yx,
            gap,
            decision,
        };
        match outcome {
            Ok(s) => rows.push(row(s.c_xy, s.c_yx, s.gap, Some(s.decision))),
            Err(e) => {
                rows.push(row(f64::NAN, f64::NAN, f64::NAN, None));
                failures.push((i, e));
            }
        }
    }
    let aggregates = aggregate(&rows);
    Ok(SweepResult {
        rows,
        aggregates,
        failures,
    })
}

/// Runs a sweep on a dedicated pool of `jobs` threads.
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| run_sweep(spec))
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses two-column numeric CSV text. A first line `x,y` is treated as a
/// header and skipped.
pub fn parse_csv_str(text: &str) -> Result<PairedSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(i + 1, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if i == 0 && record.len() == 2 && record[0].eq_ignore_ascii_case("x") && record[1].eq_ignore_ascii_case("y") {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected 2 columns, found {}", record.len()),
            ));
        }
        let cell = |k: usize| {
            record[k]
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("`{}` is not a number", &record[k])))
        };
        rows.push((cell(0)?, cell(1)?));
    }
    validate_sample(&rows)
}

pub fn ingest_csv(path: impl AsRef<Path>) -> Result<PairedSample> {
    parse_csv_str(&fs::read_to_string(path)?)
}

pub fn write_csv(sample: &PairedSample, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["x", "y"]).map_err(io)?;
    for (x, y) in sample.pairs() {
        w.write_record([format_real(x), format_real(y)]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows.csv` and `aggregates.csv` into `out_dir`.
pub fn emit_results(result: &SweepResult, out_dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let io = |e: csv::Error| Error::Io(e.to_string());

    let rows_path = dir.join("rows.csv");
    let mut w = csv::Writer::from_path(&rows_path).map_err(io)?;
    w.write_record(ROWS_HEADER).map_err(io)?;
    for r in &result.rows {
        w.write_record([
            format_real(r.axis_value),
            r.mode.to_string(),
            r.repetition.to_string(),
            r.seed.to_string(),
            format_real(r.c_xy),
            format_real(r.c_yx),
            format_real(r.gap),
            r.decision.map_or("Error", Direction::name).to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;

    let agg_path = dir.join("aggregates.csv");
    let mut w = csv::Writer::from_path(&agg_path).map_err(io)?;
    w.write_record(AGGREGATES_HEADER).map_err(io)?;
    for a in &result.aggregates {
        w.write_record([
            format_real(a.axis_value),
            a.mode.to_string(),
            format_real(a.mean_gap),
            format_real(a.sd_gap),
            format_real(a.frac_xtoy),
            a.n_rows.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok((rows_path, agg_path))
}

fn mode_name(s: &str, line: usize) -> Result<&'static str> {
    match s {
        "coupled" => Ok("coupled"),
        "decoupled" => Ok("decoupled"),
        other => Err(Error::parse(line, format!("unknown mode `{other}`"))),
    }
}

/// Reads a `rows.csv` written by `emit_results`.
pub fn read_rows(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != ROWS_HEADER.len() {
            return Err(Error::parse(line, "wrong column count"));
        }
        let real = |k: usize| {
            record[k]
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("bad number `{}`", &record[k])))
        };
        let int = |k: usize| {
            record[k]
                .parse::<u64>()
                .map_err(|_| Error::parse(line, format!("bad integer `{}`", &record[k])))
        };
        out.push(SweepRow {
            axis_value: real(0)?,
            mode: mode_name(&record[1], line)?,
            repetition: int(2)? as usize,
            seed: int(3)?,
            c_xy: real(4)?,
            c_yx: real(5)?,
            gap: real(6)?,
            decision: match &record[7] {
                "Error" => None,
                d => Some(d.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?),
            },
        });
    }
    Ok(out)
}

/// Mean over replicates of the average absolute deviation between a
/// cross-validated regressor and the true mechanism, for each sample size.
pub fn excess_risk_curve(
    base: &BaseModel,
    config: &InferenceConfig,
    sizes: &[usize],
    repetitions: usize,
) -> Result<Vec<(usize, f64)>> {
    sizes
        .iter()
        .map(|&n| {
            let spec = base.anm();
            let risks = (0..repetitions)
                .into_par_iter()
                .map(|r| {
                    let seed = config.seed.wrapping_add(r as u64);
                    let s = sample_anm(&spec, n, seed)?;
                    let bound = config.truncation_bound.resolve(s.ys());
                    let h = resolve_bandwidth(
                        &config.regression_bandwidth,
                        config.regressor,
                        s.xs(),
                        s.ys(),
                        config.truncation_bound,
                        seed,
                    )?;
                    let model = fit(config.regressor, s.xs(), s.ys(), h, bound)?;
                    Ok(average_excess_risk(&model, |x| spec.f.eval(x), s.xs()))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((n, mean(&risks)))
        })
        .collect()
}
