//! Domain types, configuration, and seed discipline.
//!
//! Configuration files are flat UTF-8 `key = value` lines. Blank lines and
//! lines starting with `#` are ignored; repeated or unknown keys are errors.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::Kernel;

/// Observed (x, y) pairs. Both columns have the same length and hold only
/// finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PairedSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(row) = xs.iter().zip(&ys).position(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFiniteValue { row });
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// The same sample with the roles of the two variables exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
        }
    }

    /// Applies `x -> a x + b`, `y -> c y + d` to every pair.
    pub fn affine(&self, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(
            self.xs.iter().map(|x| a * x + b).collect(),
            self.ys.iter().map(|y| c * y + d).collect(),
        )
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

pub fn validate_sample(raw: &[(f64, f64)]) -> Result<PairedSample> {
    let (xs, ys) = raw.iter().copied().unzip();
    PairedSample::new(xs, ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    XtoY,
    YtoX,
    Abstain,
}

impl Direction {
    /// Process exit code for the `infer` command.
    pub fn exit_code(self) -> i32 {
        match self {
            Direction::XtoY => 0,
            Direction::YtoX => 1,
            Direction::Abstain => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::XtoY => "XtoY",
            Direction::YtoX => "YtoX",
            Direction::Abstain => "Abstain",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "XtoY" => Ok(Direction::XtoY),
            "YtoX" => Ok(Direction::YtoX),
            "Abstain" => Ok(Direction::Abstain),
            other => Err(Error::config(format!("unknown direction `{other}`"))),
        }
    }
}

/// Whether regressions and residual entropies share the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimationMode {
    Coupled,
    /// Regressions on one half, residual entropies on the other.
    Decoupled {
        split_seed: u64,
    },
}

impl EstimationMode {
    pub fn name(self) -> &'static str {
        match self {
            EstimationMode::Coupled => "coupled",
            EstimationMode::Decoupled { .. } => "decoupled",
        }
    }
}

/// Unit in which bandwidth values are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scale {
    #[default]
    Absolute,
    /// Multiples of the sample standard deviation of the smoothed variable.
    SampleSd,
}

impl Scale {
    pub fn factor(self, values: &[f64]) -> f64 {
        match self {
            Scale::Absolute => 1.0,
            Scale::SampleSd => sample_sd(values),
        }
    }
}

/// Candidate bandwidths for a grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub values: Vec<f64>,
    pub scale: Scale,
}

impl Grid {
    pub fn absolute(values: Vec<f64>) -> Self {
        Self {
            values,
            scale: Scale::Absolute,
        }
    }

    /// `count` log-spaced points from `lo` to `hi` inclusive.
    pub fn geometric(lo: f64, hi: f64, count: usize, scale: Scale) -> Self {
        Self {
            values: geometric_points(lo, hi, count),
            scale,
        }
    }

    pub fn resolve(&self, data: &[f64]) -> Vec<f64> {
        let f = self.scale.factor(data);
        self.values.iter().map(|v| v * f).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            scale: self.scale,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config("bandwidth grid is empty"));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::config("bandwidth grid values must be positive"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("bandwidth grid must be strictly increasing"));
        }
        Ok(())
    }
}

pub fn geometric_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        lo * (ratio * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// How a bandwidth is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum BandwidthSpec {
    Fixed {
        value: f64,
        scale: Scale,
    },
    /// `c * n^-exponent`.
    TheorySchedule {
        c: f64,
        exponent: f64,
        scale: Scale,
    },
    CrossValidation {
        folds: usize,
        grid: Grid,
    },
    LooLikelihood {
        grid: Grid,
    },
}

impl BandwidthSpec {
    pub fn fixed(value: f64) -> Self {
        BandwidthSpec::Fixed {
            value,
            scale: Scale::Absolute,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BandwidthSpec::Fixed { value, .. } => {
                if !(value.is_finite() && *value > 0.0) {
                    return Err(Error::config("fixed bandwidth must be positive"));
                }
            }
            BandwidthSpec::TheorySchedule { c, exponent, .. } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::config("schedule constant must be positive"));
                }
                if !(*exponent > 0.0 && *exponent < 1.0) {
                    return Err(Error::config("schedule exponent must lie in (0, 1)"));
                }
            }
            BandwidthSpec::CrossValidation { folds, grid } => {
                if *folds < 2 {
                    return Err(Error::config("cross-validation needs at least 2 folds"));
                }
                grid.validate()?;
            }
            BandwidthSpec::LooLikelihood { grid } => grid.validate()?,
        }
        Ok(())
    }

    /// Multiplies every absolute bandwidth value by `factor`. Values in
    /// sample-sd units are left alone since they rescale with the data.
    pub fn scaled(&self, factor: f64) -> Self {
        let by = |scale: Scale| if scale == Scale::Absolute { factor } else { 1.0 };
        match self {
            BandwidthSpec::Fixed { value, scale } => BandwidthSpec::Fixed {
                value: value * by(*scale),
                scale: *scale,
            },
            BandwidthSpec::TheorySchedule { c, exponent, scale } => BandwidthSpec::TheorySchedule {
                c: c * by(*scale),
                exponent: *exponent,
                scale: *scale,
            },
            BandwidthSpec::CrossValidation { folds, grid } => BandwidthSpec::CrossValidation {
                folds: *folds,
                grid: grid.scaled(by(grid.scale)),
            },
            BandwidthSpec::LooLikelihood { grid } => BandwidthSpec::LooLikelihood {
                grid: grid.scaled(by(grid.scale)),
            },
        }
    }
}

fn fmt_grid(grid: &Grid, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, v) in grid.values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v:?}")?;
    }
    fmt_scale(grid.scale, f)
}

fn fmt_scale(scale: Scale, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match scale {
        Scale::Absolute => Ok(()),
        Scale::SampleSd => f.write_str("*sd"),
    }
}

impl fmt::Display for BandwidthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthSpec::Fixed { value, scale } => {
                write!(f, "fixed:{value:?}")?;
                fmt_scale(*scale, f)
            }
            BandwidthSpec::TheorySchedule { c, exponent, scale } => {
                write!(f, "theory:{c:?}:{exponent:?}")?;
                fmt_scale(*scale, f)
            }
            BandwidthSpec::CrossValidation { folds, grid } => {
                write!(f, "cv:{folds}:")?;
                fmt_grid(grid, f)
            }
            BandwidthSpec::LooLikelihood { grid } => {
                f.write_str("loo:")?;
                fmt_grid(grid, f)
            }
        }
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(Error::config(format!("`{}` is not finite", s.trim())));
    }
    Ok(v)
}

fn parse_uint<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::config(format!("`{}` is not a non-negative integer", s.trim())))
}

fn split_scale(s: &str) -> (&str, Scale) {
    let s = s.trim();
    match s.strip_suffix("*sd") {
        Some(rest) => (rest.trim_end(), Scale::SampleSd),
        None => (s, Scale::Absolute),
    }
}

fn parse_grid(s: &str) -> Result<Grid> {
    let (body, scale) = split_scale(s);
    if let Some(args) = body.strip_prefix("geom(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::config("geom grid takes (lo, hi, count)"));
        }
        let lo = parse_real(parts[0])?;
        let hi = parse_real(parts[1])?;
        let count: usize = parse_uint(parts[2])?;
        if !(lo > 0.0 && hi > lo) || count == 0 || count > 10_000 {
            return Err(Error::config("geom grid needs 0 < lo < hi and 1 <= count <= 10000"));
        }
        return Ok(Grid::geometric(lo, hi, count, scale));
    }
    let values = body.split(',').map(parse_real).collect::<Result<Vec<_>>>()?;
    Ok(Grid { values, scale })
}

impl FromStr for BandwidthSpec {
    type Err = Error;

    /// Accepted forms: `fixed:V`, `theory:C:EXP`, `cv:FOLDS:GRID`, `loo:GRID`,
    /// where GRID is `v1,v2,...` or `geom(lo,hi,count)`. A trailing `*sd`
    /// expresses values in units of the sample standard deviation.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::config(format!("bandwidth `{s}` lacks a `kind:` prefix")))?;
        let spec = match kind.trim() {
            "fixed" => {
                let (v, scale) = split_scale(rest);
                BandwidthSpec::Fixed {
                    value: parse_real(v)?,
                    scale,
                }
            }
            "theory" => {
                let (body, scale) = split_scale(rest);
                let (c, e) = body
                    .split_once(':')
                    .ok_or_else(|| Error::config("theory bandwidth takes C:EXPONENT"))?;
                BandwidthSpec::TheorySchedule {
                    c: parse_real(c)?,
                    exponent: parse_real(e)?,
                    scale,
                }
            }
            "cv" => {
                let (folds, grid) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::config("cv bandwidth takes FOLDS:GRID"))?;
                BandwidthSpec::CrossValidation {
                    folds: parse_uint(folds)?,
                    grid: parse_grid(grid)?,
                }
            }
            "loo" => BandwidthSpec::LooLikelihood {
                grid: parse_grid(rest)?,
            },
            other => return Err(Error::config(format!("unknown bandwidth kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regressor {
    BoxKernel,
    NadarayaWatson(Kernel),
    KernelRidge { lambda: f64 },
}

pub const DEFAULT_RIDGE_LAMBDA: f64 = 0.1;

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regressor::BoxKernel => f.write_str("box"),
            Regressor::NadarayaWatson(k) => write!(f, "nadaraya-watson:{k}"),
            Regressor::KernelRidge { lambda } => write!(f, "kernel-ridge:{lambda:?}"),
        }
    }
}

impl FromStr for Regressor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("box", None) => Ok(Regressor::BoxKernel),
            ("nadaraya-watson", None) => Ok(Regressor::NadarayaWatson(Kernel::Gaussian)),
            ("nadaraya-watson", Some(k)) => Ok(Regressor::NadarayaWatson(k.parse()?)),
            ("kernel-ridge", None) => Ok(Regressor::KernelRidge {
                lambda: DEFAULT_RIDGE_LAMBDA,
            }),
            ("kernel-ridge", Some(l)) => {
                let lambda = parse_real(l)?;
                if lambda <= 0.0 {
                    return Err(Error::config("ridge penalty must be positive"));
                }
                Ok(Regressor::KernelRidge { lambda })
            }
            _ => Err(Error::config(format!("unknown regressor `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Three times the largest absolute training response.
    Auto,
    Bound(f64),
}

impl Truncation {
    pub fn resolve(self, response: &[f64]) -> f64 {
        match self {
            Truncation::Auto => 3.0 * response.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            Truncation::Bound(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    /// The Gaussian kernel is not compactly supported, which the coupled
    /// consistency guarantee requires.
    NonCompactKernelCoupled,
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::NonCompactKernelCoupled => {
                f.write_str("gaussian entropy kernel in coupled mode: the kernel is not compactly supported")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceConfig {
    pub mode: EstimationMode,
    pub regressor: Regressor,
    pub regression_bandwidth: BandwidthSpec,
    pub entropy_bandwidth: BandwidthSpec,
    pub entropy_kernel: Kernel,
    pub truncation_bound: Truncation,
    pub tau0: f64,
    pub tau_exponent: f64,
    pub seed: u64,
}

pub const CONFIG_KEYS: [&str; 9] = [
    "mode",
    "regressor",
    "regression_bandwidth",
    "entropy_bandwidth",
    "entropy_kernel",
    "truncation_bound",
    "tau0",
    "tau_exponent",
    "seed",
];

/// Decision threshold used by the command-line tool.
pub const CLI_TAU0: f64 = 0.5;
pub const DEFAULT_TAU_EXPONENT: f64 = 0.25;

impl Default for InferenceConfig {
    /// Raw score reporting: `tau0 = 0`, so any nonzero gap decides.
    fn default() -> Self {
        Self {
            mode: EstimationMode::Coupled,
            regressor: Regressor::BoxKernel,
            regression_bandwidth: BandwidthSpec::CrossValidation {
                folds: 5,
                grid: Grid::geometric(0.01, 1.0, 20, Scale::SampleSd),
            },
            entropy_bandwidth: BandwidthSpec::LooLikelihood {
                grid: Grid::geometric(1e-3, 10.0, 30, Scale::SampleSd),
            },
            entropy_kernel: Kernel::Biweight,
            truncation_bound: Truncation::Auto,
            tau0: 0.0,
            tau_exponent: DEFAULT_TAU_EXPONENT,
            seed: 0,
        }
    }
}

impl InferenceConfig {
    pub fn cli_default() -> Self {
        Self {
            tau0: CLI_TAU0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.regression_bandwidth.validate()?;
        self.entropy_bandwidth.validate()?;
        if matches!(self.regression_bandwidth, BandwidthSpec::LooLikelihood { .. }) {
            return Err(Error::config(
                "regression_bandwidth cannot use leave-one-out likelihood",
            ));
        }
        if matches!(self.entropy_bandwidth, BandwidthSpec::CrossValidation { .. }) {
            return Err(Error::config(
                "entropy_bandwidth cannot use regression cross-validation",
            ));
        }
        if self.entropy_kernel == Kernel::Uniform {
            return Err(Error::config(
                "entropy_kernel must be biweight, epanechnikov or gaussian",
            ));
        }
        if let Regressor::KernelRidge { lambda } = self.regressor {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::config("ridge penalty must be positive"));
            }
        }
        if let Truncation::Bound(b) = self.truncation_bound {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::config("truncation_bound must be positive"));
            }
        }
        if !(self.tau0 >= 0.0 && self.tau0.is_finite()) {
            return Err(Error::config("tau0 must be non-negative"));
        }
        if !(self.tau_exponent > 0.0 && self.tau_exponent <= 1.0) {
            return Err(Error::config("tau_exponent must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<ConfigWarning> {
        let mut out = Vec::new();
        if self.entropy_kernel == Kernel::Gaussian && self.mode == EstimationMode::Coupled {
            out.push(ConfigWarning::NonCompactKernelCoupled);
        }
        out
    }

    /// Parses a flat config, starting from `base` for keys that are absent.
    pub fn parse_with_base(text: &str, base: InferenceConfig) -> Result<Self> {
        let entries = parse_key_values(text)?;
        let mut cfg = base;
        let mut mode_text: Option<(usize, String)> = None;
        for e in &entries {
            let at = |err: Error| Error::parse(e.line, err.to_string());
            match e.key.as_str() {
                "mode" => mode_text = Some((e.line, e.value.clone())),
                "regressor" => cfg.regressor = e.value.parse().map_err(at)?,
                "regression_bandwidth" => cfg.regression_bandwidth = e.value.parse().map_err(at)?,
                "entropy_bandwidth" => cfg.entropy_bandwidth = e.value.parse().map_err(at)?,
                "entropy_kernel" => cfg.entropy_kernel = e.value.parse().map_err(at)?,
                "truncation_bound" => {
                    cfg.truncation_bound = if e.value == "auto" {
                        Truncation::Auto
                    } else {
                        Truncation::Bound(parse_real(&e.value).map_err(at)?)
                    }
                }
                "tau0" => cfg.tau0 = parse_real(&e.value).map_err(at)?,
                "tau_exponent" => cfg.tau_exponent = parse_real(&e.value).map_err(at)?,
                "seed" => cfg.seed = parse_uint(&e.value).map_err(at)?,
                other => return Err(Error::parse(e.line, format!("unknown key `{other}`"))),
            }
        }
        // The split seed defaults to the run seed, so resolve mode last.
        if let Some((line, m)) = mode_text {
            cfg.mode = match m.split_once(':') {
                None if m == "coupled" => EstimationMode::Coupled,
                None if m == "decoupled" => EstimationMode::Decoupled { split_seed: cfg.seed },
                Some(("decoupled", s)) => EstimationMode::Decoupled {
                    split_seed: parse_uint(s).map_err(|e| Error::parse(line, e.to_string()))?,
                },
                _ => return Err(Error::parse(line, format!("unknown mode `{m}`"))),
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv_string(&self) -> String {
        let mode = match self.mode {
            EstimationMode::Coupled => "coupled".to_string(),
            EstimationMode::Decoupled { split_seed } => format!("decoupled:{split_seed}"),
        };
        let truncation = match self.truncation_bound {
            Truncation::Auto => "auto".to_string(),
            Truncation::Bound(b) => format!("{b:?}"),
        };
        format!(
            "mode = {mode}\nregressor = {}\nregression_bandwidth = {}\nentropy_bandwidth = {}\n\
             entropy_kernel = {}\ntruncation_bound = {truncation}\ntau0 = {:?}\n\
             tau_exponent = {:?}\nseed = {}\n",
            self.regressor,
            self.regression_bandwidth,
            self.entropy_bandwidth,
            self.entropy_kernel,
            self.tau0,
            self.tau_exponent,
            self.seed
        )
    }
}

impl FromStr for InferenceConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_base(s, Self::default())
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits flat config text into entries. Lines are 1-based.
pub fn parse_key_values(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (k, v) = trimmed
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::parse(line, "empty key"));
        }
        if out.iter().any(|e| e.key == key) {
            return Err(Error::parse(line, format!("duplicate key `{key}`")));
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

/// The decision margin `tau0 * n^-tau_exponent`.
pub fn compute_tau(n: usize, tau0: f64, tau_exponent: f64) -> f64 {
    tau0 * (n as f64).powf(-tau_exponent)
}

/// Both complexity scores with their components.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionScore {
    pub h_x: f64,
    pub h_y: f64,
    pub h_res_fwd: f64,
    pub h_res_bwd: f64,
    pub c_xy: f64,
    pub c_yx: f64,
    pub gap: f64,
    pub tau: f64,
    pub decision: Direction,
}

impl DirectionScore {
    pub fn to_kv_string(&self) -> String {
        format!(
            "h_x={:?}\nh_y={:?}\nh_res_fwd={:?}\nh_res_bwd={:?}\nc_xy={:?}\nc_yx={:?}\ngap={:?}\ntau={:?}\ndecision={}\n",
            self.h_x,
            self.h_y,
            self.h_res_fwd,
            self.h_res_bwd,
            self.c_xy,
            self.c_yx,
            self.gap,
            self.tau,
            self.decision
        )
    }
}

/// Child seed for an independent random stream. SplitMix64 finalizer over
/// the parent seed offset by a per-stream constant, so adding a new stream
/// never perturbs existing ones.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the n - 1 denominator; 0 for fewer than
/// two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        let s = validate_sample(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.xs(), &[0.0, 1.0]);
        assert_eq!(
            validate_sample(&[(0.0, f64::NAN)]),
            Err(Error::NonFiniteValue { row: 0 })
        );
        assert_eq!(validate_sample(&[]), Err(Error::EmptySample));
        assert_eq!(
            validate_sample(&[(0.0, 1.0), (f64::INFINITY, 2.0)]),
            Err(Error::NonFiniteValue { row: 1 })
        );
        assert_eq!(
            PairedSample::new(vec![1.0], vec![]),
            Err(Error::LengthMismatch { xs: 1, ys: 0 })
        );
    }

    #[test]
    fn tau_examples() {
        assert_eq!(compute_tau(100, 0.0, 0.25), 0.0);
        assert_eq!(compute_tau(1, 0.5, 0.25), 0.5);
        // 10000^-0.25 = 10^-1
        assert!((compute_tau(10_000, 1.0, 0.25) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn bandwidth_parse_forms() {
        assert_eq!("fixed:0.3".parse::<BandwidthSpec>().unwrap(), BandwidthSpec::fixed(0.3));
        let cv: BandwidthSpec = "cv:5:geom(0.01,1,3)*sd".parse().unwrap();
        match cv {
            BandwidthSpec::CrossValidation { folds, grid } => {
                assert_eq!(folds, 5);
                assert_eq!(grid.scale, Scale::SampleSd);
                assert_eq!(grid.values.len(), 3);
                assert!((grid.values[1] - 0.1).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!("loo:0.2,0.1".parse::<BandwidthSpec>().is_err());
        assert!("loo:".parse::<BandwidthSpec>().is_err());
        assert!("cv:1:0.1".parse::<BandwidthSpec>().is_err());
        assert!("theory:1:1.5".parse::<BandwidthSpec>().is_err());
        assert!("fixed:-1".parse::<BandwidthSpec>().is_err());
    }

    #[test]
    fn config_parse_and_errors() {
        let text = "# comment\nmode = decoupled\nseed = 7\ntau0=0.5\nentropy_kernel = gaussian\n";
        let cfg: InferenceConfig = text.parse().unwrap();
        assert_eq!(cfg.mode, EstimationMode::Decoupled { split_seed: 7 });
        assert_eq!(cfg.tau0, 0.5);
        assert!(cfg.warnings().is_empty());

        let coupled: InferenceConfig = "entropy_kernel = gaussian".parse().unwrap();
        assert_eq!(coupled.warnings(), vec![ConfigWarning::NonCompactKernelCoupled]);

        let err = "seed = 1\nbandwidth = 3\n".parse::<InferenceConfig>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!("seed = 1\nseed = 2".parse::<InferenceConfig>().is_err());
        assert!("tau_exponent = 0".parse::<InferenceConfig>().is_err());
        assert!("regression_bandwidth = loo:0.1".parse::<InferenceConfig>().is_err());
        assert!("mode".parse::<InferenceConfig>().is_err());
    }

    #[test]
    fn derived_seeds_differ_by_stream() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(42, 0));
        assert_ne!(derive_seed(43, 0), a);
    }

    fn arb_scale() -> impl Strategy<Value = Scale> {
        prop_oneof![Just(Scale::Absolute), Just(Scale::SampleSd)]
    }

    fn arb_grid() -> impl Strategy<Value = Grid> {
        (prop::collection::vec(1e-4f64..10.0, 1..6), arb_scale()).prop_map(|(mut v, scale)| {
            v.sort_by(f64::total_cmp);
            v.dedup();
            Grid { values: v, scale }
        })
    }

    fn arb_bandwidth() -> impl Strategy<Value = BandwidthSpec> {
        prop_oneof![
            (1e-4f64..10.0, arb_scale()).prop_map(|(value, scale)| BandwidthSpec::Fixed { value, scale }),
            (1e-3f64..10.0, 0.01f64..0.99, arb_scale())
                .prop_map(|(c, exponent, scale)| BandwidthSpec::TheorySchedule { c, exponent, scale }),
            (2usize..20, arb_grid()).prop_map(|(folds, grid)| BandwidthSpec::CrossValidation { folds, grid }),
            arb_grid().prop_map(|grid| BandwidthSpec::LooLikelihood { grid }),
        ]
    }

    proptest! {
        #[test]
        fn bandwidth_display_round_trips(spec in arb_bandwidth()) {
            let back: BandwidthSpec = spec.to_string().parse().unwrap();
            prop_assert_eq!(back, spec);
        }

        #[test]
        fn config_text_round_trips(seed in any::<u64>(), tau0 in 0.0f64..3.0, exp in 0.01f64..1.0,
                                   split in any::<u64>(), decoupled in any::<bool>()) {
            let cfg = InferenceConfig {
                mode: if decoupled { EstimationMode::Decoupled { split_seed: split } } else { EstimationMode::Coupled },
                tau0,
                tau_exponent: exp,
                seed,
                ..InferenceConfig::default()
            };
            let back: InferenceConfig = cfg.to_kv_string().parse().unwrap();
            prop_assert_eq!(back, cfg);
        }

        #[test]
        fn tau_decreases_in_n(n in 1usize..1_000_000, tau0 in 0.01f64..10.0, exp in 0.01f64..=1.0) {
            prop_assert!(compute_tau(n + 1, tau0, exp) < compute_tau(n, tau0, exp));
            prop_assert!(compute_tau(n, tau0, exp) >= 0.0);
        }

        #[test]
        fn validation_is_order_independent(mut rows in prop::collection::vec(
            (prop_oneof![-1e6f64..1e6, Just(f64::NAN)], -1e6f64..1e6), 0..30), rot in 0usize..30) {
            let before = validate_sample(&rows).is_ok();
            if !rows.is_empty() {
                let k = rot % rows.len();
                rows.rotate_left(k);
                rows.reverse();
            }
            prop_assert_eq!(validate_sample(&rows).is_ok(), before);
        }
    }
}
