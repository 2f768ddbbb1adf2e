//! Synthetic additive-noise data `Y = f(X) + eta` and noise-tail
//! diagnostics.
//!
//! Each draw uses its own child seed derived from the caller's seed, so the
//! covariate stream and the noise stream never share randomness.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use statrs::distribution::{Continuous, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::model::{derive_seed, parse_key_values, PairedSample};

const X_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Smallest sample `tail_diagnostic` accepts.
pub const MIN_TAIL_SAMPLE: usize = 1000;

/// Default Hill tail fractions.
pub const DEFAULT_TAIL_FRACTIONS: [f64; 3] = [0.005, 0.01, 0.02];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    /// `|N|^q * sign(N)` for standard normal `N`. `q = 1` is Gaussian.
    PoweredGaussian {
        q: f64,
    },
    Gaussian {
        sd: f64,
    },
    Laplace {
        scale: f64,
    },
    /// Standard Student t; `dof > 2` keeps the variance finite.
    StudentT {
        dof: f64,
    },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NoiseSpec::PoweredGaussian { q } => q > 0.0 && q.is_finite(),
            NoiseSpec::Gaussian { sd } => sd > 0.0 && sd.is_finite(),
            NoiseSpec::Laplace { scale } => scale > 0.0 && scale.is_finite(),
            NoiseSpec::StudentT { dof } => dof > 2.0 && dof.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid noise parameters: {self}")))
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, t_dist: Option<&StudentT<f64>>) -> f64 {
        match *self {
            NoiseSpec::PoweredGaussian { q } => {
                let z: f64 = rng.sample(StandardNormal);
                z.abs().powf(q).copysign(z)
            }
            NoiseSpec::Gaussian { sd } => sd * rng.sample::<f64, _>(StandardNormal),
            NoiseSpec::Laplace { scale } => {
                // Inverse CDF on u in (-1/2, 1/2).
                let u: f64 = rng.random::<f64>() - 0.5;
                -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            NoiseSpec::StudentT { .. } => t_dist.expect("t distribution").sample(rng),
        }
    }

    /// Probability density of the noise at `t`.
    pub fn density(&self, t: f64) -> f64 {
        match *self {
            NoiseSpec::PoweredGaussian { q } => {
                let a = t.abs();
                if a == 0.0 {
                    return if q < 1.0 {
                        0.0
                    } else if q == 1.0 {
                        normal_pdf(0.0)
                    } else {
                        f64::INFINITY
                    };
                }
                let z = a.powf(1.0 / q);
                normal_pdf(z) * z / (q * a)
            }
            NoiseSpec::Gaussian { sd } => normal_pdf(t / sd) / sd,
            NoiseSpec::Laplace { scale } => (-t.abs() / scale).exp() / (2.0 * scale),
            NoiseSpec::StudentT { dof } => StudentsT::new(0.0, 1.0, dof).map(|d| d.pdf(t)).unwrap_or(0.0),
        }
    }

    /// Half-width outside which the noise has probability below about 1e-9.
    pub fn effective_half_width(&self) -> f64 {
        const Z: f64 = 6.1;
        match *self {
            NoiseSpec::PoweredGaussian { q } => Z.powf(q),
            NoiseSpec::Gaussian { sd } => Z * sd,
            NoiseSpec::Laplace { scale } => 20.0 * scale,
            NoiseSpec::StudentT { dof } => StudentsT::new(0.0, 1.0, dof)
                .map(|d| d.inverse_cdf(1.0 - 1e-7))
                .unwrap_or(1e3),
        }
    }
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::PoweredGaussian { q } => write!(f, "powered-gaussian({q:?})"),
            NoiseSpec::Gaussian { sd } => write!(f, "gaussian({sd:?})"),
            NoiseSpec::Laplace { scale } => write!(f, "laplace({scale:?})"),
            NoiseSpec::StudentT { dof } => write!(f, "student-t({dof:?})"),
        }
    }
}

/// Splits `name(a,b,...)` into the name and its argument strings.
fn call_syntax(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| Error::config(format!("expected `name(args)`, got `{s}`")))?;
    let body = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::config(format!("unclosed argument list in `{s}`")))?;
    let args = if body.trim().is_empty() {
        Vec::new()
    } else {
        body.split(',').map(str::trim).collect()
    };
    Ok((s[..open].trim(), args))
}

fn real_args<const N: usize>(name: &str, args: &[&str]) -> Result<[f64; N]> {
    if args.len() != N {
        return Err(Error::config(format!("`{name}` takes {N} argument(s)")));
    }
    let mut out = [0.0; N];
    for (o, a) in out.iter_mut().zip(args) {
        *o = a
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::config(format!("`{a}` is not a finite number")))?;
    }
    Ok(out)
}

impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_syntax(s)?;
        let spec = match name {
            "powered-gaussian" => {
                let [q] = real_args(name, &args)?;
                NoiseSpec::PoweredGaussian { q }
            }
            "gaussian" => {
                let [sd] = real_args(name, &args)?;
                NoiseSpec::Gaussian { sd }
            }
            "laplace" => {
                let [scale] = real_args(name, &args)?;
                NoiseSpec::Laplace { scale }
            }
            "student-t" => {
                let [dof] = real_args(name, &args)?;
                NoiseSpec::StudentT { dof }
            }
            other => return Err(Error::config(format!("unknown noise `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XDist {
    /// Half-open `[lo, hi)`.
    Uniform {
        lo: f64,
        hi: f64,
    },
    Gaussian {
        sd: f64,
    },
}

impl XDist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            XDist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            XDist::Gaussian { sd } => sd > 0.0 && sd.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid covariate distribution: {self}")))
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            XDist::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            XDist::Gaussian { sd } => normal_pdf(x / sd) / sd,
        }
    }

    /// Interval holding all but a negligible fraction of the mass.
    pub fn effective_support(&self) -> (f64, f64) {
        match *self {
            XDist::Uniform { lo, hi } => (lo, hi),
            XDist::Gaussian { sd } => (-8.5 * sd, 8.5 * sd),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            XDist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            XDist::Gaussian { sd } => sd * rng.sample::<f64, _>(StandardNormal),
        }
    }
}

impl fmt::Display for XDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XDist::Uniform { lo, hi } => write!(f, "uniform({lo:?},{hi:?})"),
            XDist::Gaussian { sd } => write!(f, "gaussian({sd:?})"),
        }
    }
}

impl FromStr for XDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_syntax(s)?;
        let d = match name {
            "uniform" => {
                let [lo, hi] = real_args(name, &args)?;
                XDist::Uniform { lo, hi }
            }
            "gaussian" => {
                let [sd] = real_args(name, &args)?;
                XDist::Gaussian { sd }
            }
            other => return Err(Error::config(format!("unknown covariate distribution `{other}`"))),
        };
        d.validate()?;
        Ok(d)
    }
}

/// Piecewise-linear function through sorted knots, constant beyond the
/// outermost knots.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::config("piecewise-linear table needs at least one knot"));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::config("piecewise-linear knots must be finite"));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::config("piecewise-linear knots must be strictly increasing"));
        }
        Ok(Self { knots })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|&(kx, _)| kx <= x);
        if i == 0 {
            return k[0].1;
        }
        if i == k.len() {
            return k[k.len() - 1].1;
        }
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mechanism {
    /// `b x^3 + x`
    Cubic {
        b: f64,
    },
    /// `a x`
    Linear {
        a: f64,
    },
    Table(PiecewiseLinear),
}

impl Mechanism {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Mechanism::Cubic { b } => b * x * x * x + x,
            Mechanism::Linear { a } => a * x,
            Mechanism::Table(t) => t.eval(x),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::Cubic { b } => write!(f, "cubic({b:?})"),
            Mechanism::Linear { a } => write!(f, "linear({a:?})"),
            Mechanism::Table(t) => {
                f.write_str("table(")?;
                for (i, (x, y)) in t.knots().iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x:?}:{y:?}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_syntax(s)?;
        match name {
            "cubic" => {
                let [b] = real_args(name, &args)?;
                Ok(Mechanism::Cubic { b })
            }
            "linear" => {
                let [a] = real_args(name, &args)?;
                Ok(Mechanism::Linear { a })
            }
            "table" => {
                let knots = args
                    .iter()
                    .map(|a| {
                        let (x, y) = a
                            .split_once(':')
                            .ok_or_else(|| Error::config(format!("knot `{a}` is not `x:y`")))?;
                        let [x, y] = real_args::<2>("knot", &[x.trim(), y.trim()])?;
                        Ok((x, y))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Mechanism::Table(PiecewiseLinear::new(knots)?))
            }
            other => Err(Error::config(format!("unknown mechanism `{other}`"))),
        }
    }
}

/// Additive noise model `Y = f(X) + eta` with `eta` independent of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnmSpec {
    pub x_dist: XDist,
    pub f: Mechanism,
    pub noise: NoiseSpec,
}

pub const ANM_KEYS: [&str; 3] = ["x_dist", "f", "noise"];

impl AnmSpec {
    /// `Y = b X^3 + X + |N|^q sign(N)` with `X ~ Uniform(-2.5, 2.5)`.
    pub fn cubic(b: f64, q: f64) -> Self {
        Self {
            x_dist: XDist::Uniform { lo: -2.5, hi: 2.5 },
            f: Mechanism::Cubic { b },
            noise: NoiseSpec::PoweredGaussian { q },
        }
    }

    /// `Y = a X + s N'` with `X, N'` standard normal.
    pub fn linear_gaussian(a: f64, s: f64) -> Self {
        Self {
            x_dist: XDist::Gaussian { sd: 1.0 },
            f: Mechanism::Linear { a },
            noise: NoiseSpec::Gaussian { sd: s },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x_dist.validate()?;
        self.noise.validate()
    }

    pub fn to_kv_string(&self) -> String {
        format!("x_dist = {}\nf = {}\nnoise = {}\n", self.x_dist, self.f, self.noise)
    }
}

impl FromStr for AnmSpec {
    type Err = Error;

    /// Flat `x_dist`, `f`, `noise` keys, e.g. `f = table(-1:0,0:1,1:0)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut x_dist = None;
        let mut f = None;
        let mut noise = None;
        for e in parse_key_values(s)? {
            let at = |err: Error| Error::parse(e.line, err.to_string());
            match e.key.as_str() {
                "x_dist" => x_dist = Some(e.value.parse().map_err(at)?),
                "f" => f = Some(e.value.parse().map_err(at)?),
                "noise" => noise = Some(e.value.parse().map_err(at)?),
                other => return Err(Error::parse(e.line, format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::config(format!("missing key `{k}`"));
        Ok(Self {
            x_dist: x_dist.ok_or_else(|| missing("x_dist"))?,
            f: f.ok_or_else(|| missing("f"))?,
            noise: noise.ok_or_else(|| missing("noise"))?,
        })
    }
}

pub fn sample_noise(spec: &NoiseSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let t_dist = match *spec {
        NoiseSpec::StudentT { dof } => Some(StudentT::new(dof).map_err(|e| Error::config(format!("student t: {e}")))?),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| spec.draw(&mut rng, t_dist.as_ref())).collect())
}

/// `n` independent draws from a covariate distribution.
pub fn sample_x(dist: &XDist, n: usize, seed: u64) -> Result<Vec<f64>> {
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| dist.draw(&mut rng)).collect())
}

pub fn sample_anm(spec: &AnmSpec, n: usize, seed: u64) -> Result<PairedSample> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let xs = sample_x(&spec.x_dist, n, derive_seed(seed, X_STREAM))?;
    let noise = sample_noise(&spec.noise, n, derive_seed(seed, NOISE_STREAM))?;
    let ys = xs.iter().zip(&noise).map(|(&x, e)| spec.f.eval(x) + e).collect();
    PairedSample::new(xs, ys)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    /// Hill estimate of the survival-function exponent; `+inf` when the
    /// sample has no spread.
    pub exponent: f64,
    /// The log-survival curve keeps at least a linear decay rate far out,
    /// as for an exponentially decreasing tail.
    pub exponential_tail: bool,
}

/// Hill estimator over the `k` largest of `desc` (sorted descending).
pub fn hill_estimate(desc: &[f64], k: usize) -> f64 {
    let threshold = desc[k];
    if threshold <= 0.0 {
        return f64::INFINITY;
    }
    let s: f64 = desc[..k].iter().map(|x| (x / threshold).ln()).sum();
    if s <= 0.0 {
        f64::INFINITY
    } else {
        k as f64 / s
    }
}

fn quantile_sorted(asc: &[f64], p: f64) -> f64 {
    let pos = p * (asc.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < asc.len() {
        asc[i] + frac * (asc[i + 1] - asc[i])
    } else {
        asc[i]
    }
}

/// Ratio of far-tail to body decay rates below which a tail counts as
/// heavier than exponential.
const EXPONENTIAL_RATE_RATIO: f64 = 0.7;

/// Tail diagnostics on absolute deviations from the median. `fractions`
/// are the upper-order fractions averaged (by median) for the Hill
/// estimate.
pub fn tail_diagnostic(values: &[f64], fractions: &[f64]) -> Result<TailReport> {
    let n = values.len();
    if n < MIN_TAIL_SAMPLE {
        return Err(Error::SampleTooSmall {
            needed: MIN_TAIL_SAMPLE,
            got: n,
        });
    }
    if fractions.is_empty() || fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
        return Err(Error::config("tail fractions must lie in (0, 1)"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = quantile_sorted(&sorted, 0.5);
    let mut dev: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
    dev.sort_by(f64::total_cmp);
    if dev[n - 1] == 0.0 {
        return Ok(TailReport {
            exponent: f64::INFINITY,
            exponential_tail: true,
        });
    }

    let desc: Vec<f64> = dev.iter().rev().copied().collect();
    let mut estimates: Vec<f64> = fractions
        .iter()
        .map(|f| {
            let k = ((f * n as f64) as usize).clamp(1, n - 1);
            hill_estimate(&desc, k)
        })
        .collect();
    estimates.sort_by(f64::total_cmp);
    let exponent = quantile_sorted(&estimates, 0.5);

    // Decay rate of -ln S(t) between survival levels 0.5 -> 0.1 (body)
    // and 0.01 -> 0.001 (far tail).
    let rate = |p0: f64, p1: f64| {
        let dt = quantile_sorted(&dev, p1) - quantile_sorted(&dev, p0);
        if dt > 0.0 {
            ((1.0 - p0) / (1.0 - p1)).ln() / dt
        } else {
            f64::INFINITY
        }
    };
    let body = rate(0.5, 0.9);
    let far = rate(0.99, 0.999);
    Ok(TailReport {
        exponent,
        exponential_tail: far >= EXPONENTIAL_RATE_RATIO * body,
    })
}
