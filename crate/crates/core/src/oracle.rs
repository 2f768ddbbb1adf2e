//! Reference values computed independently of the estimators: closed-form
//! entropies, deterministic quadrature, and both sides of the entropy
//! identity
//!
//! ```text
//! H(X) + H(Y - f(X)) = H(Y) + H(X - g(Y)) - [ I(X - g(Y), Y) - I(Y - f(X), X) ]
//! ```
//!
//! which holds for any functions `f`, `g` by the chain rule.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{derive_seed, geometric_points};
use crate::synth::{sample_anm, sample_noise, sample_x, AnmSpec, NoiseSpec, XDist};

/// Tolerance on total mass before `numeric_entropy` warns.
pub const MASS_TOLERANCE: f64 = 1e-3;

/// Points in the tabulated conditional mean `E[X | y]`.
pub const CONDITIONAL_MEAN_POINTS: usize = 2001;

/// Minimum Monte Carlo size for the mutual-information terms.
pub const MIN_MONTE_CARLO: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticDist {
    Gaussian { sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Laplace { scale: f64 },
}

impl AnalyticDist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AnalyticDist::Gaussian { sd } => sd > 0.0,
            AnalyticDist::Uniform { lo, hi } => lo < hi,
            AnalyticDist::Laplace { scale } => scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid distribution {self:?}")))
        }
    }

    pub fn density(&self, t: f64) -> f64 {
        match *self {
            AnalyticDist::Gaussian { sd } => (-0.5 * (t / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt()),
            AnalyticDist::Uniform { lo, hi } => {
                if (lo..=hi).contains(&t) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            AnalyticDist::Laplace { scale } => (-t.abs() / scale).exp() / (2.0 * scale),
        }
    }

    /// Interval covering the density up to a negligible tail.
    pub fn integration_range(&self) -> (f64, f64) {
        match *self {
            AnalyticDist::Gaussian { sd } => (-10.0 * sd, 10.0 * sd),
            AnalyticDist::Uniform { lo, hi } => (lo, hi),
            AnalyticDist::Laplace { scale } => (-40.0 * scale, 40.0 * scale),
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match *self {
            AnalyticDist::Gaussian { sd } => sample_noise(&NoiseSpec::Gaussian { sd }, n, seed),
            AnalyticDist::Uniform { lo, hi } => sample_x(&XDist::Uniform { lo, hi }, n, seed),
            AnalyticDist::Laplace { scale } => sample_noise(&NoiseSpec::Laplace { scale }, n, seed),
        }
    }
}

pub fn analytic_entropy(dist: &AnalyticDist) -> f64 {
    match *dist {
        AnalyticDist::Gaussian { sd } => 0.5 * (2.0 * PI * E * sd * sd).ln(),
        AnalyticDist::Uniform { lo, hi } => (hi - lo).ln(),
        AnalyticDist::Laplace { scale } => 1.0 + (2.0 * scale).ln(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleWarning {
    /// The density's trapezoid mass missed 1 by more than `MASS_TOLERANCE`.
    NonNormalized { mass: f64 },
}

impl fmt::Display for OracleWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleWarning::NonNormalized { mass } => write!(f, "density integrates to {mass}, not 1"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericEntropy {
    pub value: f64,
    pub mass: f64,
    pub warning: Option<OracleWarning>,
}

fn neg_p_ln_p(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Composite-trapezoid entropy of tabulated density values on a uniform
/// grid with spacing `step`.
fn entropy_of_table(values: &[f64], step: f64) -> NumericEntropy {
    let ends = |f: &dyn Fn(f64) -> f64| {
        let inner: f64 = values[1..values.len() - 1].iter().map(|&p| f(p)).sum();
        step * (inner + 0.5 * (f(values[0]) + f(values[values.len() - 1])))
    };
    let value = ends(&neg_p_ln_p);
    let mass = ends(&|p| p);
    let warning = ((mass - 1.0).abs() > MASS_TOLERANCE).then_some(OracleWarning::NonNormalized { mass });
    NumericEntropy { value, mass, warning }
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| if i == points - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

/// `-∫ p ln p` over `[lo, hi]` by the composite trapezoid rule on
/// `grid_points` equally spaced nodes, taking `0 ln 0 = 0`.
pub fn numeric_entropy(density: impl Fn(f64) -> f64, lo: f64, hi: f64, grid_points: usize) -> Result<NumericEntropy> {
    if grid_points < 100 {
        return Err(Error::config("numeric entropy needs at least 100 grid points"));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::config("integration range must satisfy lo < hi"));
    }
    let values: Vec<f64> = linspace(lo, hi, grid_points).into_iter().map(density).collect();
    if values.iter().any(|p| p.is_nan() || *p < 0.0 || p.is_infinite()) {
        return Err(Error::config("density must be finite and non-negative on the grid"));
    }
    Ok(entropy_of_table(&values, (hi - lo) / (grid_points - 1) as f64))
}

/// A linear combination of logarithms, kept symbolic so that algebraically
/// equal expressions evaluate to bit-identical floats.
#[derive(Debug, Default, Clone)]
struct LogTerms(BTreeMap<u64, f64>);

impl LogTerms {
    /// Adds `coef * ln(x)`.
    fn add(mut self, coef: f64, x: f64) -> Self {
        *self.0.entry(x.to_bits()).or_insert(0.0) += coef;
        self
    }

    fn plus(mut self, other: &LogTerms) -> Self {
        for (k, c) in &other.0 {
            *self.0.entry(*k).or_insert(0.0) += c;
        }
        self
    }

    fn eval(&self) -> f64 {
        self.0
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| c * f64::from_bits(*k).ln())
            .sum()
    }
}

/// Both sides of the identity with every term that enters them.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Sides {
    pub h_x: f64,
    pub h_y: f64,
    pub h_res_fwd: f64,
    pub h_res_bwd: f64,
    /// I(Y - f(X), X)
    pub mi_fwd: f64,
    /// I(X - g(Y), Y)
    pub mi_bwd: f64,
    pub left: f64,
    pub right: f64,
    pub discrepancy: f64,
    pub warnings: Vec<OracleWarning>,
}

/// Closed form for `X ~ N(0,1)`, `Y = aX + eta`, `eta ~ N(0, s^2)`, with
/// `f(x) = a x` and `g(y) = a y / (a^2 + s^2)`. Both residuals are jointly
/// Gaussian with and uncorrelated to their regressors, so both mutual
/// informations vanish.
pub fn lemma1_check_linear_gaussian(a: f64, s: f64) -> Result<Lemma1Sides> {
    if !(s > 0.0 && s.is_finite() && a.is_finite()) {
        return Err(Error::config("linear-Gaussian check needs finite a and s > 0"));
    }
    let two_pi_e = 2.0 * PI * E;
    let var_y = a * a + s * s;
    let s2 = s * s;
    let gauss = |var_terms: LogTerms| LogTerms::default().add(0.5, two_pi_e).plus(&var_terms);
    let h_x = gauss(LogTerms::default());
    let h_y = gauss(LogTerms::default().add(0.5, var_y));
    let h_fwd = gauss(LogTerms::default().add(0.5, s2));
    // Var(X - g(Y)) = s^2 / (a^2 + s^2)
    let h_bwd = gauss(LogTerms::default().add(0.5, s2).add(-0.5, var_y));

    let left = h_x.clone().plus(&h_fwd);
    let right = h_y.clone().plus(&h_bwd);
    let (left, right) = (left.eval(), right.eval());
    Ok(Lemma1Sides {
        h_x: h_x.eval(),
        h_y: h_y.eval(),
        h_res_fwd: h_fwd.eval(),
        h_res_bwd: h_bwd.eval(),
        mi_fwd: 0.0,
        mi_bwd: 0.0,
        left,
        right,
        discrepancy: (left - right).abs(),
        warnings: Vec::new(),
    })
}

/// Equal-frequency bin index of every value: `bins` bins cut at the
/// sample's own quantiles.
fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank * bins / n;
    }
    out
}

/// Plug-in mutual information (nats) of a 2-D histogram with `bins`
/// equal-frequency bins per axis.
pub fn histogram_mutual_information(a: &[f64], b: &[f64], bins: usize) -> f64 {
    let n = a.len();
    let ba = quantile_bins(a, bins);
    let bb = quantile_bins(b, bins);
    let mut joint = vec![0usize; bins * bins];
    let mut ma = vec![0usize; bins];
    let mut mb = vec![0usize; bins];
    for i in 0..n {
        joint[ba[i] * bins + bb[i]] += 1;
        ma[ba[i]] += 1;
        mb[bb[i]] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let c = joint[i * bins + j];
            if c > 0 {
                let p = c as f64 / nf;
                mi += p * (p * nf * nf / (ma[i] as f64 * mb[j] as f64)).ln();
            }
        }
    }
    mi
}

fn trapezoid_weights(points: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; points];
    w[0] *= 0.5;
    w[points - 1] *= 0.5;
    w
}

fn interpolate(grid: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= grid[0] {
        return values[0];
    }
    if t >= grid[grid.len() - 1] {
        return values[values.len() - 1];
    }
    let step = grid[1] - grid[0];
    let i = (((t - grid[0]) / step) as usize).min(grid.len() - 2);
    let frac = (t - grid[i]) / step;
    values[i] + frac * (values[i + 1] - values[i])
}

/// Numeric check of the identity for a generator spec.
///
/// `f(x) = E[Y | x]` is the spec's mechanism (all noises are centred);
/// `g(y) = E[X | y]` is integrated numerically and tabulated over the
/// central 99.9% of Y. Entropies come from `n_grid`-point quadrature of
/// the exact or numerically convolved densities; the two mutual
/// informations are histogram plug-ins on `n_mc` seeded draws with
/// `ceil(n_mc^(1/3))` bins per axis.
pub fn lemma1_check_numeric(spec: &AnmSpec, n_grid: usize, n_mc: usize, seed: u64) -> Result<Lemma1Sides> {
    spec.validate()?;
    if n_mc < MIN_MONTE_CARLO {
        return Err(Error::config(format!(
            "need at least {MIN_MONTE_CARLO} Monte Carlo draws"
        )));
    }
    if n_grid < 100 {
        return Err(Error::config("need at least 100 grid points"));
    }
    // An even node count keeps t = 0 off symmetric grids, where powered
    // Gaussian noise with q > 1 has an integrable singularity.
    let n_grid = n_grid + n_grid % 2;
    let f = |x: f64| spec.f.eval(x);
    let px = |x: f64| spec.x_dist.density(x);
    let pe = |t: f64| spec.noise.density(t);
    let mut warnings = Vec::new();
    let mut keep = |e: NumericEntropy| {
        if let Some(w) = e.warning {
            warnings.push(w);
        }
        e.value
    };

    let (x_lo, x_hi) = spec.x_dist.effective_support();
    let h_x = keep(numeric_entropy(px, x_lo, x_hi, n_grid)?);
    let w = spec.noise.effective_half_width();
    let h_res_fwd = keep(numeric_entropy(pe, -w, w, n_grid)?);

    // Quadrature over x for the marginal of Y and the conditional mean.
    let x_nodes = linspace(x_lo, x_hi, n_grid);
    let x_weights = trapezoid_weights(n_grid, (x_hi - x_lo) / (n_grid - 1) as f64);
    let fx: Vec<f64> = x_nodes.iter().map(|&x| f(x)).collect();
    let pxw: Vec<f64> = x_nodes.iter().zip(&x_weights).map(|(&x, w)| px(x) * w).collect();
    let f_min = fx.iter().copied().fold(f64::INFINITY, f64::min);
    let f_max = fx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (y_lo, y_hi) = (f_min - w, f_max + w);
    let y_nodes = linspace(y_lo, y_hi, n_grid);
    let y_step = (y_hi - y_lo) / (n_grid - 1) as f64;
    let moments: Vec<(f64, f64)> = y_nodes
        .iter()
        .map(|&y| {
            let mut m0 = 0.0;
            let mut m1 = 0.0;
            for ((&x, &fxi), &pw) in x_nodes.iter().zip(&fx).zip(&pxw) {
                let k = pw * pe(y - fxi);
                m0 += k;
                m1 += k * x;
            }
            (m0, m1)
        })
        .collect();
    let py: Vec<f64> = moments.iter().map(|m| m.0).collect();
    let h_y = keep(entropy_of_table(&py, y_step));

    // Central 99.9% range of Y from the tabulated CDF.
    let mut cdf = vec![0.0; n_grid];
    for i in 1..n_grid {
        cdf[i] = cdf[i - 1] + 0.5 * y_step * (py[i] + py[i - 1]);
    }
    let total = cdf[n_grid - 1];
    let quantile = |p: f64| {
        let target = p * total;
        let i = cdf.partition_point(|&c| c < target).clamp(1, n_grid - 1);
        let span = cdf[i] - cdf[i - 1];
        let frac = if span > 0.0 { (target - cdf[i - 1]) / span } else { 0.0 };
        y_nodes[i - 1] + frac * y_step
    };
    let (g_lo, g_hi) = (quantile(0.0005), quantile(0.9995));
    let g_nodes = linspace(g_lo, g_hi, CONDITIONAL_MEAN_POINTS);
    let g_values: Vec<f64> = g_nodes
        .iter()
        .map(|&y| {
            let (mut m0, mut m1) = (0.0, 0.0);
            for ((&x, &fxi), &pw) in x_nodes.iter().zip(&fx).zip(&pxw) {
                let k = pw * pe(y - fxi);
                m0 += k;
                m1 += k * x;
            }
            if m0 > 0.0 {
                m1 / m0
            } else {
                0.0
            }
        })
        .collect();
    let g = |y: f64| interpolate(&g_nodes, &g_values, y);

    // Density of X - g(Y): p(t) = ∫ p_X(g(y) + t) p_eta(y - f(g(y) + t)) dy.
    let gy: Vec<f64> = y_nodes.iter().map(|&y| g(y)).collect();
    let y_weights = trapezoid_weights(n_grid, y_step);
    let g_min = gy.iter().copied().fold(f64::INFINITY, f64::min);
    let g_max = gy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (t_lo, t_hi) = (x_lo - g_max, x_hi - g_min);
    let h_res_bwd = keep(numeric_entropy(
        |t| {
            y_nodes
                .iter()
                .zip(&gy)
                .zip(&y_weights)
                .map(|((&y, &gv), &wy)| {
                    let x = gv + t;
                    let p = px(x);
                    if p > 0.0 {
                        wy * p * pe(y - f(x))
                    } else {
                        0.0
                    }
                })
                .sum()
        },
        t_lo,
        t_hi,
        n_grid,
    )?);

    let sample = sample_anm(spec, n_mc, derive_seed(seed, 0x4D49))?;
    let bins = (n_mc as f64).cbrt().ceil() as usize;
    let res_fwd: Vec<f64> = sample.pairs().map(|(x, y)| y - f(x)).collect();
    let res_bwd: Vec<f64> = sample.pairs().map(|(x, y)| x - g(y)).collect();
    let mi_fwd = histogram_mutual_information(&res_fwd, sample.xs(), bins);
    let mi_bwd = histogram_mutual_information(&res_bwd, sample.ys(), bins);

    let left = h_x + h_res_fwd;
    let right = h_y + h_res_bwd - (mi_bwd - mi_fwd);
    Ok(Lemma1Sides {
        h_x,
        h_y,
        h_res_fwd,
        h_res_bwd,
        mi_fwd,
        mi_bwd,
        left,
        right,
        discrepancy: (left - right).abs(),
        warnings,
    })
}

/// One named tolerance check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn within(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: error,
            tolerance,
            passed: error.is_finite() && error < tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: error {:.3e} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance
        )
    }
}

/// Parameters tried by the closed-form identity check.
pub const LINEAR_GAUSSIAN_CASES: [(f64, f64); 6] = [
    (1.0, 1.0),
    (0.0, 1.0),
    (2.0, 0.5),
    (-1.5, 3.0),
    (0.3, 0.01),
    (10.0, 2.0),
];

pub fn verify_lemma1(n_grid: usize, n_mc: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (a, s) in LINEAR_GAUSSIAN_CASES {
        let sides = lemma1_check_linear_gaussian(a, s)?;
        out.push(Check {
            name: format!("closed-form identity a={a} s={s}"),
            value: sides.discrepancy,
            tolerance: 0.0,
            passed: sides.left == sides.right,
        });
    }
    let cubic = lemma1_check_numeric(&AnmSpec::cubic(1.0, 1.0), n_grid, n_mc, seed)?;
    out.push(Check::within("numeric identity cubic b=1 q=1", cubic.discrepancy, 0.05));
    let linear = lemma1_check_numeric(&AnmSpec::linear_gaussian(1.0, 1.0), n_grid, n_mc, seed)?;
    out.push(Check::within(
        "numeric identity linear-gaussian a=1 s=1",
        linear.discrepancy,
        0.02,
    ));
    let closed = lemma1_check_linear_gaussian(1.0, 1.0)?;
    out.push(Check::within(
        "numeric vs closed form, linear-gaussian",
        (linear.left - closed.left)
            .abs()
            .max((linear.right - closed.right).abs()),
        0.02,
    ));
    Ok(out)
}

/// The three reference distributions used for estimator accuracy.
pub const REFERENCE_DISTS: [AnalyticDist; 3] = [
    AnalyticDist::Uniform { lo: -2.5, hi: 2.5 },
    AnalyticDist::Gaussian { sd: 1.0 },
    AnalyticDist::Laplace { scale: 1.0 },
];

pub fn verify_entropy(n: usize, seed: u64) -> Result<Vec<Check>> {
    use crate::entropy::{resubstitution_entropy, tune_sigma_loo};
    use crate::kernel::Kernel;
    use crate::model::sample_sd;

    let mut out = Vec::new();
    for (i, dist) in REFERENCE_DISTS.iter().enumerate() {
        let truth = analytic_entropy(dist);
        let (lo, hi) = dist.integration_range();
        let quad = numeric_entropy(|t| dist.density(t), lo, hi, 200_001)?;
        out.push(Check::within(
            format!("quadrature {dist:?}"),
            (quad.value - truth).abs(),
            1e-5,
        ));

        let values = dist.sample(n, derive_seed(seed, i as u64))?;
        let sd = sample_sd(&values);
        let grid: Vec<f64> = geometric_points(1e-3, 10.0, 30).iter().map(|g| g * sd).collect();
        let sigma = tune_sigma_loo(&values, Kernel::Biweight, &grid)?;
        let est = resubstitution_entropy(&values, sigma, Kernel::Biweight)?;
        out.push(Check::within(
            format!("resubstitution {dist:?} n={n}"),
            (est.value - truth).abs(),
            0.05,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_examples() {
        let u = analytic_entropy(&AnalyticDist::Uniform { lo: -2.5, hi: 2.5 });
        assert!((u - 5f64.ln()).abs() < 1e-15);
        let g = analytic_entropy(&AnalyticDist::Gaussian { sd: 1.0 });
        assert!((g - 1.418_938_533_204_672_7).abs() < 1e-15);
        let l = analytic_entropy(&AnalyticDist::Laplace { scale: 1.0 });
        assert!((l - 1.693_147_180_559_945_3).abs() < 1e-15);
    }

    #[test]
    fn numeric_entropy_examples() {
        let u = numeric_entropy(|_| 0.2, -2.5, 2.5, 10_000).unwrap();
        assert!((u.value - 5f64.ln()).abs() < 1e-6);
        assert!(u.warning.is_none());

        let g = AnalyticDist::Gaussian { sd: 1.0 };
        let e = numeric_entropy(|t| g.density(t), -8.0, 8.0, 10_000).unwrap();
        assert!((e.value - analytic_entropy(&g)).abs() < 1e-6);

        let z = numeric_entropy(|_| 0.0, -1.0, 1.0, 100).unwrap();
        assert_eq!(z.value, 0.0);
        assert_eq!(z.warning, Some(OracleWarning::NonNormalized { mass: 0.0 }));
        assert!(numeric_entropy(|_| 0.5, 0.0, 2.0, 99).is_err());
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        for dist in REFERENCE_DISTS {
            let (lo, hi) = dist.integration_range();
            let e = numeric_entropy(|t| dist.density(t), lo, hi, 200_001).unwrap();
            assert!(
                (e.value - analytic_entropy(&dist)).abs() < 1e-5,
                "{dist:?}: {}",
                e.value
            );
        }
    }

    #[test]
    fn closed_form_identity_is_exact() {
        let s = lemma1_check_linear_gaussian(1.0, 1.0).unwrap();
        assert_eq!(s.left, s.right);
        assert!((s.left - (2.0 * PI * E).ln()).abs() < 1e-14);
        assert!((s.left - 2.83788).abs() < 1e-5);

        let ind = lemma1_check_linear_gaussian(0.0, 1.0).unwrap();
        assert_eq!(ind.h_x, ind.h_y);
        assert_eq!(ind.left, ind.right);

        for a in [-3.0, -0.1, 0.0, 0.7, 5.0, 123.0] {
            for s in [1e-3, 0.2, 1.0, 7.5] {
                let sides = lemma1_check_linear_gaussian(a, s).unwrap();
                assert_eq!(sides.left, sides.right, "a={a} s={s}");
            }
        }
        assert!(lemma1_check_linear_gaussian(1.0, 0.0).is_err());
    }

    #[test]
    fn histogram_mi_independent_and_dependent() {
        let a = sample_noise(&NoiseSpec::Gaussian { sd: 1.0 }, 100_000, 1).unwrap();
        let b = sample_noise(&NoiseSpec::Gaussian { sd: 1.0 }, 100_000, 2).unwrap();
        let mi = histogram_mutual_information(&a, &b, 47);
        // Plug-in bias is about (bins - 1)^2 / (2n).
        assert!(mi > 0.0 && mi < 0.02, "{mi}");
        let c: Vec<f64> = a.iter().zip(&b).map(|(x, e)| x + e).collect();
        // Correlation 1/sqrt(2): I = -0.5 ln(1 - 1/2) = 0.3466.
        let mi = histogram_mutual_information(&a, &c, 47);
        assert!((mi - 0.3466).abs() < 0.03, "{mi}");
    }
}
