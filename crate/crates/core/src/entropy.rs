//! Kernel density estimates and resubstitution entropy.
//!
//! The density built from points `e_1..e_n` with bandwidth `sigma` is
//!
//! ```text
//! p(t) = 1/(n sigma) * sum_i K((e_i - t) / sigma)
//! ```
//!
//! All sums run over sorted centers so compact kernels only touch the
//! points inside the support window. Entropies are in nats.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::model::BandwidthSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    centers: Vec<f64>,
    sigma: f64,
    kernel: Kernel,
}

impl DensityEstimate {
    pub fn new(centers: &[f64], sigma: f64, kernel: Kernel) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptySample);
        }
        check_sigma(sigma)?;
        let mut centers = centers.to_vec();
        centers.sort_by(f64::total_cmp);
        Ok(Self { centers, sigma, kernel })
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Sum of kernel weights at `t`, before the 1/(n sigma) prefactor.
    fn weight_sum(&self, t: f64) -> f64 {
        let r = self.kernel.support_radius() * self.sigma;
        let lo = self.centers.partition_point(|&c| t - c >= r);
        let hi = self.centers.partition_point(|&c| c - t < r);
        self.centers[lo..hi.max(lo)]
            .iter()
            .map(|&c| self.kernel.eval((c - t) / self.sigma))
            .sum()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.weight_sum(t) / (self.centers.len() as f64 * self.sigma)
    }
}

pub fn kde_eval(estimate: &DensityEstimate, t: f64) -> f64 {
    estimate.eval(t)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!(
            "density bandwidth must be positive, got {sigma}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMethod {
    Resubstitution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub sigma_used: f64,
    pub n: usize,
    pub method: EntropyMethod,
}

/// For each sorted point, the kernel weight sum over the others within the
/// support window. `include_self` adds the point's own K(0) term.
fn window_sums(sorted: &[f64], sigma: f64, kernel: Kernel, include_self: bool) -> Vec<f64> {
    let n = sorted.len();
    let r = kernel.support_radius() * sigma;
    let mut out = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, 0usize);
    for i in 0..n {
        let c = sorted[i];
        while c - sorted[lo] >= r {
            lo += 1;
        }
        while hi < n && sorted[hi] - c < r {
            hi += 1;
        }
        let mut s = 0.0;
        for (j, &other) in sorted.iter().enumerate().take(hi).skip(lo) {
            if j != i || include_self {
                s += kernel.eval((other - c) / sigma);
            }
        }
        out.push(s);
    }
    out
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `-(1/n) sum_i ln p(e_i)` where `p` is the KDE on the same values.
pub fn resubstitution_entropy(values: &[f64], sigma: f64, kernel: Kernel) -> Result<EntropyEstimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { needed: 2, got: n });
    }
    check_sigma(sigma)?;
    let sorted = sorted_copy(values);
    if sorted[0] == sorted[n - 1] {
        return Err(Error::DegenerateSample);
    }
    let norm = n as f64 * sigma;
    let total: f64 = window_sums(&sorted, sigma, kernel, true)
        .iter()
        .map(|s| (s / norm).ln())
        .sum();
    Ok(EntropyEstimate {
        value: -total / n as f64,
        sigma_used: sigma,
        n,
        method: EntropyMethod::Resubstitution,
    })
}

/// Fraction of points, per side, left out of the bandwidth-selection
/// objective. With a compact kernel an isolated extreme point has zero
/// leave-one-out density below the gap to its neighbour, which forces
/// gross oversmoothing on exponential or heavier tails.
pub const LOO_TRIM: f64 = 0.005;

/// Leave-one-out log-likelihood `sum_i ln p_{-i}(e_i)`; `-inf` when some
/// point receives no weight from the others.
pub fn loo_log_likelihood(sorted: &[f64], sigma: f64, kernel: Kernel) -> f64 {
    loo_log_likelihood_trimmed(sorted, sigma, kernel, 0.0)
}

/// As `loo_log_likelihood`, but summing only over the points ranked
/// between `floor(trim * n)` and `n - floor(trim * n)`. Every other point
/// still contributes to the densities.
pub fn loo_log_likelihood_trimmed(sorted: &[f64], sigma: f64, kernel: Kernel, trim: f64) -> f64 {
    let n = sorted.len();
    let cut = ((trim * n as f64).floor() as usize).min(n / 2);
    let norm = (n - 1) as f64 * sigma;
    let mut total = 0.0;
    let sums = window_sums(sorted, sigma, kernel, false);
    for &s in &sums[cut..n - cut] {
        if s <= 0.0 {
            return f64::NEG_INFINITY;
        }
        total += (s / norm).ln();
    }
    total
}

/// Grid bandwidth maximising the leave-one-out log-likelihood, trimmed by
/// `LOO_TRIM` (a no-op below 200 points). Ties go to the larger bandwidth; if no grid value gives a finite likelihood the
/// largest is returned.
pub fn tune_sigma_loo(values: &[f64], kernel: Kernel, grid: &[f64]) -> Result<f64> {
    if values.len() < 3 {
        return Err(Error::SampleTooSmall {
            needed: 3,
            got: values.len(),
        });
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::config("bandwidth grid is empty"));
    }
    for &s in &grid {
        check_sigma(s)?;
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let sorted = sorted_copy(values);
    let scores: Vec<f64> = grid
        .par_iter()
        .map(|&s| loo_log_likelihood_trimmed(&sorted, s, kernel, LOO_TRIM))
        .collect();
    let mut best = (f64::NEG_INFINITY, grid[grid.len() - 1]);
    for (&s, &score) in grid.iter().zip(&scores) {
        if score > f64::NEG_INFINITY && score >= best.0 {
            best = (score, s);
        }
    }
    Ok(best.1)
}

/// Resolves a density bandwidth spec against the values being smoothed.
pub fn resolve_sigma(spec: &BandwidthSpec, values: &[f64], kernel: Kernel) -> Result<f64> {
    match spec {
        BandwidthSpec::Fixed { value, scale } => Ok(value * scale.factor(values)),
        BandwidthSpec::TheorySchedule { c, exponent, scale } => {
            Ok(c * (values.len() as f64).powf(-exponent) * scale.factor(values))
        }
        BandwidthSpec::LooLikelihood { grid } => tune_sigma_loo(values, kernel, &grid.resolve(values)),
        BandwidthSpec::CrossValidation { .. } => Err(Error::config(
            "regression cross-validation does not apply to density bandwidths",
        )),
    }
}

/// Resubstitution entropy with the bandwidth chosen by `spec`.
pub fn estimate_entropy(values: &[f64], spec: &BandwidthSpec, kernel: Kernel) -> Result<EntropyEstimate> {
    if values.len() >= 2 && values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateSample);
    }
    let sigma = resolve_sigma(spec, values, kernel)?;
    resubstitution_entropy(values, sigma, kernel)
}

/// Regression and density bandwidths `(c1 n^-alpha, c2 n^-beta)`. Requires
/// `0 < beta < min((1 - alpha)/4, alpha/2)`.
pub fn theory_bandwidths(n: usize, c1: f64, alpha: f64, c2: f64, beta: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::config("schedule constants must be positive"));
    }
    let bound = admissible_beta_bound(alpha);
    if !(beta > 0.0 && beta < bound) {
        return Err(Error::ScheduleViolation { alpha, beta, bound });
    }
    let n = n as f64;
    Ok((c1 * n.powf(-alpha), c2 * n.powf(-beta)))
}

pub fn admissible_beta_bound(alpha: f64) -> f64 {
    ((1.0 - alpha) / 4.0).min(alpha / 2.0)
}
