//! One-dimensional nonparametric regressors.
//!
//! Every fit clamps its predictions to `[-B, B]` for its truncation bound
//! `B`. Local regressors fall back to the nearest training covariate when
//! no training point carries weight at the query.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::model::{BandwidthSpec, Regressor, Truncation};

/// Diagonal jitter added once if the ridge system fails to factor.
pub const RIDGE_JITTER: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMethod {
    BoxKernel,
    NadarayaWatson(Kernel),
    KernelRidge { length_scale: f64, lambda: f64 },
}

/// A fitted regressor. Immutable; prediction is read-only.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    method: FitMethod,
    /// Training pairs sorted by covariate (stable).
    xs: Vec<f64>,
    ys: Vec<f64>,
    bandwidth: f64,
    bound: f64,
    dual: Vec<f64>,
}

fn check_training(covariate: &[f64], response: &[f64], h: f64, bound: f64) -> Result<()> {
    if covariate.is_empty() {
        return Err(Error::EmptySample);
    }
    if covariate.len() != response.len() {
        return Err(Error::LengthMismatch {
            xs: covariate.len(),
            ys: response.len(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::config(format!("bandwidth must be positive, got {h}")));
    }
    if bound.is_nan() || bound < 0.0 {
        return Err(Error::config(format!(
            "truncation bound must be non-negative, got {bound}"
        )));
    }
    Ok(())
}

fn sorted_pairs(covariate: &[f64], response: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..covariate.len()).collect();
    idx.sort_by(|&a, &b| covariate[a].total_cmp(&covariate[b]));
    (
        idx.iter().map(|&i| covariate[i]).collect(),
        idx.iter().map(|&i| response[i]).collect(),
    )
}

impl RegressionFit {
    fn local(method: FitMethod, covariate: &[f64], response: &[f64], h: f64, bound: f64) -> Result<Self> {
        check_training(covariate, response, h, bound)?;
        let (xs, ys) = sorted_pairs(covariate, response);
        Ok(Self {
            method,
            xs,
            ys,
            bandwidth: h,
            bound,
            dual: Vec::new(),
        })
    }

    pub fn method(&self) -> FitMethod {
        self.method
    }

    /// Box/NW bandwidth, or the kernel ridge length-scale.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn truncation_bound(&self) -> f64 {
        self.bound
    }

    pub fn train_xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn train_ys(&self) -> &[f64] {
        &self.ys
    }

    /// Kernel ridge dual coefficients, aligned with `train_xs`. Empty for
    /// local regressors.
    pub fn dual_weights(&self) -> &[f64] {
        &self.dual
    }

    pub fn predict(&self, x: f64) -> f64 {
        let raw = match self.method {
            FitMethod::BoxKernel | FitMethod::NadarayaWatson(Kernel::Uniform) => self.box_mean(x),
            FitMethod::NadarayaWatson(k) => self.weighted_mean(x, k),
            FitMethod::KernelRidge { length_scale, .. } => {
                let inv = 1.0 / (2.0 * length_scale * length_scale);
                self.xs
                    .iter()
                    .zip(&self.dual)
                    .map(|(xi, a)| a * (-(xi - x) * (xi - x) * inv).exp())
                    .sum()
            }
        };
        raw.clamp(-self.bound, self.bound)
    }

    pub fn predict_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.predict(x)).collect()
    }

    /// Index range of training covariates with |X_i - x| < radius.
    fn window(&self, x: f64, radius: f64) -> (usize, usize) {
        let lo = self.xs.partition_point(|&v| x - v >= radius);
        let hi = self.xs.partition_point(|&v| v - x < radius);
        (lo, hi.max(lo))
    }

    fn box_mean(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x, self.bandwidth);
        if hi > lo {
            self.range_mean(lo, hi)
        } else {
            self.nearest(x)
        }
    }

    fn weighted_mean(&self, x: f64, kernel: Kernel) -> f64 {
        let h = self.bandwidth;
        let (lo, hi) = self.window(x, h * kernel.support_radius());
        let mut num = 0.0;
        let mut den = 0.0;
        for i in lo..hi {
            let w = kernel.eval((self.xs[i] - x) / h);
            num += w * self.ys[i];
            den += w;
        }
        if den > 0.0 {
            num / den
        } else {
            self.nearest(x)
        }
    }

    /// Mean response at the nearest training covariate; equidistant ties go
    /// to the smaller covariate.
    fn nearest(&self, x: f64) -> f64 {
        let right = self.xs.partition_point(|&v| v < x);
        let pick = if right == 0 {
            self.xs[0]
        } else if right == self.xs.len() {
            self.xs[right - 1]
        } else {
            let (l, r) = (self.xs[right - 1], self.xs[right]);
            if x - l <= r - x {
                l
            } else {
                r
            }
        };
        let lo = self.xs.partition_point(|&v| v < pick);
        let hi = self.xs.partition_point(|&v| v <= pick);
        self.range_mean(lo, hi)
    }

    /// Summed directly rather than from prefix sums so that responses
    /// outside the window cannot perturb the result through rounding.
    fn range_mean(&self, lo: usize, hi: usize) -> f64 {
        self.ys[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
    }
}

/// Local average over the open window `(x - h, x + h)`.
pub fn fit_box_kernel(covariate: &[f64], response: &[f64], h: f64, bound: f64) -> Result<RegressionFit> {
    RegressionFit::local(FitMethod::BoxKernel, covariate, response, h, bound)
}

pub fn fit_nadaraya_watson(
    covariate: &[f64],
    response: &[f64],
    kernel: Kernel,
    h: f64,
    bound: f64,
) -> Result<RegressionFit> {
    RegressionFit::local(FitMethod::NadarayaWatson(kernel), covariate, response, h, bound)
}

/// Kernel ridge regression with the squared-exponential kernel
/// `exp(-(a - b)^2 / (2 l^2))`, solving `(K + lambda I) alpha = y`.
pub fn fit_kernel_ridge(
    covariate: &[f64],
    response: &[f64],
    length_scale: f64,
    lambda: f64,
    bound: f64,
) -> Result<RegressionFit> {
    check_training(covariate, response, length_scale, bound)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::config(format!("ridge penalty must be positive, got {lambda}")));
    }
    let (xs, ys) = sorted_pairs(covariate, response);
    let n = xs.len();
    let inv = 1.0 / (2.0 * length_scale * length_scale);
    let gram = DMatrix::from_fn(n, n, |i, j| {
        let d = xs[i] - xs[j];
        let k = (-d * d * inv).exp();
        if i == j {
            k + lambda
        } else {
            k
        }
    });
    let rhs = DVector::from_column_slice(&ys);
    let chol = match gram.clone().cholesky() {
        Some(c) => c,
        None => {
            let jittered = gram + DMatrix::identity(n, n) * RIDGE_JITTER;
            jittered.cholesky().ok_or(Error::SingularSystem)?
        }
    };
    let alpha = chol.solve(&rhs);
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(RegressionFit {
        method: FitMethod::KernelRidge { length_scale, lambda },
        xs,
        ys,
        bandwidth: length_scale,
        bound,
        dual: alpha.iter().copied().collect(),
    })
}

/// Fits `regressor` with bandwidth (or length-scale) `h`.
pub fn fit(regressor: Regressor, covariate: &[f64], response: &[f64], h: f64, bound: f64) -> Result<RegressionFit> {
    match regressor {
        Regressor::BoxKernel => fit_box_kernel(covariate, response, h, bound),
        Regressor::NadarayaWatson(k) => fit_nadaraya_watson(covariate, response, k, h, bound),
        Regressor::KernelRidge { lambda } => fit_kernel_ridge(covariate, response, h, lambda, bound),
    }
}

/// Seeded k-fold partition: shuffle the indices, then cut the shuffled
/// order into `folds` contiguous blocks.
pub fn fold_partition(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (0..folds)
        .map(|f| idx[f * n / folds..(f + 1) * n / folds].to_vec())
        .collect()
}

/// Grid bandwidth minimising k-fold mean squared prediction error. Ties go
/// to the larger bandwidth.
pub fn select_bandwidth_cv(
    covariate: &[f64],
    response: &[f64],
    regressor: Regressor,
    folds: usize,
    grid: &[f64],
    truncation: Truncation,
    seed: u64,
) -> Result<f64> {
    let n = covariate.len();
    if n != response.len() {
        return Err(Error::LengthMismatch {
            xs: n,
            ys: response.len(),
        });
    }
    if folds < 2 {
        return Err(Error::config("cross-validation needs at least 2 folds"));
    }
    if n < folds {
        return Err(Error::SampleTooSmall { needed: folds, got: n });
    }
    let mut grid: Vec<f64> = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    match grid.as_slice() {
        [] => return Err(Error::config("bandwidth grid is empty")),
        [only] => return Ok(*only),
        _ => {}
    }

    let parts = fold_partition(n, folds, seed);
    let mut in_fold = vec![0usize; n];
    for (f, part) in parts.iter().enumerate() {
        for &i in part {
            in_fold[i] = f;
        }
    }
    let splits: Vec<_> = (0..folds)
        .map(|f| {
            let (mut tx, mut ty) = (Vec::new(), Vec::new());
            for i in (0..n).filter(|&i| in_fold[i] != f) {
                tx.push(covariate[i]);
                ty.push(response[i]);
            }
            let bound = truncation.resolve(&ty);
            (tx, ty, bound)
        })
        .collect();

    let mut best = (f64::INFINITY, grid[grid.len() - 1]);
    for &h in &grid {
        let mut sse = 0.0;
        for (f, (tx, ty, bound)) in splits.iter().enumerate() {
            let model = fit(regressor, tx, ty, h, *bound)?;
            for &i in &parts[f] {
                let e = response[i] - model.predict(covariate[i]);
                sse += e * e;
            }
        }
        let mse = sse / n as f64;
        if mse <= best.0 {
            best = (mse, h);
        }
    }
    Ok(best.1)
}

/// Resolves a regression bandwidth spec to a concrete value for this
/// training set.
pub fn resolve_bandwidth(
    spec: &BandwidthSpec,
    regressor: Regressor,
    covariate: &[f64],
    response: &[f64],
    truncation: Truncation,
    seed: u64,
) -> Result<f64> {
    match spec {
        BandwidthSpec::Fixed { value, scale } => Ok(value * scale.factor(covariate)),
        BandwidthSpec::TheorySchedule { c, exponent, scale } => {
            Ok(c * (covariate.len() as f64).powf(-exponent) * scale.factor(covariate))
        }
        BandwidthSpec::CrossValidation { folds, grid } => select_bandwidth_cv(
            covariate,
            response,
            regressor,
            *folds,
            &grid.resolve(covariate),
            truncation,
            seed,
        ),
        BandwidthSpec::LooLikelihood { .. } => {
            Err(Error::config("leave-one-out likelihood does not apply to regression"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    /// Y - f(X)
    Forward,
    /// X - g(Y)
    Backward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSeries {
    pub values: Vec<f64>,
    pub kind: ResidualKind,
}

pub fn residuals(
    fit: &RegressionFit,
    eval_covariate: &[f64],
    eval_response: &[f64],
    kind: ResidualKind,
) -> Result<ResidualSeries> {
    if eval_covariate.len() != eval_response.len() {
        return Err(Error::LengthMismatch {
            xs: eval_covariate.len(),
            ys: eval_response.len(),
        });
    }
    let values = eval_covariate
        .iter()
        .zip(eval_response)
        .map(|(&x, &y)| y - fit.predict(x))
        .collect();
    Ok(ResidualSeries { values, kind })
}

/// Mean absolute deviation between the fit and the true regression
/// function over the sample covariates.
pub fn average_excess_risk(fit: &RegressionFit, truth: impl Fn(f64) -> f64, sample_covariate: &[f64]) -> f64 {
    if sample_covariate.is_empty() {
        return 0.0;
    }
    sample_covariate
        .iter()
        .map(|&x| (fit.predict(x) - truth(x)).abs())
        .sum::<f64>()
        / sample_covariate.len() as f64
}
