//! Causal direction inference for bivariate additive noise models.
//!
//! Under `Y = f(X) + N` with `N` independent of `X`, the causal factorisation
//! has the smaller total entropy `H(X) + H(Y - f(X))`. This crate estimates
//! both directions' scores from a sample with kernel regressions and kernel
//! density entropy estimates, and decides with a vanishing margin `tau_n`.
//!
//! ```
//! use anm_core::{sample_anm, score_direction, AnmSpec, Direction, InferenceConfig};
//!
//! let sample = sample_anm(&AnmSpec::cubic(1.0, 1.0), 1000, 7)?;
//! let score = score_direction(&sample, &InferenceConfig::default())?;
//! assert_eq!(score.decision, Direction::XtoY);
//! # Ok::<(), anm_core::Error>(())
//! ```

pub mod bench;
pub mod entropy;
pub mod error;
pub mod infer;
pub mod kernel;
pub mod model;
pub mod oracle;
pub mod regress;
pub mod synth;

pub use bench::{
    emit_results, ingest_csv, parse_csv_str, run_sweep, run_sweep_with_jobs, SweepAxis, SweepResult, SweepSpec,
};
pub use entropy::{
    estimate_entropy, kde_eval, resubstitution_entropy, tune_sigma_loo, DensityEstimate, EntropyEstimate,
};
pub use error::{Error, Result};
pub use infer::{decide, score_direction};
pub use kernel::Kernel;
pub use model::{
    compute_tau, BandwidthSpec, Direction, DirectionScore, EstimationMode, InferenceConfig, PairedSample, Regressor,
    Truncation,
};
pub use regress::{fit, residuals, RegressionFit};
pub use synth::{sample_anm, tail_diagnostic, AnmSpec, NoiseSpec, TailReport};
