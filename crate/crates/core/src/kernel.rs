//! Smoothing kernels shared by the regressors and the density estimator.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const BIWEIGHT_NORM: f64 = 15.0 / 16.0;
const EPANECHNIKOV_NORM: f64 = 0.75;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Gaussian contributions beyond this many bandwidths are below 3e-18 of
/// the peak and are skipped when summing over sorted centers.
pub const GAUSSIAN_CUTOFF: f64 = 9.0;

/// Symmetric probability kernels, each integrating to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// 1/2 on (-1, 1), zero elsewhere. Used only by the regressors.
    Uniform,
    /// (3/4)(1 - u^2) on [-1, 1]. The derivative jumps at ±1.
    Epanechnikov,
    /// (15/16)(1 - u^2)^2 on [-1, 1]. Compact support and a bounded
    /// derivative everywhere.
    Biweight,
    /// Standard normal density. Not compactly supported.
    Gaussian,
}

impl Kernel {
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Kernel::Uniform => {
                if u.abs() < 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Kernel::Epanechnikov => {
                let a = 1.0 - u * u;
                if a > 0.0 {
                    EPANECHNIKOV_NORM * a
                } else {
                    0.0
                }
            }
            Kernel::Biweight => {
                let a = 1.0 - u * u;
                if a > 0.0 {
                    BIWEIGHT_NORM * a * a
                } else {
                    0.0
                }
            }
            Kernel::Gaussian => INV_SQRT_2PI * (-0.5 * u * u).exp(),
        }
    }

    /// Radius (in bandwidth units) outside which the kernel is treated as zero.
    pub fn support_radius(self) -> f64 {
        match self {
            Kernel::Gaussian => GAUSSIAN_CUTOFF,
            _ => 1.0,
        }
    }

    pub fn is_compact(self) -> bool {
        !matches!(self, Kernel::Gaussian)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Uniform => "uniform",
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Biweight => "biweight",
            Kernel::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" | "box" => Ok(Kernel::Uniform),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "biweight" | "quartic" => Ok(Kernel::Biweight),
            "gaussian" | "normal" => Ok(Kernel::Gaussian),
            other => Err(Error::config(format!("unknown kernel `{other}`"))),
        }
    }
}
