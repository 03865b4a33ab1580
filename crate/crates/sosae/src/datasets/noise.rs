//! The two corruption processes used for denoising training.

use crate::error::{Error, Result};
use crate::numcore::{Matrix, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    ZeroMask,
    Gaussian,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::ZeroMask => "zero_mask",
            NoiseKind::Gaussian => "gaussian",
        }
    }

    pub fn parse(s: &str) -> Result<NoiseKind> {
        Ok(match s {
            "none" => NoiseKind::None,
            "zero_mask" => NoiseKind::ZeroMask,
            "gaussian" => NoiseKind::Gaussian,
            other => return Err(Error::arg(format!("unknown noise kind '{other}'"))),
        })
    }
}

/// Input corruption: zero-masking with probability `nu` per entry, or
/// additive N(0, sigma^2) clipped back to [0,1]. `nu` applies only to
/// zero_mask, `sigma` only to gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub nu: f64,
    pub sigma: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            kind: NoiseKind::None,
            nu: 0.0,
            sigma: 0.0,
        }
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn zero_mask(nu: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::ZeroMask,
            nu,
            sigma: 0.0,
        }
    }

    pub fn gaussian(sigma: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::Gaussian,
            nu: 0.0,
            sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::arg(format!("nu must be in [0,1], got {}", self.nu)));
        }
        if self.sigma < 0.0 {
            return Err(Error::arg(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Applies the corruption process entrywise (row-major draw order).
/// `kind = none` returns the input unchanged; outputs always stay in [0,1].
pub fn corrupt(x: &Matrix, spec: &NoiseSpec, rng: &mut Rng) -> Result<Matrix> {
    spec.validate()?;
    match spec.kind {
        NoiseKind::None => Ok(x.clone()),
        NoiseKind::ZeroMask => {
            let mut out = x.clone();
            for v in out.as_mut_slice() {
                if rng.next_f64() < spec.nu {
                    *v = 0.0;
                }
            }
            Ok(out)
        }
        NoiseKind::Gaussian => {
            let mut out = x.clone();
            for v in out.as_mut_slice() {
                *v = (*v + spec.sigma * rng.normal()).clamp(0.0, 1.0);
            }
            Ok(out)
        }
    }
}
