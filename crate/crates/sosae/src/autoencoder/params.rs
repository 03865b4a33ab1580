//! Parameters of the d -> h -> d shallow autoencoder.

use crate::error::{Error, Result};
use crate::numcore::{rng_uniform, Matrix, Rng};

/// Encoder/decoder weights and biases. Both layers use sigmoid activations:
/// the contractive penalty's h(1-h) Jacobian factor presumes a logistic
/// encoder, and inputs live in [0,1] so a logistic decoder matches the
/// target range.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderParams {
    /// d x h encoder weights; column j feeds hidden unit j.
    pub w_enc: Matrix,
    pub b_enc: Vec<f64>,
    /// h x d decoder weights; row j carries unit j's reconstruction atom.
    pub w_dec: Matrix,
    pub b_dec: Vec<f64>,
}

impl AutoencoderParams {
    /// Deterministic initialization from the seeded RNG: weights uniform in
    /// +-sqrt(6/(d+h)) (encoder drawn first, row-major), biases zero.
    pub fn init(d: usize, h: usize, rng: &mut Rng) -> Result<AutoencoderParams> {
        if d == 0 || h == 0 {
            return Err(Error::arg(format!("need d, h >= 1, got d={d}, h={h}")));
        }
        let bound = (6.0 / (d + h) as f64).sqrt();
        Ok(AutoencoderParams {
            w_enc: rng_uniform(rng, -bound, bound, d, h)?,
            b_enc: vec![0.0; h],
            w_dec: rng_uniform(rng, -bound, bound, h, d)?,
            b_dec: vec![0.0; d],
        })
    }

    /// Input dimensionality.
    pub fn d(&self) -> usize {
        self.w_enc.rows()
    }

    /// Hidden width.
    pub fn h(&self) -> usize {
        self.w_enc.cols()
    }

    /// Checks mutual shape consistency and finiteness.
    pub fn validate(&self) -> Result<()> {
        let (d, h) = (self.d(), self.h());
        if self.b_enc.len() != h
            || self.w_dec.rows() != h
            || self.w_dec.cols() != d
            || self.b_dec.len() != d
        {
            return Err(Error::shape(
                "autoencoder params",
                format!("w_enc {}", self.w_enc.shape_str()),
                format!(
                    "b_enc[{}], w_dec {}, b_dec[{}]",
                    self.b_enc.len(),
                    self.w_dec.shape_str(),
                    self.b_dec.len()
                ),
            ));
        }
        let finite = self.w_enc.is_finite()
            && self.w_dec.is_finite()
            && self.b_enc.iter().all(|v| v.is_finite())
            && self.b_dec.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::arg("non-finite parameter entries"));
        }
        Ok(())
    }

    /// Total scalar parameter count.
    pub fn n_params(&self) -> usize {
        self.d() * self.h() * 2 + self.d() + self.h()
    }
}

/// Gradient blocks matching [`AutoencoderParams`] shape-for-shape.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w_enc: Matrix,
    pub b_enc: Vec<f64>,
    pub w_dec: Matrix,
    pub b_dec: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(p: &AutoencoderParams) -> Gradients {
        Gradients {
            w_enc: Matrix::zeros(p.d(), p.h()),
            b_enc: vec![0.0; p.h()],
            w_dec: Matrix::zeros(p.h(), p.d()),
            b_dec: vec![0.0; p.d()],
        }
    }
}
