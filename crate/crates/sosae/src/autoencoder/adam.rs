//! Adam optimizer with explicit bias correction.

use crate::autoencoder::{AutoencoderParams, Gradients};

/// One Adam update on a flat parameter block.
///
/// Uses the textbook form with explicit bias-corrected moments:
/// m_hat = m/(1-beta1^t), v_hat = v/(1-beta2^t),
/// theta -= lr * m_hat / (sqrt(v_hat) + eps).
/// With theta=0, g=1, lr=1e-3 and default betas, the first step lands at
/// -lr/(1+eps) = -0.000999999990.
#[allow(clippy::too_many_arguments)]
pub fn adam_step(
    param: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    t: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) {
    debug_assert!(t >= 1);
    debug_assert_eq!(param.len(), grad.len());
    let bc1 = 1.0 - beta1.powi(t as i32);
    let bc2 = 1.0 - beta2.powi(t as i32);
    for i in 0..param.len() {
        let g = grad[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        param[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

/// Adam state for all four autoencoder blocks, stepped together.
#[derive(Debug, Clone)]
pub struct Adam {
    m_we: Vec<f64>,
    v_we: Vec<f64>,
    m_be: Vec<f64>,
    v_be: Vec<f64>,
    m_wd: Vec<f64>,
    v_wd: Vec<f64>,
    m_bd: Vec<f64>,
    v_bd: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(p: &AutoencoderParams) -> Adam {
        let (d, h) = (p.d(), p.h());
        Adam {
            m_we: vec![0.0; d * h],
            v_we: vec![0.0; d * h],
            m_be: vec![0.0; h],
            v_be: vec![0.0; h],
            m_wd: vec![0.0; d * h],
            v_wd: vec![0.0; d * h],
            m_bd: vec![0.0; d],
            v_bd: vec![0.0; d],
            t: 0,
        }
    }

    /// Steps every block with a shared timestep.
    pub fn step(
        &mut self,
        params: &mut AutoencoderParams,
        grads: &Gradients,
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
    ) {
        self.t += 1;
        let t = self.t;
        adam_step(
            params.w_enc.as_mut_slice(),
            grads.w_enc.as_slice(),
            &mut self.m_we,
            &mut self.v_we,
            t,
            lr,
            beta1,
            beta2,
            eps,
        );
        adam_step(
            &mut params.b_enc,
            &grads.b_enc,
            &mut self.m_be,
            &mut self.v_be,
            t,
            lr,
            beta1,
            beta2,
            eps,
        );
        adam_step(
            params.w_dec.as_mut_slice(),
            grads.w_dec.as_slice(),
            &mut self.m_wd,
            &mut self.v_wd,
            t,
            lr,
            beta1,
            beta2,
            eps,
        );
        adam_step(
            &mut params.b_dec,
            &grads.b_dec,
            &mut self.m_bd,
            &mut self.v_bd,
            t,
            lr,
            beta1,
            beta2,
            eps,
        );
    }

    pub fn timestep(&self) -> u64 {
        self.t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    #[test]
    fn first_step_hand_value() {
        let mut p = [0.0];
        let (mut m, mut v) = ([0.0], [0.0]);
        adam_step(&mut p, &[1.0], &mut m, &mut v, 1, 1e-3, B1, B2, EPS);
        assert!((p[0] - (-0.000999999990)).abs() < 1e-12, "{}", p[0]);
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = [0.3, -0.7];
        let (mut m, mut v) = ([0.0; 2], [0.0; 2]);
        adam_step(&mut p, &[0.0, 0.0], &mut m, &mut v, 1, 1e-3, B1, B2, EPS);
        assert_eq!(p, [0.3, -0.7]);
    }

    #[test]
    fn two_steps_match_scalar_trace() {
        // Hand trace with g=1 twice: m2 = 0.19, v2 = 0.001999,
        // bc1 = 0.19, bc2 = 0.001999 -> m_hat = v_hat = 1 at both steps.
        let mut p = [0.0];
        let (mut m, mut v) = ([0.0], [0.0]);
        adam_step(&mut p, &[1.0], &mut m, &mut v, 1, 1e-3, B1, B2, EPS);
        adam_step(&mut p, &[1.0], &mut m, &mut v, 2, 1e-3, B1, B2, EPS);
        let step = 1e-3 / (1.0 + EPS);
        assert!((p[0] - (-2.0 * step)).abs() < 1e-12, "{}", p[0]);
        assert!((m[0] - 0.19).abs() < 1e-15);
        assert!((v[0] - 0.001999).abs() < 1e-15);
    }
}
