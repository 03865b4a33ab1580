//! Helpers shared by the integration tests.
#![allow(dead_code)]

use sosae::autoencoder::{loss_and_grads, sosae_loss_with, AutoencoderParams, ReconLoss};
use sosae::numcore::{rng_uniform, Matrix, Rng};
use sosae::regularizers::RegularizerSpec;

/// Relative error with a small absolute floor so near-zero pairs compare
/// as equal instead of blowing up the ratio.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let denom = a.abs().max(b.abs());
    if denom < 1e-10 {
        0.0
    } else {
        (a - b).abs() / denom
    }
}

/// One spec of every regularizer kind, with coefficients large enough that
/// each penalty term contributes visibly to the total gradient.
pub fn every_kind(h: usize) -> Vec<RegularizerSpec> {
    let k = (h / 2).max(1);
    vec![
        RegularizerSpec::none(),
        RegularizerSpec::l1(0.01),
        RegularizerSpec::l2(0.01),
        RegularizerSpec::ksparse(k),
        RegularizerSpec::contractive(0.05),
        RegularizerSpec::push(0.01, 0.01),
        RegularizerSpec::push_contractive(0.01, 0.05, 0.01),
        RegularizerSpec::ksparse_contractive(k, 0.05),
    ]
}

/// Random instance sized for gradient checking.
pub fn small_instance(seed: u64, d: usize, h: usize, b: usize) -> (AutoencoderParams, Matrix) {
    let mut rng = Rng::new(seed);
    let params = AutoencoderParams::init(d, h, &mut rng).unwrap();
    let x = rng_uniform(&mut rng, 0.0, 1.0, b, d).unwrap();
    (params, x)
}

/// Central finite differences over every parameter of every block; returns
/// the worst relative error against the analytic gradient.
pub fn fd_max_rel_err(
    params: &AutoencoderParams,
    x: &Matrix,
    spec: &RegularizerSpec,
    recon: ReconLoss,
    step: f64,
) -> f64 {
    let (grads, _) = loss_and_grads(params, x, x, spec, recon).unwrap();
    let eval = |p: &AutoencoderParams| sosae_loss_with(p, x, x, spec, recon).unwrap().total;
    let mut worst: f64 = 0.0;
    let mut check_block = |get: &dyn Fn(&mut AutoencoderParams) -> &mut [f64], analytic: &[f64]| {
        for i in 0..analytic.len() {
            let mut p = params.clone();
            get(&mut p)[i] += step;
            let up = eval(&p);
            let mut p = params.clone();
            get(&mut p)[i] -= step;
            let down = eval(&p);
            let fd = (up - down) / (2.0 * step);
            worst = worst.max(rel_err(fd, analytic[i]));
        }
    };
    check_block(&|p| p.w_enc.as_mut_slice(), grads.w_enc.as_slice());
    check_block(&|p| &mut p.b_enc, &grads.b_enc);
    check_block(&|p| p.w_dec.as_mut_slice(), grads.w_dec.as_slice());
    check_block(&|p| &mut p.b_dec, &grads.b_dec);
    worst
}
