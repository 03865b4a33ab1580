//! Forward pass, exact backpropagation of the total loss, and the
//! (denoising) minibatch training loop.

use crate::autoencoder::{Adam, AutoencoderParams, Gradients};
use crate::datasets::{corrupt, Dataset, NoiseKind, NoiseSpec};
use crate::error::{Error, Result};
use crate::numcore::{sigmoid_inplace, Matrix, Rng};
use crate::regularizers::{ksparse_project_with_mask, penalty_and_grads, penalty_value, RegularizerSpec};

/// Reconstruction distance. Mean absolute error is the default loss; mean
/// squared error is available behind this switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconLoss {
    Mae,
    Mse,
}

impl ReconLoss {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReconLoss::Mae => "mae",
            ReconLoss::Mse => "mse",
        }
    }

    pub fn parse(s: &str) -> Result<ReconLoss> {
        Ok(match s {
            "mae" => ReconLoss::Mae,
            "mse" => ReconLoss::Mse,
            other => return Err(Error::arg(format!("unknown recon loss '{other}'"))),
        })
    }
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    pub regularizer: RegularizerSpec,
    pub noise: NoiseSpec,
    pub shuffle: bool,
    pub recon: ReconLoss,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 32,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 42,
            regularizer: RegularizerSpec::none(),
            noise: NoiseSpec::none(),
            shuffle: true,
            recon: ReconLoss::Mae,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 || self.batch_size < 1 {
            return Err(Error::arg(format!(
                "epochs and batch_size must be >= 1, got {}/{}",
                self.epochs, self.batch_size
            )));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::arg(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::arg(format!("{name} must be in [0,1), got {b}")));
            }
        }
        if !(self.adam_eps > 0.0) {
            return Err(Error::arg(format!("adam_eps must be > 0, got {}", self.adam_eps)));
        }
        self.noise.validate()
    }
}

/// Per-epoch loss components and the FLOPs tally under the declared cost
/// model (6 FLOPs per weight per sample: forward 2, backward 4; penalties
/// and optimizer arithmetic excluded).
#[derive(Debug, Clone, Copy)]
pub struct EpochStats {
    pub reconstruction_loss: f64,
    pub penalty_loss: f64,
    pub total_loss: f64,
    pub flops_this_epoch: u64,
}

/// Loss curve over a full run.
#[derive(Debug, Clone, Default)]
pub struct TrainTrace {
    pub epochs: Vec<EpochStats>,
}

impl TrainTrace {
    pub fn total_flops(&self) -> u64 {
        self.epochs.iter().map(|e| e.flops_this_epoch).sum()
    }

    pub fn final_total_loss(&self) -> f64 {
        self.epochs.last().map_or(f64::NAN, |e| e.total_loss)
    }
}

fn affine(x: &Matrix, w: &Matrix, b: &[f64]) -> Result<Matrix> {
    let mut a = x.matmul(w)?;
    a.add_row_bias(b)?;
    Ok(a)
}

/// Encoder: sigmoid(x W_enc + b_enc), batch rows in, code rows out.
pub fn encode(params: &AutoencoderParams, x: &Matrix) -> Result<Matrix> {
    let mut a = affine(x, &params.w_enc, &params.b_enc)?;
    sigmoid_inplace(&mut a);
    Ok(a)
}

/// Decoder: sigmoid(h W_dec + b_dec).
pub fn decode(params: &AutoencoderParams, h: &Matrix) -> Result<Matrix> {
    let mut a = affine(h, &params.w_dec, &params.b_dec)?;
    sigmoid_inplace(&mut a);
    Ok(a)
}

/// Loss components of one evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LossParts {
    pub total: f64,
    pub recon: f64,
    pub penalty: f64,
}

fn recon_loss(y: &Matrix, x_clean: &Matrix, kind: ReconLoss) -> f64 {
    let n = (y.rows() * y.cols()) as f64;
    let mut acc = 0.0;
    match kind {
        ReconLoss::Mae => {
            for (a, b) in y.as_slice().iter().zip(x_clean.as_slice()) {
                acc += (a - b).abs();
            }
        }
        ReconLoss::Mse => {
            for (a, b) in y.as_slice().iter().zip(x_clean.as_slice()) {
                acc += (a - b) * (a - b);
            }
        }
    }
    acc / n
}

/// Total loss = reconstruction(x_clean, decode(encode(x_in))) + weighted
/// penalties. `x_in` is either `x_clean` itself or its corrupted version.
/// Reconstruction is mean absolute error (see [`sosae_loss_with`] for the
/// MSE switch).
pub fn sosae_loss(
    params: &AutoencoderParams,
    x_clean: &Matrix,
    x_in: &Matrix,
    spec: &RegularizerSpec,
) -> Result<LossParts> {
    sosae_loss_with(params, x_clean, x_in, spec, ReconLoss::Mae)
}

/// [`sosae_loss`] with an explicit reconstruction distance.
pub fn sosae_loss_with(
    params: &AutoencoderParams,
    x_clean: &Matrix,
    x_in: &Matrix,
    spec: &RegularizerSpec,
    recon: ReconLoss,
) -> Result<LossParts> {
    check_batch_shapes(params, x_clean, x_in)?;
    let h = encode(params, x_in)?;
    let hp = if spec.kind.has_ksparse() {
        ksparse_project_with_mask(&h, spec.k)?.0
    } else {
        h.clone()
    };
    let y = decode(params, &hp)?;
    let r = recon_loss(&y, x_clean, recon);
    let p = penalty_value(spec, &h, &params.w_enc)?;
    Ok(LossParts {
        total: r + p,
        recon: r,
        penalty: p,
    })
}

/// Exact gradients of the total loss for every parameter block, fused with
/// the loss evaluation (one forward pass).
///
/// The absolute-error subgradient at exact zeros is 0. For k-sparse kinds
/// the reconstruction gradient passes straight through the retained support
/// only, while the contractive term (computed on pre-projection h) stays
/// dense.
pub fn loss_and_grads(
    params: &AutoencoderParams,
    x_clean: &Matrix,
    x_in: &Matrix,
    spec: &RegularizerSpec,
    recon: ReconLoss,
) -> Result<(Gradients, LossParts)> {
    check_batch_shapes(params, x_clean, x_in)?;
    let b = x_in.rows();
    let d = params.d();
    let h = encode(params, x_in)?;
    let (hp, mask) = if spec.kind.has_ksparse() {
        let (hp, mask) = ksparse_project_with_mask(&h, spec.k)?;
        (hp, Some(mask))
    } else {
        (h.clone(), None)
    };
    let y = decode(params, &hp)?;
    let r = recon_loss(&y, x_clean, recon);

    // dL/dy, then delta2 = dL/da2 through the output sigmoid.
    let scale = 1.0 / (b * d) as f64;
    let mut delta2 = Matrix::zeros(b, d);
    {
        let dst = delta2.as_mut_slice();
        let ys = y.as_slice();
        let xs = x_clean.as_slice();
        match recon {
            ReconLoss::Mae => {
                for i in 0..dst.len() {
                    let diff = ys[i] - xs[i];
                    let sign = if diff > 0.0 {
                        1.0
                    } else if diff < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    dst[i] = sign * scale * ys[i] * (1.0 - ys[i]);
                }
            }
            ReconLoss::Mse => {
                for i in 0..dst.len() {
                    dst[i] = 2.0 * (ys[i] - xs[i]) * scale * ys[i] * (1.0 - ys[i]);
                }
            }
        }
    }

    let g_wd = hp.matmul_tn(&delta2)?;
    let g_bd = delta2.col_sums();

    // Back to the code: dL/dhp, masked to the support for k-sparse kinds.
    let mut dh = delta2.matmul_nt(&params.w_dec)?;
    if let Some(mask) = &mask {
        for (g, m) in dh.as_mut_slice().iter_mut().zip(mask.as_slice()) {
            *g *= m;
        }
    }

    // Penalty contributions on pre-projection h (and directly on W_enc).
    let (pval, pen_dh, pen_dwe) = penalty_and_grads(spec, &h, &params.w_enc)?;
    if let Some(pg) = &pen_dh {
        for (g, p) in dh.as_mut_slice().iter_mut().zip(pg.as_slice()) {
            *g += p;
        }
    }

    // Through the encoder sigmoid.
    {
        let dst = dh.as_mut_slice();
        let hs = h.as_slice();
        for i in 0..dst.len() {
            dst[i] *= hs[i] * (1.0 - hs[i]);
        }
    }
    let mut g_we = x_in.matmul_tn(&dh)?;
    if let Some(pg) = &pen_dwe {
        for (g, p) in g_we.as_mut_slice().iter_mut().zip(pg.as_slice()) {
            *g += p;
        }
    }
    let g_be = dh.col_sums();

    Ok((
        Gradients {
            w_enc: g_we,
            b_enc: g_be,
            w_dec: g_wd,
            b_dec: g_bd,
        },
        LossParts {
            total: r + pval,
            recon: r,
            penalty: pval,
        },
    ))
}

/// Gradients only; see [`loss_and_grads`].
pub fn backward(
    params: &AutoencoderParams,
    x_clean: &Matrix,
    x_in: &Matrix,
    spec: &RegularizerSpec,
) -> Result<Gradients> {
    Ok(loss_and_grads(params, x_clean, x_in, spec, ReconLoss::Mae)?.0)
}

fn check_batch_shapes(params: &AutoencoderParams, x_clean: &Matrix, x_in: &Matrix) -> Result<()> {
    if x_in.cols() != params.d() || x_clean.cols() != params.d() || x_clean.rows() != x_in.rows() {
        return Err(Error::shape(
            "autoencoder batch",
            format!("clean {} / in {}", x_clean.shape_str(), x_in.shape_str()),
            format!("d={}", params.d()),
        ));
    }
    Ok(())
}

/// Trains a `hidden`-unit autoencoder on the train split of `data`.
///
/// Runs `epochs * ceil(n/batch)` Adam steps over shuffled minibatches.
/// When noise is configured, the whole epoch's inputs are corrupted afresh
/// from a per-epoch stream derived from (seed, epoch) while targets stay
/// clean. Deterministic: same (data, hidden, config) gives bit-identical
/// parameters.
pub fn train(
    data: &Dataset,
    hidden: usize,
    cfg: &TrainConfig,
) -> Result<(AutoencoderParams, TrainTrace)> {
    cfg.validate()?;
    cfg.regularizer.validate(hidden)?;
    if data.train_idx.is_empty() {
        return Err(Error::arg("empty train split"));
    }
    let x_train = data.gather_x(&data.train_idx);
    let n = x_train.rows();
    let d = x_train.cols();

    let mut rng = Rng::new(cfg.seed);
    let mut params = AutoencoderParams::init(d, hidden, &mut rng)?;
    let mut adam = Adam::new(&params);
    let mut trace = TrainTrace::default();
    let flops_per_epoch = (n as u64) * 12 * (d as u64) * (hidden as u64);

    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..cfg.epochs {
        let corrupted;
        let x_in_epoch: &Matrix = if cfg.noise.kind == NoiseKind::None {
            &x_train
        } else {
            corrupted = corrupt(&x_train, &cfg.noise, &mut Rng::derived(cfg.seed, epoch as u64))?;
            &corrupted
        };
        if cfg.shuffle {
            rng.shuffle(&mut order);
        }

        let mut recon_sum = 0.0;
        let mut penalty_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let bs = batch.len();
            let xc = gather_rows(&x_train, batch);
            let xi = gather_rows(x_in_epoch, batch);
            let (grads, parts) = loss_and_grads(&params, &xc, &xi, &cfg.regularizer, cfg.recon)?;
            if !parts.total.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    msg: format!("total loss {}", parts.total),
                });
            }
            adam.step(
                &mut params,
                &grads,
                cfg.learning_rate,
                cfg.adam_beta1,
                cfg.adam_beta2,
                cfg.adam_eps,
            );
            recon_sum += parts.recon * bs as f64;
            penalty_sum += parts.penalty * bs as f64;
        }
        let recon = recon_sum / n as f64;
        let penalty = penalty_sum / n as f64;
        trace.epochs.push(EpochStats {
            reconstruction_loss: recon,
            penalty_loss: penalty,
            total_loss: recon + penalty,
            flops_this_epoch: flops_per_epoch,
        });
    }
    Ok((params, trace))
}

fn gather_rows(src: &Matrix, idx: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(idx.len(), src.cols());
    for (r, &i) in idx.iter().enumerate() {
        out.row_mut(r).copy_from_slice(src.row(i));
    }
    out
}

/// Convenience forward pass producing the downstream feature codes for a
/// spec: encoder activations, with the k-sparse projection applied for
/// k-sparse kinds (what the decoder actually consumes).
pub fn codes(params: &AutoencoderParams, x: &Matrix, spec: &RegularizerSpec) -> Result<Matrix> {
    let h = encode(params, x)?;
    if spec.kind.has_ksparse() {
        Ok(ksparse_project_with_mask(&h, spec.k)?.0)
    } else {
        Ok(h)
    }
}
