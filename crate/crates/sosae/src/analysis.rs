//! Representation measurements: compressed-length detection, truncation,
//! the linear classification probe, and FLOPs/memory accounting.

use crate::autoencoder::{codes, AutoencoderParams};
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::numcore::Matrix;
use crate::regularizers::RegularizerSpec;

/// Default threshold on mean |h_k| below which a position counts as
/// inactive: far below sigmoid's working range, far above float noise.
pub const DEFAULT_EPS: f64 = 1e-3;

/// Mean absolute activation per code position over a dataset, with the
/// activity threshold used to interpret it.
#[derive(Debug, Clone)]
pub struct ActivationProfile {
    pub mean_abs: Vec<f64>,
    pub eps: f64,
}

/// Profiles the code positions of `params` over the rows of `x`
/// (spec-aware: k-sparse kinds are profiled on their projected codes).
pub fn activation_profile(
    params: &AutoencoderParams,
    x: &Matrix,
    spec: &RegularizerSpec,
    eps: f64,
) -> Result<ActivationProfile> {
    if !(eps > 0.0) {
        return Err(Error::arg(format!("eps must be > 0, got {eps}")));
    }
    let c = codes(params, x, spec)?;
    let n = c.rows() as f64;
    let mut mean_abs = vec![0.0; c.cols()];
    for i in 0..c.rows() {
        for (acc, v) in mean_abs.iter_mut().zip(c.row(i)) {
            *acc += v.abs();
        }
    }
    for v in &mut mean_abs {
        *v /= n;
    }
    Ok(ActivationProfile { mean_abs, eps })
}

/// 1 + the largest position whose mean |h| exceeds eps; 0 if none do.
/// The effective embedding size: everything past it can be truncated.
pub fn compressed_length(profile: &ActivationProfile) -> usize {
    profile
        .mean_abs
        .iter()
        .rposition(|&v| v > profile.eps)
        .map_or(0, |i| i + 1)
}

/// Number of positions above eps anywhere in the vector (the unstructured
/// sparsity count used for FLOPs accounting of L1/L2-style baselines).
pub fn active_count(profile: &ActivationProfile) -> usize {
    profile.mean_abs.iter().filter(|&&v| v > profile.eps).count()
}

/// Active positions occurring after the first inactive one. Empty when the
/// active set forms a perfect prefix; each entry is a straggler breaking
/// the self-organized layout.
pub fn prefix_violations(profile: &ActivationProfile) -> Vec<usize> {
    let first_inactive = match profile.mean_abs.iter().position(|&v| v <= profile.eps) {
        Some(i) => i,
        None => return Vec::new(),
    };
    (first_inactive..profile.mean_abs.len())
        .filter(|&i| profile.mean_abs[i] > profile.eps)
        .collect()
}

/// Keeps the first `len` hidden units: encoder columns/biases and decoder
/// rows. The new model has h = len.
pub fn truncate_model(params: &AutoencoderParams, len: usize) -> Result<AutoencoderParams> {
    let (d, h) = (params.d(), params.h());
    if len < 1 || len > h {
        return Err(Error::arg(format!(
            "truncation length must be in 1..={h}, got {len}"
        )));
    }
    let mut w_enc = Matrix::zeros(d, len);
    for i in 0..d {
        w_enc.row_mut(i).copy_from_slice(&params.w_enc.row(i)[..len]);
    }
    let mut w_dec = Matrix::zeros(len, d);
    for j in 0..len {
        w_dec.row_mut(j).copy_from_slice(params.w_dec.row(j));
    }
    Ok(AutoencoderParams {
        w_enc,
        b_enc: params.b_enc[..len].to_vec(),
        w_dec,
        b_dec: params.b_dec.clone(),
    })
}

/// Mean absolute reconstruction error of `params` over the rows of `x`.
pub fn reconstruction_mae(params: &AutoencoderParams, x: &Matrix) -> Result<f64> {
    let y = crate::autoencoder::decode(params, &crate::autoencoder::encode(params, x)?)?;
    let mut acc = 0.0;
    for (a, b) in y.as_slice().iter().zip(x.as_slice()) {
        acc += (a - b).abs();
    }
    Ok(acc / (x.rows() * x.cols()) as f64)
}

/// Probe hyperparameters, fixed across all compared models for fairness.
#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub n_classes: usize,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl ProbeConfig {
    pub fn new(n_classes: usize) -> ProbeConfig {
        ProbeConfig {
            n_classes,
            epochs: 100,
            learning_rate: 1e-2,
        }
    }
}

/// Multinomial logistic regression on frozen features: a single linear
/// layer + softmax, zero-initialized, trained full-batch with Adam;
/// returns test accuracy in [0,1].
///
/// Zero initialization makes the probe deterministic without an RNG and
/// makes padding invariance exact: all-zero feature columns receive zero
/// gradient forever, so appending them cannot change any prediction.
pub fn probe_train_eval(
    features_train: &Matrix,
    labels_train: &[u32],
    features_test: &Matrix,
    labels_test: &[u32],
    cfg: &ProbeConfig,
) -> Result<f64> {
    let (n, dim) = (features_train.rows(), features_train.cols());
    let c = cfg.n_classes;
    if labels_train.len() != n || labels_test.len() != features_test.rows() {
        return Err(Error::shape(
            "probe labels",
            format!("{} / {}", labels_train.len(), labels_test.len()),
            format!("{} / {}", n, features_test.rows()),
        ));
    }
    if features_test.cols() != dim {
        return Err(Error::shape(
            "probe features",
            features_train.shape_str(),
            features_test.shape_str(),
        ));
    }
    if let Some(&bad) = labels_train
        .iter()
        .chain(labels_test)
        .find(|&&l| l as usize >= c)
    {
        return Err(Error::arg(format!(
            "label {bad} out of range for {c} classes"
        )));
    }

    let mut w = Matrix::zeros(dim, c);
    let mut b = vec![0.0; c];
    let mut mw = vec![0.0; dim * c];
    let mut vw = vec![0.0; dim * c];
    let mut mb = vec![0.0; c];
    let mut vb = vec![0.0; c];
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);

    for t in 1..=cfg.epochs as u64 {
        // Softmax probabilities minus one-hot targets, scaled by 1/n.
        let mut logits = features_train.matmul(&w)?;
        logits.add_row_bias(&b)?;
        let mut g = logits;
        for i in 0..n {
            let row = g.row_mut(i);
            softmax_inplace(row);
            row[labels_train[i] as usize] -= 1.0;
            for v in row.iter_mut() {
                *v /= n as f64;
            }
        }
        let gw = features_train.matmul_tn(&g)?;
        let gb = g.col_sums();
        crate::autoencoder::adam_step(
            w.as_mut_slice(),
            gw.as_slice(),
            &mut mw,
            &mut vw,
            t,
            cfg.learning_rate,
            b1,
            b2,
            eps,
        );
        crate::autoencoder::adam_step(&mut b, &gb, &mut mb, &mut vb, t, cfg.learning_rate, b1, b2, eps);
    }

    let mut logits = features_test.matmul(&w)?;
    logits.add_row_bias(&b)?;
    let mut correct = 0usize;
    for i in 0..logits.rows() {
        if argmax(logits.row(i)) == labels_test[i] as usize {
            correct += 1;
        }
    }
    Ok(correct as f64 / logits.rows().max(1) as f64)
}

fn softmax_inplace(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Truncation curve: probe accuracy after truncating the model to each
/// length in `lengths`. Features come from the train split, accuracy from
/// the test split.
pub fn truncation_sweep(
    params: &AutoencoderParams,
    data: &Dataset,
    lengths: &[usize],
    spec: &RegularizerSpec,
) -> Result<Vec<(usize, f64)>> {
    let x_train = data.gather_x(&data.train_idx);
    let y_train = data.gather_labels(&data.train_idx);
    let x_test = data.gather_x(&data.test_idx);
    let y_test = data.gather_labels(&data.test_idx);
    let cfg = ProbeConfig::new(data.n_classes);
    let mut curve = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let model = truncate_model(params, len)?;
        let spec_l = clamp_spec(spec, len);
        let f_train = codes(&model, &x_train, &spec_l)?;
        let f_test = codes(&model, &x_test, &spec_l)?;
        let acc = probe_train_eval(&f_train, &y_train, &f_test, &y_test, &cfg)?;
        curve.push((len, acc));
    }
    Ok(curve)
}

/// Keeps a k-sparse spec valid on a truncated model.
pub(crate) fn clamp_spec(spec: &RegularizerSpec, h: usize) -> RegularizerSpec {
    let mut s = *spec;
    if s.kind.has_ksparse() && s.k > h {
        s.k = h;
    }
    s
}

/// Percentage of inference FLOPs needed by the first `active_len` positions
/// relative to the full width. For truncation-style models pass the
/// compressed length; for unstructured baselines pass the
/// [`active_count`].
pub fn flops_usage(active_len: usize, full_len: usize) -> Result<f64> {
    if active_len == 0 || active_len > full_len {
        return Err(Error::arg(format!(
            "need 0 < active_len <= full_len, got {active_len}/{full_len}"
        )));
    }
    Ok(100.0 * active_len as f64 / full_len as f64)
}

/// Bytes to store `n_samples` codes of `length` positions as 32-bit floats
/// (stored codes are f32 even though training is f64; that is the
/// convention the memory column reproduces).
pub fn memory_bytes(n_samples: usize, length: usize) -> u64 {
    (n_samples as u64) * (length as u64) * 4
}

/// Training cost under the declared model: epochs x n_samples x 6 FLOPs per
/// weight for each of the two d*h dense layers (forward multiply-add = 2,
/// backward roughly twice the forward). Regularizer and optimizer FLOPs are
/// excluded by that model, and the batch split is irrelevant to the tally -
/// the last parameter exists to document exactly that.
pub fn training_flops(
    d: usize,
    h: usize,
    n_samples: usize,
    epochs: usize,
    _batch_count_irrelevant: usize,
) -> u64 {
    (epochs as u64) * (n_samples as u64) * 6 * (2 * (d as u64) * (h as u64))
}

/// One row of the model-comparison report.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub model: String,
    pub dataset: String,
    pub compressed_length: usize,
    pub probe_accuracy: f64,
    pub flops_usage_pct: f64,
    pub memory_bytes: u64,
    pub truncation_curve: Vec<(usize, f64)>,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str =
        "model,dataset,compressed_length,probe_accuracy,flops_usage_pct,memory_bytes";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.model,
            self.dataset,
            self.compressed_length,
            self.probe_accuracy,
            self.flops_usage_pct,
            self.memory_bytes
        )
    }
}
