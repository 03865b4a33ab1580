//! Experiment configuration: a small `key = value` format with `#`
//! comments and dotted section keys, e.g. `training.epochs = 30`.
//!
//! Parsing is strict: unknown keys, duplicate keys, type mismatches, and
//! missing required keys are hard errors carrying 1-based line numbers.
//! The sparsity weights `regularizer.lambda` and `regularizer.beta` are the
//! only required keys - experiments must never silently rely on their
//! defaults. Every other key falls back to the documented default and
//! [`echo`] renders the fully resolved config back out in the same format,
//! so a run log can be re-parsed to reproduce a run exactly.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::autoencoder::{ReconLoss, TrainConfig};
use crate::datasets::{NoiseKind, NoiseSpec};
use crate::error::{Error, Result};
use crate::regularizers::{RegKind, RegularizerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    SynthDigits,
    SynthBlobs,
    Idx,
}

impl DatasetKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DatasetKind::SynthDigits => "synth_digits",
            DatasetKind::SynthBlobs => "synth_blobs",
            DatasetKind::Idx => "idx",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    /// Sample count for the synthetic kinds.
    pub n: usize,
    /// Dimensionality for synth_blobs.
    pub d: usize,
    /// Class count for synth_blobs.
    pub classes: usize,
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
    /// Fraction of the training file carved out for validation (idx kind);
    /// 1/6 gives the standard 5:1 train/val split.
    pub val_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Expected input dimensionality; 0 means infer from the dataset, a
    /// nonzero value is validated against it.
    pub d: usize,
    pub h_start: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub eps: f64,
    /// Truncation grid; empty means derive automatically per model.
    pub lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub grid_min: usize,
    pub grid_max: usize,
    pub n_iters: usize,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub model: ModelConfig,
    pub training: TrainConfig,
    pub analysis: AnalysisConfig,
    pub search: SearchConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
}

/// Raw key/value lines with duplicate detection and line tracking.
struct RawConfig {
    map: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<RawConfig> {
        let mut map: BTreeMap<String, (String, usize)> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.split_once('#') {
                Some((before, _)) => before,
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config {
                    line: line_no,
                    msg: "empty key".to_string(),
                });
            }
            if let Some((_, first)) = map.get(&key) {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("duplicate key '{key}' (first set at line {first})"),
                });
            }
            map.insert(key, (value, line_no));
        }
        Ok(RawConfig { map })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(
        &mut self,
        key: &str,
        default: T,
        type_name: &str,
    ) -> Result<(T, usize)> {
        match self.take(key) {
            None => Ok((default, 0)),
            Some((v, line)) => match v.parse::<T>() {
                Ok(t) => Ok((t, line)),
                Err(_) => Err(Error::Config {
                    line,
                    msg: format!("{key}: expected {type_name}, got '{v}'"),
                }),
            },
        }
    }

    fn finish(self) -> Result<()> {
        if let Some((key, (_, line))) = self.map.iter().min_by_key(|(_, (_, l))| *l) {
            return Err(Error::Config {
                line: *line,
                msg: format!("unknown key '{key}'"),
            });
        }
        Ok(())
    }
}

fn constraint(line: usize, msg: String) -> Error {
    Error::Config { line, msg }
}

/// Parses and fully validates a config, applying documented defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut raw = RawConfig::parse(text)?;

    // dataset
    let (kind_s, kind_line) = match raw.take("dataset.kind") {
        Some((v, l)) => (v, l),
        None => ("synth_digits".to_string(), 0),
    };
    let kind = match kind_s.as_str() {
        "synth_digits" => DatasetKind::SynthDigits,
        "synth_blobs" => DatasetKind::SynthBlobs,
        "idx" => DatasetKind::Idx,
        other => {
            return Err(constraint(
                kind_line,
                format!("dataset.kind: unknown dataset kind '{other}'"),
            ))
        }
    };
    let (n, n_line) = raw.take_parsed("dataset.n", 7500usize, "a count")?;
    if n == 0 {
        return Err(constraint(n_line, "dataset.n must be >= 1".to_string()));
    }
    let (dd, dd_line) = raw.take_parsed("dataset.d", 16usize, "a count")?;
    if dd == 0 {
        return Err(constraint(dd_line, "dataset.d must be >= 1".to_string()));
    }
    let (classes, cl_line) = raw.take_parsed("dataset.classes", 10usize, "a count")?;
    if classes < 2 {
        return Err(constraint(
            cl_line,
            "dataset.classes must be >= 2".to_string(),
        ));
    }
    let path_of = |raw: &mut RawConfig, key: &str| -> PathBuf {
        raw.take(key).map(|(v, _)| PathBuf::from(v)).unwrap_or_default()
    };
    let train_images = path_of(&mut raw, "dataset.train_images");
    let train_labels = path_of(&mut raw, "dataset.train_labels");
    let test_images = path_of(&mut raw, "dataset.test_images");
    let test_labels = path_of(&mut raw, "dataset.test_labels");
    let (val_fraction, vf_line) =
        raw.take_parsed("dataset.val_fraction", 1.0 / 6.0, "a float")?;
    if !(0.0..1.0).contains(&val_fraction) {
        return Err(constraint(
            vf_line,
            format!("dataset.val_fraction must be in [0,1), got {val_fraction}"),
        ));
    }
    if kind == DatasetKind::Idx {
        for (p, key) in [
            (&train_images, "dataset.train_images"),
            (&train_labels, "dataset.train_labels"),
            (&test_images, "dataset.test_images"),
            (&test_labels, "dataset.test_labels"),
        ] {
            if p.as_os_str().is_empty() {
                return Err(constraint(
                    kind_line,
                    format!("dataset.kind = idx requires {key}"),
                ));
            }
        }
    }

    // model
    let (model_d, _) = raw.take_parsed("model.d", 0usize, "a count")?;
    let (h_start, h_line) = raw.take_parsed("model.h_start", 400usize, "a count")?;
    if h_start == 0 {
        return Err(constraint(h_line, "model.h_start must be >= 1".to_string()));
    }

    // regularizer (lambda and beta are the required keys)
    let (reg_kind_s, reg_kind_line) = match raw.take("regularizer.kind") {
        Some((v, l)) => (v, l),
        None => ("push_contractive".to_string(), 0),
    };
    let reg_kind = RegKind::parse(&reg_kind_s)
        .map_err(|e| constraint(reg_kind_line, format!("regularizer.kind: {e}")))?;
    let (lambda, lambda_line) = match raw.take("regularizer.lambda") {
        Some((v, l)) => (
            v.parse::<f64>().map_err(|_| Error::Config {
                line: l,
                msg: format!("regularizer.lambda: expected a float, got '{v}'"),
            })?,
            l,
        ),
        None => {
            return Err(constraint(
                0,
                "missing required key 'regularizer.lambda'".to_string(),
            ))
        }
    };
    let (beta, beta_line) = match raw.take("regularizer.beta") {
        Some((v, l)) => (
            v.parse::<f64>().map_err(|_| Error::Config {
                line: l,
                msg: format!("regularizer.beta: expected a float, got '{v}'"),
            })?,
            l,
        ),
        None => {
            return Err(constraint(
                0,
                "missing required key 'regularizer.beta'".to_string(),
            ))
        }
    };
    if lambda < 0.0 {
        return Err(constraint(
            lambda_line,
            format!("regularizer.lambda must be >= 0, got {lambda}"),
        ));
    }
    if beta < 0.0 {
        return Err(constraint(
            beta_line,
            format!("regularizer.beta must be >= 0, got {beta}"),
        ));
    }
    let (alpha, alpha_line) = raw.take_parsed("regularizer.alpha", 0.01f64, "a float")?;
    if !(alpha > 0.0) {
        return Err(constraint(
            alpha_line,
            format!("regularizer.alpha must be > 0, got {alpha}"),
        ));
    }
    let default_k = (h_start / 10).max(1);
    let (k, k_line) = raw.take_parsed("regularizer.k", default_k, "a count")?;
    if k < 1 || k > h_start {
        return Err(constraint(
            k_line,
            format!("regularizer.k must be in 1..=h_start ({h_start}), got {k}"),
        ));
    }
    let regularizer = RegularizerSpec {
        kind: reg_kind,
        lambda,
        beta,
        alpha,
        k,
    };

    // training
    let (epochs, ep_line) = raw.take_parsed("training.epochs", 30usize, "a count")?;
    if epochs == 0 {
        return Err(constraint(ep_line, "training.epochs must be >= 1".to_string()));
    }
    let (batch_size, bs_line) = raw.take_parsed("training.batch_size", 32usize, "a count")?;
    if batch_size == 0 {
        return Err(constraint(
            bs_line,
            "training.batch_size must be >= 1".to_string(),
        ));
    }
    let (learning_rate, lr_line) =
        raw.take_parsed("training.learning_rate", 1e-3f64, "a float")?;
    if !(learning_rate > 0.0) {
        return Err(constraint(
            lr_line,
            format!("training.learning_rate must be > 0, got {learning_rate}"),
        ));
    }
    let (adam_beta1, b1_line) = raw.take_parsed("training.adam_beta1", 0.9f64, "a float")?;
    let (adam_beta2, b2_line) = raw.take_parsed("training.adam_beta2", 0.999f64, "a float")?;
    for (b, line, name) in [
        (adam_beta1, b1_line, "training.adam_beta1"),
        (adam_beta2, b2_line, "training.adam_beta2"),
    ] {
        if !(0.0..1.0).contains(&b) {
            return Err(constraint(line, format!("{name} must be in [0,1), got {b}")));
        }
    }
    let (adam_eps, eps_line) = raw.take_parsed("training.adam_eps", 1e-8f64, "a float")?;
    if !(adam_eps > 0.0) {
        return Err(constraint(
            eps_line,
            format!("training.adam_eps must be > 0, got {adam_eps}"),
        ));
    }
    let (shuffle, _) = raw.take_parsed("training.shuffle", true, "true or false")?;
    let (recon_s, recon_line) = match raw.take("training.recon") {
        Some((v, l)) => (v, l),
        None => ("mae".to_string(), 0),
    };
    let recon = ReconLoss::parse(&recon_s)
        .map_err(|e| constraint(recon_line, format!("training.recon: {e}")))?;

    // noise
    let (noise_kind_s, noise_kind_line) = match raw.take("noise.kind") {
        Some((v, l)) => (v, l),
        None => ("none".to_string(), 0),
    };
    let noise_kind = NoiseKind::parse(&noise_kind_s)
        .map_err(|e| constraint(noise_kind_line, format!("noise.kind: {e}")))?;
    let (nu, nu_line) = raw.take_parsed("noise.nu", 0.0f64, "a float")?;
    let (sigma, sigma_line) = raw.take_parsed("noise.sigma", 0.0f64, "a float")?;
    if nu_line > 0 && noise_kind != NoiseKind::ZeroMask {
        return Err(constraint(
            nu_line,
            "noise.nu applies only with noise.kind = zero_mask".to_string(),
        ));
    }
    if sigma_line > 0 && noise_kind != NoiseKind::Gaussian {
        return Err(constraint(
            sigma_line,
            "noise.sigma applies only with noise.kind = gaussian".to_string(),
        ));
    }
    if !(0.0..=1.0).contains(&nu) {
        return Err(constraint(
            nu_line,
            format!("noise.nu must be in [0,1], got {nu}"),
        ));
    }
    if sigma < 0.0 {
        return Err(constraint(
            sigma_line,
            format!("noise.sigma must be >= 0, got {sigma}"),
        ));
    }
    let noise = NoiseSpec {
        kind: noise_kind,
        nu,
        sigma,
    };

    // analysis
    let (eps, aeps_line) = raw.take_parsed("analysis.eps", 1e-3f64, "a float")?;
    if !(eps > 0.0) {
        return Err(constraint(
            aeps_line,
            format!("analysis.eps must be > 0, got {eps}"),
        ));
    }
    let lengths = match raw.take("analysis.lengths") {
        None => Vec::new(),
        Some((v, line)) => {
            if v == "auto" {
                Vec::new()
            } else {
                let mut out = Vec::new();
                for part in v.split(',') {
                    let val: usize = part.trim().parse().map_err(|_| Error::Config {
                        line,
                        msg: format!(
                            "analysis.lengths: expected 'auto' or comma-separated counts, got '{v}'"
                        ),
                    })?;
                    out.push(val);
                }
                if out.is_empty() || out.windows(2).any(|w| w[0] >= w[1]) || out[0] == 0 {
                    return Err(constraint(
                        line,
                        "analysis.lengths must be ascending positive counts".to_string(),
                    ));
                }
                out
            }
        }
    };

    // search
    let (grid_min, gmin_line) = raw.take_parsed("search.grid_min", 1usize, "a count")?;
    let (grid_max, gmax_line) = raw.take_parsed("search.grid_max", 100usize, "a count")?;
    if grid_min == 0 {
        return Err(constraint(
            gmin_line,
            "search.grid_min must be >= 1".to_string(),
        ));
    }
    if grid_max < grid_min {
        return Err(constraint(
            gmax_line,
            format!("search.grid_max must be >= grid_min ({grid_min}), got {grid_max}"),
        ));
    }
    let (n_iters, ni_line) = raw.take_parsed("search.n_iters", 50usize, "a count")?;
    if n_iters == 0 || n_iters > grid_max - grid_min + 1 {
        return Err(constraint(
            ni_line,
            format!(
                "search.n_iters must be in 1..={}, got {n_iters}",
                grid_max - grid_min + 1
            ),
        ));
    }
    let (tau, tau_line) = raw.take_parsed("search.tau", 0.05f64, "a float")?;
    if tau < 0.0 {
        return Err(constraint(
            tau_line,
            format!("search.tau must be >= 0, got {tau}"),
        ));
    }

    // top level
    let output_dir = raw
        .take("output_dir")
        .map(|(v, _)| PathBuf::from(v))
        .unwrap_or_else(|| PathBuf::from("out"));
    let (seed, _) = raw.take_parsed("seed", 42u64, "a 64-bit seed")?;

    raw.finish()?;

    let training = TrainConfig {
        epochs,
        batch_size,
        learning_rate,
        adam_beta1,
        adam_beta2,
        adam_eps,
        seed,
        regularizer,
        noise,
        shuffle,
        recon,
    };
    Ok(ExperimentConfig {
        dataset: DatasetConfig {
            kind,
            n,
            d: dd,
            classes,
            train_images,
            train_labels,
            test_images,
            test_labels,
            val_fraction,
        },
        model: ModelConfig {
            d: model_d,
            h_start,
        },
        training,
        analysis: AnalysisConfig { eps, lengths },
        search: SearchConfig {
            grid_min,
            grid_max,
            n_iters,
            tau,
        },
        output_dir,
        seed,
    })
}

/// Renders the fully resolved config in the same `key = value` format.
/// `parse_config(echo(&c))` reconstructs `c` exactly; run logs embed this
/// text so any run can be replayed from its log alone.
pub fn echo(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    push("dataset.kind", cfg.dataset.kind.as_str().to_string());
    push("dataset.n", cfg.dataset.n.to_string());
    push("dataset.d", cfg.dataset.d.to_string());
    push("dataset.classes", cfg.dataset.classes.to_string());
    for (key, p) in [
        ("dataset.train_images", &cfg.dataset.train_images),
        ("dataset.train_labels", &cfg.dataset.train_labels),
        ("dataset.test_images", &cfg.dataset.test_images),
        ("dataset.test_labels", &cfg.dataset.test_labels),
    ] {
        if !p.as_os_str().is_empty() {
            push(key, p.display().to_string());
        }
    }
    push("dataset.val_fraction", cfg.dataset.val_fraction.to_string());
    push("model.d", cfg.model.d.to_string());
    push("model.h_start", cfg.model.h_start.to_string());
    let reg = &cfg.training.regularizer;
    push("regularizer.kind", reg.kind.as_str().to_string());
    push("regularizer.lambda", reg.lambda.to_string());
    push("regularizer.beta", reg.beta.to_string());
    push("regularizer.alpha", reg.alpha.to_string());
    push("regularizer.k", reg.k.to_string());
    let t = &cfg.training;
    push("training.epochs", t.epochs.to_string());
    push("training.batch_size", t.batch_size.to_string());
    push("training.learning_rate", t.learning_rate.to_string());
    push("training.adam_beta1", t.adam_beta1.to_string());
    push("training.adam_beta2", t.adam_beta2.to_string());
    push("training.adam_eps", t.adam_eps.to_string());
    push("training.shuffle", t.shuffle.to_string());
    push("training.recon", t.recon.as_str().to_string());
    push("noise.kind", t.noise.kind.as_str().to_string());
    if t.noise.kind == NoiseKind::ZeroMask {
        push("noise.nu", t.noise.nu.to_string());
    }
    if t.noise.kind == NoiseKind::Gaussian {
        push("noise.sigma", t.noise.sigma.to_string());
    }
    push("analysis.eps", cfg.analysis.eps.to_string());
    let lengths = if cfg.analysis.lengths.is_empty() {
        "auto".to_string()
    } else {
        cfg.analysis
            .lengths
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    push("analysis.lengths", lengths);
    push("search.grid_min", cfg.search.grid_min.to_string());
    push("search.grid_max", cfg.search.grid_max.to_string());
    push("search.n_iters", cfg.search.n_iters.to_string());
    push("search.tau", cfg.search.tau.to_string());
    push("output_dir", cfg.output_dir.display().to_string());
    push("seed", cfg.seed.to_string());
    out
}

/// Applies CLI-level overrides, keeping `training.seed` in lockstep with
/// the top-level seed.
pub fn apply_overrides(cfg: &mut ExperimentConfig, seed: Option<u64>, out: Option<PathBuf>) {
    if let Some(s) = seed {
        cfg.seed = s;
        cfg.training.seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
}
