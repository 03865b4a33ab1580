//! Experiment drivers: the model comparison table, truncation curves, the
//! denoising sweep, and the embedding-size search comparison.
//!
//! Every driver writes its CSVs plus a `run.log` into the configured output
//! directory. The run log embeds the fully resolved config, so feeding it
//! back through `--config` reproduces every CSV byte for byte (runs are
//! serial and all randomness flows from the config seed). Files are written
//! to a temporary name and renamed into place, so readers never observe a
//! half-written file.
//!
//! Multi-model drivers isolate per-model failures: one diverging model is
//! recorded and skipped while the rest of the sweep completes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{
    activation_profile, active_count, compressed_length, flops_usage, memory_bytes,
    probe_train_eval, truncation_sweep, ExperimentReport, ProbeConfig,
};
use crate::autoencoder::{codes, save_checkpoint, train, AutoencoderParams, TrainConfig, TrainTrace};
use crate::config::{echo, DatasetKind, ExperimentConfig};
use crate::datasets::{corrupt, load_idx_split, synth_blobs, synth_digits, Dataset, NoiseSpec};
use crate::error::{Error, Result};
use crate::numcore::Rng;
use crate::regularizers::RegularizerSpec;
use crate::search::{grid_search, random_search, sosae_oneshot, SearchResult};

/// Loads the dataset selected by the config and checks it against the
/// declared model dimensionality.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let d = &cfg.dataset;
    let data = match d.kind {
        DatasetKind::SynthDigits => synth_digits(d.n, cfg.seed)?,
        DatasetKind::SynthBlobs => synth_blobs(d.n, d.d, d.classes, cfg.seed)?,
        DatasetKind::Idx => load_idx_split(
            &d.train_images,
            &d.train_labels,
            &d.test_images,
            &d.test_labels,
            d.val_fraction,
            cfg.seed,
        )?,
    };
    if cfg.model.d != 0 && cfg.model.d != data.d() {
        return Err(Error::arg(format!(
            "model.d = {} but the dataset has {} input dimensions",
            cfg.model.d,
            data.d()
        )));
    }
    Ok(data)
}

/// The six models of the comparison table, in report order. All reuse the
/// coefficients from the configured regularizer so the budgets stay
/// identical; only the penalty form varies.
pub fn table1_roster(reg: &RegularizerSpec) -> Vec<(&'static str, RegularizerSpec)> {
    vec![
        ("cae", RegularizerSpec::contractive(reg.beta)),
        (
            "sosae",
            RegularizerSpec::push_contractive(reg.lambda, reg.beta, reg.alpha),
        ),
        ("ksparse", RegularizerSpec::ksparse(reg.k)),
        (
            "ksparse_contractive",
            RegularizerSpec::ksparse_contractive(reg.k, reg.beta),
        ),
        ("l1", RegularizerSpec::l1(reg.lambda)),
        ("l2", RegularizerSpec::l2(reg.lambda)),
    ]
}

fn annotate(name: &str, e: Error) -> Error {
    match e {
        Error::Divergence { epoch, msg } => Error::Divergence {
            epoch,
            msg: format!("{name}: {msg}"),
        },
        Error::Argument(m) => Error::Argument(format!("{name}: {m}")),
        other => other,
    }
}

/// Metric accounting for one trained model.
///
/// The per-kind rules mirror what each sparsity form can actually save:
/// push kinds truncate, so compressed length, memory, and inference FLOPs
/// all follow the detected prefix length; the k-sparse projection saves
/// compute (k of h units fire) but not storage, because the surviving
/// positions vary per sample; unstructured kinds save compute only to the
/// extent whole units fall below eps, and save no storage at all.
pub fn report_for(
    name: &str,
    dataset_name: &str,
    data: &Dataset,
    params: &AutoencoderParams,
    spec: &RegularizerSpec,
    eps: f64,
) -> Result<ExperimentReport> {
    let h = params.h();
    let x_val = data.gather_x(&data.val_idx);
    if x_val.rows() == 0 {
        return Err(Error::arg("empty validation split"));
    }
    let prof = activation_profile(params, &x_val, spec, eps)?;
    let kind = spec.kind;
    let cl = if kind.has_push() {
        match compressed_length(&prof) {
            0 => return Err(annotate(name, Error::arg("every unit is inactive (compressed length 0)".to_string()))),
            l => l,
        }
    } else {
        h
    };
    let flops_len = if kind.has_push() {
        cl
    } else if kind.has_ksparse() {
        spec.k
    } else {
        active_count(&prof)
    };
    let flops = flops_usage(flops_len, h).map_err(|e| annotate(name, e))?;
    let mem_len = if kind.has_push() { cl } else { h };
    let mem = memory_bytes(data.n(), mem_len);

    let f_train = codes(params, &data.gather_x(&data.train_idx), spec)?;
    let f_test = codes(params, &data.gather_x(&data.test_idx), spec)?;
    let acc = probe_train_eval(
        &f_train,
        &data.gather_labels(&data.train_idx),
        &f_test,
        &data.gather_labels(&data.test_idx),
        &ProbeConfig::new(data.n_classes),
    )?;

    Ok(ExperimentReport {
        model: name.to_string(),
        dataset: dataset_name.to_string(),
        compressed_length: cl,
        probe_accuracy: acc,
        flops_usage_pct: flops,
        memory_bytes: mem,
        truncation_curve: Vec::new(),
    })
}

/// Trains one model under the given config and assembles its table row.
pub fn evaluate_model(
    name: &str,
    data: &Dataset,
    h_start: usize,
    tcfg: &TrainConfig,
    dataset_name: &str,
    eps: f64,
) -> Result<(AutoencoderParams, ExperimentReport)> {
    let (params, _trace) = train(data, h_start, tcfg).map_err(|e| annotate(name, e))?;
    let report = report_for(name, dataset_name, data, &params, &tcfg.regularizer, eps)?;
    Ok((params, report))
}

#[derive(Debug)]
pub struct Table1Outcome {
    pub rows: Vec<ExperimentReport>,
    pub failures: Vec<(String, Error)>,
    pub csv_path: PathBuf,
}

/// Trains the full roster and writes `table1.csv`, a formatted
/// `table1.txt`, and `run.log`. Per-model failures are collected, not
/// fatal.
pub fn run_table1(cfg: &ExperimentConfig) -> Result<Table1Outcome> {
    let data = load_dataset(cfg)?;
    let dataset_name = cfg.dataset.kind.as_str();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut log_lines = Vec::new();
    for (name, reg) in table1_roster(&cfg.training.regularizer) {
        let mut tcfg = cfg.training.clone();
        tcfg.regularizer = reg;
        match evaluate_model(name, &data, cfg.model.h_start, &tcfg, dataset_name, cfg.analysis.eps)
        {
            Ok((_, report)) => {
                log_lines.push(format!(
                    "table1 {name}: length={} probe={:.4} flops={:.1}% memory={}",
                    report.compressed_length,
                    report.probe_accuracy,
                    report.flops_usage_pct,
                    report.memory_bytes
                ));
                rows.push(report);
            }
            Err(e) => {
                log_lines.push(format!("table1 {name}: FAILED: {e}"));
                failures.push((name.to_string(), e));
            }
        }
    }

    let mut csv = String::from(ExperimentReport::CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    ensure_out_dir(cfg)?;
    let csv_path = cfg.output_dir.join("table1.csv");
    write_atomic(&csv_path, &csv)?;
    write_atomic(&cfg.output_dir.join("table1.txt"), &format_table(&rows))?;
    write_run_log(cfg, "table1", &log_lines)?;
    Ok(Table1Outcome {
        rows,
        failures,
        csv_path,
    })
}

/// Renders rows as an aligned human-readable table.
pub fn format_table(rows: &[ExperimentReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:<13} {:>8} {:>10} {:>8} {:>12}\n",
        "model", "dataset", "length", "probe", "flops", "memory"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<20} {:<13} {:>8} {:>9.2}% {:>7.1}% {:>12}\n",
            r.model,
            r.dataset,
            r.compressed_length,
            100.0 * r.probe_accuracy,
            r.flops_usage_pct,
            format_mb(r.memory_bytes)
        ));
    }
    out
}

fn format_mb(bytes: u64) -> String {
    format!("{:.2} MB", bytes as f64 / 1e6)
}

#[derive(Debug)]
pub struct Fig2Outcome {
    pub curves: Vec<(String, Vec<(usize, f64)>)>,
    pub failures: Vec<(String, Error)>,
}

/// Evenly spaced truncation lengths up to `h`, always including `h` itself
/// so the last point matches the untruncated model.
pub fn default_lengths(h: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=8).map(|i| (h * i / 8).max(1)).collect();
    out.dedup();
    out
}

/// Trains the roster and writes one `fig2_<model>.csv` truncation curve
/// per variant. Per-model failures are collected, not fatal.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Fig2Outcome> {
    let data = load_dataset(cfg)?;
    let lengths = if cfg.analysis.lengths.is_empty() {
        default_lengths(cfg.model.h_start)
    } else {
        cfg.analysis.lengths.clone()
    };
    let mut curves = Vec::new();
    let mut failures = Vec::new();
    let mut log_lines = vec![format!(
        "fig2 lengths: {}",
        lengths
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )];
    ensure_out_dir(cfg)?;
    for (name, reg) in table1_roster(&cfg.training.regularizer) {
        let mut tcfg = cfg.training.clone();
        tcfg.regularizer = reg;
        let attempt = train(&data, cfg.model.h_start, &tcfg)
            .map_err(|e| annotate(name, e))
            .and_then(|(params, _)| truncation_sweep(&params, &data, &lengths, &tcfg.regularizer));
        match attempt {
            Ok(curve) => {
                let mut csv = String::from("length,accuracy\n");
                for (len, acc) in &curve {
                    csv.push_str(&format!("{len},{acc}\n"));
                }
                write_atomic(&cfg.output_dir.join(format!("fig2_{name}.csv")), &csv)?;
                log_lines.push(format!(
                    "fig2 {name}: final accuracy {:.4}",
                    curve.last().map(|c| c.1).unwrap_or(f64::NAN)
                ));
                curves.push((name.to_string(), curve));
            }
            Err(e) => {
                log_lines.push(format!("fig2 {name}: FAILED: {e}"));
                failures.push((name.to_string(), e));
            }
        }
    }
    write_run_log(cfg, "fig2", &log_lines)?;
    Ok(Fig2Outcome { curves, failures })
}

/// Zero-masking fractions swept by the denoising comparison.
pub const FIG3_NU_LEVELS: [f64; 3] = [0.10, 0.25, 0.55];
/// Gaussian sigmas swept by the denoising comparison.
pub const FIG3_SIGMA_LEVELS: [f64; 5] = [0.05, 0.10, 0.15, 0.30, 0.50];

/// Decorrelates the probe-time corruption stream from the training stream.
const PROBE_NOISE_SALT: u64 = 0x9B0B_E001;

/// Probe accuracy in the regime a denoiser is deployed in: the probe's
/// train and test inputs are corrupted by the same process the model was
/// trained under, then encoded. Clean-input probes saturate on easy data;
/// corrupting the inputs makes feature robustness the thing being measured.
///
/// The corruption draws are seeded from `seed`, so a rerun with the same
/// config reproduces the same accuracy exactly.
pub fn noisy_probe_accuracy(
    data: &Dataset,
    params: &AutoencoderParams,
    spec: &RegularizerSpec,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<f64> {
    let mut rng = Rng::new(seed ^ PROBE_NOISE_SALT);
    let x_train = corrupt(&data.gather_x(&data.train_idx), noise, &mut rng)?;
    let x_test = corrupt(&data.gather_x(&data.test_idx), noise, &mut rng)?;
    let f_train = codes(params, &x_train, spec)?;
    let f_test = codes(params, &x_test, spec)?;
    probe_train_eval(
        &f_train,
        &data.gather_labels(&data.train_idx),
        &f_test,
        &data.gather_labels(&data.test_idx),
        &ProbeConfig::new(data.n_classes),
    )
}

#[derive(Debug, Clone)]
pub struct Fig3Row {
    pub model: String,
    pub noise_kind: String,
    pub level: f64,
    pub compressed_length: usize,
    pub probe_accuracy: f64,
}

impl Fig3Row {
    pub const CSV_HEADER: &'static str = "model,noise_kind,level,compressed_length,probe_accuracy";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.model, self.noise_kind, self.level, self.compressed_length, self.probe_accuracy
        )
    }
}

#[derive(Debug)]
pub struct Fig3Outcome {
    pub rows: Vec<Fig3Row>,
    pub failures: Vec<(String, Error)>,
}

/// Denoising sweep: trains the push model and a plain denoising
/// autoencoder under each corruption level and records the compressed
/// length and probe accuracy reached. The config's own noise block is
/// ignored; the sweep fixes its levels so runs are comparable.
///
/// Unlike the clean-data tables, probe accuracy here is measured on
/// corrupted inputs (see [`noisy_probe_accuracy`]): a denoiser's features
/// are only as good as what they preserve of a noisy observation.
///
/// The plain autoencoder has no truncation mechanism, so its compressed
/// length is always the full width.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<Fig3Outcome> {
    let data = load_dataset(cfg)?;
    let dataset_name = cfg.dataset.kind.as_str();
    let reg = &cfg.training.regularizer;
    let models = [
        (
            "sosae",
            RegularizerSpec::push_contractive(reg.lambda, reg.beta, reg.alpha),
        ),
        ("dae", RegularizerSpec::none()),
    ];
    let mut levels: Vec<NoiseSpec> = Vec::new();
    for nu in FIG3_NU_LEVELS {
        levels.push(NoiseSpec::zero_mask(nu));
    }
    for sigma in FIG3_SIGMA_LEVELS {
        levels.push(NoiseSpec::gaussian(sigma));
    }

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut log_lines = Vec::new();
    for (name, model_reg) in &models {
        for noise in &levels {
            let level = match noise.kind {
                crate::datasets::NoiseKind::ZeroMask => noise.nu,
                _ => noise.sigma,
            };
            let tag = format!("{name} {} {level}", noise.kind.as_str());
            let mut tcfg = cfg.training.clone();
            tcfg.regularizer = *model_reg;
            tcfg.noise = *noise;
            match evaluate_model(
                name,
                &data,
                cfg.model.h_start,
                &tcfg,
                dataset_name,
                cfg.analysis.eps,
            )
            .and_then(|(params, mut report)| {
                report.probe_accuracy =
                    noisy_probe_accuracy(&data, &params, model_reg, noise, tcfg.seed)?;
                Ok(report)
            }) {
                Ok(report) => {
                    log_lines.push(format!(
                        "fig3 {tag}: length={} probe={:.4}",
                        report.compressed_length, report.probe_accuracy
                    ));
                    rows.push(Fig3Row {
                        model: name.to_string(),
                        noise_kind: noise.kind.as_str().to_string(),
                        level,
                        compressed_length: report.compressed_length,
                        probe_accuracy: report.probe_accuracy,
                    });
                }
                Err(e) => {
                    log_lines.push(format!("fig3 {tag}: FAILED: {e}"));
                    failures.push((tag, e));
                }
            }
        }
    }

    let mut csv = String::from(Fig3Row::CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    ensure_out_dir(cfg)?;
    write_atomic(&cfg.output_dir.join("fig3.csv"), &csv)?;
    write_run_log(cfg, "fig3", &log_lines)?;
    Ok(Fig3Outcome { rows, failures })
}

#[derive(Debug)]
pub struct Table2Outcome {
    pub grid: SearchResult,
    pub random: SearchResult,
    pub sosae: SearchResult,
}

/// Search comparison under a shared budget: grid over the configured
/// candidate range, random sampling without replacement from the same
/// range, and the one-shot push run. Writes `table2.csv` plus a
/// per-candidate `table2_log.csv`. Errors here propagate - a partial
/// comparison is not meaningful.
pub fn run_table2(cfg: &ExperimentConfig) -> Result<Table2Outcome> {
    let data = load_dataset(cfg)?;
    let s = &cfg.search;
    let candidates: Vec<usize> = (s.grid_min..=s.grid_max).collect();
    let grid = grid_search(&data, &candidates, &cfg.training, s.tau)?;
    let random = random_search(
        &data,
        (s.grid_min, s.grid_max),
        s.n_iters,
        cfg.seed,
        &cfg.training,
        s.tau,
    )?;
    let reg = &cfg.training.regularizer;
    let mut push_cfg = cfg.training.clone();
    if !push_cfg.regularizer.kind.has_push() {
        push_cfg.regularizer = RegularizerSpec::push_contractive(reg.lambda, reg.beta, reg.alpha);
    }
    let sosae = sosae_oneshot(&data, cfg.model.h_start, &push_cfg)?;

    let mut csv = String::from(SearchResult::CSV_HEADER);
    csv.push('\n');
    for r in [&grid, &random, &sosae] {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    let mut log_csv = String::from("method,h,val_recon_loss,flops\n");
    for r in [&grid, &random, &sosae] {
        for c in &r.log {
            log_csv.push_str(&format!(
                "{},{},{},{}\n",
                r.method.as_str(),
                c.h,
                c.val_recon_loss,
                c.flops
            ));
        }
    }
    ensure_out_dir(cfg)?;
    write_atomic(&cfg.output_dir.join("table2.csv"), &csv)?;
    write_atomic(&cfg.output_dir.join("table2_log.csv"), &log_csv)?;
    let log_lines = vec![
        format!(
            "table2 grid: iterations={} tuned={} flops={}",
            grid.iterations, grid.tuned_value, grid.total_flops
        ),
        format!(
            "table2 random: iterations={} tuned={} flops={}",
            random.iterations, random.tuned_value, random.total_flops
        ),
        format!(
            "table2 sosae: iterations={} tuned={} flops={}",
            sosae.iterations, sosae.tuned_value, sosae.total_flops
        ),
    ];
    write_run_log(cfg, "table2", &log_lines)?;
    Ok(Table2Outcome {
        grid,
        random,
        sosae,
    })
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub params: AutoencoderParams,
    pub trace: TrainTrace,
    pub report: ExperimentReport,
    pub checkpoint_path: PathBuf,
}

/// Trains the single configured model, saves `checkpoint.bin` and a
/// `profile.csv` of per-position mean activations, and reports its metrics.
pub fn run_train(cfg: &ExperimentConfig) -> Result<TrainOutcome> {
    let data = load_dataset(cfg)?;
    let name = cfg.training.regularizer.kind.as_str();
    let (params, trace) = train(&data, cfg.model.h_start, &cfg.training)?;
    let report = report_for(
        name,
        cfg.dataset.kind.as_str(),
        &data,
        &params,
        &cfg.training.regularizer,
        cfg.analysis.eps,
    )?;
    ensure_out_dir(cfg)?;
    let checkpoint_path = cfg.output_dir.join("checkpoint.bin");
    save_checkpoint(&params, &checkpoint_path)?;
    let x_val = data.gather_x(&data.val_idx);
    let prof = activation_profile(&params, &x_val, &cfg.training.regularizer, cfg.analysis.eps)?;
    let mut csv = String::from("position,mean_abs_activation\n");
    for (i, v) in prof.mean_abs.iter().enumerate() {
        csv.push_str(&format!("{i},{v}\n"));
    }
    write_atomic(&cfg.output_dir.join("profile.csv"), &csv)?;
    let log_lines = vec![
        format!(
            "train {name}: epochs={} final_loss={:.6} flops={}",
            trace.epochs.len(),
            trace.final_total_loss(),
            trace.total_flops()
        ),
        format!(
            "train {name}: length={} probe={:.4} flops_usage={:.1}% memory={}",
            report.compressed_length,
            report.probe_accuracy,
            report.flops_usage_pct,
            report.memory_bytes
        ),
    ];
    write_run_log(cfg, "train", &log_lines)?;
    Ok(TrainOutcome {
        params,
        trace,
        report,
        checkpoint_path,
    })
}

fn ensure_out_dir(cfg: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    Ok(())
}

/// Write-temp-then-rename so concurrent readers never see a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// The run log starts with the resolved config (comment lines are ignored
/// by the parser, so the whole file is itself a valid config) followed by
/// per-step summary lines.
fn write_run_log(cfg: &ExperimentConfig, command: &str, lines: &[String]) -> Result<()> {
    let mut text = format!("# sosae {command}\n# pass this file back via --config to reproduce\n");
    text.push_str(&echo(cfg));
    for l in lines {
        text.push_str("# ");
        text.push_str(l);
        text.push('\n');
    }
    write_atomic(&cfg.output_dir.join("run.log"), &text)
}
