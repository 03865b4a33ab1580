//! Command-line front end. All logic lives in the library; this binary
//! parses flags, loads the config, dispatches, and maps errors to exit
//! codes: 0 success, 1 config/usage error, 2 runtime failure (divergence,
//! I/O, bad file), 3 partial failure in a multi-model run.

use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use sosae::autoencoder::load_checkpoint;
use sosae::config::{apply_overrides, parse_config, ExperimentConfig};
use sosae::error::Error;
use sosae::experiments::{format_table, run_fig2, run_fig3, run_table1, run_table2, run_train};

#[derive(Parser)]
#[command(
    name = "sosae",
    version,
    about = "Self-organizing sparse autoencoder experiments"
)]
struct Cli {
    /// Path to a `key = value` config file (required by every subcommand
    /// except `inspect`; a run.log works too).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the config output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; accepted for forward compatibility, execution is
    /// serial so results stay byte-reproducible.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the configured model; writes checkpoint.bin and profile.csv.
    Train,
    /// Model comparison: six sparsity variants, four metrics each.
    Table1,
    /// Truncation curves: probe accuracy vs truncated length per variant.
    Fig2,
    /// Denoising sweep: push model vs plain DAE across noise levels.
    Fig3,
    /// Embedding-width search costs: grid vs random vs one-shot.
    Table2,
    /// Print a checkpoint's dimensions and parameter summary.
    Inspect {
        /// Path to a checkpoint written by `train`.
        checkpoint: PathBuf,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Argument(_) | Error::Shape { .. } => 1,
        Error::Divergence { .. } | Error::Io(_) | Error::Format { .. } => 2,
    }
}

fn load_cfg(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        line: 0,
        msg: "this subcommand needs --config <path>".to_string(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    let mut cfg = parse_config(&text)?;
    apply_overrides(&mut cfg, cli.seed, cli.out.clone());
    Ok(cfg)
}

fn frobenius(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn run(cli: &Cli) -> Result<i32, Error> {
    if cli.threads == 0 {
        return Err(Error::Config {
            line: 0,
            msg: "--threads must be >= 1".to_string(),
        });
    }
    match &cli.command {
        Command::Train => {
            let cfg = load_cfg(cli)?;
            let outcome = run_train(&cfg)?;
            let r = &outcome.report;
            println!(
                "trained {} on {}: length={} probe={:.4} flops={:.1}% memory={} bytes",
                r.model,
                r.dataset,
                r.compressed_length,
                r.probe_accuracy,
                r.flops_usage_pct,
                r.memory_bytes
            );
            println!("checkpoint: {}", outcome.checkpoint_path.display());
            Ok(0)
        }
        Command::Table1 => {
            let cfg = load_cfg(cli)?;
            let outcome = run_table1(&cfg)?;
            print!("{}", format_table(&outcome.rows));
            println!("wrote {}", outcome.csv_path.display());
            for (name, e) in &outcome.failures {
                eprintln!("{name} failed: {e}");
            }
            Ok(if outcome.failures.is_empty() { 0 } else { 3 })
        }
        Command::Fig2 => {
            let cfg = load_cfg(cli)?;
            let outcome = run_fig2(&cfg)?;
            for (name, curve) in &outcome.curves {
                let last = curve.last().map(|c| c.1).unwrap_or(f64::NAN);
                println!("{name}: {} points, final accuracy {last:.4}", curve.len());
            }
            for (name, e) in &outcome.failures {
                eprintln!("{name} failed: {e}");
            }
            Ok(if outcome.failures.is_empty() { 0 } else { 3 })
        }
        Command::Fig3 => {
            let cfg = load_cfg(cli)?;
            let outcome = run_fig3(&cfg)?;
            for row in &outcome.rows {
                println!(
                    "{} {}={}: length={} probe={:.4}",
                    row.model, row.noise_kind, row.level, row.compressed_length, row.probe_accuracy
                );
            }
            for (tag, e) in &outcome.failures {
                eprintln!("{tag} failed: {e}");
            }
            Ok(if outcome.failures.is_empty() { 0 } else { 3 })
        }
        Command::Table2 => {
            let cfg = load_cfg(cli)?;
            let outcome = run_table2(&cfg)?;
            for r in [&outcome.grid, &outcome.random, &outcome.sosae] {
                println!(
                    "{:<8} iterations={:<4} tuned={:<5} flops={}",
                    r.method.as_str(),
                    r.iterations,
                    r.tuned_value,
                    r.total_flops
                );
            }
            Ok(0)
        }
        Command::Inspect { checkpoint } => {
            let params = load_checkpoint(checkpoint)?;
            println!("checkpoint: {}", checkpoint.display());
            println!(
                "d = {}, h = {}, parameters = {}",
                params.d(),
                params.h(),
                params.n_params()
            );
            println!(
                "|W_enc| = {:.6}  |W_dec| = {:.6}",
                frobenius(params.w_enc.as_slice()),
                frobenius(params.w_dec.as_slice())
            );
            println!(
                "b_enc in [{:.6}, {:.6}]  b_dec in [{:.6}, {:.6}]",
                params.b_enc.iter().cloned().fold(f64::INFINITY, f64::min),
                params.b_enc.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                params.b_dec.iter().cloned().fold(f64::INFINITY, f64::min),
                params.b_dec.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            );
            Ok(0)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap would exit 2 on bad usage; the documented contract says
            // config/usage errors are 1, help and version are 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            process::exit(code);
        }
    };
    match run(&cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(exit_code(&e));
        }
    }
}
