//! Trains a push-regularized autoencoder and shows how the activation
//! mass migrates to the front of the code vector.
//!
//! The output is an ASCII profile of mean |h| per position, the detected
//! compressed length, and the reconstruction error before and after
//! truncating the trailing dead units.
//!
//! ```text
//! cargo run --release --example push_organization
//! ```

use sosae::analysis::{
    activation_profile, compressed_length, prefix_violations, reconstruction_mae, truncate_model,
};
use sosae::autoencoder::{train, TrainConfig};
use sosae::datasets::synth_digits;
use sosae::regularizers::RegularizerSpec;

fn main() {
    let data = synth_digits(5000, 42).unwrap();
    let h = 64;
    let spec = RegularizerSpec::push_contractive(5e-3, 1e-5, 0.01);
    let cfg = TrainConfig {
        epochs: 140,
        learning_rate: 3e-4,
        seed: 7,
        regularizer: spec,
        ..Default::default()
    };

    println!(
        "training d={} -> h={} on {} samples ({} epochs)...",
        data.d(),
        h,
        data.train_idx.len(),
        cfg.epochs
    );
    let (params, trace) = train(&data, h, &cfg).unwrap();
    println!(
        "final loss {:.5}, {:.2} GFLOP spent\n",
        trace.final_total_loss(),
        trace.total_flops() as f64 / 1e9
    );

    let x_val = data.gather_x(&data.val_idx);
    let profile = activation_profile(&params, &x_val, &spec, 1e-3).unwrap();
    let peak = profile.mean_abs.iter().cloned().fold(0.0f64, f64::max);
    println!("mean |h_k| per position (* = active, . = below eps):");
    for (k, &v) in profile.mean_abs.iter().enumerate() {
        let bar = "#".repeat((v / peak * 40.0).round() as usize);
        let mark = if v > 1e-3 { '*' } else { '.' };
        println!("{k:>3} {mark} {v:>9.1e} {bar}");
    }

    let cl = compressed_length(&profile);
    let stragglers = prefix_violations(&profile);
    println!("\ncompressed length: {cl} of {h}");
    println!("stragglers after the boundary: {stragglers:?}");

    let truncated = truncate_model(&params, cl).unwrap();
    let full_mae = reconstruction_mae(&params, &x_val).unwrap();
    let trunc_mae = reconstruction_mae(&truncated, &x_val).unwrap();
    println!(
        "reconstruction MAE: full {full_mae:.6}, truncated {trunc_mae:.6} (delta {:.2e})",
        (trunc_mae - full_mae).abs()
    );
}
