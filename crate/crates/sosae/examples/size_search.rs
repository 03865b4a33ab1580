//! Cost of finding a good hidden size: grid search and random search
//! versus reading it off a single push-regularized run.
//!
//! ```text
//! cargo run --release --example size_search
//! ```

use sosae::autoencoder::TrainConfig;
use sosae::datasets::synth_blobs;
use sosae::regularizers::RegularizerSpec;
use sosae::search::{grid_search, random_search, sosae_oneshot};

fn main() {
    let data = synth_blobs(600, 16, 6, 42).unwrap();
    let cfg = TrainConfig {
        epochs: 60,
        learning_rate: 1e-3,
        regularizer: RegularizerSpec::push_contractive(2e-2, 1e-5, 0.01),
        ..Default::default()
    };

    let candidates: Vec<usize> = (1..=40).collect();
    println!("searching hidden sizes 1..=40 on {} samples...\n", data.n());

    let grid = grid_search(&data, &candidates, &cfg, 0.05).unwrap();
    let random = random_search(&data, (1, 40), 12, 7, &cfg, 0.05).unwrap();
    let oneshot = sosae_oneshot(&data, 40, &cfg).unwrap();

    println!(
        "{:<10} {:>10} {:>8} {:>14} {:>8}",
        "method", "iterations", "tuned h", "total FLOPs", "ratio"
    );
    let base = oneshot.total_flops as f64;
    for r in [&grid, &random, &oneshot] {
        println!(
            "{:<10} {:>10} {:>8} {:>14} {:>7.1}x",
            r.method.as_str(),
            r.iterations,
            r.tuned_value,
            r.total_flops,
            r.total_flops as f64 / base
        );
    }
}
