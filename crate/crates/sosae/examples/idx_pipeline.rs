//! Round-trips a dataset through the IDX binary format (the MNIST
//! container) and trains on the reloaded copy.
//!
//! Useful as a template for pointing the library at real MNIST files:
//! replace the generated paths with `train-images-idx3-ubyte` and
//! friends.
//!
//! ```text
//! cargo run --release --example idx_pipeline
//! ```

use sosae::analysis::{activation_profile, compressed_length};
use sosae::autoencoder::{train, TrainConfig};
use sosae::datasets::{load_idx_split, synth_digit_pixels, write_idx_images, write_idx_labels};
use sosae::regularizers::RegularizerSpec;

fn main() {
    let dir = std::env::temp_dir().join("sosae_idx_demo");
    std::fs::create_dir_all(&dir).unwrap();

    // write a train and a test split as IDX files (28x28 glyphs)
    let (train_px, train_lb) = synth_digit_pixels(2400, 1).unwrap();
    let (test_px, test_lb) = synth_digit_pixels(600, 2).unwrap();
    let paths = [
        dir.join("train-images.idx"),
        dir.join("train-labels.idx"),
        dir.join("test-images.idx"),
        dir.join("test-labels.idx"),
    ];
    write_idx_images(&paths[0], &train_px, 2400, 28, 28).unwrap();
    write_idx_labels(&paths[1], &train_lb).unwrap();
    write_idx_images(&paths[2], &test_px, 600, 28, 28).unwrap();
    write_idx_labels(&paths[3], &test_lb).unwrap();
    for p in &paths {
        let bytes = std::fs::metadata(p).unwrap().len();
        println!("wrote {} ({bytes} bytes)", p.display());
    }

    // reload with a held-out validation slice carved from the train files
    let data = load_idx_split(&paths[0], &paths[1], &paths[2], &paths[3], 0.2, 9).unwrap();
    println!(
        "\nloaded {} samples, d={}, splits {}/{}/{}",
        data.n(),
        data.d(),
        data.train_idx.len(),
        data.val_idx.len(),
        data.test_idx.len()
    );

    let spec = RegularizerSpec::push_contractive(5e-3, 1e-5, 0.01);
    let cfg = TrainConfig {
        epochs: 100,
        learning_rate: 3e-4,
        regularizer: spec,
        ..Default::default()
    };
    let (params, _) = train(&data, 48, &cfg).unwrap();
    let profile =
        activation_profile(&params, &data.gather_x(&data.val_idx), &spec, 1e-3).unwrap();
    println!(
        "compressed length after training: {} of {}",
        compressed_length(&profile),
        params.h()
    );
}
