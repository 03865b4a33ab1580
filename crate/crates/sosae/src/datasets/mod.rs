//! Data ingestion and generation: IDX files, synthetic datasets,
//! normalization, splits, and denoising corruption.

mod dataset;
mod idx;
mod noise;
mod synth;

pub use dataset::Dataset;
pub use idx::{load_idx, load_idx_split, write_idx_images, write_idx_labels};
pub use noise::{corrupt, NoiseKind, NoiseSpec};
pub use synth::{render_digit, synth_blobs, synth_digit_pixels, synth_digits, DIGIT_SIDE};
