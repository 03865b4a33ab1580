//! Self-organizing sparse autoencoders.
//!
//! A single-hidden-layer sigmoid autoencoder plus a family of sparsity
//! penalties. The interesting one is the *push* penalty: each hidden
//! position `k` pays `(1 + alpha)^(k+1) * |h_k|`, so keeping a unit active
//! costs exponentially more the further back it sits. Under training the
//! network responds by packing everything it needs into a prefix of the
//! code and silencing the tail, which means the learned width can be read
//! off a trained model (the *compressed length*) instead of being tuned by
//! retraining at many widths. Truncating the code at that length is then
//! nearly free: reconstruction and downstream probe accuracy barely move.
//!
//! The crate is self-contained on purpose - matrices, RNG, Adam, datasets
//! and the probe are all here, with no numeric dependencies - so every
//! result is reproducible bit for bit from a seed.
//!
//! ```
//! use sosae::autoencoder::{train, TrainConfig};
//! use sosae::analysis::{activation_profile, compressed_length, DEFAULT_EPS};
//! use sosae::datasets::synth_digits;
//! use sosae::regularizers::RegularizerSpec;
//!
//! let data = synth_digits(600, 7).unwrap();
//! let cfg = TrainConfig {
//!     epochs: 3,
//!     regularizer: RegularizerSpec::push_contractive(2e-3, 1e-5, 0.01),
//!     ..TrainConfig::default()
//! };
//! let (params, _trace) = train(&data, 64, &cfg).unwrap();
//! let x_val = data.gather_x(&data.val_idx);
//! let profile = activation_profile(&params, &x_val, &cfg.regularizer, DEFAULT_EPS).unwrap();
//! println!("learned width: {}", compressed_length(&profile));
//! ```
//!
//! Modules, roughly bottom-up:
//!
//! * [`numcore`] - dense row-major matrices and a seeded xoshiro256** RNG.
//! * [`regularizers`] - push / L1 / L2 / k-sparse / contractive penalties
//!   and their gradients.
//! * [`datasets`] - IDX file loading, synthetic digit/blob generators,
//!   input corruption for denoising.
//! * [`autoencoder`] - the model, fused loss/gradient evaluation, Adam,
//!   mini-batch training, checkpoints.
//! * [`analysis`] - activation profiles, compressed length, truncation,
//!   linear probes, FLOPs/memory accounting.
//! * [`search`] - embedding-width selection: grid and random search
//!   baselines against the one-shot push run.
//! * [`config`] / [`experiments`] - `key = value` experiment configs and
//!   the drivers behind the CLI subcommands.

pub mod analysis;
pub mod autoencoder;
pub mod config;
pub mod datasets;
pub mod error;
pub mod experiments;
pub mod numcore;
pub mod regularizers;
pub mod search;

pub use error::{Error, Result};
pub use numcore::{Matrix, Rng};
pub use regularizers::{RegKind, RegularizerSpec};
