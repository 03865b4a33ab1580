//! The d -> h -> d shallow autoencoder: forward pass, exact gradients of
//! the total loss, Adam, training loops, and checkpoints.

mod adam;
mod checkpoint;
mod params;
mod train;

pub use adam::{adam_step, Adam};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use params::{AutoencoderParams, Gradients};
pub use train::{
    backward, codes, decode, encode, loss_and_grads, sosae_loss, sosae_loss_with, train,
    EpochStats, LossParts, ReconLoss, TrainConfig, TrainTrace,
};
