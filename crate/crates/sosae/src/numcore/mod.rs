//! Matrix arithmetic, elementwise math, and the deterministic RNG that every
//! other module builds on.

mod matrix;
mod rng;

pub use matrix::{sigmoid, sigmoid_inplace, Matrix};
pub use rng::{rng_uniform, Rng};
