pub mod dataset;
pub mod encoders;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod mlp;
pub mod ols;
pub mod rng;

pub use error::{Error, Result};
