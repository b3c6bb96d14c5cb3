//! Universal denoising of discrete sources observed through memoryless
//! channels with continuous outputs.
//!
//! The centrepiece is [`denoise::gen_cude_denoise`]: a network learns to
//! predict the quantized centre symbol from its continuous context, the
//! prediction is pushed through the inverse of the induced discrete channel,
//! reweighted by the channel densities at the centre observation, and the
//! Bayes response of the result is the reconstruction. Baselines (ML,
//! quantize-then-DUDE/CUDE, Gen-DUDE, forward-backward smoothing and
//! Baum-Welch), simulators and an experiment harness sit alongside.
//!
//! All numeric code is generic over [`Real`]; the aliases below fix the
//! scalar to `f64` (or `f32` where useful).

// `!(x > 0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod denoise;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod neural;
pub mod quadrature;
pub mod scalar;
pub mod source;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ChannelModelF64 = channel::ChannelModel<f64>;
pub type ChannelModelF32 = channel::ChannelModel<f32>;
pub type QuantizerF64 = channel::Quantizer<f64>;
pub type InducedDmcF64 = channel::InducedDmc<f64>;
pub type ObservationsF64 = source::ObservationSequence<f64>;
