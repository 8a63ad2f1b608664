//! Desk-scale tracking and segmentation with depthwise-dilated adapters.
//!
//! Everything numeric lives here: a small f64 tensor library with a
//! reverse-mode gradient tape, the DD-Adapter block, a miniature
//! streaming-memory tracking model, the fine-tuning loop, surface
//! metrics, a synthetic video generator, and a rigid-registration
//! baseline. The crate is `no_std` (alloc required); file formats,
//! the CLI, and anything that touches a clock or the filesystem live
//! in the companion `ddsam2` crate.
//!
//! All transcendental math goes through [`fmath`] (libm) so results
//! are bit-identical across platforms.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adapter;
pub mod error;
pub mod fmath;
pub mod loss;
pub mod metrics;
pub mod model;
pub mod ops;
pub mod optim;
pub mod rigid;
pub mod rng;
pub mod synth;
pub mod tape;
pub mod tensor;
pub mod train;

pub use error::Error;
pub use tape::{grad_check, Tape, TensorId};
pub use tensor::Tensor;
