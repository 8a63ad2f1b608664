//! Differentiable tensor operations recorded on a [`crate::tape::Tape`].
//!
//! Each op validates its shape contract, computes the forward value,
//! and registers the matching backward rule. All ops are pure: the
//! output bits depend only on the input bits.

mod attention;
mod conv;
mod elementwise;
mod linear;
mod norm;
mod reshape;
mod resize;

pub use attention::{attention, softmax_rows};
pub use conv::{conv2d_depthwise, conv2d_pointwise};
pub use elementwise::{add, gelu, mul, scale, sum_all};
pub use linear::{linear, matmul_nn, matmul_nt};
pub use norm::{layer_norm, LN_EPS};
pub use reshape::{
    concat_cols, concat_rows, grid_to_tokens, patchify, slice_cols, slice_rows, tokens_to_grid,
};
pub use resize::resize_bilinear;

use crate::error::Error;

pub(crate) fn shape_err(op: &'static str, left: [usize; 4], right: [usize; 4]) -> Error {
    Error::Shape { op, left, right }
}
