//! Per-token layer normalization.

use alloc::vec::Vec;

use super::shape_err;
use crate::error::Error;
use crate::fmath;
use crate::tape::{Tape, TensorId};
use crate::tensor::Tensor;

/// Variance epsilon inside the square root.
pub const LN_EPS: f64 = 1e-5;

/// Normalize each row of x (T, d) to zero mean and unit variance
/// (biased variance over d, epsilon inside the sqrt), then apply the
/// per-channel affine gain/shift, both (1, d, 1, 1).
pub fn layer_norm(
    tape: &mut Tape,
    x: TensorId,
    gain: TensorId,
    shift: TensorId,
) -> Result<TensorId, Error> {
    let (tx, tg, ts) = (tape.value(x), tape.value(gain), tape.value(shift));
    let (t, d) = (tx.rows(), tx.cols());
    if tg.len() != d {
        return Err(shape_err("layer_norm", tx.dims(), tg.dims()));
    }
    if ts.len() != d {
        return Err(shape_err("layer_norm", tx.dims(), ts.dims()));
    }
    let mut out = Vec::with_capacity(t * d);
    // per-row statistics, shared with all three backward paths
    let mut stats = Vec::with_capacity(t);
    for r in 0..t {
        let row = tx.row(r);
        let (mu, inv) = row_stats(row);
        stats.push((mu, inv));
        for (j, &v) in row.iter().enumerate() {
            out.push(tg.data()[j] * (v - mu) * inv + ts.data()[j]);
        }
    }
    let out = Tensor::matrix(t, d, out)?;
    Ok(tape.record(out, &[x, gain, shift], move |ctx| {
        let gout = ctx.gout;
        let xv = ctx.val(x);
        let gv = ctx.val(gain);
        let (t, d) = (xv.rows(), xv.cols());
        ctx.accum(x, |g| {
            for r in 0..t {
                let row = xv.row(r);
                let (mu, inv) = stats[r];
                let gy = &gout[r * d..(r + 1) * d];
                let mut mean_gxh = 0.0;
                let mut mean_gxh_xh = 0.0;
                for j in 0..d {
                    let xh = (row[j] - mu) * inv;
                    let gxh = gy[j] * gv.data()[j];
                    mean_gxh += gxh;
                    mean_gxh_xh += gxh * xh;
                }
                mean_gxh /= d as f64;
                mean_gxh_xh /= d as f64;
                let gx = &mut g[r * d..(r + 1) * d];
                for j in 0..d {
                    let xh = (row[j] - mu) * inv;
                    let gxh = gy[j] * gv.data()[j];
                    gx[j] += inv * (gxh - mean_gxh - xh * mean_gxh_xh);
                }
            }
        });
        ctx.accum(gain, |g| {
            for r in 0..t {
                let row = xv.row(r);
                let (mu, inv) = stats[r];
                let gy = &gout[r * d..(r + 1) * d];
                for j in 0..d {
                    g[j] += gy[j] * (row[j] - mu) * inv;
                }
            }
        });
        ctx.accum(shift, |g| {
            for r in 0..t {
                let gy = &gout[r * d..(r + 1) * d];
                for j in 0..d {
                    g[j] += gy[j];
                }
            }
        });
    }))
}

#[inline]
fn row_stats(row: &[f64]) -> (f64, f64) {
    let d = row.len() as f64;
    let mu = row.iter().sum::<f64>() / d;
    let var = row.iter().map(|&v| (v - mu) * (v - mu)).sum::<f64>() / d;
    (mu, 1.0 / fmath::sqrt(var + LN_EPS))
}
