//! Row softmax and scaled dot-product attention.

use alloc::vec::Vec;

use super::shape_err;
use crate::error::Error;
use crate::fmath;
use crate::ops::{matmul_nn, matmul_nt, scale};
use crate::tape::{Tape, TensorId};
use crate::tensor::{dot, Tensor};

/// Softmax over each row of a (T, M) matrix.
pub fn softmax_rows(tape: &mut Tape, x: TensorId) -> TensorId {
    let tx = tape.value(x);
    let (t, m) = (tx.rows(), tx.cols());
    let mut out = Vec::with_capacity(t * m);
    for r in 0..t {
        let row = tx.row(r);
        let mx = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let mut denom = 0.0;
        let base = out.len();
        for &v in row {
            let e = fmath::exp(v - mx);
            out.push(e);
            denom += e;
        }
        for v in &mut out[base..] {
            *v /= denom;
        }
    }
    let out = Tensor::matrix(t, m, out).expect("same dims as input");
    tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        let yid = ctx.self_id();
        let yv = ctx.val(yid);
        let (t, m) = (yv.rows(), yv.cols());
        ctx.accum(x, |g| {
            for r in 0..t {
                let y = yv.row(r);
                let gy = &gout[r * m..(r + 1) * m];
                let s = dot(gy, y);
                let gx = &mut g[r * m..(r + 1) * m];
                for j in 0..m {
                    gx[j] += y[j] * (gy[j] - s);
                }
            }
        });
    })
}

/// Scaled dot-product attention: softmax(q k^T / sqrt(d)) v.
///
/// q: (Tq, d), k: (Tk, d), v: (Tk, d) -> (Tq, d). Row-wise softmax.
pub fn attention(
    tape: &mut Tape,
    q: TensorId,
    k: TensorId,
    v: TensorId,
) -> Result<TensorId, Error> {
    let (tq, tk, tv) = (tape.value(q), tape.value(k), tape.value(v));
    let d = tq.cols();
    if tk.cols() != d {
        return Err(shape_err("attention", tq.dims(), tk.dims()));
    }
    if tv.rows() != tk.rows() {
        return Err(shape_err("attention", tk.dims(), tv.dims()));
    }
    let scores = matmul_nt(tape, q, k)?;
    let scaled = scale(tape, scores, 1.0 / fmath::sqrt(d as f64));
    let weights = softmax_rows(tape, scaled);
    matmul_nn(tape, weights, v)
}
