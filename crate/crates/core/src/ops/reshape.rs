//! Layout-changing ops: token/grid views, row/column slices and
//! concatenations. All are pure permutations or copies; their backward
//! rules scatter the output gradient back through the same index map.

use alloc::vec;
use alloc::vec::Vec;

use super::shape_err;
use crate::error::Error;
use crate::tape::{Tape, TensorId};
use crate::tensor::Tensor;

/// (1, d, h, w) -> (h*w, d) token matrix, tokens in row-major spatial
/// order.
pub fn grid_to_tokens(tape: &mut Tape, x: TensorId) -> Result<TensorId, Error> {
    let tx = tape.value(x);
    let [n, d, h, w] = tx.dims();
    if n != 1 {
        return Err(shape_err("grid_to_tokens", tx.dims(), [1, d, h, w]));
    }
    let mut out = Vec::with_capacity(h * w * d);
    for t in 0..h * w {
        for c in 0..d {
            out.push(tx.data()[c * h * w + t]);
        }
    }
    let out = Tensor::matrix(h * w, d, out)?;
    Ok(tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        let [_, d, h, w] = ctx.val(x).dims();
        ctx.accum(x, |g| {
            for t in 0..h * w {
                for c in 0..d {
                    g[c * h * w + t] += gout[t * d + c];
                }
            }
        });
    }))
}

/// (h*w, d) token matrix -> (1, d, h, w) grid.
pub fn tokens_to_grid(tape: &mut Tape, x: TensorId, h: usize, w: usize) -> Result<TensorId, Error> {
    let tx = tape.value(x);
    let (t, d) = (tx.rows(), tx.cols());
    if t != h * w {
        return Err(shape_err("tokens_to_grid", tx.dims(), [h * w, d, 1, 1]));
    }
    let mut out = vec![0.0; d * h * w];
    for ti in 0..t {
        for c in 0..d {
            out[c * h * w + ti] = tx.data()[ti * d + c];
        }
    }
    let out = Tensor::new([1, d, h, w], out)?;
    Ok(tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        let (t, d) = (ctx.val(x).rows(), ctx.val(x).cols());
        ctx.accum(x, |g| {
            for ti in 0..t {
                for c in 0..d {
                    g[ti * d + c] += gout[c * t + ti];
                }
            }
        });
    }))
}

/// Split a single-channel image (1, 1, H, W) into non-overlapping
/// p x p patches: out (H/p * W/p, p*p), patches in row-major block
/// order, pixels row-major inside each patch.
pub fn patchify(tape: &mut Tape, x: TensorId, p: usize) -> Result<TensorId, Error> {
    let tx = tape.value(x);
    let [n, c, h, w] = tx.dims();
    if n != 1 || c != 1 || p == 0 || h % p != 0 || w % p != 0 {
        return Err(Error::Config {
            op: "patchify",
            msg: alloc::format!("cannot split {:?} into {p}x{p} patches", tx.dims()),
        });
    }
    let (gh, gw) = (h / p, w / p);
    let mut out = Vec::with_capacity(h * w);
    for by in 0..gh {
        for bx in 0..gw {
            for py in 0..p {
                for px in 0..p {
                    out.push(tx.data()[(by * p + py) * w + bx * p + px]);
                }
            }
        }
    }
    let out = Tensor::matrix(gh * gw, p * p, out)?;
    Ok(tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        let [_, _, h, w] = ctx.val(x).dims();
        let (gh, gw) = (h / p, w / p);
        ctx.accum(x, |g| {
            let mut i = 0;
            for by in 0..gh {
                for bx in 0..gw {
                    for py in 0..p {
                        for px in 0..p {
                            g[(by * p + py) * w + bx * p + px] += gout[i];
                            i += 1;
                        }
                    }
                }
            }
        });
    }))
}

/// Columns [start, start+len) of a (T, M) matrix.
pub fn slice_cols(
    tape: &mut Tape,
    x: TensorId,
    start: usize,
    len: usize,
) -> Result<TensorId, Error> {
    let tx = tape.value(x);
    let (t, m) = (tx.rows(), tx.cols());
    if start + len > m || len == 0 {
        return Err(Error::Config {
            op: "slice_cols",
            msg: alloc::format!("slice [{start}, {}) out of {m} columns", start + len),
        });
    }
    let mut out = Vec::with_capacity(t * len);
    for r in 0..t {
        out.extend_from_slice(&tx.row(r)[start..start + len]);
    }
    let out = Tensor::matrix(t, len, out)?;
    Ok(tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        let (t, m) = (ctx.val(x).rows(), ctx.val(x).cols());
        ctx.accum(x, |g| {
            for r in 0..t {
                for j in 0..len {
                    g[r * m + start + j] += gout[r * len + j];
                }
            }
        });
    }))
}

/// Concatenate same-height matrices along columns.
pub fn concat_cols(tape: &mut Tape, xs: &[TensorId]) -> Result<TensorId, Error> {
    if xs.is_empty() {
        return Err(Error::Empty("concat_cols inputs"));
    }
    let t = tape.value(xs[0]).rows();
    let mut widths = Vec::with_capacity(xs.len());
    for &x in xs {
        let v = tape.value(x);
        if v.rows() != t {
            return Err(shape_err("concat_cols", tape.value(xs[0]).dims(), v.dims()));
        }
        widths.push(v.cols());
    }
    let total: usize = widths.iter().sum();
    let mut out = Vec::with_capacity(t * total);
    for r in 0..t {
        for &x in xs {
            out.extend_from_slice(tape.value(x).row(r));
        }
    }
    let out = Tensor::matrix(t, total, out)?;
    let xs: Vec<TensorId> = xs.to_vec();
    Ok(tape.record(out, &xs.clone(), move |ctx| {
        let gout = ctx.gout;
        let mut col = 0;
        for (i, &x) in xs.iter().enumerate() {
            let wdt = widths[i];
            let start = col;
            ctx.accum(x, |g| {
                let t = g.len() / wdt;
                for r in 0..t {
                    for j in 0..wdt {
                        g[r * wdt + j] += gout[r * total + start + j];
                    }
                }
            });
            col += wdt;
        }
    }))
}

/// Rows [start, start+len) of a (T, M) matrix.
pub fn slice_rows(
    tape: &mut Tape,
    x: TensorId,
    start: usize,
    len: usize,
) -> Result<TensorId, Error> {
    let tx = tape.value(x);
    let (t, m) = (tx.rows(), tx.cols());
    if start + len > t || len == 0 {
        return Err(Error::Config {
            op: "slice_rows",
            msg: alloc::format!("slice [{start}, {}) out of {t} rows", start + len),
        });
    }
    let out = Tensor::matrix(len, m, tx.data()[start * m..(start + len) * m].to_vec())?;
    Ok(tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        let m = ctx.val(x).cols();
        ctx.accum(x, |g| {
            for (i, &go) in gout.iter().enumerate() {
                g[start * m + i] += go;
            }
        });
    }))
}

/// Stack same-width matrices along rows.
pub fn concat_rows(tape: &mut Tape, xs: &[TensorId]) -> Result<TensorId, Error> {
    if xs.is_empty() {
        return Err(Error::Empty("concat_rows inputs"));
    }
    let m = tape.value(xs[0]).cols();
    let mut heights = Vec::with_capacity(xs.len());
    let mut out = Vec::new();
    for &x in xs {
        let v = tape.value(x);
        if v.cols() != m {
            return Err(shape_err("concat_rows", tape.value(xs[0]).dims(), v.dims()));
        }
        heights.push(v.rows());
        out.extend_from_slice(v.data());
    }
    let total: usize = heights.iter().sum();
    let out = Tensor::matrix(total, m, out)?;
    let xs: Vec<TensorId> = xs.to_vec();
    Ok(tape.record(out, &xs.clone(), move |ctx| {
        let gout = ctx.gout;
        let mut row = 0;
        for (i, &x) in xs.iter().enumerate() {
            let h = heights[i];
            let start = row * m;
            ctx.accum(x, |g| {
                for (j, gj) in g.iter_mut().enumerate() {
                    *gj += gout[start + j];
                }
            });
            row += h;
        }
    }))
}
