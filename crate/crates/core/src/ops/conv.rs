//! 1x1 (pointwise) and depthwise dilated convolutions.

use alloc::vec;

use super::shape_err;
use crate::error::Error;
use crate::tape::{Tape, TensorId};
use crate::tensor::{axpy, dot, Tensor};

/// Pointwise (1x1) convolution mixing channels only.
///
/// x: (N, Cin, H, W), w: (Cout, Cin, 1, 1), b: (Cout, 1, 1, 1).
/// out[n, co, h, w] = b[co] + sum_ci w[co, ci] * x[n, ci, h, w].
pub fn conv2d_pointwise(
    tape: &mut Tape,
    x: TensorId,
    w: TensorId,
    b: TensorId,
) -> Result<TensorId, Error> {
    let (tx, tw, tb) = (tape.value(x), tape.value(w), tape.value(b));
    let [n, cin, h, wd] = tx.dims();
    let [cout, wcin, kh, kw] = tw.dims();
    if wcin != cin || kh != 1 || kw != 1 {
        return Err(shape_err("conv2d_pointwise", tx.dims(), tw.dims()));
    }
    if tb.len() != cout {
        return Err(shape_err("conv2d_pointwise", tw.dims(), tb.dims()));
    }
    let plane = h * wd;
    let mut out = vec![0.0; n * cout * plane];
    for ni in 0..n {
        let xs = &tx.data()[ni * cin * plane..(ni + 1) * cin * plane];
        let os = &mut out[ni * cout * plane..(ni + 1) * cout * plane];
        for co in 0..cout {
            let op = &mut os[co * plane..(co + 1) * plane];
            op.fill(tb.data()[co]);
            for ci in 0..cin {
                axpy(op, tw.data()[co * cin + ci], &xs[ci * plane..(ci + 1) * plane]);
            }
        }
    }
    let out = Tensor::new([n, cout, h, wd], out)?;
    Ok(tape.record(out, &[x, w, b], move |ctx| {
        let gout = ctx.gout;
        let xv = ctx.val(x);
        let wv = ctx.val(w);
        let [n, cin, h, wd] = xv.dims();
        let cout = wv.dims()[0];
        let plane = h * wd;
        ctx.accum(x, |g| {
            for ni in 0..n {
                let gs = &gout[ni * cout * plane..(ni + 1) * cout * plane];
                let gx = &mut g[ni * cin * plane..(ni + 1) * cin * plane];
                for co in 0..cout {
                    let gp = &gs[co * plane..(co + 1) * plane];
                    for ci in 0..cin {
                        axpy(&mut gx[ci * plane..(ci + 1) * plane], wv.data()[co * cin + ci], gp);
                    }
                }
            }
        });
        ctx.accum(w, |g| {
            for ni in 0..n {
                let gs = &gout[ni * cout * plane..(ni + 1) * cout * plane];
                let xs = &xv.data()[ni * cin * plane..(ni + 1) * cin * plane];
                for co in 0..cout {
                    let gp = &gs[co * plane..(co + 1) * plane];
                    for ci in 0..cin {
                        g[co * cin + ci] += dot(gp, &xs[ci * plane..(ci + 1) * plane]);
                    }
                }
            }
        });
        ctx.accum(b, |g| {
            for ni in 0..n {
                let gs = &gout[ni * cout * plane..(ni + 1) * cout * plane];
                for co in 0..cout {
                    g[co] += gs[co * plane..(co + 1) * plane].iter().sum::<f64>();
                }
            }
        });
    }))
}

/// Depthwise convolution with dilation; spatial dims preserved by zero
/// "same" padding of r*(k-1)/2 per side.
///
/// x: (N, C, H, W), w: (C, 1, k, k), b: (C, 1, 1, 1). Each channel is
/// convolved only with its own kernel, taps spaced `dilation` apart.
pub fn conv2d_depthwise(
    tape: &mut Tape,
    x: TensorId,
    w: TensorId,
    b: TensorId,
    dilation: usize,
) -> Result<TensorId, Error> {
    let (tx, tw, tb) = (tape.value(x), tape.value(w), tape.value(b));
    let c = tx.dims()[1];
    let [wc, wone, k, k2] = tw.dims();
    if dilation < 1 {
        return Err(Error::Config {
            op: "conv2d_depthwise",
            msg: alloc::format!("dilation must be >= 1, got {dilation}"),
        });
    }
    if k != k2 || k % 2 == 0 {
        return Err(Error::Config {
            op: "conv2d_depthwise",
            msg: alloc::format!("kernel must be square with odd size, got {k}x{k2}"),
        });
    }
    if wc != c || wone != 1 {
        return Err(shape_err("conv2d_depthwise", tx.dims(), tw.dims()));
    }
    if tb.len() != c {
        return Err(shape_err("conv2d_depthwise", tw.dims(), tb.dims()));
    }
    let out = depthwise_forward(tx, tw, tb, dilation);
    Ok(tape.record(out, &[x, w, b], move |ctx| {
        let gout = ctx.gout;
        let xv = ctx.val(x);
        let wv = ctx.val(w);
        let [n_, c_, h_, w_] = xv.dims();
        let k = wv.dims()[2];
        let pad = (dilation * (k - 1) / 2) as isize;
        let plane = h_ * w_;
        ctx.accum(x, |g| {
            for ni in 0..n_ {
                for ci in 0..c_ {
                    let gp = &gout[(ni * c_ + ci) * plane..(ni * c_ + ci + 1) * plane];
                    let gx = &mut g[(ni * c_ + ci) * plane..(ni * c_ + ci + 1) * plane];
                    for oy in 0..h_ {
                        for ox in 0..w_ {
                            let go = gp[oy * w_ + ox];
                            if go == 0.0 {
                                continue;
                            }
                            for u in 0..k {
                                let iy = oy as isize + (dilation * u) as isize - pad;
                                if iy < 0 || iy >= h_ as isize {
                                    continue;
                                }
                                for v in 0..k {
                                    let ix = ox as isize + (dilation * v) as isize - pad;
                                    if ix < 0 || ix >= w_ as isize {
                                        continue;
                                    }
                                    gx[iy as usize * w_ + ix as usize] +=
                                        go * wv.data()[(ci * k + u) * k + v];
                                }
                            }
                        }
                    }
                }
            }
        });
        ctx.accum(w, |g| {
            for ni in 0..n_ {
                for ci in 0..c_ {
                    let gp = &gout[(ni * c_ + ci) * plane..(ni * c_ + ci + 1) * plane];
                    let xp = &xv.data()[(ni * c_ + ci) * plane..(ni * c_ + ci + 1) * plane];
                    for u in 0..k {
                        for v in 0..k {
                            let mut acc = 0.0;
                            for oy in 0..h_ {
                                let iy = oy as isize + (dilation * u) as isize - pad;
                                if iy < 0 || iy >= h_ as isize {
                                    continue;
                                }
                                for ox in 0..w_ {
                                    let ix = ox as isize + (dilation * v) as isize - pad;
                                    if ix < 0 || ix >= w_ as isize {
                                        continue;
                                    }
                                    acc += gp[oy * w_ + ox] * xp[iy as usize * w_ + ix as usize];
                                }
                            }
                            g[(ci * k + u) * k + v] += acc;
                        }
                    }
                }
            }
        });
        ctx.accum(b, |g| {
            for ni in 0..n_ {
                for ci in 0..c_ {
                    let gp = &gout[(ni * c_ + ci) * plane..(ni * c_ + ci + 1) * plane];
                    g[ci] += gp.iter().sum::<f64>();
                }
            }
        });
    }))
}

fn depthwise_forward(tx: &Tensor, tw: &Tensor, tb: &Tensor, dilation: usize) -> Tensor {
    let [n, c, h, wd] = tx.dims();
    let k = tw.dims()[2];
    let pad = (dilation * (k - 1) / 2) as isize;
    let plane = h * wd;
    let mut out = vec![0.0; n * c * plane];
    for ni in 0..n {
        for ci in 0..c {
            let xp = &tx.data()[(ni * c + ci) * plane..(ni * c + ci + 1) * plane];
            let op = &mut out[(ni * c + ci) * plane..(ni * c + ci + 1) * plane];
            let kernel = &tw.data()[ci * k * k..(ci + 1) * k * k];
            for oy in 0..h {
                for ox in 0..wd {
                    let mut acc = tb.data()[ci];
                    for u in 0..k {
                        let iy = oy as isize + (dilation * u) as isize - pad;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for v in 0..k {
                            let ix = ox as isize + (dilation * v) as isize - pad;
                            if ix < 0 || ix >= wd as isize {
                                continue;
                            }
                            acc += kernel[u * k + v] * xp[iy as usize * wd + ix as usize];
                        }
                    }
                    op[oy * wd + ox] = acc;
                }
            }
        }
    }
    Tensor::new([n, c, h, wd], out).expect("dims preserved")
}
