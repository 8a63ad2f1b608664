//! Bilinear resize (align_corners = false).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;
use crate::tape::{Tape, TensorId};
use crate::tensor::Tensor;

/// Per-axis source index, neighbor, and blend weight.
fn axis_table(out_len: usize, in_len: usize) -> Vec<(usize, usize, f64)> {
    let scale = in_len as f64 / out_len as f64;
    (0..out_len)
        .map(|o| {
            let src = ((o as f64 + 0.5) * scale - 0.5).clamp(0.0, (in_len - 1) as f64);
            let lo = fmath::floor(src) as usize;
            let hi = (lo + 1).min(in_len - 1);
            (lo, hi, src - lo as f64)
        })
        .collect()
}

/// Resize (N, C, H, W) -> (N, C, out_h, out_w) by bilinear
/// interpolation with half-pixel centers; sampling clamps at edges.
pub fn resize_bilinear(
    tape: &mut Tape,
    x: TensorId,
    out_h: usize,
    out_w: usize,
) -> Result<TensorId, Error> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::Config {
            op: "resize_bilinear",
            msg: alloc::format!("output dims must be >= 1, got {out_h}x{out_w}"),
        });
    }
    let tx = tape.value(x);
    let [n, c, h, w] = tx.dims();
    let ys = axis_table(out_h, h);
    let xs = axis_table(out_w, w);
    let mut out = vec![0.0; n * c * out_h * out_w];
    for p in 0..n * c {
        let src = &tx.data()[p * h * w..(p + 1) * h * w];
        let dst = &mut out[p * out_h * out_w..(p + 1) * out_h * out_w];
        for (oy, &(y0, y1, ty)) in ys.iter().enumerate() {
            for (ox, &(x0, x1, tx_)) in xs.iter().enumerate() {
                dst[oy * out_w + ox] = (1.0 - ty) * (1.0 - tx_) * src[y0 * w + x0]
                    + (1.0 - ty) * tx_ * src[y0 * w + x1]
                    + ty * (1.0 - tx_) * src[y1 * w + x0]
                    + ty * tx_ * src[y1 * w + x1];
            }
        }
    }
    let out = Tensor::new([n, c, out_h, out_w], out)?;
    Ok(tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        let xv = ctx.val(x);
        let [n, c, h, w] = xv.dims();
        let ys = axis_table(out_h, h);
        let xs = axis_table(out_w, w);
        ctx.accum(x, |g| {
            for p in 0..n * c {
                let gsrc = &mut g[p * h * w..(p + 1) * h * w];
                let gdst = &gout[p * out_h * out_w..(p + 1) * out_h * out_w];
                for (oy, &(y0, y1, ty)) in ys.iter().enumerate() {
                    for (ox, &(x0, x1, tx_)) in xs.iter().enumerate() {
                        let go = gdst[oy * out_w + ox];
                        gsrc[y0 * w + x0] += go * (1.0 - ty) * (1.0 - tx_);
                        gsrc[y0 * w + x1] += go * (1.0 - ty) * tx_;
                        gsrc[y1 * w + x0] += go * ty * (1.0 - tx_);
                        gsrc[y1 * w + x1] += go * ty * tx_;
                    }
                }
            }
        });
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::sum_all;
    use crate::rng::Rng;
    use crate::tape::{grad_check, FD_STEP};

    #[test]
    fn constant_image_stays_constant() {
        let x = Tensor::full([1, 2, 3, 3], 0.42);
        let mut tape = Tape::new();
        let x_ = tape.leaf(x);
        let y = resize_bilinear(&mut tape, x_, 7, 5).unwrap();
        assert!(tape.value(y).data().iter().all(|&v| (v - 0.42).abs() < 1e-15));
    }

    #[test]
    fn same_size_is_identity() {
        let mut rng = Rng::new(1);
        let x = Tensor::from_fn([1, 1, 4, 5], |_| rng.uniform_in(-1.0, 1.0));
        let mut tape = Tape::new();
        let x_ = tape.leaf(x.clone());
        let y = resize_bilinear(&mut tape, x_, 4, 5).unwrap();
        assert!(tape.value(y).max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn two_by_two_to_four_by_four_hand_weights() {
        // Source coordinate of output o is (o + 0.5)/2 - 0.5, clamped at
        // the edges: 0 -> 0 (t = 0), 1 -> 0.25, 2 -> 0.75, 3 -> 1 (t = 0
        // after clamping the neighbor). Hand-evaluated for corners and
        // one interior point.
        let x = Tensor::new([1, 1, 2, 2], alloc::vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut tape = Tape::new();
        let x_ = tape.leaf(x);
        let y = resize_bilinear(&mut tape, x_, 4, 4).unwrap();
        let out = tape.value(y);
        assert!((out.at(0, 0, 0, 0) - 1.0).abs() < 1e-12);
        assert!((out.at(0, 0, 0, 3) - 2.0).abs() < 1e-12);
        assert!((out.at(0, 0, 3, 0) - 3.0).abs() < 1e-12);
        assert!((out.at(0, 0, 3, 3) - 4.0).abs() < 1e-12);
        // (1,1): y-blend 0.25 between rows, x-blend 0.25 between cols:
        // (0.75*1 + 0.25*2)*0.75 + (0.75*3 + 0.25*4)*0.25 = 1.75
        assert!((out.at(0, 0, 1, 1) - 1.75).abs() < 1e-12);
        // (1,2): x-blend 0.75: (0.25*1 + 0.75*2)*... hand value 2.25
        let want = 0.75 * (0.25 * 1.0 + 0.75 * 2.0) + 0.25 * (0.25 * 3.0 + 0.75 * 4.0);
        assert!((out.at(0, 0, 1, 2) - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_output_dims() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::zeros([1, 1, 2, 2]));
        assert!(resize_bilinear(&mut tape, x, 0, 3).is_err());
    }

    #[test]
    fn resize_gradient_matches_finite_differences() {
        for seed in 0..10 {
            let mut rng = Rng::new(seed);
            let x = Tensor::from_fn([1, 2, 3, 3], |_| rng.uniform_in(-1.0, 1.0));
            let err = grad_check(
                |t, xid| {
                    let y = resize_bilinear(t, xid, 5, 4)?;
                    Ok(sum_all(t, y))
                },
                &x,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "up seed {seed}: {err}");
            let err = grad_check(
                |t, xid| {
                    let y = resize_bilinear(t, xid, 2, 2)?;
                    Ok(sum_all(t, y))
                },
                &x,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "down seed {seed}: {err}");
        }
    }
}
