//! Affine maps and the two matrix products the attention stack needs.
//!
//! Matrix operands are (rows, cols, 1, 1) tensors.

use alloc::vec::Vec;

use super::shape_err;
use crate::error::Error;
use crate::tape::{Tape, TensorId};
use crate::tensor::{axpy, dot, Tensor};

/// out[t, o] = b[o] + sum_i x[t, i] * w[o, i]
///
/// x: (T, din), w: (dout, din), b: (dout, 1, 1, 1).
pub fn linear(tape: &mut Tape, x: TensorId, w: TensorId, b: TensorId) -> Result<TensorId, Error> {
    let (tx, tw, tb) = (tape.value(x), tape.value(w), tape.value(b));
    let (t, din) = (tx.rows(), tx.cols());
    let (dout, win) = (tw.rows(), tw.cols());
    if din != win {
        return Err(shape_err("linear", tx.dims(), tw.dims()));
    }
    if tb.len() != dout {
        return Err(shape_err("linear", tw.dims(), tb.dims()));
    }
    let mut out = Vec::with_capacity(t * dout);
    for r in 0..t {
        let xr = tx.row(r);
        for o in 0..dout {
            out.push(tb.data()[o] + dot(xr, tw.row(o)));
        }
    }
    let out = Tensor::matrix(t, dout, out)?;
    Ok(tape.record(out, &[x, w, b], move |ctx| {
        let gout = ctx.gout;
        let xv = ctx.val(x);
        let wv = ctx.val(w);
        let (t, din) = (xv.rows(), xv.cols());
        let dout = wv.rows();
        ctx.accum(x, |g| {
            for r in 0..t {
                let gr = &gout[r * dout..(r + 1) * dout];
                let gx = &mut g[r * din..(r + 1) * din];
                for o in 0..dout {
                    axpy(gx, gr[o], wv.row(o));
                }
            }
        });
        ctx.accum(w, |g| {
            for r in 0..t {
                let gr = &gout[r * dout..(r + 1) * dout];
                let xr = xv.row(r);
                for o in 0..dout {
                    axpy(&mut g[o * din..(o + 1) * din], gr[o], xr);
                }
            }
        });
        ctx.accum(b, |g| {
            for r in 0..t {
                let gr = &gout[r * dout..(r + 1) * dout];
                for o in 0..dout {
                    g[o] += gr[o];
                }
            }
        });
    }))
}

/// out = a * b^T: a (Ta, d), b (Tb, d) -> (Ta, Tb).
pub fn matmul_nt(tape: &mut Tape, a: TensorId, b: TensorId) -> Result<TensorId, Error> {
    let (ta, tb) = (tape.value(a), tape.value(b));
    if ta.cols() != tb.cols() {
        return Err(shape_err("matmul_nt", ta.dims(), tb.dims()));
    }
    let (ra, rb) = (ta.rows(), tb.rows());
    let mut out = Vec::with_capacity(ra * rb);
    for i in 0..ra {
        let ai = ta.row(i);
        for j in 0..rb {
            out.push(dot(ai, tb.row(j)));
        }
    }
    let out = Tensor::matrix(ra, rb, out)?;
    Ok(tape.record(out, &[a, b], move |ctx| {
        let gout = ctx.gout;
        let av = ctx.val(a);
        let bv = ctx.val(b);
        let (ra, rb, d) = (av.rows(), bv.rows(), av.cols());
        ctx.accum(a, |g| {
            for i in 0..ra {
                let gi = &gout[i * rb..(i + 1) * rb];
                let ga = &mut g[i * d..(i + 1) * d];
                for j in 0..rb {
                    axpy(ga, gi[j], bv.row(j));
                }
            }
        });
        ctx.accum(b, |g| {
            for i in 0..ra {
                let gi = &gout[i * rb..(i + 1) * rb];
                let ai = av.row(i);
                for j in 0..rb {
                    axpy(&mut g[j * d..(j + 1) * d], gi[j], ai);
                }
            }
        });
    }))
}

/// out = a * b: a (Ta, K), b (K, d) -> (Ta, d).
pub fn matmul_nn(tape: &mut Tape, a: TensorId, b: TensorId) -> Result<TensorId, Error> {
    let (ta, tb) = (tape.value(a), tape.value(b));
    if ta.cols() != tb.rows() {
        return Err(shape_err("matmul_nn", ta.dims(), tb.dims()));
    }
    let (ra, k, d) = (ta.rows(), ta.cols(), tb.cols());
    let mut out = alloc::vec![0.0; ra * d];
    for i in 0..ra {
        let ai = ta.row(i);
        let oi = &mut out[i * d..(i + 1) * d];
        for (kk, &aik) in ai.iter().enumerate().take(k) {
            axpy(oi, aik, tb.row(kk));
        }
    }
    let out = Tensor::matrix(ra, d, out)?;
    Ok(tape.record(out, &[a, b], move |ctx| {
        let gout = ctx.gout;
        let av = ctx.val(a);
        let bv = ctx.val(b);
        let (ra, k, d) = (av.rows(), av.cols(), bv.cols());
        ctx.accum(a, |g| {
            for i in 0..ra {
                let gi = &gout[i * d..(i + 1) * d];
                for kk in 0..k {
                    g[i * k + kk] += dot(gi, bv.row(kk));
                }
            }
        });
        ctx.accum(b, |g| {
            for i in 0..ra {
                let gi = &gout[i * d..(i + 1) * d];
                let ai = av.row(i);
                for kk in 0..k {
                    axpy(&mut g[kk * d..(kk + 1) * d], ai[kk], gi);
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

    fn rand_matrix(rows: usize, cols: usize, seed: u64) -> Tensor {
        let mut rng = Rng::new(seed);
        Tensor::from_fn([rows, cols, 1, 1], |_| rng.uniform_in(-1.0, 1.0))
    }

    #[test]
    fn identity_weights_zero_bias_is_identity() {
        let x = rand_matrix(3, 4, 1);
        let w = Tensor::from_fn([4, 4, 1, 1], |i| if i / 4 == i % 4 { 1.0 } else { 0.0 });
        let b = Tensor::zeros([4, 1, 1, 1]);
        let mut tape = Tape::new();
        let (x_, w_, b_) = (tape.leaf(x.clone()), tape.leaf(w), tape.leaf(b));
        let y = linear(&mut tape, x_, w_, b_).unwrap();
        assert_eq!(tape.value(y).data(), x.data());
    }

    #[test]
    fn zero_weights_constant_bias_is_constant() {
        let x = rand_matrix(5, 3, 2);
        let w = Tensor::zeros([2, 3, 1, 1]);
        let b = Tensor::new([2, 1, 1, 1], alloc::vec![0.25, -1.5]).unwrap();
        let mut tape = Tape::new();
        let (x_, w_, b_) = (tape.leaf(x), tape.leaf(w), tape.leaf(b));
        let y = linear(&mut tape, x_, w_, b_).unwrap();
        for r in 0..5 {
            assert_eq!(tape.value(y).row(r), &[0.25, -1.5]);
        }
    }

    #[test]
    fn random_case_matches_naive_loop() {
        let x = rand_matrix(4, 6, 3);
        let w = rand_matrix(5, 6, 4);
        let b = rand_matrix(5, 1, 5);
        let mut tape = Tape::new();
        let (x_, w_, b_) = (tape.leaf(x.clone()), tape.leaf(w.clone()), tape.leaf(b.clone()));
        let y = linear(&mut tape, x_, w_, b_).unwrap();
        for t in 0..4 {
            for o in 0..5 {
                let mut want = b.data()[o];
                for i in 0..6 {
                    want += x.at(t, i, 0, 0) * w.at(o, i, 0, 0);
                }
                let got = tape.value(y).at(t, o, 0, 0);
                assert!((got - want).abs() < 1e-12, "({t},{o}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn linear_shape_mismatch_errors() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::zeros([2, 3, 1, 1]));
        let w = tape.leaf(Tensor::zeros([4, 5, 1, 1]));
        let b = tape.leaf(Tensor::zeros([4, 1, 1, 1]));
        assert!(matches!(
            linear(&mut tape, x, w, b),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn linear_gradients_match_finite_differences() {
        for seed in 0..10 {
            let x = rand_matrix(3, 4, seed);
            let w = rand_matrix(2, 4, seed + 50);
            let b = rand_matrix(2, 1, seed + 90);
            // w.r.t. x
            let (wc, bc) = (w.clone(), b.clone());
            let err = grad_check(
                move |t, xid| {
                    let w = t.leaf(wc.clone());
                    let b = t.leaf(bc.clone());
                    let y = linear(t, xid, w, b)?;
                    Ok(sum_all(t, y))
                },
                &x,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "x seed {seed}: {err}");
            // w.r.t. w
            let xc = x.clone();
            let bc = b.clone();
            let err = grad_check(
                move |t, wid| {
                    let x = t.leaf(xc.clone());
                    let b = t.leaf(bc.clone());
                    let y = linear(t, x, wid, b)?;
                    Ok(sum_all(t, y))
                },
                &w,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "w seed {seed}: {err}");
            // w.r.t. b
            let xc = x.clone();
            let wc = w.clone();
            let err = grad_check(
                move |t, bid| {
                    let x = t.leaf(xc.clone());
                    let w = t.leaf(wc.clone());
                    let y = linear(t, x, w, bid)?;
                    Ok(sum_all(t, y))
                },
                &b,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "b seed {seed}: {err}");
        }
    }

    #[test]
    fn matmul_gradients_match_finite_differences() {
        for seed in 0..10 {
            let a = rand_matrix(3, 4, seed);
            let b = rand_matrix(5, 4, seed + 10);
            let bc = b.clone();
            let err = grad_check(
                move |t, aid| {
                    let b = t.var(bc.clone());
                    let y = matmul_nt(t, aid, b)?;
                    Ok(sum_all(t, y))
                },
                &a,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "nt seed {seed}: {err}");

            let a2 = rand_matrix(3, 5, seed);
            let b2 = rand_matrix(5, 2, seed + 20);
            let a2c = a2.clone();
            let err = grad_check(
                move |t, bid| {
                    let a = t.var(a2c.clone());
                    let y = matmul_nn(t, a, bid)?;
                    Ok(sum_all(t, y))
                },
                &b2,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "nn seed {seed}: {err}");
        }
    }

    #[test]
    fn matmul_nt_matches_naive() {
        let a = rand_matrix(3, 4, 7);
        let b = rand_matrix(2, 4, 8);
        let mut tape = Tape::new();
        let (a_, b_) = (tape.leaf(a.clone()), tape.leaf(b.clone()));
        let y = matmul_nt(&mut tape, a_, b_).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let mut want = 0.0;
                for k in 0..4 {
                    want += a.at(i, k, 0, 0) * b.at(j, k, 0, 0);
                }
                assert!((tape.value(y).at(i, j, 0, 0) - want).abs() < 1e-12);
            }
        }
    }
}
