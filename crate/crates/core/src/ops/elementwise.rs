//! Elementwise ops and the scalar reduction.

use super::shape_err;
use crate::error::Error;
use crate::fmath;
use crate::tape::{Tape, TensorId};
use crate::tensor::{axpy, Tensor};

/// Elementwise sum of two same-shape tensors.
pub fn add(tape: &mut Tape, a: TensorId, b: TensorId) -> Result<TensorId, Error> {
    let (ta, tb) = (tape.value(a), tape.value(b));
    if ta.dims() != tb.dims() {
        return Err(shape_err("add", ta.dims(), tb.dims()));
    }
    let out = Tensor::new(
        ta.dims(),
        ta.data().iter().zip(tb.data()).map(|(x, y)| x + y).collect(),
    )?;
    Ok(tape.record(out, &[a, b], move |ctx| {
        let gout = ctx.gout;
        ctx.accum(a, |g| axpy(g, 1.0, gout));
        ctx.accum(b, |g| axpy(g, 1.0, gout));
    }))
}

/// Elementwise (Hadamard) product of two same-shape tensors.
pub fn mul(tape: &mut Tape, a: TensorId, b: TensorId) -> Result<TensorId, Error> {
    let (ta, tb) = (tape.value(a), tape.value(b));
    if ta.dims() != tb.dims() {
        return Err(shape_err("mul", ta.dims(), tb.dims()));
    }
    let out = Tensor::new(
        ta.dims(),
        ta.data().iter().zip(tb.data()).map(|(x, y)| x * y).collect(),
    )?;
    Ok(tape.record(out, &[a, b], move |ctx| {
        let gout = ctx.gout;
        let av = ctx.val(a);
        let bv = ctx.val(b);
        ctx.accum(a, |g| {
            for i in 0..g.len() {
                g[i] += gout[i] * bv.data()[i];
            }
        });
        ctx.accum(b, |g| {
            for i in 0..g.len() {
                g[i] += gout[i] * av.data()[i];
            }
        });
    }))
}

/// Multiply by a scalar constant.
pub fn scale(tape: &mut Tape, x: TensorId, c: f64) -> TensorId {
    let tx = tape.value(x);
    let out = Tensor::new(tx.dims(), tx.data().iter().map(|v| v * c).collect())
        .expect("same dims as input");
    tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        ctx.accum(x, |g| axpy(g, c, gout));
    })
}

/// Exact GELU: y = x * Phi(x) with Phi the standard normal CDF (erf
/// form, not the tanh approximation).
pub fn gelu(tape: &mut Tape, x: TensorId) -> TensorId {
    let tx = tape.value(x);
    // one pass computes the value and the derivative
    // Phi(x) + x phi(x), so backward re-evaluates no erf/exp
    let mut out = alloc::vec::Vec::with_capacity(tx.len());
    let mut derivs = alloc::vec::Vec::with_capacity(tx.len());
    for &v in tx.data() {
        let cdf = fmath::norm_cdf(v);
        out.push(v * cdf);
        derivs.push(cdf + v * fmath::norm_pdf(v));
    }
    let out = Tensor::new(tx.dims(), out).expect("same dims as input");
    tape.record(out, &[x], move |ctx| {
        let gout = ctx.gout;
        ctx.accum(x, |g| {
            for i in 0..g.len() {
                g[i] += gout[i] * derivs[i];
            }
        });
    })
}

/// Sum of all elements; the usual scalar root for backward passes.
pub fn sum_all(tape: &mut Tape, x: TensorId) -> TensorId {
    let s: f64 = tape.value(x).data().iter().sum();
    let out = Tensor::scalar(s);
    tape.record(out, &[x], move |ctx| {
        let g0 = ctx.gout[0];
        ctx.accum(x, |g| {
            for gi in g.iter_mut() {
                *gi += g0;
            }
        });
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::{grad_check, FD_STEP};
    use crate::tensor::Tensor;
    use alloc::vec::Vec;

    fn randoms(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = crate::rng::Rng::new(seed);
        (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect()
    }

    #[test]
    fn gelu_zero_is_zero() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::scalar(0.0));
        let y = gelu(&mut tape, x);
        assert_eq!(tape.value(y).data()[0], 0.0);
    }

    #[test]
    fn gelu_saturates_at_ten() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::scalar(10.0));
        let y = gelu(&mut tape, x);
        assert!(fmath::abs(tape.value(y).data()[0] - 10.0) < 1e-9);
    }

    #[test]
    fn gelu_one_matches_normal_cdf() {
        // Independently evaluated Phi(1) = 0.8413447460685429.
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::scalar(1.0));
        let y = gelu(&mut tape, x);
        assert!(fmath::abs(tape.value(y).data()[0] - 0.841_344_746_068_542_9) < 1e-12);
    }

    #[test]
    fn gelu_gradient_matches_finite_differences() {
        for seed in 0..10 {
            let x = Tensor::new([1, 2, 3, 2], randoms(12, seed)).unwrap();
            let err = grad_check(
                |t, x| {
                    let y = gelu(t, x);
                    Ok(sum_all(t, y))
                },
                &x,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "seed {seed}: err {err}");
        }
    }

    #[test]
    fn add_requires_matching_shapes() {
        let mut tape = Tape::new();
        let a = tape.leaf(Tensor::zeros([1, 2, 2, 2]));
        let b = tape.leaf(Tensor::zeros([1, 2, 2, 3]));
        match add(&mut tape, a, b) {
            Err(Error::Shape { left, right, .. }) => {
                assert_eq!(left, [1, 2, 2, 2]);
                assert_eq!(right, [1, 2, 2, 3]);
            }
            other => panic!("expected shape error, got {other:?}"),
        }
    }

    #[test]
    fn mul_gradient_matches_finite_differences() {
        for seed in 0..10 {
            let x = Tensor::new([1, 1, 2, 3], randoms(6, seed)).unwrap();
            let c = Tensor::new([1, 1, 2, 3], randoms(6, seed + 100)).unwrap();
            let err = grad_check(
                |t, x| {
                    let c = t.var(c.clone());
                    let y = mul(t, x, c)?;
                    Ok(sum_all(t, y))
                },
                &x,
                FD_STEP,
            )
            .unwrap();
            assert!(err < 1e-6, "seed {seed}: err {err}");
        }
    }

    #[test]
    fn ops_are_pure() {
        let x = Tensor::new([1, 1, 2, 2], randoms(4, 9)).unwrap();
        let run = || {
            let mut tape = Tape::new();
            let xid = tape.leaf(x.clone());
            let y = gelu(&mut tape, xid);
            let z = scale(&mut tape, y, -1.75);
            tape.value(z).data().to_vec()
        };
        let a = run();
        let b = run();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
