//! Segmentation losses on logits: soft Dice, binary cross-entropy,
//! and their equally weighted combination.
//!
//! Targets are constant binary masks (0/1 values), not tape tensors.

use crate::error::Error;
use crate::fmath;
use crate::ops;
use crate::tape::{Tape, TensorId};
use crate::tensor::Tensor;

/// Smoothing constant in the soft Dice ratio.
pub const DICE_SMOOTH: f64 = 1.0;

fn check_target(op: &'static str, logits: &Tensor, target: &Tensor) -> Result<(), Error> {
    if logits.dims() != target.dims() {
        return Err(Error::Shape {
            op,
            left: logits.dims(),
            right: target.dims(),
        });
    }
    Ok(())
}

/// Soft Dice loss: 1 - (2 sum(p t) + s) / (sum(p) + sum(t) + s) with
/// p = sigmoid(logits) and s = 1.
pub fn dice_loss(tape: &mut Tape, logits: TensorId, target: &Tensor) -> Result<TensorId, Error> {
    let lv = tape.value(logits);
    check_target("dice_loss", lv, target)?;
    let mut sum_p = 0.0;
    let mut sum_pt = 0.0;
    let mut sum_t = 0.0;
    for (&z, &t) in lv.data().iter().zip(target.data()) {
        let p = fmath::sigmoid(z);
        sum_p += p;
        sum_pt += p * t;
        sum_t += t;
    }
    let num = 2.0 * sum_pt + DICE_SMOOTH;
    let den = sum_p + sum_t + DICE_SMOOTH;
    let out = Tensor::scalar(1.0 - num / den);
    let target = target.clone();
    Ok(tape.record(out, &[logits], move |ctx| {
        let gout = ctx.gout[0];
        let lv = ctx.val(logits);
        ctx.accum(logits, |g| {
            for (i, (&z, &t)) in lv.data().iter().zip(target.data()).enumerate() {
                let p = fmath::sigmoid(z);
                // d(1 - num/den)/dp_i = -(2 t_i den - num) / den^2
                let dp = -(2.0 * t * den - num) / (den * den);
                g[i] += gout * dp * p * (1.0 - p);
            }
        });
    }))
}

/// Mean binary cross-entropy with the numerically stable log-sigmoid
/// form: mean over pixels of softplus(-z) + (1 - t) z.
pub fn ce_loss(tape: &mut Tape, logits: TensorId, target: &Tensor) -> Result<TensorId, Error> {
    let lv = tape.value(logits);
    check_target("ce_loss", lv, target)?;
    let n = lv.len() as f64;
    let mut acc = 0.0;
    for (&z, &t) in lv.data().iter().zip(target.data()) {
        acc += fmath::softplus(-z) + (1.0 - t) * z;
    }
    let out = Tensor::scalar(acc / n);
    let target = target.clone();
    Ok(tape.record(out, &[logits], move |ctx| {
        let gout = ctx.gout[0];
        let lv = ctx.val(logits);
        let n = lv.len() as f64;
        ctx.accum(logits, |g| {
            for (i, (&z, &t)) in lv.data().iter().zip(target.data()).enumerate() {
                g[i] += gout * (fmath::sigmoid(z) - t) / n;
            }
        });
    }))
}

/// 0.5 * dice + 0.5 * ce.
pub fn combined_loss(
    tape: &mut Tape,
    logits: TensorId,
    target: &Tensor,
) -> Result<TensorId, Error> {
    let d = dice_loss(tape, logits, target)?;
    let c = ce_loss(tape, logits, target)?;
    let dh = ops::scale(tape, d, 0.5);
    let ch = ops::scale(tape, c, 0.5);
    ops::add(tape, dh, ch)
}
