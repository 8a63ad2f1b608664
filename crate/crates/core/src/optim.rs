//! AdamW over the trainable subset of a [`ModelState`].
//!
//! Decoupled weight decay, bias-corrected moments, one learning rate
//! per parameter scope (adapter vs decoder). Frozen parameters are
//! never read or written by the update.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;
use crate::model::{is_adapter_param, ModelState};
use crate::tensor::Tensor;

/// Gradients keyed by parameter name.
pub type GradMap = BTreeMap<String, Vec<f64>>;

/// Learning rate by parameter scope.
#[derive(Clone, Copy, Debug)]
pub struct LrMap {
    pub adapter: f64,
    pub decoder: f64,
    /// Applied when policy `all` unfreezes the backbone.
    pub backbone: f64,
}

impl LrMap {
    pub fn rate_for(&self, name: &str) -> f64 {
        if is_adapter_param(name) {
            self.adapter
        } else if crate::model::is_decoder_param(name) {
            self.decoder
        } else {
            self.backbone
        }
    }

    pub fn scaled(&self, factor: f64) -> LrMap {
        LrMap {
            adapter: self.adapter * factor,
            decoder: self.decoder * factor,
            backbone: self.backbone * factor,
        }
    }
}

/// AdamW hyperparameters (learning rates live in [`LrMap`]).
#[derive(Clone, Copy, Debug)]
pub struct AdamWConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        AdamWConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

/// First/second moment buffers plus the step counter.
#[derive(Clone, Debug, Default)]
pub struct OptimState {
    m: BTreeMap<String, Vec<f64>>,
    v: BTreeMap<String, Vec<f64>>,
    step: u64,
}

impl OptimState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// Scale gradients in place so their global L2 norm is at most
/// `max_norm`; returns the pre-clip norm.
pub fn clip_global_norm(grads: &mut GradMap, max_norm: f64) -> f64 {
    let mut sq = 0.0;
    for g in grads.values() {
        for &v in g {
            sq += v * v;
        }
    }
    let norm = fmath::sqrt(sq);
    if norm > max_norm && norm > 0.0 {
        let s = max_norm / norm;
        for g in grads.values_mut() {
            for v in g.iter_mut() {
                *v *= s;
            }
        }
    }
    norm
}

/// One AdamW step over every trainable parameter.
///
/// p <- p * (1 - lr * wd); m, v updated with (1 - beta) * g; the
/// bias-corrected ratio m_hat / (sqrt(v_hat) + eps) is scaled by the
/// scope's lr. Missing gradients for trainable parameters are an
/// error; gradients for frozen parameters are ignored.
pub fn adamw_step(
    state: &mut ModelState,
    grads: &GradMap,
    opt: &mut OptimState,
    lr: &LrMap,
    cfg: &AdamWConfig,
) -> Result<(), Error> {
    opt.step += 1;
    let t = opt.step;
    let bc1 = 1.0 - libm::pow(cfg.beta1, t as f64);
    let bc2 = 1.0 - libm::pow(cfg.beta2, t as f64);
    let names: Vec<String> = state
        .names()
        .filter(|n| state.is_trainable(n))
        .map(String::from)
        .collect();
    for name in names {
        let g = grads.get(&name).ok_or_else(|| {
            Error::Config {
                op: "adamw_step",
                msg: alloc::format!("missing gradient for trainable parameter {name}"),
            }
        })?;
        let param = state.get(&name).expect("trainable name exists").clone();
        if g.len() != param.len() {
            return Err(Error::Shape {
                op: "adamw_step",
                left: param.dims(),
                right: [g.len(), 1, 1, 1],
            });
        }
        let rate = lr.rate_for(&name);
        let m = opt
            .m
            .entry(name.clone())
            .or_insert_with(|| vec![0.0; param.len()]);
        let v = opt
            .v
            .entry(name.clone())
            .or_insert_with(|| vec![0.0; param.len()]);
        let mut data = param.into_data();
        for i in 0..data.len() {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            data[i] *= 1.0 - rate * cfg.weight_decay;
            data[i] -= rate * m_hat / (fmath::sqrt(v_hat) + cfg.eps);
        }
        let dims = state.get(&name).expect("name exists").dims();
        state.set(&name, Tensor::new(dims, data)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{set_trainable, EncoderConfig, FreezePolicy};

    fn tiny_state() -> ModelState {
        let cfg = EncoderConfig {
            image_size: 16,
            patch_size: 8,
            embed_dim: 8,
            heads: 2,
            blocks: 1,
            mlp_ratio: 2,
            adapter_count: 1,
            ..EncoderConfig::default()
        };
        let cfg = EncoderConfig {
            adapter: crate::adapter::DDAdapterConfig::new(8, 4, 3, &[1]),
            ..cfg
        };
        ModelState::init(&cfg, 0).unwrap()
    }

    fn zero_grads(state: &ModelState) -> GradMap {
        state
            .iter()
            .filter(|(n, _)| state.is_trainable(n))
            .map(|(n, t)| (String::from(n), vec![0.0; t.len()]))
            .collect()
    }

    fn lr_all(rate: f64) -> LrMap {
        LrMap {
            adapter: rate,
            decoder: rate,
            backbone: rate,
        }
    }

    #[test]
    fn zero_grad_no_decay_leaves_params_unchanged() {
        let mut state = tiny_state();
        let before = state.clone();
        let grads = zero_grads(&state);
        let mut opt = OptimState::new();
        let cfg = AdamWConfig {
            weight_decay: 0.0,
            ..AdamWConfig::default()
        };
        adamw_step(&mut state, &grads, &mut opt, &lr_all(1e-2), &cfg).unwrap();
        assert_eq!(state, before);
    }

    #[test]
    fn zero_grad_with_decay_scales_exactly() {
        let mut state = tiny_state();
        let before = state.clone();
        let grads = zero_grads(&state);
        let mut opt = OptimState::new();
        let cfg = AdamWConfig::default();
        let rate = 1e-2;
        adamw_step(&mut state, &grads, &mut opt, &lr_all(rate), &cfg).unwrap();
        for (name, t) in state.iter() {
            let b = before.get(name).unwrap();
            if state.is_trainable(name) {
                for (a, x) in t.data().iter().zip(b.data()) {
                    assert_eq!(*a, x * (1.0 - rate * cfg.weight_decay), "{name}");
                }
            } else {
                assert_eq!(t.data(), b.data(), "frozen {name} moved");
            }
        }
    }

    #[test]
    fn single_step_matches_hand_evaluated_update() {
        // Scalar parameter p = 1, gradient 1, defaults. Hand values:
        // m = 0.1, v = 0.001, m_hat = 1, v_hat = 1,
        // p <- 1 * (1 - lr*0.01) - lr * 1/(1 + 1e-8).
        let mut state = ModelState::blank();
        state.insert_raw("dec.p".into(), Tensor::scalar(1.0));
        set_trainable(&mut state, FreezePolicy::Paper);
        assert!(state.is_trainable("dec.p"));
        let mut grads = GradMap::new();
        grads.insert("dec.p".into(), vec![1.0]);
        let mut opt = OptimState::new();
        let cfg = AdamWConfig::default();
        let lr = 1e-3;
        adamw_step(&mut state, &grads, &mut opt, &lr_all(lr), &cfg).unwrap();
        let want = 1.0 * (1.0 - lr * 0.01) - lr * (1.0 / (1.0 + 1e-8));
        let got = state.get("dec.p").unwrap().data()[0];
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        assert_eq!(opt.step_count(), 1);
    }

    #[test]
    fn missing_gradient_for_trainable_is_an_error() {
        let mut state = tiny_state();
        let mut grads = zero_grads(&state);
        let key = grads.keys().next().unwrap().clone();
        grads.remove(&key);
        let mut opt = OptimState::new();
        let err = adamw_step(
            &mut state,
            &grads,
            &mut opt,
            &lr_all(1e-3),
            &AdamWConfig::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn frozen_parameters_bit_identical_across_steps() {
        let mut state = tiny_state();
        let frozen_sum = state.checksum_of(|n| !state.is_trainable(n));
        let mut opt = OptimState::new();
        for step in 0..5 {
            let grads: GradMap = state
                .iter()
                .filter(|(n, _)| state.is_trainable(n))
                .map(|(n, t)| {
                    (
                        String::from(n),
                        (0..t.len()).map(|i| ((i + step) % 3) as f64 - 1.0).collect(),
                    )
                })
                .collect();
            adamw_step(
                &mut state,
                &grads,
                &mut opt,
                &lr_all(1e-3),
                &AdamWConfig::default(),
            )
            .unwrap();
        }
        assert_eq!(frozen_sum, state.checksum_of(|n| !state.is_trainable(n)));
    }

    #[test]
    fn clip_rescales_to_max_norm() {
        let mut grads = GradMap::new();
        grads.insert("a".into(), vec![3.0, 4.0]);
        let norm = clip_global_norm(&mut grads, 1.0);
        assert!((norm - 5.0).abs() < 1e-12);
        let g = &grads["a"];
        let new_norm = fmath::sqrt(g[0] * g[0] + g[1] * g[1]);
        assert!((new_norm - 1.0).abs() < 1e-12);
        // under the cap: untouched
        let mut grads = GradMap::new();
        grads.insert("a".into(), vec![0.3, 0.4]);
        clip_global_norm(&mut grads, 1.0);
        assert_eq!(grads["a"], vec![0.3, 0.4]);
    }
}
