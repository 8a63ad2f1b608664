//! Depthwise-dilated adapter block and the plain MLP adapter baseline.
//!
//! The block runs three stages over an (N, C, H, W) feature map:
//! channel reduction, multi-scale local feature extraction, and
//! dimension recovery:
//!
//! ```text
//! f_d = GELU(PWConv_down(f_i))
//! f_m = f_d + sum_r GELU(DWDiConv_r(f_d))
//! f_o = f_i + GELU(PWConv_up(f_m))
//! ```
//!
//! The branch sum is a plain unweighted sum over dilation rates, with
//! the bottleneck feature added once as a residual. The up projection
//! initializes to zero so a fresh adapter is an exact identity map.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::ops;
use crate::rng::{fnv1a, Rng};
use crate::tape::{Tape, TensorId};
use crate::tensor::Tensor;

/// Geometry of one adapter block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DDAdapterConfig {
    /// Feature channels C of the map the adapter sits on.
    pub channels: usize,
    /// Bottleneck reduction: inner width is C / reduction.
    pub reduction: usize,
    /// Depthwise kernel size (odd).
    pub kernel: usize,
    /// Dilation rate per branch, strictly increasing. Empty means no
    /// depthwise branches (the MLP adapter uses the same config).
    pub rates: Vec<usize>,
}

impl DDAdapterConfig {
    pub fn new(channels: usize, reduction: usize, kernel: usize, rates: &[usize]) -> Self {
        DDAdapterConfig {
            channels,
            reduction,
            kernel,
            rates: rates.to_vec(),
        }
    }

    /// Default geometry for C channels: reduction 4, 3x3 kernel,
    /// dilation rates 1 and 3.
    pub fn for_channels(channels: usize) -> Self {
        DDAdapterConfig::new(channels, 4, 3, &[1, 3])
    }

    pub fn validate(&self) -> Result<(), Error> {
        let err = |msg: String| Error::Config {
            op: "adapter_config",
            msg,
        };
        if self.channels == 0 || self.reduction == 0 {
            return Err(err(alloc::format!(
                "channels ({}) and reduction ({}) must be positive",
                self.channels,
                self.reduction
            )));
        }
        if !self.channels.is_multiple_of(self.reduction) {
            return Err(err(alloc::format!(
                "channels {} not divisible by reduction {}",
                self.channels,
                self.reduction
            )));
        }
        if self.kernel.is_multiple_of(2) || self.kernel == 0 {
            return Err(err(alloc::format!("kernel must be odd, got {}", self.kernel)));
        }
        if self.rates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err(alloc::format!(
                "rates must be strictly increasing, got {:?}",
                self.rates
            )));
        }
        if self.rates.first() == Some(&0) {
            return Err(err("rates must be positive".into()));
        }
        Ok(())
    }

    /// Bottleneck width C / reduction.
    pub fn inner(&self) -> usize {
        self.channels / self.reduction
    }
}

/// Which block, if any, sits after the transformer blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdapterVariant {
    /// Depthwise-dilated adapter.
    Dd,
    /// Plain bottleneck MLP adapter (no depthwise branches).
    StandardMlp,
    /// No adapter at all.
    None,
}

/// Adapter parameters as owned tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct AdapterParams {
    /// (C/r, C, 1, 1) and (C/r, 1, 1, 1).
    pub down_w: Tensor,
    pub down_b: Tensor,
    /// One (C/r, 1, k, k) kernel plus (C/r, 1, 1, 1) bias per rate.
    pub branches: Vec<(Tensor, Tensor)>,
    /// (C, C/r, 1, 1) and (C, 1, 1, 1).
    pub up_w: Tensor,
    pub up_b: Tensor,
}

impl AdapterParams {
    /// Fresh initialization: down and branch weights uniform in
    /// +/- 1/sqrt(fan_in), biases zero, up projection fully zero so the
    /// block starts as the identity.
    pub fn init(cfg: &DDAdapterConfig, seed: u64) -> Self {
        let c = cfg.channels;
        let inner = cfg.inner();
        let k = cfg.kernel;
        let stream = |name: &str| Rng::new(seed ^ fnv1a(name.as_bytes()));
        let down_scale = 1.0 / crate::fmath::sqrt(c as f64);
        let branch_scale = 1.0 / crate::fmath::sqrt((k * k) as f64);
        AdapterParams {
            down_w: Tensor::random_uniform([inner, c, 1, 1], down_scale, &mut stream("down.w")),
            down_b: Tensor::zeros([inner, 1, 1, 1]),
            branches: cfg
                .rates
                .iter()
                .map(|r| {
                    let name = alloc::format!("branch{r}.w");
                    (
                        Tensor::random_uniform([inner, 1, k, k], branch_scale, &mut stream(&name)),
                        Tensor::zeros([inner, 1, 1, 1]),
                    )
                })
                .collect(),
            up_w: Tensor::zeros([c, inner, 1, 1]),
            up_b: Tensor::zeros([c, 1, 1, 1]),
        }
    }

    /// Total number of scalar parameters, by enumeration.
    pub fn element_count(&self) -> usize {
        self.down_w.len()
            + self.down_b.len()
            + self
                .branches
                .iter()
                .map(|(w, b)| w.len() + b.len())
                .sum::<usize>()
            + self.up_w.len()
            + self.up_b.len()
    }

    /// Record every tensor on the tape.
    pub fn stage(&self, tape: &mut Tape, trainable: bool) -> AdapterParamIds {
        let mut put = |t: &Tensor| {
            if trainable {
                tape.var(t.clone())
            } else {
                tape.leaf(t.clone())
            }
        };
        AdapterParamIds {
            down_w: put(&self.down_w),
            down_b: put(&self.down_b),
            branches: self.branches.iter().map(|(w, b)| (put(w), put(b))).collect(),
            up_w: put(&self.up_w),
            up_b: put(&self.up_b),
        }
    }
}

/// Adapter parameters already recorded on a tape.
#[derive(Clone, Debug)]
pub struct AdapterParamIds {
    pub down_w: TensorId,
    pub down_b: TensorId,
    pub branches: Vec<(TensorId, TensorId)>,
    pub up_w: TensorId,
    pub up_b: TensorId,
}

/// Run the adapter over f_i (N, C, H, W); output has the same shape.
pub fn dd_adapter_forward(
    tape: &mut Tape,
    f_i: TensorId,
    p: &AdapterParamIds,
    cfg: &DDAdapterConfig,
) -> Result<TensorId, Error> {
    cfg.validate()?;
    let dims = tape.value(f_i).dims();
    if dims[1] != cfg.channels {
        return Err(Error::Shape {
            op: "dd_adapter_forward",
            left: dims,
            right: [dims[0], cfg.channels, dims[2], dims[3]],
        });
    }
    if p.branches.len() != cfg.rates.len() {
        return Err(Error::Config {
            op: "dd_adapter_forward",
            msg: alloc::format!(
                "{} branch params for {} rates",
                p.branches.len(),
                cfg.rates.len()
            ),
        });
    }
    // f_d = GELU(PWConv_down(f_i))
    let down = ops::conv2d_pointwise(tape, f_i, p.down_w, p.down_b)?;
    let f_d = ops::gelu(tape, down);
    // f_m = f_d + sum_r GELU(DWDiConv_r(f_d))
    let mut f_m = f_d;
    for (&rate, &(w, b)) in cfg.rates.iter().zip(&p.branches) {
        let conv = ops::conv2d_depthwise(tape, f_d, w, b, rate)?;
        let act = ops::gelu(tape, conv);
        f_m = ops::add(tape, f_m, act)?;
    }
    // f_o = f_i + GELU(PWConv_up(f_m))
    let up = ops::conv2d_pointwise(tape, f_m, p.up_w, p.up_b)?;
    let act = ops::gelu(tape, up);
    ops::add(tape, f_i, act)
}

/// The plain MLP adapter: identical to [`dd_adapter_forward`] with no
/// depthwise branches (down, GELU, up, GELU, outer residual).
pub fn std_adapter_forward(
    tape: &mut Tape,
    f_i: TensorId,
    p: &AdapterParamIds,
    cfg: &DDAdapterConfig,
) -> Result<TensorId, Error> {
    let no_branches = DDAdapterConfig {
        rates: Vec::new(),
        ..cfg.clone()
    };
    let p = AdapterParamIds {
        branches: Vec::new(),
        ..p.clone()
    };
    dd_adapter_forward(tape, f_i, &p, &no_branches)
}

/// Closed-form parameter count:
/// (C*C/r + C/r) + n*(k^2*C/r + C/r) + (C/r*C + C).
pub fn param_count(cfg: &DDAdapterConfig) -> usize {
    let c = cfg.channels;
    let inner = cfg.inner();
    let k2 = cfg.kernel * cfg.kernel;
    let n = cfg.rates.len();
    (c * inner + inner) + n * (k2 * inner + inner) + (inner * c + c)
}

/// Multiply-accumulate count for one forward pass over an H x W map:
/// H*W*(C*C/r + n*k^2*C/r + C/r*C). Biases and GELU excluded.
pub fn flop_count(cfg: &DDAdapterConfig, h: usize, w: usize) -> u64 {
    let c = cfg.channels as u64;
    let inner = cfg.inner() as u64;
    let k2 = (cfg.kernel * cfg.kernel) as u64;
    let n = cfg.rates.len() as u64;
    (h as u64) * (w as u64) * (c * inner + n * k2 * inner + inner * c)
}
