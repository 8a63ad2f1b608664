//! Miniature streaming tracking/segmentation model.
//!
//! A flat patch-embed transformer image encoder with adapter slots
//! after each of the first `adapter_count` blocks, a box prompt
//! encoder, a streaming memory (memory encoder + single cross-attention
//! memory layer + FIFO bank), and a two-way transformer mask decoder.
//!
//! Parameters live in a name-keyed map; names are hierarchical
//! (`enc.blk03.attn.q.w`, `enc.adapter01.up.b`, `dec.token`, ...) and
//! iteration is always in sorted name order, which pins serialization
//! and update order.

mod bank;
mod forward;
mod efficiency;
mod track;

pub use bank::{BoxPrompt, MemoryBank};
pub use efficiency::frame_macs;
pub use forward::{
    decode_mask, encode_box, encode_frame, memory_attention, memory_encode, sincos_xy,
};
pub use track::{track_logits, track_video, SEED_LOGIT};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::adapter::{AdapterParams, AdapterVariant, DDAdapterConfig};
use crate::error::Error;
use crate::rng::{fnv1a, Rng};
use crate::tape::{Tape, TensorId};
use crate::tensor::Tensor;

/// Decoder depth (two-way transformer blocks).
pub const DECODER_BLOCKS: usize = 2;

/// Geometry and adapter placement of the full model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncoderConfig {
    pub image_size: usize,
    pub patch_size: usize,
    pub embed_dim: usize,
    pub heads: usize,
    pub blocks: usize,
    pub mlp_ratio: usize,
    /// Adapters occupy the first `adapter_count` block positions.
    pub adapter_count: usize,
    pub adapter_variant: AdapterVariant,
    pub adapter: DDAdapterConfig,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            image_size: 64,
            patch_size: 8,
            embed_dim: 32,
            heads: 4,
            blocks: 8,
            mlp_ratio: 4,
            adapter_count: 6,
            adapter_variant: AdapterVariant::Dd,
            adapter: DDAdapterConfig::for_channels(32),
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let err = |msg: String| Error::Config {
            op: "encoder_config",
            msg,
        };
        if self.image_size == 0 || self.patch_size == 0 || !self.image_size.is_multiple_of(self.patch_size) {
            return Err(err(alloc::format!(
                "image size {} must be a positive multiple of patch size {}",
                self.image_size,
                self.patch_size
            )));
        }
        if self.heads == 0 || !self.embed_dim.is_multiple_of(self.heads) {
            return Err(err(alloc::format!(
                "embed dim {} must be divisible by heads {}",
                self.embed_dim,
                self.heads
            )));
        }
        if self.blocks == 0 {
            return Err(err("need at least one transformer block".into()));
        }
        if self.adapter_count > self.blocks {
            return Err(err(alloc::format!(
                "adapter count {} exceeds {} blocks",
                self.adapter_count,
                self.blocks
            )));
        }
        if self.mlp_ratio == 0 {
            return Err(err("mlp ratio must be positive".into()));
        }
        if self.adapter.channels != self.embed_dim {
            return Err(err(alloc::format!(
                "adapter channels {} must equal embed dim {}",
                self.adapter.channels,
                self.embed_dim
            )));
        }
        self.adapter.validate()?;
        if self.adapter_count > 0
            && self.adapter_variant == AdapterVariant::Dd
            && self.adapter.rates.is_empty()
        {
            return Err(err("depthwise-dilated adapter needs at least one rate".into()));
        }
        Ok(())
    }

    /// Token grid side: image_size / patch_size.
    pub fn grid(&self) -> usize {
        self.image_size / self.patch_size
    }

    pub fn tokens(&self) -> usize {
        self.grid() * self.grid()
    }
}

/// Which parameters the optimizer may touch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreezePolicy {
    /// Adapters and mask decoder only; everything else frozen.
    Paper,
    /// Everything trainable.
    All,
    /// Nothing trainable.
    None,
}

impl FreezePolicy {
    pub fn parse(name: &str) -> Result<Self, Error> {
        match name {
            "paper" => Ok(FreezePolicy::Paper),
            "all" => Ok(FreezePolicy::All),
            "none" => Ok(FreezePolicy::None),
            other => Err(Error::Policy(other.into())),
        }
    }
}

/// Whether a parameter name is inside an adapter block.
pub fn is_adapter_param(name: &str) -> bool {
    name.starts_with("enc.adapter")
}

/// Whether a parameter name is inside the mask decoder.
pub fn is_decoder_param(name: &str) -> bool {
    name.starts_with("dec.")
}

/// Named parameter tensors plus per-parameter trainable flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    params: BTreeMap<String, Tensor>,
    trainable: BTreeMap<String, bool>,
}

impl ModelState {
    /// Initialize all parameters for the given config. Weights are
    /// uniform in +/- 1/sqrt(fan_in) from per-name streams (so shared
    /// names get identical values regardless of which other parameters
    /// exist), biases zero, norm gains one, and adapter up projections
    /// zero. The trainable set starts under [`FreezePolicy::Paper`].
    pub fn init(cfg: &EncoderConfig, seed: u64) -> Result<ModelState, Error> {
        cfg.validate()?;
        let d = cfg.embed_dim;
        let hidden = d * cfg.mlp_ratio;
        let mut params: BTreeMap<String, Tensor> = BTreeMap::new();

        let weight = |params: &mut BTreeMap<String, Tensor>,
                      name: String,
                      dims: [usize; 4],
                      fan_in: usize,
                      damp: f64| {
            let mut rng = Rng::new(seed ^ fnv1a(name.as_bytes()));
            let scale = damp / crate::fmath::sqrt(fan_in as f64);
            params.insert(name, Tensor::random_uniform(dims, scale, &mut rng));
        };
        let zeros = |params: &mut BTreeMap<String, Tensor>, name: String, dims: [usize; 4]| {
            params.insert(name, Tensor::zeros(dims));
        };
        let ones = |params: &mut BTreeMap<String, Tensor>, name: String, dims: [usize; 4]| {
            params.insert(name, Tensor::full(dims, 1.0));
        };
        let norm = |params: &mut BTreeMap<String, Tensor>, prefix: &str| {
            ones(params, alloc::format!("{prefix}.g"), [1, d, 1, 1]);
            zeros(params, alloc::format!("{prefix}.b"), [1, d, 1, 1]);
        };
        let attn_set = |params: &mut BTreeMap<String, Tensor>, prefix: &str| {
            for proj in ["q", "k", "v", "o"] {
                weight(
                    params,
                    alloc::format!("{prefix}.{proj}.w"),
                    [d, d, 1, 1],
                    d,
                    1.0,
                );
                zeros(params, alloc::format!("{prefix}.{proj}.b"), [d, 1, 1, 1]);
            }
        };
        let mlp_set = |params: &mut BTreeMap<String, Tensor>, prefix: &str| {
            weight(
                params,
                alloc::format!("{prefix}.fc1.w"),
                [hidden, d, 1, 1],
                d,
                1.0,
            );
            zeros(params, alloc::format!("{prefix}.fc1.b"), [hidden, 1, 1, 1]);
            weight(
                params,
                alloc::format!("{prefix}.fc2.w"),
                [d, hidden, 1, 1],
                hidden,
                1.0,
            );
            zeros(params, alloc::format!("{prefix}.fc2.b"), [d, 1, 1, 1]);
        };

        // image encoder
        let pp = cfg.patch_size * cfg.patch_size;
        weight(&mut params, "enc.patch.w".into(), [d, pp, 1, 1], pp, 1.0);
        zeros(&mut params, "enc.patch.b".into(), [d, 1, 1, 1]);
        // positional embedding: sinusoidal code of each token center,
        // so box-prompt and image positions agree at initialization
        let g = cfg.grid();
        let mut pos = Vec::with_capacity(cfg.tokens() * d);
        for ty in 0..g {
            for tx in 0..g {
                let x01 = (tx as f64 + 0.5) / g as f64;
                let y01 = (ty as f64 + 0.5) / g as f64;
                pos.extend_from_slice(&forward::sincos_xy(x01, y01, d));
            }
        }
        params.insert("enc.pos".into(), Tensor::matrix(cfg.tokens(), d, pos)?);
        for b in 0..cfg.blocks {
            let p = alloc::format!("enc.blk{b:02}");
            norm(&mut params, &alloc::format!("{p}.ln1"));
            attn_set(&mut params, &alloc::format!("{p}.attn"));
            norm(&mut params, &alloc::format!("{p}.ln2"));
            mlp_set(&mut params, &alloc::format!("{p}.mlp"));
        }
        norm(&mut params, "enc.norm");
        if cfg.adapter_variant != AdapterVariant::None {
            for a in 0..cfg.adapter_count {
                let prefix = alloc::format!("enc.adapter{a:02}");
                let acfg = match cfg.adapter_variant {
                    AdapterVariant::StandardMlp => DDAdapterConfig {
                        rates: Vec::new(),
                        ..cfg.adapter.clone()
                    },
                    _ => cfg.adapter.clone(),
                };
                let ap = AdapterParams::init(&acfg, seed ^ fnv1a(prefix.as_bytes()));
                params.insert(alloc::format!("{prefix}.down.w"), ap.down_w);
                params.insert(alloc::format!("{prefix}.down.b"), ap.down_b);
                for (i, (w, bi)) in ap.branches.into_iter().enumerate() {
                    params.insert(alloc::format!("{prefix}.branch{i}.w"), w);
                    params.insert(alloc::format!("{prefix}.branch{i}.b"), bi);
                }
                params.insert(alloc::format!("{prefix}.up.w"), ap.up_w);
                params.insert(alloc::format!("{prefix}.up.b"), ap.up_b);
            }
        }

        // prompt encoder: learned corner-type embeddings
        weight(&mut params, "prompt.corner".into(), [2, d, 1, 1], d, 1.0);

        // memory encoder + memory attention. The mask projection and
        // the attention out-projection are damped: seed logits are
        // +/- 10 and the result lands on a residual stream of unit
        // scale features.
        weight(&mut params, "mem.mask.w".into(), [d, 1, 1, 1], 1, 0.1);
        zeros(&mut params, "mem.mask.b".into(), [d, 1, 1, 1]);
        weight(&mut params, "mem.fuse.w".into(), [d, 1, 3, 3], 9, 1.0);
        zeros(&mut params, "mem.fuse.b".into(), [d, 1, 1, 1]);
        weight(&mut params, "mem.in.w".into(), [d, d, 1, 1], d, 1.0);
        zeros(&mut params, "mem.in.b".into(), [d, 1, 1, 1]);
        weight(&mut params, "mem.out.w".into(), [d, d, 1, 1], d, 0.25);
        zeros(&mut params, "mem.out.b".into(), [d, 1, 1, 1]);

        // mask decoder
        weight(&mut params, "dec.token".into(), [1, d, 1, 1], d, 1.0);
        for b in 0..DECODER_BLOCKS {
            let p = alloc::format!("dec.blk{b}");
            attn_set(&mut params, &alloc::format!("{p}.self"));
            attn_set(&mut params, &alloc::format!("{p}.t2i"));
            attn_set(&mut params, &alloc::format!("{p}.i2t"));
            mlp_set(&mut params, &alloc::format!("{p}.mlp"));
            for ln in ["lnt1", "lnt2", "lnt3", "lnt4", "lni1", "lni2"] {
                norm(&mut params, &alloc::format!("{p}.{ln}"));
            }
        }
        norm(&mut params, "dec.norm");

        let mut state = ModelState {
            params,
            trainable: BTreeMap::new(),
        };
        set_trainable(&mut state, FreezePolicy::Paper);
        Ok(state)
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.params.get(name)
    }

    pub fn set(&mut self, name: &str, t: Tensor) {
        debug_assert!(self.params.contains_key(name), "unknown parameter {name}");
        self.params.insert(name.into(), t);
    }

    /// Insert a parameter (used when reconstructing from a checkpoint).
    pub fn insert_raw(&mut self, name: String, t: Tensor) {
        self.trainable.insert(name.clone(), false);
        self.params.insert(name, t);
    }

    /// Build an empty state (checkpoint loading).
    pub fn blank() -> ModelState {
        ModelState {
            params: BTreeMap::new(),
            trainable: BTreeMap::new(),
        }
    }

    /// Names in sorted order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.params.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn is_trainable(&self, name: &str) -> bool {
        self.trainable.get(name).copied().unwrap_or(false)
    }

    /// Total scalar parameter count.
    pub fn total_elements(&self) -> usize {
        self.params.values().map(Tensor::len).sum()
    }

    /// Scalar count of the trainable subset.
    pub fn trainable_elements(&self) -> usize {
        self.params
            .iter()
            .filter(|(n, _)| self.is_trainable(n))
            .map(|(_, t)| t.len())
            .sum()
    }

    /// Scalar count of adapter parameters.
    pub fn adapter_elements(&self) -> usize {
        self.params
            .iter()
            .filter(|(n, _)| is_adapter_param(n))
            .map(|(_, t)| t.len())
            .sum()
    }

    /// Record every parameter on a tape; trainable ones as vars.
    pub fn stage(&self, tape: &mut Tape) -> Staged {
        let mut ids = BTreeMap::new();
        for (name, tensor) in &self.params {
            let id = if self.is_trainable(name) {
                tape.var(tensor.clone())
            } else {
                tape.leaf(tensor.clone())
            };
            ids.insert(name.clone(), id);
        }
        Staged { ids }
    }

    /// FNV-style checksum over names and value bits; used to verify
    /// that frozen parameters never move.
    pub fn checksum_of(&self, filter: impl Fn(&str) -> bool) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |b: u64| {
            h ^= b;
            h = h.wrapping_mul(0x100_0000_01b3);
        };
        for (name, tensor) in &self.params {
            if !filter(name) {
                continue;
            }
            mix(fnv1a(name.as_bytes()));
            for v in tensor.data() {
                mix(v.to_bits());
            }
        }
        h
    }
}

/// Apply a freezing policy to the state's trainable flags.
pub fn set_trainable(state: &mut ModelState, policy: FreezePolicy) {
    let names: Vec<String> = state.params.keys().cloned().collect();
    for name in names {
        let on = match policy {
            FreezePolicy::All => true,
            FreezePolicy::None => false,
            FreezePolicy::Paper => is_adapter_param(&name) || is_decoder_param(&name),
        };
        state.trainable.insert(name, on);
    }
}

/// Tape handles for staged parameters.
pub struct Staged {
    ids: BTreeMap<String, TensorId>,
}

impl Staged {
    /// Handle for a parameter; missing names are an internal bug.
    pub fn id(&self, name: &str) -> TensorId {
        *self
            .ids
            .get(name)
            .unwrap_or_else(|| panic!("parameter not staged: {name}"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, TensorId)> {
        self.ids.iter().map(|(k, v)| (k.as_str(), *v))
    }
}
