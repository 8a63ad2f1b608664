//! Multiply-accumulate accounting for one tracked frame.
//!
//! Counts the linear, attention, and convolution MACs of
//! encode -> memory attention -> decode -> memory encode; biases,
//! activations, normalizations, and interpolation are excluded (the
//! usual MAC convention, matching the adapter's own flop count).

use alloc::vec::Vec;

use crate::adapter::{self, AdapterVariant, DDAdapterConfig};

use super::{EncoderConfig, DECODER_BLOCKS};

/// MACs of one tracked frame with `bank_entries` memory entries in
/// the bank.
pub fn frame_macs(cfg: &EncoderConfig, bank_entries: usize) -> u64 {
    let d = cfg.embed_dim as u64;
    let t = cfg.tokens() as u64;
    let g = cfg.grid() as u64;
    let hidden = d * cfg.mlp_ratio as u64;
    let mut macs = 0u64;

    // patch embedding
    macs += t * d * (cfg.patch_size * cfg.patch_size) as u64;
    // transformer blocks: q/k/v/o, attention matmuls, mlp
    macs += cfg.blocks as u64 * (4 * t * d * d + 2 * t * t * d + 2 * t * d * hidden);
    // adapters
    if cfg.adapter_variant != AdapterVariant::None {
        let acfg = match cfg.adapter_variant {
            AdapterVariant::StandardMlp => DDAdapterConfig {
                rates: Vec::new(),
                ..cfg.adapter.clone()
            },
            _ => cfg.adapter.clone(),
        };
        macs += cfg.adapter_count as u64 * adapter::flop_count(&acfg, cfg.grid(), cfg.grid());
    }
    // memory attention (skipped entirely on an empty bank)
    if bank_entries > 0 {
        let bt = bank_entries as u64 * t;
        macs += t * d * d + bt * d * d; // shared input projection
        macs += 2 * t * bt * d; // scores + weighted values
        macs += t * d * d; // output projection
    }
    // memory encoder: pointwise lift + depthwise 3x3 fuse
    macs += g * g * d + g * g * d * 9;
    // two-way decoder over (2 prompt + 1 mask) tokens
    let pt = 3u64;
    for _ in 0..DECODER_BLOCKS {
        macs += 4 * pt * d * d + 2 * pt * pt * d; // token self-attention
        macs += 2 * pt * d * d + 2 * t * d * d + 2 * pt * t * d; // tokens -> image
        macs += 2 * pt * d * hidden; // token mlp
        macs += 2 * t * d * d + 2 * pt * d * d + 2 * t * pt * d; // image -> tokens
    }
    // final mask-token inner product per image token
    macs += t * d;
    macs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adapters_add_exactly_their_flop_count() {
        let dd = EncoderConfig::default();
        let none = EncoderConfig {
            adapter_count: 0,
            adapter_variant: AdapterVariant::None,
            ..EncoderConfig::default()
        };
        let per = adapter::flop_count(&dd.adapter, dd.grid(), dd.grid());
        for bank in [0usize, 2, 4] {
            let delta = frame_macs(&dd, bank) - frame_macs(&none, bank);
            assert_eq!(delta, dd.adapter_count as u64 * per);
            assert!(frame_macs(&dd, bank) > frame_macs(&none, bank));
        }
    }

    #[test]
    fn more_bank_entries_cost_more() {
        let cfg = EncoderConfig::default();
        assert!(frame_macs(&cfg, 1) > frame_macs(&cfg, 0));
        assert!(frame_macs(&cfg, 4) > frame_macs(&cfg, 1));
    }
}
