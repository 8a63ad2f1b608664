//! Semi-supervised tracking: only the first frame's mask is given.

use alloc::vec::Vec;

use crate::error::Error;
use crate::metrics::BinaryMask;
use crate::tape::{Tape, TensorId};
use crate::tensor::Tensor;

use super::bank::{BoxPrompt, MemoryBank};
use super::forward::{decode_mask, encode_box, encode_frame, memory_attention, memory_encode};
use super::{EncoderConfig, ModelState, Staged};

/// Seed logit magnitude when the ground-truth first mask initializes
/// the memory: +SEED_LOGIT inside the mask, -SEED_LOGIT outside.
pub const SEED_LOGIT: f64 = 10.0;

/// Record the whole tracking pass on `tape` and return the predicted
/// logits for frames 1..T-1 plus the final memory bank.
///
/// Protocol: the prompt is the tight bounding box of the first-frame
/// mask, encoded once and reused at every decode. Frame 0 is never
/// decoded; its ground-truth mask (as +/- seed logits) initializes the
/// memory. Every later frame is encoded, conditioned on the bank,
/// decoded, and its predicted logits are fused into a new bank entry.
pub fn track_logits(
    tape: &mut Tape,
    p: &Staged,
    frames: &[Tensor],
    first_mask: &BinaryMask,
    cfg: &EncoderConfig,
    bank_capacity: usize,
) -> Result<(Vec<TensorId>, MemoryBank<TensorId>), Error> {
    if frames.is_empty() {
        return Err(Error::Empty("frames"));
    }
    if first_mask.is_blank() {
        return Err(Error::Prompt("first-frame mask is empty".into()));
    }
    let (x0, y0, x1, y1) = first_mask.bbox().expect("nonempty mask");
    let bx = BoxPrompt::new(x0, y0, x1, y1, first_mask.width(), first_mask.height())?;
    let prompt = encode_box(tape, &bx, p, cfg)?;

    let mut bank = MemoryBank::new(bank_capacity);
    let img0 = tape.leaf(frames[0].clone());
    let feat0 = encode_frame(tape, img0, p, cfg)?;
    let seed = tape.leaf(first_mask.to_logits(SEED_LOGIT, -SEED_LOGIT));
    let entry0 = memory_encode(tape, feat0, seed, p)?;
    bank.push(entry0, 0);

    let mut logits = Vec::with_capacity(frames.len().saturating_sub(1));
    for (t, frame) in frames.iter().enumerate().skip(1) {
        let img = tape.leaf(frame.clone());
        let feat = encode_frame(tape, img, p, cfg)?;
        let cond = memory_attention(tape, feat, &bank, p)?;
        let frame_logits = decode_mask(tape, cond, prompt, p, cfg)?;
        let entry = memory_encode(tape, feat, frame_logits, p)?;
        bank.push(entry, t);
        logits.push(frame_logits);
    }
    Ok((logits, bank))
}

/// Track a video and return one mask per frame; frame 0's returned
/// mask is the given first mask, later frames threshold the predicted
/// logits at 0.
pub fn track_video(
    frames: &[Tensor],
    first_mask: &BinaryMask,
    state: &ModelState,
    cfg: &EncoderConfig,
    bank_capacity: usize,
) -> Result<Vec<BinaryMask>, Error> {
    let mut tape = Tape::new();
    let p = state.stage(&mut tape);
    let (logit_ids, _) = track_logits(&mut tape, &p, frames, first_mask, cfg, bank_capacity)?;
    let mut masks = Vec::with_capacity(frames.len());
    masks.push(first_mask.clone());
    for id in logit_ids {
        masks.push(BinaryMask::from_logits(tape.value(id)));
    }
    Ok(masks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapter::{AdapterVariant, DDAdapterConfig};
    use crate::rng::Rng;

    fn small_cfg() -> EncoderConfig {
        EncoderConfig {
            image_size: 16,
            patch_size: 8,
            embed_dim: 8,
            heads: 2,
            blocks: 2,
            mlp_ratio: 2,
            adapter_count: 1,
            adapter_variant: AdapterVariant::Dd,
            adapter: DDAdapterConfig::new(8, 4, 3, &[1, 3]),
        }
    }

    fn rand_frames(n: usize, size: usize, seed: u64) -> Vec<Tensor> {
        let mut rng = Rng::new(seed);
        (0..n)
            .map(|_| Tensor::from_fn([1, 1, size, size], |_| rng.uniform_in(0.0, 1.0)))
            .collect()
    }

    fn center_mask(size: usize) -> BinaryMask {
        BinaryMask::from_fn(size, size, |x, y| {
            (3..size - 3).contains(&x) && (4..size - 4).contains(&y)
        })
    }

    #[test]
    fn single_frame_returns_first_mask() {
        let cfg = small_cfg();
        let state = ModelState::init(&cfg, 0).unwrap();
        let frames = rand_frames(1, 16, 1);
        let mask = center_mask(16);
        let out = track_video(&frames, &mask, &state, &cfg, 4).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], mask);
    }

    #[test]
    fn empty_first_mask_is_prompt_error() {
        let cfg = small_cfg();
        let state = ModelState::init(&cfg, 0).unwrap();
        let frames = rand_frames(2, 16, 2);
        let empty = BinaryMask::empty(16, 16);
        assert!(matches!(
            track_video(&frames, &empty, &state, &cfg, 4),
            Err(Error::Prompt(_))
        ));
    }

    #[test]
    fn no_frames_is_an_error() {
        let cfg = small_cfg();
        let state = ModelState::init(&cfg, 0).unwrap();
        assert!(matches!(
            track_video(&[], &center_mask(16), &state, &cfg, 4),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn bank_size_is_min_of_frames_and_capacity() {
        let cfg = small_cfg();
        let state = ModelState::init(&cfg, 5).unwrap();
        let mask = center_mask(16);
        for (t, k) in [(1usize, 4usize), (3, 4), (6, 4), (5, 2), (4, 0)] {
            let frames = rand_frames(t, 16, 7);
            let mut tape = Tape::new();
            let p = state.stage(&mut tape);
            let (logits, bank) =
                track_logits(&mut tape, &p, &frames, &mask, &cfg, k).unwrap();
            assert_eq!(logits.len(), t - 1);
            assert_eq!(bank.len(), t.min(k), "t={t} k={k}");
        }
    }

    #[test]
    fn tracking_is_deterministic() {
        let cfg = small_cfg();
        let state = ModelState::init(&cfg, 9).unwrap();
        let frames = rand_frames(4, 16, 11);
        let mask = center_mask(16);
        let a = track_video(&frames, &mask, &state, &cfg, 2).unwrap();
        let b = track_video(&frames, &mask, &state, &cfg, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn masks_count_matches_frames() {
        let cfg = small_cfg();
        let state = ModelState::init(&cfg, 13).unwrap();
        let frames = rand_frames(5, 16, 15);
        let out = track_video(&frames, &center_mask(16), &state, &cfg, 4).unwrap();
        assert_eq!(out.len(), 5);
        for m in &out {
            assert_eq!((m.width(), m.height()), (16, 16));
        }
    }
}
