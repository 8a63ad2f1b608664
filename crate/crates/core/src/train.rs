//! Fine-tuning loop: combined Dice + cross-entropy loss over unrolled
//! tracking subsequences, AdamW on the trainable set, learning-rate
//! halving, and validation-best checkpoint selection.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::loss::combined_loss;
use crate::metrics;
use crate::model::{track_logits, track_video, EncoderConfig, ModelState};
use crate::ops;
use crate::optim::{adamw_step, clip_global_norm, AdamWConfig, GradMap, LrMap, OptimState};
use crate::rng::Rng;
use crate::synth::{Split, VideoSample};
use crate::tape::Tape;
use crate::tensor::Tensor;

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr_adapter: f64,
    pub lr_decoder: f64,
    /// Epoch (1-based) from which learning rates are halved; defaults
    /// to epochs / 2 when unset.
    pub lr_halve_epoch: Option<usize>,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub videos_per_step: usize,
    pub subseq_len: usize,
    pub steps_per_epoch: usize,
    pub bank_capacity: usize,
    pub grad_clip: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            lr_adapter: 1e-4,
            lr_decoder: 1e-5,
            lr_halve_epoch: None,
            weight_decay: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            videos_per_step: 2,
            subseq_len: 8,
            steps_per_epoch: 64,
            bank_capacity: 4,
            grad_clip: 1.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let err = |msg: String| Error::Config {
            op: "train_config",
            msg,
        };
        if self.subseq_len < 2 {
            return Err(err(alloc::format!(
                "subsequence length must be >= 2, got {}",
                self.subseq_len
            )));
        }
        if self.lr_adapter <= 0.0 || self.lr_decoder <= 0.0 {
            return Err(err("learning rates must be positive".into()));
        }
        if self.videos_per_step == 0 || self.steps_per_epoch == 0 {
            return Err(err("videos per step and steps per epoch must be positive".into()));
        }
        Ok(())
    }

    /// Effective halving epoch (1-based).
    pub fn halve_epoch(&self) -> usize {
        self.lr_halve_epoch.unwrap_or(self.epochs / 2)
    }

    /// Learning-rate factor for a 1-based epoch: exactly 1/2 from the
    /// halving epoch onward.
    pub fn lr_factor(&self, epoch: usize) -> f64 {
        let halve = self.halve_epoch();
        if halve > 0 && epoch >= halve {
            0.5
        } else {
            1.0
        }
    }

    fn lr_map(&self) -> LrMap {
        LrMap {
            adapter: self.lr_adapter,
            decoder: self.lr_decoder,
            backbone: self.lr_decoder,
        }
    }

    fn adamw(&self) -> AdamWConfig {
        AdamWConfig {
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            weight_decay: self.weight_decay,
        }
    }
}

/// One row of the training log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_dice: f64,
    /// Effective adapter learning rate during the epoch.
    pub lr: f64,
}

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Checkpoint with the best validation Dice (the initial state
    /// when trained zero epochs; the last state when no validation
    /// videos exist).
    pub best: ModelState,
    /// State after the final epoch.
    pub last: ModelState,
    pub log: Vec<EpochLog>,
    /// 1-based epoch of the selected checkpoint, when any epoch ran.
    pub best_epoch: Option<usize>,
}

/// Contiguous training window: start uniform in [0, T - L] when the
/// video is longer than L, otherwise the whole video.
pub fn sample_subsequence(video_len: usize, subseq_len: usize, rng: &mut Rng) -> core::ops::Range<usize> {
    if video_len <= subseq_len {
        return 0..video_len;
    }
    let start = rng.below(video_len - subseq_len + 1);
    start..start + subseq_len
}

/// Mean Dice over frames 1..T-1 of tracked vs ground-truth masks.
pub fn validation_dice(
    videos: &[&VideoSample],
    state: &ModelState,
    cfg: &EncoderConfig,
    bank_capacity: usize,
) -> Result<f64, Error> {
    let mut total = 0.0;
    let mut count = 0usize;
    for v in videos {
        let frames: Vec<Tensor> = v.frames.iter().map(|f| f.to_tensor()).collect();
        let preds = track_video(&frames, &v.masks[0], state, cfg, bank_capacity)?;
        let mut vid_sum = 0.0;
        for t in 1..preds.len() {
            vid_sum += metrics::dice(&preds[t], &v.masks[t])?;
        }
        if preds.len() > 1 {
            total += vid_sum / (preds.len() - 1) as f64;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Empty("validation videos"));
    }
    Ok(total / count as f64)
}

/// Accumulated gradients and loss of one video subsequence.
fn subsequence_grads(
    state: &ModelState,
    cfg: &EncoderConfig,
    video: &VideoSample,
    window: core::ops::Range<usize>,
    bank_capacity: usize,
    grads: &mut GradMap,
) -> Result<(f64, usize), Error> {
    let frames: Vec<Tensor> = video.frames[window.clone()]
        .iter()
        .map(|f| f.to_tensor())
        .collect();
    let gts = &video.masks[window];
    let mut tape = Tape::new();
    let staged = state.stage(&mut tape);
    let (logits, _) = track_logits(&mut tape, &staged, &frames, &gts[0], cfg, bank_capacity)?;
    let mut total = None;
    for (i, &logit_id) in logits.iter().enumerate() {
        let target = gts[i + 1].to_logits(1.0, 0.0);
        let l = combined_loss(&mut tape, logit_id, &target)?;
        total = Some(match total {
            Option::None => l,
            Some(acc) => ops::add(&mut tape, acc, l)?,
        });
    }
    let Some(root) = total else {
        return Ok((0.0, 0));
    };
    let loss = tape.value(root).data()[0];
    tape.backward(root)?;
    for (name, id) in staged.iter() {
        if !state.is_trainable(name) {
            continue;
        }
        let g = tape.grad(id);
        let buf = grads
            .entry(String::from(name))
            .or_insert_with(|| alloc::vec![0.0; state.get(name).expect("staged").len()]);
        if let Some(g) = g {
            for (b, v) in buf.iter_mut().zip(g) {
                *b += v;
            }
        }
    }
    Ok((loss, logits.len()))
}

/// [`train_run`] with a per-epoch callback (progress streaming).
pub fn train_run_observed(
    data: &[VideoSample],
    cfg: &EncoderConfig,
    init: ModelState,
    tcfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochLog),
) -> Result<TrainOutcome, Error> {
    tcfg.validate()?;
    cfg.validate()?;
    let train: Vec<&VideoSample> = data.iter().filter(|v| v.split == Split::Train).collect();
    let val: Vec<&VideoSample> = data.iter().filter(|v| v.split == Split::Val).collect();
    if train.is_empty() {
        return Err(Error::Empty("train split"));
    }
    for v in &train {
        if v.frames.len() < 2 {
            return Err(Error::Config {
                op: "train_run",
                msg: alloc::format!("training video {} has fewer than 2 frames", v.id),
            });
        }
    }

    let mut state = init;
    let mut opt = OptimState::new();
    let mut rng = Rng::for_stream(tcfg.seed, 0x7241);
    let mut log = Vec::with_capacity(tcfg.epochs);
    let mut best: Option<(f64, usize, ModelState)> = None;

    for epoch in 1..=tcfg.epochs {
        let lr = tcfg.lr_map().scaled(tcfg.lr_factor(epoch));
        let mut epoch_loss = 0.0;
        let mut epoch_frames = 0usize;
        for step in 0..tcfg.steps_per_epoch {
            let mut grads = GradMap::new();
            let mut step_loss = 0.0;
            let mut step_frames = 0usize;
            for _ in 0..tcfg.videos_per_step {
                let video = train[rng.below(train.len())];
                let window = sample_subsequence(video.frames.len(), tcfg.subseq_len, &mut rng);
                let (loss, frames) = subsequence_grads(
                    &state,
                    cfg,
                    video,
                    window,
                    tcfg.bank_capacity,
                    &mut grads,
                )?;
                step_loss += loss;
                step_frames += frames;
            }
            if !step_loss.is_finite() {
                return Err(Error::Numeric(alloc::format!(
                    "non-finite loss at epoch {epoch} step {step}"
                )));
            }
            if step_frames == 0 {
                continue;
            }
            clip_global_norm(&mut grads, tcfg.grad_clip);
            adamw_step(&mut state, &grads, &mut opt, &lr, &tcfg.adamw())?;
            epoch_loss += step_loss;
            epoch_frames += step_frames;
        }

        let val_dice = if val.is_empty() {
            f64::NAN
        } else {
            validation_dice(&val, &state, cfg, tcfg.bank_capacity)?
        };
        let entry = EpochLog {
            epoch,
            train_loss: epoch_loss / epoch_frames.max(1) as f64,
            val_dice,
            lr: lr.adapter,
        };
        on_epoch(&entry);
        log.push(entry);
        let improved = match &best {
            Option::None => true,
            Some((d, _, _)) => val_dice.is_nan() || val_dice > *d,
        };
        if improved {
            best = Some((val_dice, epoch, state.clone()));
        }
    }

    let (best_state, best_epoch) = match best {
        Some((_, e, s)) => (s, Some(e)),
        Option::None => (state.clone(), Option::None),
    };
    Ok(TrainOutcome {
        best: best_state,
        last: state,
        log,
        best_epoch,
    })
}

/// Run fine-tuning over the train split, evaluating on the val split
/// after every epoch. Zero epochs returns the initial state.
pub fn train_run(
    data: &[VideoSample],
    cfg: &EncoderConfig,
    init: ModelState,
    tcfg: &TrainConfig,
) -> Result<TrainOutcome, Error> {
    train_run_observed(data, cfg, init, tcfg, |_| {})
}
