//! Subcommand implementations and their argument structs.

mod ablate;
mod baseline;
mod eval;
mod gen;
mod profile;
mod train;

pub use ablate::{cmd_ablate, AblateArgs};
pub use baseline::{cmd_baseline, BaselineArgs};
pub use eval::{cmd_eval, EvalArgs};
pub use gen::{cmd_gen, GenArgs};
pub use profile::{cmd_profile, ProfileArgs};
pub use train::{cmd_train, TrainArgs};

use std::path::Path;

use clap::{Args, ValueEnum};
use ddsam2_core::adapter::{AdapterVariant, DDAdapterConfig};
use ddsam2_core::metrics::{evaluate_video, BinaryMask};
use ddsam2_core::model::{track_video, EncoderConfig, ModelState};
use ddsam2_core::synth::{Split, VideoSample};
use ddsam2_core::train::TrainConfig;
use ddsam2_core::Tensor;

use crate::error::{CliError, Result};
use crate::pool;
use crate::report::ReportRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Depthwise-dilated adapter.
    Dd,
    /// Plain bottleneck MLP adapter.
    Mlp,
    /// No adapters.
    None,
}

impl VariantArg {
    pub fn to_variant(self) -> AdapterVariant {
        match self {
            VariantArg::Dd => AdapterVariant::Dd,
            VariantArg::Mlp => AdapterVariant::StandardMlp,
            VariantArg::None => AdapterVariant::None,
        }
    }
}

/// Short method label for report rows.
pub fn variant_label(v: AdapterVariant) -> &'static str {
    match v {
        AdapterVariant::Dd => "dd",
        AdapterVariant::StandardMlp => "mlp",
        AdapterVariant::None => "none",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    Val,
    Test,
}

impl SplitArg {
    pub fn to_split(self) -> Split {
        match self {
            SplitArg::Train => Split::Train,
            SplitArg::Val => Split::Val,
            SplitArg::Test => Split::Test,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Adapters + mask decoder trainable (the fine-tuning default).
    Paper,
    All,
    None,
}

/// Training hyperparameters shared by `train` and `ablate`.
#[derive(Args, Clone, Debug)]
pub struct TrainHyper {
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub lr_adapter: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub lr_decoder: f64,
    /// 1-based epoch from which learning rates are halved
    /// (default: epochs / 2).
    #[arg(long)]
    pub halve_epoch: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub weight_decay: f64,
    #[arg(long, default_value_t = 2)]
    pub videos_per_step: usize,
    /// Training subsequence length in frames.
    #[arg(long, default_value_t = 8)]
    pub subseq: usize,
    #[arg(long, default_value_t = 64)]
    pub steps_per_epoch: usize,
    /// Memory bank capacity.
    #[arg(long, default_value_t = 4)]
    pub bank: usize,
}

impl TrainHyper {
    pub fn to_train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            lr_adapter: self.lr_adapter,
            lr_decoder: self.lr_decoder,
            lr_halve_epoch: self.halve_epoch,
            weight_decay: self.weight_decay,
            videos_per_step: self.videos_per_step,
            subseq_len: self.subseq,
            steps_per_epoch: self.steps_per_epoch,
            bank_capacity: self.bank,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}

/// Model geometry shared by `train` and `ablate`; the image size
/// always comes from the dataset.
#[derive(Args, Clone, Debug)]
pub struct ModelGeom {
    #[arg(long, default_value_t = 8)]
    pub patch: usize,
    #[arg(long, default_value_t = 32)]
    pub embed_dim: usize,
    #[arg(long, default_value_t = 4)]
    pub heads: usize,
    #[arg(long, default_value_t = 8)]
    pub blocks: usize,
    #[arg(long, default_value_t = 4)]
    pub mlp_ratio: usize,
    /// Adapter bottleneck reduction ratio.
    #[arg(long, default_value_t = 4)]
    pub reduction: usize,
    /// Adapter depthwise kernel size.
    #[arg(long, default_value_t = 3)]
    pub kernel: usize,
}

impl ModelGeom {
    pub fn to_config(
        &self,
        image_size: usize,
        variant: AdapterVariant,
        adapters: usize,
        rates: &[usize],
    ) -> EncoderConfig {
        EncoderConfig {
            image_size,
            patch_size: self.patch,
            embed_dim: self.embed_dim,
            heads: self.heads,
            blocks: self.blocks,
            mlp_ratio: self.mlp_ratio,
            adapter_count: adapters,
            adapter_variant: variant,
            adapter: DDAdapterConfig::new(self.embed_dim, self.reduction, self.kernel, rates),
        }
    }
}

/// Parse a comma-separated dilation list ("1,3").
pub fn parse_rates(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad dilation list '{s}'")))
        })
        .collect()
}

pub(crate) fn filter_split(samples: &[VideoSample], split: Split) -> Result<Vec<&VideoSample>> {
    let videos: Vec<&VideoSample> = samples.iter().filter(|v| v.split == split).collect();
    if videos.is_empty() {
        return Err(CliError::Input(format!(
            "no videos in split {}",
            split.as_str()
        )));
    }
    Ok(videos)
}

/// Track every video of a split and emit per-video rows plus the
/// aggregate row. With `oracle_masks`, predictions are replaced by the
/// ground truth (debug path for the report pipeline itself).
pub(crate) fn eval_rows(
    videos: &[&VideoSample],
    state: &ModelState,
    cfg: &EncoderConfig,
    bank: usize,
    tau: f64,
    method: &str,
    oracle_masks: bool,
) -> Result<Vec<ReportRow>> {
    let trainable = state.trainable_elements() as u64;
    let total = state.total_elements() as u64;
    let threads = pool::thread_limit(videos.len());
    let results = pool::run_indexed(videos.len(), threads, |i| -> Result<ReportRow> {
        let v = videos[i];
        let preds: Vec<BinaryMask> = if oracle_masks {
            v.masks.clone()
        } else {
            let frames: Vec<Tensor> = v.frames.iter().map(|f| f.to_tensor()).collect();
            track_video(&frames, &v.masks[0], state, cfg, bank)?
        };
        let metrics = evaluate_video(&preds, &v.masks, tau)?;
        Ok(ReportRow::from_metrics(
            method,
            &format!("video:{}", v.id),
            &metrics,
            trainable,
            total,
        ))
    });
    let mut rows = Vec::with_capacity(results.len() + 1);
    for r in results {
        rows.push(r?);
    }
    let agg = ReportRow::aggregate(method, "aggregate", &rows);
    rows.push(agg);
    Ok(rows)
}

pub(crate) fn require_dataset(dir: &Path) -> Result<()> {
    if !crate::dataset::manifest_path(dir).exists() {
        return Err(CliError::Input(format!(
            "{} is not a dataset directory (missing dataset.json)",
            dir.display()
        )));
    }
    Ok(())
}
