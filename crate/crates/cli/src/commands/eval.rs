//! `eval`: track a split with a checkpoint and write the metrics CSV.

use std::path::PathBuf;

use clap::Args;

use super::{eval_rows, filter_split, require_dataset, variant_label, SplitArg};
use crate::checkpoint::load_checkpoint;
use crate::dataset::read_dataset;
use crate::error::{CliError, Result};
use crate::report::write_report;

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    /// Checkpoint path.
    #[arg(long)]
    pub ckpt: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    pub split: SplitArg,
    /// Surface tolerance for NSD, pixels.
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    /// Report CSV output path.
    #[arg(long)]
    pub report: PathBuf,
    /// Memory bank capacity.
    #[arg(long, default_value_t = 4)]
    pub bank: usize,
    /// Debug: score the ground truth against itself instead of
    /// tracking (exercises the full report pipeline).
    #[arg(long, default_value_t = false)]
    pub oracle_masks: bool,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    require_dataset(&args.data)?;
    let (samples, manifest) = read_dataset(&args.data)?;
    let (cfg, state) = load_checkpoint(&args.ckpt)?;
    if cfg.image_size != manifest.config.size {
        return Err(CliError::Input(format!(
            "checkpoint image_size {} does not match dataset size {}",
            cfg.image_size, manifest.config.size
        )));
    }
    let videos = filter_split(&samples, args.split.to_split())?;
    let rows = eval_rows(
        &videos,
        &state,
        &cfg,
        args.bank,
        args.tau,
        variant_label(cfg.adapter_variant),
        args.oracle_masks,
    )?;
    write_report(&args.report, &rows)?;
    let agg = rows.last().expect("aggregate row present");
    eprintln!(
        "{} videos evaluated; dice {:.4} +/- {:.4}",
        rows.len() - 1,
        agg.dice_mean,
        agg.dice_std
    );
    Ok(())
}
