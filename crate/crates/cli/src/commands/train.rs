//! `train`: fine-tune on a dataset and write a checkpoint plus a
//! per-epoch log CSV.

use std::path::PathBuf;

use clap::Args;
use ddsam2_core::model::{set_trainable, FreezePolicy, ModelState};
use ddsam2_core::train::{train_run_observed, EpochLog};

use super::{parse_rates, require_dataset, ModelGeom, PolicyArg, TrainHyper, VariantArg};
use crate::checkpoint::save_checkpoint;
use crate::dataset::read_dataset;
use crate::error::{CliError, Result};

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    /// Checkpoint output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch log CSV (default: <out>.log.csv).
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = VariantArg::Dd)]
    pub variant: VariantArg,
    /// Number of adapters (they occupy the first blocks).
    #[arg(long, default_value_t = 6)]
    pub adapters: usize,
    /// Comma-separated dilation rates per adapter branch.
    #[arg(long, default_value = "1,3")]
    pub dilations: String,
    #[arg(long, value_enum, default_value_t = PolicyArg::Paper)]
    pub policy: PolicyArg,
    #[command(flatten)]
    pub hyper: TrainHyper,
    #[command(flatten)]
    pub geom: ModelGeom,
}

pub fn write_train_log(path: &std::path::Path, log: &[EpochLog]) -> Result<()> {
    let mut text = String::from("epoch,train_loss,val_dice,lr\n");
    for l in log {
        text.push_str(&format!(
            "{},{:.6},{:.6},{:.6e}\n",
            l.epoch, l.train_loss, l.val_dice, l.lr
        ));
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    require_dataset(&args.data)?;
    let (samples, manifest) = read_dataset(&args.data)?;
    let rates = parse_rates(&args.dilations)?;
    let adapters = match args.variant {
        VariantArg::None => 0,
        _ => args.adapters,
    };
    let cfg = args.geom.to_config(
        manifest.config.size,
        args.variant.to_variant(),
        adapters,
        &rates,
    );
    let mut state = ModelState::init(&cfg, args.hyper.seed)?;
    let policy = match args.policy {
        PolicyArg::Paper => FreezePolicy::Paper,
        PolicyArg::All => FreezePolicy::All,
        PolicyArg::None => FreezePolicy::None,
    };
    set_trainable(&mut state, policy);

    let tcfg = args.hyper.to_train_config();
    let outcome = train_run_observed(&samples, &cfg, state, &tcfg, |l| {
        eprintln!(
            "epoch {}: loss {:.4}, val dice {:.4}, lr {:.2e}",
            l.epoch, l.train_loss, l.val_dice, l.lr
        );
    })?;
    save_checkpoint(&args.out, &cfg, &outcome.best)?;
    let log_path = args
        .log
        .clone()
        .unwrap_or_else(|| args.out.with_extension("log.csv"));
    write_train_log(&log_path, &outcome.log)?;
    match outcome.best_epoch {
        Some(e) => eprintln!(
            "trained {} epochs; kept epoch {e} (val dice {:.4})",
            outcome.log.len(),
            outcome.log[e - 1].val_dice
        ),
        None => eprintln!("trained 0 epochs; checkpoint is the initialization"),
    }
    Ok(())
}
