//! `ablate`: sweep adapter count or dilation-rate sets, one trained
//! and evaluated cell per row, same seed and epochs everywhere.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ddsam2_core::adapter::AdapterVariant;
use ddsam2_core::model::ModelState;
use ddsam2_core::synth::Split;
use ddsam2_core::train::train_run;

use super::{eval_rows, filter_split, require_dataset, ModelGeom, TrainHyper};
use crate::dataset::read_dataset;
use crate::error::Result;
use crate::pool;
use crate::report::{write_report, ReportRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    /// Adapter count 1..=blocks.
    Adapters,
    /// Dilation-rate sets (1,2), (1,3), (1,4), (1,2,3), (1,2,3,4).
    Dilations,
}

#[derive(Args, Debug)]
pub struct AblateArgs {
    /// Dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub sweep: SweepArg,
    /// Report CSV output path.
    #[arg(long)]
    pub report: PathBuf,
    /// Surface tolerance for NSD, pixels.
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    /// Adapter count used by the dilations sweep.
    #[arg(long, default_value_t = 6)]
    pub adapters: usize,
    #[command(flatten)]
    pub hyper: TrainHyper,
    #[command(flatten)]
    pub geom: ModelGeom,
}

/// The dilation-rate sets of the sweep.
pub const DILATION_SETS: [&[usize]; 5] = [&[1, 2], &[1, 3], &[1, 4], &[1, 2, 3], &[1, 2, 3, 4]];

struct Cell {
    label: String,
    adapters: usize,
    rates: Vec<usize>,
}

pub fn cmd_ablate(args: &AblateArgs) -> Result<()> {
    require_dataset(&args.data)?;
    let (samples, manifest) = read_dataset(&args.data)?;
    let cells: Vec<Cell> = match args.sweep {
        SweepArg::Adapters => (1..=args.geom.blocks)
            .map(|m| Cell {
                label: format!("m={m}"),
                adapters: m,
                rates: vec![1, 3],
            })
            .collect(),
        SweepArg::Dilations => DILATION_SETS
            .iter()
            .map(|rates| {
                let joined: Vec<String> = rates.iter().map(|r| r.to_string()).collect();
                Cell {
                    label: format!("rates={}", joined.join("+")),
                    adapters: args.adapters,
                    rates: rates.to_vec(),
                }
            })
            .collect(),
    };

    let tcfg = args.hyper.to_train_config();
    let threads = pool::thread_limit(cells.len());
    let results = pool::run_indexed(cells.len(), threads, |i| -> Result<ReportRow> {
        let cell = &cells[i];
        let cfg = args.geom.to_config(
            manifest.config.size,
            AdapterVariant::Dd,
            cell.adapters,
            &cell.rates,
        );
        let init = ModelState::init(&cfg, args.hyper.seed)?;
        let outcome = train_run(&samples, &cfg, init, &tcfg)?;
        let videos = filter_split(&samples, Split::Test)?;
        let rows = eval_rows(
            &videos,
            &outcome.best,
            &cfg,
            tcfg.bank_capacity,
            args.tau,
            "dd",
            false,
        )?;
        let agg = rows.last().expect("aggregate row present");
        let mut row = agg.clone();
        row.config = cell.label.clone();
        eprintln!("cell {}: dice {:.4}", cell.label, row.dice_mean);
        Ok(row)
    });
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    write_report(&args.report, &rows)?;
    Ok(())
}
