//! `baseline`: registration-style trackers over a split, same report
//! schema as `eval`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ddsam2_core::metrics::evaluate_video;
use ddsam2_core::rigid::{copy_track, rigid_track, RigidConfig};

use super::{filter_split, require_dataset, SplitArg};
use crate::dataset::read_dataset;
use crate::error::Result;
use crate::pool;
use crate::report::{write_report, ReportRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Exhaustive integer-translation NCC search.
    Rigid,
    /// Repeat the first mask on every frame.
    Copy,
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    /// Dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Report CSV output path.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    pub split: SplitArg,
    /// Surface tolerance for NSD, pixels.
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    /// Translation search radius, pixels.
    #[arg(long, default_value_t = 8)]
    pub radius: isize,
}

pub fn cmd_baseline(args: &BaselineArgs) -> Result<()> {
    require_dataset(&args.data)?;
    let (samples, _) = read_dataset(&args.data)?;
    let videos = filter_split(&samples, args.split.to_split())?;
    let method = match args.method {
        MethodArg::Rigid => "rigid",
        MethodArg::Copy => "copy",
    };
    let rigid_cfg = RigidConfig {
        search_radius: args.radius,
        ..RigidConfig::default()
    };
    let threads = pool::thread_limit(videos.len());
    let results = pool::run_indexed(videos.len(), threads, |i| -> Result<ReportRow> {
        let v = videos[i];
        let preds = match args.method {
            MethodArg::Rigid => rigid_track(&v.frames, &v.masks[0], &rigid_cfg)?,
            MethodArg::Copy => copy_track(v.frames.len(), &v.masks[0])?,
        };
        let metrics = evaluate_video(&preds, &v.masks, args.tau)?;
        Ok(ReportRow::from_metrics(
            method,
            &format!("video:{}", v.id),
            &metrics,
            0,
            0,
        ))
    });
    let mut rows = Vec::with_capacity(results.len() + 1);
    for r in results {
        rows.push(r?);
    }
    let agg = ReportRow::aggregate(method, "aggregate", &rows);
    rows.push(agg);
    write_report(&args.report, &rows)?;
    let agg = rows.last().expect("aggregate row");
    eprintln!(
        "{method}: {} videos, dice {:.4} +/- {:.4}",
        rows.len() - 1,
        agg.dice_mean,
        agg.dice_std
    );
    Ok(())
}
