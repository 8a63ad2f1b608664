//! `gen`: write a synthetic dataset to disk.

use std::path::PathBuf;

use clap::Args;
use ddsam2_core::synth::{dataset_selftest, gen_dataset, GenConfig, Split};

use crate::dataset::write_dataset;
use crate::error::{CliError, Result};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub videos: usize,
    #[arg(long, default_value_t = 16)]
    pub frames: usize,
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Max center displacement per frame, pixels.
    #[arg(long, default_value_t = 1.5)]
    pub motion: f64,
    #[arg(long, default_value_t = 6.0)]
    pub radius_min: f64,
    #[arg(long, default_value_t = 14.0)]
    pub radius_max: f64,
    /// Fractional radius jitter.
    #[arg(long, default_value_t = 0.15)]
    pub deform: f64,
    /// Gaussian pixel noise (fraction of the intensity range).
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    /// Train,val,test fractions.
    #[arg(long, default_value = "0.7,0.1,0.2", value_parser = parse_fractions)]
    pub split: SplitFractions,
}

#[derive(Clone, Debug)]
pub struct SplitFractions(pub [f64; 3]);

fn parse_fractions(s: &str) -> std::result::Result<SplitFractions, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("bad split fractions '{s}'"))?;
    if parts.len() != 3 {
        return Err(format!("need exactly 3 fractions, got {}", parts.len()));
    }
    Ok(SplitFractions([parts[0], parts[1], parts[2]]))
}

pub fn cmd_gen(args: &GenArgs) -> Result<()> {
    let cfg = GenConfig {
        num_videos: args.videos,
        frames_per_video: args.frames,
        size: args.size,
        seed: args.seed,
        motion_amplitude: args.motion,
        radius_min: args.radius_min,
        radius_max: args.radius_max,
        deform_amplitude: args.deform,
        noise_sigma: args.noise,
        split_fractions: args.split.0,
    };
    let samples = gen_dataset(&cfg).map_err(CliError::from)?;
    let selftest = dataset_selftest(&samples)?;
    eprintln!(
        "selftest: copy-tracker dice {:.4}, rigid-oracle dice {:.4}",
        selftest.copy_dice, selftest.rigid_oracle_dice
    );
    write_dataset(&samples, &cfg, &args.out)?;
    let count = |s: Split| samples.iter().filter(|v| v.split == s).count();
    println!(
        "{} videos, {}/{}/{} split",
        samples.len(),
        count(Split::Train),
        count(Split::Val),
        count(Split::Test)
    );
    Ok(())
}
