//! `profile`: parameter counts, per-frame MACs, and measured FPS of a
//! checkpoint.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use ddsam2_core::adapter::{param_count, AdapterVariant};
use ddsam2_core::model::{frame_macs, track_video};
use ddsam2_core::synth::{gen_video, GenConfig};
use ddsam2_core::Tensor;

use crate::checkpoint::load_checkpoint;
use crate::error::{CliError, Result};

#[derive(Args, Debug)]
pub struct ProfileArgs {
    /// Checkpoint path.
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Length of the timing video.
    #[arg(long, default_value_t = 16)]
    pub frames: usize,
    /// Memory bank capacity during timing.
    #[arg(long, default_value_t = 4)]
    pub bank: usize,
    /// Seed of the generated timing video.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn cmd_profile(args: &ProfileArgs) -> Result<()> {
    let (cfg, state) = load_checkpoint(&args.ckpt)?;
    let total = state.total_elements() as u64;
    let trainable = state.trainable_elements() as u64;
    let enumerated = state.adapter_elements() as u64;
    let closed_form = match cfg.adapter_variant {
        AdapterVariant::None => 0,
        AdapterVariant::Dd => (cfg.adapter_count * param_count(&cfg.adapter)) as u64,
        AdapterVariant::StandardMlp => {
            let no_branches = ddsam2_core::adapter::DDAdapterConfig {
                rates: Vec::new(),
                ..cfg.adapter.clone()
            };
            (cfg.adapter_count * param_count(&no_branches)) as u64
        }
    };
    if enumerated != closed_form {
        return Err(CliError::Numeric(format!(
            "adapter parameter accounting disagrees: enumerated {enumerated}, closed form {closed_form}"
        )));
    }
    let macs = frame_macs(&cfg, args.bank);

    // timing video at the model's resolution
    let scale = cfg.image_size as f64 / 64.0;
    let gen = GenConfig {
        num_videos: 1,
        frames_per_video: args.frames,
        size: cfg.image_size,
        seed: args.seed,
        radius_min: (6.0 * scale).max(2.0),
        radius_max: (14.0 * scale).max(3.0),
        ..GenConfig::default()
    };
    let video = gen_video(&gen, args.seed)?;
    let frames: Vec<Tensor> = video.frames.iter().map(|f| f.to_tensor()).collect();
    let start = Instant::now();
    let masks = track_video(&frames, &video.masks[0], &state, &cfg, args.bank)?;
    let elapsed = start.elapsed().as_secs_f64();
    let fps = masks.len() as f64 / elapsed;

    println!("total_params: {total}");
    println!("trainable_params: {trainable}");
    println!("adapter_params_enumerated: {enumerated}");
    println!("adapter_params_closed_form: {closed_form}");
    println!("per_frame_macs: {macs}");
    println!("fps: {fps:.2}");
    Ok(())
}
