use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ddsam2::commands::{
    cmd_ablate, cmd_baseline, cmd_eval, cmd_gen, cmd_profile, cmd_train, AblateArgs, BaselineArgs,
    EvalArgs, GenArgs, ProfileArgs, TrainArgs,
};

/// Adapter-based tracking and segmentation at desk scale: synthetic
/// data, fine-tuning, evaluation, ablations, baselines, profiling.
#[derive(Parser)]
#[command(name = "ddsam2", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic video dataset.
    Gen(GenArgs),
    /// Fine-tune a model and write a checkpoint + log CSV.
    Train(TrainArgs),
    /// Track a split with a checkpoint and write the metrics CSV.
    Eval(EvalArgs),
    /// Train/evaluate a sweep of adapter counts or dilation sets.
    Ablate(AblateArgs),
    /// Parameter, MAC, and FPS profile of a checkpoint.
    Profile(ProfileArgs),
    /// Registration-style baselines over a split.
    Baseline(BaselineArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors, 0 on --help/--version
        Err(e) => e.exit(),
    };
    let result = match &cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Train(args) => cmd_train(args),
        Cmd::Eval(args) => cmd_eval(args),
        Cmd::Ablate(args) => cmd_ablate(args),
        Cmd::Profile(args) => cmd_profile(args),
        Cmd::Baseline(args) => cmd_baseline(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
