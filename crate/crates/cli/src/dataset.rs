//! On-disk dataset layout.
//!
//! ```text
//! <dir>/dataset.json                  manifest: version, generator
//!                                     config echo, video list
//! <dir>/<id>/frames/FFFF.pgm          binary P5, 8-bit
//! <dir>/<id>/masks/FFFF.pgm           values exactly 0 or 255
//! ```
//!
//! Frame indices are zero-padded to four digits.

use std::fs;
use std::path::{Path, PathBuf};

use ddsam2_core::synth::{GenConfig, Split, VideoSample};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::pgm;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenConfigEcho {
    pub num_videos: usize,
    pub frames_per_video: usize,
    pub size: usize,
    pub seed: u64,
    pub motion_amplitude: f64,
    pub radius_min: f64,
    pub radius_max: f64,
    pub deform_amplitude: f64,
    pub noise_sigma: f64,
    pub split_fractions: [f64; 3],
}

impl From<&GenConfig> for GenConfigEcho {
    fn from(c: &GenConfig) -> Self {
        GenConfigEcho {
            num_videos: c.num_videos,
            frames_per_video: c.frames_per_video,
            size: c.size,
            seed: c.seed,
            motion_amplitude: c.motion_amplitude,
            radius_min: c.radius_min,
            radius_max: c.radius_max,
            deform_amplitude: c.deform_amplitude,
            noise_sigma: c.noise_sigma,
            split_fractions: c.split_fractions,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestVideo {
    pub id: String,
    pub split: String,
    pub num_frames: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub config: GenConfigEcho,
    pub videos: Vec<ManifestVideo>,
}

pub fn write_dataset(samples: &[VideoSample], cfg: &GenConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        config: cfg.into(),
        videos: samples
            .iter()
            .map(|s| ManifestVideo {
                id: s.id.clone(),
                split: s.split.as_str().to_string(),
                num_frames: s.frames.len(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Input(format!("manifest encoding failed: {e}")))?;
    fs::write(dir.join("dataset.json"), json)
        .map_err(|e| CliError::Input(format!("cannot write manifest: {e}")))?;
    for s in samples {
        let frames_dir = dir.join(&s.id).join("frames");
        let masks_dir = dir.join(&s.id).join("masks");
        fs::create_dir_all(&frames_dir)?;
        fs::create_dir_all(&masks_dir)?;
        for (i, frame) in s.frames.iter().enumerate() {
            pgm::write_pgm(&frames_dir.join(format!("{i:04}.pgm")), frame)?;
        }
        for (i, mask) in s.masks.iter().enumerate() {
            pgm::write_mask(&masks_dir.join(format!("{i:04}.pgm")), mask)?;
        }
    }
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("dataset.json");
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: invalid manifest: {e}", path.display())))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(CliError::Input(format!(
            "{}: unsupported manifest version {} (expected {})",
            path.display(),
            manifest.version,
            MANIFEST_VERSION
        )));
    }
    Ok(manifest)
}

/// Load the full dataset. Ground-truth center trajectories are a
/// generation-time artifact and come back empty.
pub fn read_dataset(dir: &Path) -> Result<(Vec<VideoSample>, Manifest)> {
    let manifest = read_manifest(dir)?;
    let mut samples = Vec::with_capacity(manifest.videos.len());
    for v in &manifest.videos {
        let split = Split::parse(&v.split).map_err(|e| CliError::Input(e.to_string()))?;
        let frames_dir = dir.join(&v.id).join("frames");
        let masks_dir = dir.join(&v.id).join("masks");
        let mut frames = Vec::with_capacity(v.num_frames);
        let mut masks = Vec::with_capacity(v.num_frames);
        for i in 0..v.num_frames {
            frames.push(pgm::read_pgm(&frames_dir.join(format!("{i:04}.pgm")))?);
            masks.push(pgm::read_mask(&masks_dir.join(format!("{i:04}.pgm")))?);
        }
        samples.push(VideoSample {
            id: v.id.clone(),
            frames,
            masks,
            split,
            centers: Vec::new(),
        });
    }
    Ok((samples, manifest))
}

/// Path of a dataset directory's manifest (for existence checks).
pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("dataset.json")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ddsam2_core::synth::gen_dataset;

    fn small_cfg() -> GenConfig {
        GenConfig {
            num_videos: 5,
            frames_per_video: 3,
            size: 32,
            radius_min: 3.0,
            radius_max: 7.0,
            split_fractions: [0.6, 0.2, 0.2],
            ..GenConfig::default()
        }
    }

    #[test]
    fn round_trip_preserves_all_bits() {
        let cfg = small_cfg();
        let samples = gen_dataset(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&samples, &cfg, dir.path()).unwrap();
        let (loaded, manifest) = read_dataset(dir.path()).unwrap();
        assert_eq!(manifest.videos.len(), 5);
        assert_eq!(loaded.len(), samples.len());
        for (a, b) in samples.iter().zip(&loaded) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.split, b.split);
            assert_eq!(a.frames, b.frames);
            assert_eq!(a.masks, b.masks);
        }
    }

    #[test]
    fn manifest_lists_correct_split_counts() {
        let cfg = small_cfg();
        let samples = gen_dataset(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&samples, &cfg, dir.path()).unwrap();
        let manifest = read_manifest(dir.path()).unwrap();
        let count = |s: &str| manifest.videos.iter().filter(|v| v.split == s).count();
        assert_eq!(count("train"), 3);
        assert_eq!(count("val"), 1);
        assert_eq!(count("test"), 1);
        assert!(manifest.videos.iter().all(|v| v.num_frames == 3));
    }

    #[test]
    fn corrupt_frame_is_a_clean_error() {
        let cfg = small_cfg();
        let samples = gen_dataset(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&samples, &cfg, dir.path()).unwrap();
        // truncate one frame file
        let victim = dir.path().join(&samples[0].id).join("frames").join("0001.pgm");
        let bytes = std::fs::read(&victim).unwrap();
        std::fs::write(&victim, &bytes[..bytes.len() / 2]).unwrap();
        let err = read_dataset(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("0001.pgm"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_manifest_is_a_clean_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_dataset(dir.path()).unwrap_err();
        assert!(err.to_string().contains("dataset.json"));
    }
}
