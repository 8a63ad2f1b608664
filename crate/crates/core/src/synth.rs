//! Deterministic synthetic tracking videos: one bright ellipse
//! drifting and deforming over a sinusoidally textured background,
//! with exact ground-truth masks and the true center trajectory.
//!
//! Every byte is a pure function of (config, seed). Pixels quantize to
//! 8 bits at generation time, so in-memory samples equal what a
//! write/read round trip produces.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;
use crate::metrics::{self, BinaryMask};
use crate::rng::Rng;
use crate::tensor::Tensor;

/// 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, Error> {
        if data.len() != width * height {
            return Err(Error::Config {
                op: "gray_image",
                msg: format!(
                    "{width}x{height} image needs {} bytes, got {}",
                    width * height,
                    data.len()
                ),
            });
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    /// Intensity tensor (1, 1, H, W) in [0, 1].
    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_fn([1, 1, self.height, self.width], |i| {
            self.data[i] as f64 / 255.0
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Result<Split, Error> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(Error::Config {
                op: "split",
                msg: format!("unknown split {other}"),
            }),
        }
    }
}

/// Generator settings.
#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub num_videos: usize,
    pub frames_per_video: usize,
    pub size: usize,
    pub seed: u64,
    /// Max center displacement per frame, pixels.
    pub motion_amplitude: f64,
    pub radius_min: f64,
    pub radius_max: f64,
    /// Fractional radius jitter; also scales the rotation drift.
    pub deform_amplitude: f64,
    /// Gaussian pixel noise, fraction of the intensity range.
    pub noise_sigma: f64,
    /// Train/val/test fractions, summing to 1.
    pub split_fractions: [f64; 3],
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            num_videos: 50,
            frames_per_video: 16,
            size: 64,
            seed: 0,
            motion_amplitude: 1.5,
            radius_min: 6.0,
            radius_max: 14.0,
            deform_amplitude: 0.15,
            noise_sigma: 0.05,
            split_fractions: [0.7, 0.1, 0.2],
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let err = |msg: String| Error::Config {
            op: "gen_config",
            msg,
        };
        if self.num_videos == 0 || self.frames_per_video == 0 || self.size == 0 {
            return Err(err("counts and size must be positive".into()));
        }
        if !(self.radius_min > 0.0 && self.radius_min <= self.radius_max) {
            return Err(err(format!(
                "bad radius range {}..{}",
                self.radius_min, self.radius_max
            )));
        }
        if self.radius_max >= self.size as f64 / 3.0 {
            return Err(err(format!(
                "radius max {} must stay under size/3 = {}",
                self.radius_max,
                self.size as f64 / 3.0
            )));
        }
        if self.motion_amplitude < 0.0 || self.deform_amplitude < 0.0 || self.noise_sigma < 0.0 {
            return Err(err("amplitudes must be nonnegative".into()));
        }
        let sum: f64 = self.split_fractions.iter().sum();
        if fmath::abs(sum - 1.0) > 1e-9 || self.split_fractions.iter().any(|&f| f < 0.0) {
            return Err(err(format!(
                "split fractions {:?} must be nonnegative and sum to 1",
                self.split_fractions
            )));
        }
        Ok(())
    }
}

/// One generated video with ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoSample {
    pub id: String,
    pub frames: Vec<GrayImage>,
    pub masks: Vec<BinaryMask>,
    pub split: Split,
    /// True ellipse center per frame (not serialized; used by the
    /// generation self-test and motion oracles).
    pub centers: Vec<(f64, f64)>,
}

struct EllipseState {
    cx: f64,
    cy: f64,
    vx: f64,
    vy: f64,
    a: f64,
    b: f64,
    sa: f64,
    sb: f64,
    theta: f64,
}

/// Generate one video. Fully determined by (cfg, video_seed).
pub fn gen_video(cfg: &GenConfig, video_seed: u64) -> Result<VideoSample, Error> {
    cfg.validate()?;
    let size = cfg.size;
    let mut shape_rng = Rng::for_stream(video_seed, 1);
    let mut motion_rng = Rng::for_stream(video_seed, 2);
    let mut noise_rng = Rng::for_stream(video_seed, 3);
    let mut texture_rng = Rng::for_stream(video_seed, 4);

    let a0 = shape_rng.uniform_in(cfg.radius_min, cfg.radius_max);
    let b0 = shape_rng.uniform_in(cfg.radius_min, cfg.radius_max);
    // keep the fully deformed ellipse inside the frame, with slack for
    // border reflection
    let margin = a0.max(b0) * (1.0 + cfg.deform_amplitude) + 2.0;
    let lo = margin;
    let hi = size as f64 - margin;
    let mut st = EllipseState {
        cx: shape_rng.uniform_in(lo, hi),
        cy: shape_rng.uniform_in(lo, hi),
        vx: 0.0,
        vy: 0.0,
        a: a0,
        b: b0,
        sa: 0.0,
        sb: 0.0,
        theta: shape_rng.uniform_in(0.0, core::f64::consts::PI),
    };

    // fixed background texture per video
    let tex_fx = texture_rng.uniform_in(0.10, 0.45);
    let tex_fy = texture_rng.uniform_in(0.10, 0.45);
    let tex_phase = texture_rng.uniform_in(0.0, core::f64::consts::TAU);

    let mut frames = Vec::with_capacity(cfg.frames_per_video);
    let mut masks = Vec::with_capacity(cfg.frames_per_video);
    let mut centers = Vec::with_capacity(cfg.frames_per_video);

    for t in 0..cfg.frames_per_video {
        if t > 0 {
            // persistent random-walk velocity, per-step norm clipped to
            // the motion amplitude, reflected at the borders
            st.vx = 0.7 * st.vx + 0.5 * cfg.motion_amplitude * motion_rng.normal();
            st.vy = 0.7 * st.vy + 0.5 * cfg.motion_amplitude * motion_rng.normal();
            let norm = fmath::hypot(st.vx, st.vy);
            if norm > cfg.motion_amplitude && norm > 0.0 {
                st.vx *= cfg.motion_amplitude / norm;
                st.vy *= cfg.motion_amplitude / norm;
            }
            st.cx += st.vx;
            st.cy += st.vy;
            if st.cx < lo {
                st.cx = 2.0 * lo - st.cx;
                st.vx = -st.vx;
            } else if st.cx > hi {
                st.cx = 2.0 * hi - st.cx;
                st.vx = -st.vx;
            }
            if st.cy < lo {
                st.cy = 2.0 * lo - st.cy;
                st.vy = -st.vy;
            } else if st.cy > hi {
                st.cy = 2.0 * hi - st.cy;
                st.vy = -st.vy;
            }
            // smooth radius jitter within the deform amplitude
            st.sa = (0.8 * st.sa + 0.3 * motion_rng.normal()).clamp(-1.0, 1.0);
            st.sb = (0.8 * st.sb + 0.3 * motion_rng.normal()).clamp(-1.0, 1.0);
            st.a = a0 * (1.0 + cfg.deform_amplitude * st.sa);
            st.b = b0 * (1.0 + cfg.deform_amplitude * st.sb);
            st.theta += 0.3 * cfg.deform_amplitude * motion_rng.normal();
        }

        let mask = rasterize_ellipse(size, st.cx, st.cy, st.a, st.b, st.theta);
        debug_assert!(!mask.is_blank());
        let mut pixels = Vec::with_capacity(size * size);
        for y in 0..size {
            for x in 0..size {
                let tex = 0.5
                    + 0.5
                        * fmath::sin(tex_fx * x as f64 + tex_fy * y as f64 + tex_phase);
                let base = if mask.get(x, y) { 0.8 } else { 0.0 };
                let v = base + 0.3 * tex + cfg.noise_sigma * noise_rng.normal();
                pixels.push((fmath::round(v.clamp(0.0, 1.0) * 255.0)) as u8);
            }
        }
        frames.push(GrayImage::new(size, size, pixels)?);
        masks.push(mask);
        centers.push((st.cx, st.cy));
    }

    Ok(VideoSample {
        id: String::new(),
        frames,
        masks,
        split: Split::Train,
        centers,
    })
}

/// Pixel-center rasterization of a rotated ellipse.
fn rasterize_ellipse(size: usize, cx: f64, cy: f64, a: f64, b: f64, theta: f64) -> BinaryMask {
    let (ct, stt) = (fmath::cos(theta), fmath::sin(theta));
    BinaryMask::from_fn(size, size, |x, y| {
        let dx = x as f64 + 0.5 - cx;
        let dy = y as f64 + 0.5 - cy;
        let u = (dx * ct + dy * stt) / a;
        let v = (-dx * stt + dy * ct) / b;
        u * u + v * v <= 1.0
    })
}

/// Generate the full dataset: per-video seeds are seed xor index, ids
/// are zero-padded indices, split tags assigned afterwards.
pub fn gen_dataset(cfg: &GenConfig) -> Result<Vec<VideoSample>, Error> {
    cfg.validate()?;
    let mut samples = Vec::with_capacity(cfg.num_videos);
    for i in 0..cfg.num_videos {
        let mut s = gen_video(cfg, cfg.seed ^ i as u64)?;
        s.id = format!("v{i:04}");
        samples.push(s);
    }
    split_dataset(&mut samples, cfg.split_fractions, cfg.seed)?;
    Ok(samples)
}

/// Assign split tags: deterministic shuffle by seed, then contiguous
/// assignment with floor-then-distribute counts. Any split with a
/// positive fraction must end up nonempty.
pub fn split_dataset(
    samples: &mut [VideoSample],
    fractions: [f64; 3],
    seed: u64,
) -> Result<(), Error> {
    let sum: f64 = fractions.iter().sum();
    if fmath::abs(sum - 1.0) > 1e-9 || fractions.iter().any(|&f| f < 0.0) {
        return Err(Error::Config {
            op: "split_dataset",
            msg: format!("bad fractions {fractions:?}"),
        });
    }
    let n = samples.len();
    let mut counts = [0usize; 3];
    let mut fracs = [(0.0f64, 0usize); 3];
    for i in 0..3 {
        let exact = fractions[i] * n as f64;
        counts[i] = fmath::floor(exact) as usize;
        fracs[i] = (exact - counts[i] as f64, i);
    }
    let mut leftover = n - counts.iter().sum::<usize>();
    // biggest fractional part first; ties by split order
    fracs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for &(_, i) in fracs.iter().cycle().take(3 * 2) {
        if leftover == 0 {
            break;
        }
        counts[i] += 1;
        leftover -= 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        if fractions[i] > 0.0 && c == 0 {
            return Err(Error::Config {
                op: "split_dataset",
                msg: format!(
                    "splits empty: {} videos cannot fill fractions {:?}",
                    n, fractions
                ),
            });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = Rng::for_stream(seed, 0x511);
    rng.shuffle(&mut order);
    for (pos, &idx) in order.iter().enumerate() {
        samples[idx].split = if pos < counts[0] {
            Split::Train
        } else if pos < counts[0] + counts[1] {
            Split::Val
        } else {
            Split::Test
        };
    }
    Ok(())
}

/// Mean Dice of the copy-first-mask tracker and of an oracle rigid
/// tracker that shifts the first mask by the true (rounded) center
/// displacement. The dataset is non-degenerate when copying scores
/// clearly below rigid oracle tracking.
#[derive(Clone, Copy, Debug)]
pub struct SelftestReport {
    pub copy_dice: f64,
    pub rigid_oracle_dice: f64,
}

pub fn dataset_selftest(samples: &[VideoSample]) -> Result<SelftestReport, Error> {
    let mut copy_sum = 0.0;
    let mut rigid_sum = 0.0;
    let mut count = 0usize;
    for s in samples {
        let first = &s.masks[0];
        let (c0x, c0y) = s.centers[0];
        for t in 1..s.masks.len() {
            copy_sum += metrics::dice(first, &s.masks[t])?;
            let (ctx, cty) = s.centers[t];
            let shifted = first.shifted(
                fmath::round(ctx - c0x) as isize,
                fmath::round(cty - c0y) as isize,
            );
            rigid_sum += metrics::dice(&shifted, &s.masks[t])?;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Empty("selftest frames"));
    }
    Ok(SelftestReport {
        copy_dice: copy_sum / count as f64,
        rigid_oracle_dice: rigid_sum / count as f64,
    })
}
