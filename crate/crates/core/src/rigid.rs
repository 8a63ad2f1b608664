//! Registration-style tracking baselines.
//!
//! The rigid arm propagates the first-frame mask by exhaustive integer
//! translation search, scoring normalized cross-correlation over the
//! first frame's dilated mask region. The copy arm repeats the first
//! mask unchanged.

use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;
use crate::metrics::BinaryMask;
use crate::synth::GrayImage;

#[derive(Clone, Copy, Debug)]
pub struct RigidConfig {
    /// Search window [-R, R] per axis, pixels.
    pub search_radius: isize,
    /// Mask dilation defining the correlation region, pixels.
    pub roi_dilation: usize,
}

impl Default for RigidConfig {
    fn default() -> Self {
        RigidConfig {
            search_radius: 8,
            roi_dilation: 3,
        }
    }
}

/// Normalized cross-correlation of paired samples; requires at least
/// two pixels and nonzero variance on both sides.
fn ncc(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let ma = a.iter().sum::<f64>() / nf;
    let mb = b.iter().sum::<f64>() / nf;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let da = a[i] - ma;
        let db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some(sab / fmath::sqrt(saa * sbb))
}

/// Ordering of candidate offsets: higher score wins, then smaller
/// |dx| + |dy|, then lexicographic (dx, dy).
fn better(candidate: (f64, isize, isize), best: (f64, isize, isize)) -> bool {
    let (cs, cx, cy) = candidate;
    let (bs, bx, by) = best;
    if cs != bs {
        return cs > bs;
    }
    let (cm, bm) = (cx.abs() + cy.abs(), bx.abs() + by.abs());
    if cm != bm {
        return cm < bm;
    }
    (cx, cy) < (bx, by)
}

/// Track by translation: for every later frame, find the integer
/// offset in the search window maximizing NCC between the first
/// frame's region pixels and the shifted target pixels, and emit the
/// first mask shifted by that offset (clipped at the borders).
pub fn rigid_track(
    frames: &[GrayImage],
    first_mask: &BinaryMask,
    cfg: &RigidConfig,
) -> Result<Vec<BinaryMask>, Error> {
    if frames.is_empty() {
        return Err(Error::Empty("frames"));
    }
    if first_mask.is_blank() {
        return Err(Error::Prompt("first-frame mask is empty".into()));
    }
    if cfg.search_radius < 0 {
        return Err(Error::Config {
            op: "rigid_track",
            msg: alloc::format!("search radius must be >= 0, got {}", cfg.search_radius),
        });
    }
    let (w, h) = (first_mask.width(), first_mask.height());
    let roi = first_mask.dilated(cfg.roi_dilation);
    let mut roi_px: Vec<(usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if roi.get(x, y) {
                roi_px.push((x, y));
            }
        }
    }
    let template: Vec<f64> = roi_px
        .iter()
        .map(|&(x, y)| frames[0].data[y * w + x] as f64)
        .collect();

    let r = cfg.search_radius;
    let mut out = Vec::with_capacity(frames.len());
    out.push(first_mask.clone());
    for frame in &frames[1..] {
        let mut best = (f64::NEG_INFINITY, 0isize, 0isize);
        for dy in -r..=r {
            for dx in -r..=r {
                // pixels whose shifted position stays in bounds
                let mut a = Vec::with_capacity(roi_px.len());
                let mut b = Vec::with_capacity(roi_px.len());
                for (i, &(x, y)) in roi_px.iter().enumerate() {
                    let tx = x as isize + dx;
                    let ty = y as isize + dy;
                    if tx >= 0 && ty >= 0 && (tx as usize) < w && (ty as usize) < h {
                        a.push(template[i]);
                        b.push(frame.data[ty as usize * w + tx as usize] as f64);
                    }
                }
                let score = match ncc(&a, &b) {
                    Some(s) => s,
                    Option::None => continue,
                };
                if better((score, dx, dy), best) {
                    best = (score, dx, dy);
                }
            }
        }
        out.push(first_mask.shifted(best.1, best.2));
    }
    Ok(out)
}

/// The degenerate baseline: every frame gets the first mask.
pub fn copy_track(num_frames: usize, first_mask: &BinaryMask) -> Result<Vec<BinaryMask>, Error> {
    if num_frames == 0 {
        return Err(Error::Empty("frames"));
    }
    if first_mask.is_blank() {
        return Err(Error::Prompt("first-frame mask is empty".into()));
    }
    Ok((0..num_frames).map(|_| first_mask.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::dice;
    use crate::synth::{gen_video, GenConfig};

    fn static_video(frames: usize) -> (Vec<GrayImage>, BinaryMask) {
        let cfg = GenConfig {
            motion_amplitude: 0.0,
            deform_amplitude: 0.0,
            noise_sigma: 0.0,
            frames_per_video: frames,
            ..GenConfig::default()
        };
        let v = gen_video(&cfg, 5).unwrap();
        (v.frames, v.masks[0].clone())
    }

    /// Shift an image by (dx, dy), filling uncovered pixels with the
    /// source's clamped border values.
    fn translate(img: &GrayImage, dx: isize, dy: isize) -> GrayImage {
        let (w, h) = (img.width, img.height);
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h as isize {
            for x in 0..w as isize {
                let sx = (x - dx).clamp(0, w as isize - 1) as usize;
                let sy = (y - dy).clamp(0, h as isize - 1) as usize;
                data.push(img.data[sy * w + sx]);
            }
        }
        GrayImage::new(w, h, data).unwrap()
    }

    #[test]
    fn recovers_exact_integer_translation() {
        let (frames, mask) = static_video(2);
        let moved = translate(&frames[0], 2, -1);
        let video = alloc::vec![frames[0].clone(), moved];
        let out = rigid_track(&video, &mask, &RigidConfig::default()).unwrap();
        let want = mask.shifted(2, -1);
        assert_eq!(dice(&out[1], &want).unwrap(), 1.0);
    }

    #[test]
    fn static_video_stays_at_zero_offset() {
        let (frames, mask) = static_video(4);
        let out = rigid_track(&frames, &mask, &RigidConfig::default()).unwrap();
        for m in &out {
            assert_eq!(dice(m, &mask).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_radius_degenerates_to_copy() {
        let cfg = GenConfig {
            frames_per_video: 4,
            ..GenConfig::default()
        };
        let v = gen_video(&cfg, 11).unwrap();
        let out = rigid_track(
            &v.frames,
            &v.masks[0],
            &RigidConfig {
                search_radius: 0,
                roi_dilation: 3,
            },
        )
        .unwrap();
        for m in &out {
            assert_eq!(m, &v.masks[0]);
        }
    }

    #[test]
    fn translation_sequence_tracks_perfectly() {
        // several frames, each an exact translation within the window
        let (frames, mask) = static_video(1);
        let offsets = [(0isize, 0isize), (3, 2), (-4, 1), (6, -5)];
        let video: Vec<GrayImage> = offsets
            .iter()
            .map(|&(dx, dy)| translate(&frames[0], dx, dy))
            .collect();
        let out = rigid_track(&video, &mask, &RigidConfig::default()).unwrap();
        for (i, &(dx, dy)) in offsets.iter().enumerate() {
            let want = mask.shifted(dx, dy);
            assert_eq!(dice(&out[i], &want).unwrap(), 1.0, "frame {i}");
        }
    }

    #[test]
    fn output_never_gains_pixels() {
        let cfg = GenConfig {
            frames_per_video: 6,
            ..GenConfig::default()
        };
        let v = gen_video(&cfg, 13).unwrap();
        let out = rigid_track(&v.frames, &v.masks[0], &RigidConfig::default()).unwrap();
        for m in &out {
            assert!(m.count() <= v.masks[0].count());
        }
    }

    #[test]
    fn deterministic_given_inputs() {
        let cfg = GenConfig {
            frames_per_video: 5,
            ..GenConfig::default()
        };
        let v = gen_video(&cfg, 17).unwrap();
        let a = rigid_track(&v.frames, &v.masks[0], &RigidConfig::default()).unwrap();
        let b = rigid_track(&v.frames, &v.masks[0], &RigidConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn copy_track_basics() {
        let mask = BinaryMask::from_fn(8, 8, |x, y| x > 2 && y > 2 && x < 6 && y < 6);
        let out = copy_track(3, &mask).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|m| m == &mask));
        assert!(copy_track(0, &mask).is_err());
        assert!(copy_track(2, &BinaryMask::empty(8, 8)).is_err());
    }
}
