//! Binary masks and segmentation metrics: DICE, NSD, HD95, ASD.
//!
//! Surface distances use exact squared-integer arithmetic: the
//! optimized path is a two-pass exact Euclidean distance transform
//! whose outputs are bit-identical to the all-pairs brute force,
//! because both take the square root of the same exact integer.
//!
//! Conventions for empty masks (the distances are otherwise
//! undefined): both masks empty gives the perfect score (distance 0,
//! overlap 1); exactly one empty gives the image diagonal for
//! distances and 0 for NSD. Distances are in pixel units between
//! pixel centers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;
use crate::tensor::Tensor;

/// Row-major boolean image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, Error> {
        if bits.len() != width * height {
            return Err(Error::Config {
                op: "binary_mask",
                msg: alloc::format!(
                    "{}x{} mask needs {} bits, got {}",
                    width,
                    height,
                    width * height,
                    bits.len()
                ),
            });
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        BinaryMask {
            width,
            height,
            bits,
        }
    }

    /// Threshold logits at 0 (probability one half).
    pub fn from_logits(logits: &Tensor) -> Self {
        let [_, _, h, w] = logits.dims();
        let data = logits.data();
        BinaryMask::from_fn(w, h, |x, y| data[y * w + x] > 0.0)
    }

    /// Mask as seed logits: `pos` inside, `neg` outside, shape (1,1,H,W).
    pub fn to_logits(&self, pos: f64, neg: f64) -> Tensor {
        Tensor::from_fn([1, 1, self.height, self.width], |i| {
            if self.bits[i] {
                pos
            } else {
                neg
            }
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_blank(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Tight bounding box (x_min, y_min, x_max, y_max), max exclusive.
    pub fn bbox(&self) -> Option<(usize, usize, usize, usize)> {
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0usize, 0usize);
        let mut any = false;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    any = true;
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x + 1);
                    y1 = y1.max(y + 1);
                }
            }
        }
        any.then_some((x0, y0, x1, y1))
    }

    /// Translate by (dx, dy); pixels shifted outside are dropped.
    pub fn shifted(&self, dx: isize, dy: isize) -> BinaryMask {
        let mut out = BinaryMask::empty(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    let nx = x as isize + dx;
                    let ny = y as isize + dy;
                    if nx >= 0
                        && ny >= 0
                        && (nx as usize) < self.width
                        && (ny as usize) < self.height
                    {
                        out.set(nx as usize, ny as usize, true);
                    }
                }
            }
        }
        out
    }

    /// Morphological dilation by a Euclidean disc of the given radius.
    pub fn dilated(&self, radius: usize) -> BinaryMask {
        let r = radius as isize;
        let mut out = BinaryMask::empty(self.width, self.height);
        for y in 0..self.height as isize {
            for x in 0..self.width as isize {
                'probe: for dy in -r..=r {
                    for dx in -r..=r {
                        if dx * dx + dy * dy > r * r {
                            continue;
                        }
                        let (sx, sy) = (x + dx, y + dy);
                        if sx >= 0
                            && sy >= 0
                            && (sx as usize) < self.width
                            && (sy as usize) < self.height
                            && self.get(sx as usize, sy as usize)
                        {
                            out.set(x as usize, y as usize, true);
                            break 'probe;
                        }
                    }
                }
            }
        }
        out
    }
}

fn check_dims(op: &'static str, a: &BinaryMask, b: &BinaryMask) -> Result<(), Error> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::Shape {
            op,
            left: [1, 1, a.height, a.width],
            right: [1, 1, b.height, b.width],
        });
    }
    Ok(())
}

/// Overlap 2|A n B| / (|A| + |B|); both empty gives 1.
pub fn dice(a: &BinaryMask, b: &BinaryMask) -> Result<f64, Error> {
    check_dims("dice", a, b)?;
    let mut inter = 0usize;
    let mut total = 0usize;
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        inter += (x && y) as usize;
        total += x as usize + y as usize;
    }
    if total == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / total as f64)
}

/// Boundary pixels: foreground with at least one background 4-neighbor
/// or lying on the image border. Returned as (x, y) in scan order.
pub fn surface(a: &BinaryMask) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for y in 0..a.height {
        for x in 0..a.width {
            if !a.get(x, y) {
                continue;
            }
            let on_border = x == 0 || y == 0 || x == a.width - 1 || y == a.height - 1;
            let exposed = on_border
                || !a.get(x - 1, y)
                || !a.get(x + 1, y)
                || !a.get(x, y - 1)
                || !a.get(x, y + 1);
            if exposed {
                out.push((x, y));
            }
        }
    }
    out
}

/// Distance between the extreme pixel centers; the one-empty-mask
/// convention for HD95 and ASD.
fn image_diagonal(a: &BinaryMask) -> f64 {
    fmath::hypot((a.width - 1) as f64, (a.height - 1) as f64)
}

// Sentinel for "no site": large but exact in f64, far above any real
// squared pixel distance.
const FAR: f64 = 1e15;

fn dt1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let sq = |i: usize| (i * i) as f64;
    let intersect =
        |q: usize, p: usize| ((f[q] + sq(q)) - (f[p] + sq(p))) / ((2 * q) as f64 - (2 * p) as f64);
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s = intersect(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = intersect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let diff = q as f64 - v[k] as f64;
        *dq = diff * diff + f[v[k]];
    }
}

/// Exact squared Euclidean distance from every grid cell to the
/// nearest site (two-pass lower-envelope transform). Values are exact
/// integers in f64 wherever a site exists.
fn edt_squared(width: usize, height: usize, sites: &[(usize, usize)]) -> Vec<f64> {
    let mut grid = vec![FAR; width * height];
    for &(x, y) in sites {
        grid[y * width + x] = 0.0;
    }
    let max_dim = width.max(height);
    let mut f = vec![0.0; max_dim];
    let mut d = vec![0.0; max_dim];
    let mut v = vec![0usize; max_dim];
    let mut z = vec![0.0; max_dim + 1];
    // columns
    for x in 0..width {
        for y in 0..height {
            f[y] = grid[y * width + x];
        }
        dt1d(&f[..height], &mut d[..height], &mut v, &mut z);
        for y in 0..height {
            grid[y * width + x] = d[y];
        }
    }
    // rows
    for y in 0..height {
        f[..width].copy_from_slice(&grid[y * width..(y + 1) * width]);
        dt1d(&f[..width], &mut d[..width], &mut v, &mut z);
        grid[y * width..(y + 1) * width].copy_from_slice(&d[..width]);
    }
    grid
}

/// Distances from each point of `from` to the nearest point of `to`.
fn directed_distances(
    from: &[(usize, usize)],
    to: &[(usize, usize)],
    width: usize,
    height: usize,
) -> Vec<f64> {
    let field = edt_squared(width, height, to);
    from.iter()
        .map(|&(x, y)| fmath::sqrt(field[y * width + x]))
        .collect()
}

/// Nearest-rank percentile: the ceil(p * n)-th smallest value.
fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let rank = if p <= 0.0 {
        1
    } else {
        let r = libm::ceil(p * n as f64) as usize;
        r.clamp(1, n)
    };
    sorted[rank - 1]
}

fn sort_unstable(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    xs
}

/// 95th-percentile Hausdorff distance: max of the two directed
/// nearest-rank 95th percentiles.
pub fn hd95(a: &BinaryMask, b: &BinaryMask) -> Result<f64, Error> {
    check_dims("hd95", a, b)?;
    match (a.is_blank(), b.is_blank()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(image_diagonal(a)),
        _ => {}
    }
    let (sa, sb) = (surface(a), surface(b));
    let ab = sort_unstable(directed_distances(&sa, &sb, a.width, a.height));
    let ba = sort_unstable(directed_distances(&sb, &sa, a.width, a.height));
    Ok(nearest_rank(&ab, 0.95).max(nearest_rank(&ba, 0.95)))
}

/// Average surface distance: mean over the union of both directed
/// nearest-distance lists.
pub fn asd(a: &BinaryMask, b: &BinaryMask) -> Result<f64, Error> {
    check_dims("asd", a, b)?;
    match (a.is_blank(), b.is_blank()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(image_diagonal(a)),
        _ => {}
    }
    let (sa, sb) = (surface(a), surface(b));
    let ab = directed_distances(&sa, &sb, a.width, a.height);
    let ba = directed_distances(&sb, &sa, a.width, a.height);
    let n = ab.len() + ba.len();
    Ok((ab.iter().sum::<f64>() + ba.iter().sum::<f64>()) / n as f64)
}

/// Normalized surface distance at tolerance tau: the fraction of
/// boundary points of each mask lying within tau of the other mask's
/// boundary. Both empty gives 1.
pub fn nsd(a: &BinaryMask, b: &BinaryMask, tau: f64) -> Result<f64, Error> {
    check_dims("nsd", a, b)?;
    if tau < 0.0 {
        return Err(Error::Config {
            op: "nsd",
            msg: alloc::format!("tau must be >= 0, got {tau}"),
        });
    }
    match (a.is_blank(), b.is_blank()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let (sa, sb) = (surface(a), surface(b));
    let ab = directed_distances(&sa, &sb, a.width, a.height);
    let ba = directed_distances(&sb, &sa, a.width, a.height);
    let hits = ab.iter().filter(|&&d| d <= tau).count() + ba.iter().filter(|&&d| d <= tau).count();
    Ok(hits as f64 / (sa.len() + sb.len()) as f64)
}

/// One evaluated frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameMetrics {
    pub frame_index: usize,
    pub dice: f64,
    pub nsd: f64,
    pub hd95: f64,
    pub asd: f64,
}

/// Mean and population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
}

impl Aggregate {
    pub fn of(xs: &[f64]) -> Aggregate {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Aggregate {
            mean,
            std: fmath::sqrt(var),
        }
    }
}

/// Per-frame metrics plus aggregates; frame 0 is excluded everywhere
/// because its annotation is the given prompt.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub frames: Vec<FrameMetrics>,
    pub dice: Aggregate,
    pub nsd: Aggregate,
    pub hd95: Aggregate,
    pub asd: Aggregate,
}

/// Evaluate predictions against ground truth over frames 1..T-1.
pub fn evaluate_video(
    preds: &[BinaryMask],
    gts: &[BinaryMask],
    tau: f64,
) -> Result<MetricsReport, Error> {
    if preds.len() != gts.len() {
        return Err(Error::Config {
            op: "evaluate_video",
            msg: alloc::format!(
                "{} predictions vs {} ground-truth masks",
                preds.len(),
                gts.len()
            ),
        });
    }
    if preds.len() < 2 {
        return Err(Error::Config {
            op: "evaluate_video",
            msg: alloc::format!("need at least 2 frames, got {}", preds.len()),
        });
    }
    let mut frames = Vec::with_capacity(preds.len() - 1);
    for (i, (p, g)) in preds.iter().zip(gts).enumerate().skip(1) {
        frames.push(FrameMetrics {
            frame_index: i,
            dice: dice(p, g)?,
            nsd: nsd(p, g, tau)?,
            hd95: hd95(p, g)?,
            asd: asd(p, g)?,
        });
    }
    let collect = |f: fn(&FrameMetrics) -> f64| -> Vec<f64> { frames.iter().map(f).collect() };
    Ok(MetricsReport {
        dice: Aggregate::of(&collect(|m| m.dice)),
        nsd: Aggregate::of(&collect(|m| m.nsd)),
        hd95: Aggregate::of(&collect(|m| m.hd95)),
        asd: Aggregate::of(&collect(|m| m.asd)),
        frames,
    })
}

/// All-pairs O(n^2) surface distance oracle. Public so test suites can
/// pit the transform-based metrics against it.
pub mod bruteforce {
    use super::*;

    fn directed(from: &[(usize, usize)], to: &[(usize, usize)]) -> Vec<f64> {
        from.iter()
            .map(|&(ax, ay)| {
                let best = to
                    .iter()
                    .map(|&(bx, by)| {
                        let dx = ax as f64 - bx as f64;
                        let dy = ay as f64 - by as f64;
                        dx * dx + dy * dy
                    })
                    .fold(f64::INFINITY, f64::min);
                fmath::sqrt(best)
            })
            .collect()
    }

    pub fn hd95(a: &BinaryMask, b: &BinaryMask) -> Result<f64, Error> {
        check_dims("hd95", a, b)?;
        match (a.is_blank(), b.is_blank()) {
            (true, true) => return Ok(0.0),
            (true, false) | (false, true) => return Ok(image_diagonal(a)),
            _ => {}
        }
        let (sa, sb) = (surface(a), surface(b));
        let ab = sort_unstable(directed(&sa, &sb));
        let ba = sort_unstable(directed(&sb, &sa));
        Ok(nearest_rank(&ab, 0.95).max(nearest_rank(&ba, 0.95)))
    }

    pub fn asd(a: &BinaryMask, b: &BinaryMask) -> Result<f64, Error> {
        check_dims("asd", a, b)?;
        match (a.is_blank(), b.is_blank()) {
            (true, true) => return Ok(0.0),
            (true, false) | (false, true) => return Ok(image_diagonal(a)),
            _ => {}
        }
        let (sa, sb) = (surface(a), surface(b));
        let ab = directed(&sa, &sb);
        let ba = directed(&sb, &sa);
        Ok((ab.iter().sum::<f64>() + ba.iter().sum::<f64>()) / (ab.len() + ba.len()) as f64)
    }

    pub fn nsd(a: &BinaryMask, b: &BinaryMask, tau: f64) -> Result<f64, Error> {
        check_dims("nsd", a, b)?;
        match (a.is_blank(), b.is_blank()) {
            (true, true) => return Ok(1.0),
            (true, false) | (false, true) => return Ok(0.0),
            _ => {}
        }
        let (sa, sb) = (surface(a), surface(b));
        let ab = directed(&sa, &sb);
        let ba = directed(&sb, &sa);
        let hits =
            ab.iter().filter(|&&d| d <= tau).count() + ba.iter().filter(|&&d| d <= tau).count();
        Ok(hits as f64 / (sa.len() + sb.len()) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn square(w: usize, h: usize, x0: usize, y0: usize, side: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            x >= x0 && x < x0 + side && y >= y0 && y < y0 + side
        })
    }

    fn single(w: usize, h: usize, x: usize, y: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |px, py| px == x && py == y)
    }

    fn random_mask(w: usize, h: usize, rng: &mut Rng) -> BinaryMask {
        // a couple of random rectangles so surfaces are non-trivial
        let mut m = BinaryMask::empty(w, h);
        for _ in 0..2 {
            let x0 = rng.below(w - 2);
            let y0 = rng.below(h - 2);
            let sw = 1 + rng.below(w - x0 - 1);
            let sh = 1 + rng.below(h - y0 - 1);
            for y in y0..(y0 + sh).min(h) {
                for x in x0..(x0 + sw).min(w) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    #[test]
    fn dice_identity_disjoint_and_half() {
        let a = square(8, 8, 1, 1, 2);
        assert_eq!(dice(&a, &a).unwrap(), 1.0);
        let b = square(8, 8, 5, 5, 2);
        assert_eq!(dice(&a, &b).unwrap(), 0.0);
        // two 2x2 squares overlapping in 2 pixels: 2*2/(4+4) = 0.5
        let c = square(8, 8, 1, 2, 2);
        assert_eq!(dice(&a, &c).unwrap(), 0.5);
    }

    #[test]
    fn dice_empty_conventions() {
        let e = BinaryMask::empty(4, 4);
        assert_eq!(dice(&e, &e).unwrap(), 1.0);
        let a = square(4, 4, 0, 0, 2);
        assert!(dice(&a, &e).unwrap() == 0.0);
    }

    #[test]
    fn dice_dim_mismatch() {
        let a = BinaryMask::empty(4, 4);
        let b = BinaryMask::empty(4, 5);
        assert!(matches!(dice(&a, &b), Err(Error::Shape { .. })));
    }

    #[test]
    fn surface_of_full_image_is_border_ring() {
        let full = BinaryMask::from_fn(5, 4, |_, _| true);
        let s = surface(&full);
        assert_eq!(s.len(), 2 * 5 + 2 * 4 - 4);
        assert!(s.iter().all(|&(x, y)| x == 0 || y == 0 || x == 4 || y == 3));
    }

    #[test]
    fn surface_of_single_pixel_is_itself() {
        let m = single(6, 6, 3, 2);
        assert_eq!(surface(&m), alloc::vec![(3, 2)]);
    }

    #[test]
    fn surface_excludes_solid_interior() {
        let m = square(7, 7, 2, 2, 3);
        let s = surface(&m);
        assert!(!s.contains(&(3, 3)), "interior pixel not excluded: {s:?}");
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn hd95_and_asd_hand_cases() {
        let a = single(8, 8, 0, 0);
        let b = single(8, 8, 3, 4);
        // single surface pixels at distance sqrt(9 + 16) = 5
        assert_eq!(hd95(&a, &b).unwrap(), 5.0);
        assert_eq!(asd(&a, &b).unwrap(), 5.0);
        assert_eq!(hd95(&a, &a).unwrap(), 0.0);
        assert_eq!(asd(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn distance_empty_conventions() {
        let e = BinaryMask::empty(5, 9);
        let a = single(5, 9, 2, 2);
        assert_eq!(hd95(&e, &e).unwrap(), 0.0);
        assert_eq!(asd(&e, &e).unwrap(), 0.0);
        let diag = fmath::hypot(4.0, 8.0);
        assert_eq!(hd95(&a, &e).unwrap(), diag);
        assert_eq!(hd95(&e, &a).unwrap(), diag);
        assert_eq!(asd(&a, &e).unwrap(), diag);
    }

    #[test]
    fn nsd_threshold_exactness() {
        let a = single(8, 8, 0, 0);
        let b = single(8, 8, 3, 4);
        assert_eq!(nsd(&a, &b, 5.0).unwrap(), 1.0);
        assert_eq!(nsd(&a, &b, 4.9).unwrap(), 0.0);
        assert_eq!(nsd(&a, &b, 0.5).unwrap(), 0.0);
        assert_eq!(nsd(&a, &a, 0.0).unwrap(), 1.0);
        let e = BinaryMask::empty(8, 8);
        assert_eq!(nsd(&e, &e, 1.0).unwrap(), 1.0);
        assert!(nsd(&a, &b, -1.0).is_err());
    }

    #[test]
    fn metrics_are_symmetric() {
        let mut rng = Rng::new(17);
        for _ in 0..20 {
            let a = random_mask(16, 16, &mut rng);
            let b = random_mask(16, 16, &mut rng);
            assert_eq!(dice(&a, &b).unwrap(), dice(&b, &a).unwrap());
            assert_eq!(hd95(&a, &b).unwrap(), hd95(&b, &a).unwrap());
            assert_eq!(asd(&a, &b).unwrap(), asd(&b, &a).unwrap());
            assert_eq!(nsd(&a, &b, 2.0).unwrap(), nsd(&b, &a, 2.0).unwrap());
        }
    }

    #[test]
    fn transform_matches_brute_force_bit_for_bit() {
        for seed in [1u64, 2, 3] {
            let mut rng = Rng::new(seed);
            for _ in 0..50 {
                let a = random_mask(32, 32, &mut rng);
                let b = random_mask(32, 32, &mut rng);
                assert_eq!(
                    hd95(&a, &b).unwrap().to_bits(),
                    bruteforce::hd95(&a, &b).unwrap().to_bits()
                );
                assert_eq!(
                    asd(&a, &b).unwrap().to_bits(),
                    bruteforce::asd(&a, &b).unwrap().to_bits()
                );
                assert_eq!(
                    nsd(&a, &b, 2.0).unwrap().to_bits(),
                    bruteforce::nsd(&a, &b, 2.0).unwrap().to_bits()
                );
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let mut rng = Rng::new(23);
        for _ in 0..10 {
            // keep masks away from borders so the shift does not clip
            let mut a = BinaryMask::empty(24, 24);
            let mut b = BinaryMask::empty(24, 24);
            for _ in 0..30 {
                a.set(4 + rng.below(12), 4 + rng.below(12), true);
                b.set(4 + rng.below(12), 4 + rng.below(12), true);
            }
            let (dx, dy) = (3isize, -2isize);
            let (a2, b2) = (a.shifted(dx, dy), b.shifted(dx, dy));
            assert_eq!(a2.count(), a.count());
            assert_eq!(dice(&a, &b).unwrap(), dice(&a2, &b2).unwrap());
            assert_eq!(hd95(&a, &b).unwrap(), hd95(&a2, &b2).unwrap());
            assert_eq!(asd(&a, &b).unwrap(), asd(&a2, &b2).unwrap());
            assert_eq!(nsd(&a, &b, 2.0).unwrap(), nsd(&a2, &b2, 2.0).unwrap());
        }
    }

    #[test]
    fn evaluate_video_identity_and_two_frame() {
        let a = square(8, 8, 1, 1, 3);
        let b = square(8, 8, 2, 2, 3);
        let report = evaluate_video(
            &[a.clone(), b.clone(), b.clone()],
            &[a.clone(), b.clone(), b.clone()],
            2.0,
        )
        .unwrap();
        assert_eq!(report.frames.len(), 2);
        assert_eq!(report.dice.mean, 1.0);
        assert_eq!(report.hd95.mean, 0.0);
        assert_eq!(report.frames[0].frame_index, 1);

        // two-frame video: aggregate equals the single frame-1 value
        let report = evaluate_video(&[a.clone(), b.clone()], &[a.clone(), a.clone()], 2.0).unwrap();
        assert_eq!(report.frames.len(), 1);
        assert_eq!(report.dice.mean, report.frames[0].dice);
        assert_eq!(report.dice.std, 0.0);
    }

    #[test]
    fn evaluate_video_matches_per_frame_recomputation() {
        let mut rng = Rng::new(31);
        let preds: Vec<BinaryMask> = (0..4).map(|_| random_mask(16, 16, &mut rng)).collect();
        let gts: Vec<BinaryMask> = (0..4).map(|_| random_mask(16, 16, &mut rng)).collect();
        let report = evaluate_video(&preds, &gts, 2.0).unwrap();
        for fm in &report.frames {
            let i = fm.frame_index;
            assert_eq!(fm.dice, dice(&preds[i], &gts[i]).unwrap());
            assert_eq!(fm.hd95, bruteforce::hd95(&preds[i], &gts[i]).unwrap());
            assert_eq!(fm.asd, bruteforce::asd(&preds[i], &gts[i]).unwrap());
            assert_eq!(fm.nsd, bruteforce::nsd(&preds[i], &gts[i], 2.0).unwrap());
        }
        let dices: Vec<f64> = report.frames.iter().map(|f| f.dice).collect();
        assert_eq!(report.dice, Aggregate::of(&dices));
    }

    #[test]
    fn evaluate_video_rejects_bad_lengths() {
        let a = BinaryMask::empty(4, 4);
        assert!(evaluate_video(core::slice::from_ref(&a), core::slice::from_ref(&a), 2.0).is_err());
        assert!(evaluate_video(&[a.clone(), a.clone()], core::slice::from_ref(&a), 2.0).is_err());
    }

    #[test]
    fn bbox_and_shift() {
        let m = square(8, 8, 2, 3, 2);
        assert_eq!(m.bbox(), Some((2, 3, 4, 5)));
        assert_eq!(BinaryMask::empty(4, 4).bbox(), None);
        let s = m.shifted(5, 0);
        assert!(s.count() < m.count()); // clipped at the right edge
    }
}
