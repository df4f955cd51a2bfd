//! Nonlocal color image denoising with group QHOSVD hard thresholding.
//!
//! Each iteration blends the previous estimate with the noisy input,
//! `Y⁽ᵞ⁾ = X̂⁽ᵞ⁻¹⁾ + δ(Y − X̂⁽ᵞ⁻¹⁾)`, then for every reference patch stacks
//! its `K` nearest neighbours from a local search window into a `w×w×K`
//! tensor, thresholds the QHOSVD core at
//! `τ = η·σ·sqrt(2·ln(w²·K))`, transforms back and averages all returned
//! patches into `X̂⁽ᵞ⁾`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hosvd::{full_modes, hard_threshold_core, qhosvd, reconstruct};
use crate::matrix::QuaternionMatrix;
use crate::patches::{patch_anchors, Accumulator};
use crate::rgb::{decode, encode_rgb, RgbImage};
use crate::tensor::QuaternionTensor;

/// Operating points `(σ, w, K, ϒ, η)`.
const SCHEDULE: [(f64, f64, f64, f64, f64); 4] = [
    (10.0, 6.0, 70.0, 8.0, 0.70),
    (20.0, 6.0, 70.0, 8.0, 0.55),
    (30.0, 7.0, 90.0, 14.0, 0.45),
    (50.0, 8.0, 120.0, 20.0, 0.35),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenoiseConfig {
    pub sigma: f64,
    pub patch_size: usize,
    pub group_size: usize,
    pub iterations: usize,
    pub delta: f64,
    pub search_window: usize,
    pub eta: f64,
    pub ref_stride: usize,
    /// Replaces the statistical threshold when set.
    pub tau_override: Option<f64>,
}

impl DenoiseConfig {
    /// Parameters for noise level `sigma`: linear interpolation between the
    /// schedule rows, clamped outside `[10, 50]`; integer fields are rounded.
    pub fn for_sigma(sigma: f64) -> Self {
        let (first, last) = (SCHEDULE[0], SCHEDULE[SCHEDULE.len() - 1]);
        let row = if sigma <= first.0 {
            first
        } else if sigma >= last.0 {
            last
        } else {
            let i = SCHEDULE.windows(2).position(|w| sigma <= w[1].0).expect("sigma inside schedule");
            let (a, b) = (SCHEDULE[i], SCHEDULE[i + 1]);
            let t = (sigma - a.0) / (b.0 - a.0);
            let lerp = |x: f64, y: f64| x + t * (y - x);
            (sigma, lerp(a.1, b.1), lerp(a.2, b.2), lerp(a.3, b.3), lerp(a.4, b.4))
        };
        Self {
            sigma,
            patch_size: row.1.round() as usize,
            group_size: row.2.round() as usize,
            iterations: row.3.round() as usize,
            delta: 0.1,
            search_window: 30,
            eta: row.4,
            ref_stride: 4,
            tau_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be finite and nonnegative, got {}", self.sigma));
        }
        if self.patch_size == 0 || self.group_size == 0 || self.iterations == 0 {
            return bad("patch size, group size and iteration count must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if self.search_window < self.patch_size {
            return bad(format!(
                "search window {} is smaller than the patch size {}",
                self.search_window, self.patch_size
            ));
        }
        if self.ref_stride == 0 || self.ref_stride > self.patch_size {
            return bad(format!(
                "reference stride must be in 1..={}, got {}",
                self.patch_size, self.ref_stride
            ));
        }
        if let Some(t) = self.tau_override {
            if !(t >= 0.0) {
                return bad(format!("threshold override must be nonnegative, got {t}"));
            }
        }
        Ok(())
    }

    /// `η·σ·sqrt(2·ln(w²·K))`, unless overridden.
    pub fn threshold(&self) -> f64 {
        self.tau_override.unwrap_or_else(|| {
            let n = (self.patch_size * self.patch_size * self.group_size) as f64;
            self.eta * self.sigma * (2.0 * n.ln()).sqrt()
        })
    }
}

/// Reference patch and its nearest neighbours as a `w×w×K` tensor.
#[derive(Clone, Debug)]
pub struct SimilarGroup {
    pub tensor: QuaternionTensor,
    /// `(top, left)` of every member; the reference comes first.
    pub member_anchors: Vec<(usize, usize)>,
    /// Squared Frobenius distance of every member to the reference.
    pub distances: Vec<f64>,
    /// Set when the window held fewer than `K` candidates and members repeat.
    pub padded: bool,
}

fn patch_distance(q: &QuaternionMatrix, a: (usize, usize), b: (usize, usize), w: usize) -> f64 {
    let cols = q.cols();
    let (pw, px, py, pz) = q.planes();
    let mut sum = 0.0;
    for r in 0..w {
        let ia = (a.0 + r) * cols + a.1;
        let ib = (b.0 + r) * cols + b.1;
        for plane in [pw, px, py, pz] {
            sum += plane[ia..ia + w]
                .iter()
                .zip(&plane[ib..ib + w])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>();
        }
    }
    sum
}

/// Anchor range of the search window along one axis: `window` positions
/// centred on `center`, shifted to stay within `0..=extent − w`.
fn window_range(center: usize, extent: usize, w: usize, window: usize) -> std::ops::Range<usize> {
    let positions = extent - w + 1;
    let len = window.min(positions);
    let start = center.saturating_sub(window / 2).min(positions - len);
    start..start + len
}

pub fn block_match(q: &QuaternionMatrix, reference: (usize, usize), cfg: &DenoiseConfig) -> Result<SimilarGroup> {
    let w = cfg.patch_size;
    let (rows, cols) = q.shape();
    if w > rows || w > cols {
        return Err(Error::shape(format!("{w}x{w} patch does not fit a {rows}x{cols} image")));
    }
    if reference.0 + w > rows || reference.1 + w > cols {
        return Err(Error::shape(format!("reference patch at {reference:?} leaves the {rows}x{cols} image")));
    }
    let mut candidates: Vec<(f64, (usize, usize))> = Vec::new();
    for top in window_range(reference.0, rows, w, cfg.search_window) {
        for left in window_range(reference.1, cols, w, cfg.search_window) {
            if (top, left) != reference {
                candidates.push((patch_distance(q, reference, (top, left), w), (top, left)));
            }
        }
    }
    // Stable sort keeps row-major order among equal distances.
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.insert(0, (0.0, reference));

    let k = cfg.group_size;
    let padded = candidates.len() < k;
    let chosen: Vec<_> = candidates.iter().cycle().take(k).copied().collect();
    let slices = chosen
        .iter()
        .map(|&(_, (t, l))| q.block(t, l, w, w))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimilarGroup {
        tensor: QuaternionTensor::from_frontal_slices(&slices)?,
        member_anchors: chosen.iter().map(|c| c.1).collect(),
        distances: chosen.iter().map(|c| c.0).collect(),
        padded,
    })
}

/// Full QHOSVD, hard thresholding of the core at `cfg.threshold()`, inverse
/// transform; returns the `K` estimated patches in member order.
pub fn denoise_group(group: &SimilarGroup, cfg: &DenoiseConfig) -> Result<Vec<QuaternionMatrix>> {
    let mut factors = qhosvd(&group.tensor, &full_modes(group.tensor.order()))?;
    factors.core = hard_threshold_core(&factors.core, cfg.threshold())?;
    let out = reconstruct(&factors)?;
    (0..group.tensor.dims()[2]).map(|k| out.frontal_slice(k)).collect()
}

/// `X̂ + δ(Y − X̂)`.
pub fn regularize(estimate: &QuaternionMatrix, noisy: &QuaternionMatrix, delta: f64) -> Result<QuaternionMatrix> {
    estimate.add(&noisy.sub(estimate)?.scale(delta))
}

/// One pass over all reference patches of `y`, aggregated by overlap averaging.
pub fn denoise_step(y: &QuaternionMatrix, cfg: &DenoiseConfig) -> Result<QuaternionMatrix> {
    let w = cfg.patch_size;
    let refs = patch_anchors(y.rows(), y.cols(), (w, w), (cfg.ref_stride, cfg.ref_stride))?;
    let groups = refs
        .par_iter()
        .map(|&r| {
            let group = block_match(y, r, cfg)?;
            let patches = denoise_group(&group, cfg)?;
            Ok((group.member_anchors, patches))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = Accumulator::new(y.rows(), y.cols());
    for (anchors, patches) in &groups {
        for (&(t, l), p) in anchors.iter().zip(patches) {
            acc.add(t, l, p)?;
        }
    }
    acc.finish()
}

/// Runs all iterations on an encoded image; `progress` is called after each.
pub fn denoise_quaternion_with_progress(
    noisy: &QuaternionMatrix,
    cfg: &DenoiseConfig,
    mut progress: impl FnMut(usize, usize),
) -> Result<QuaternionMatrix> {
    cfg.validate()?;
    let w = cfg.patch_size;
    if w > noisy.rows() || w > noisy.cols() {
        return Err(Error::shape(format!(
            "{w}x{w} patch does not fit a {}x{} image",
            noisy.rows(),
            noisy.cols()
        )));
    }
    let mut estimate = noisy.clone();
    for it in 1..=cfg.iterations {
        let y = regularize(&estimate, noisy, cfg.delta)?;
        estimate = denoise_step(&y, cfg)?;
        progress(it, cfg.iterations);
    }
    Ok(estimate)
}

pub fn denoise_quaternion(noisy: &QuaternionMatrix, cfg: &DenoiseConfig) -> Result<QuaternionMatrix> {
    denoise_quaternion_with_progress(noisy, cfg, |_, _| {})
}

pub fn denoise(noisy: &RgbImage, cfg: &DenoiseConfig) -> Result<RgbImage> {
    decode(&denoise_quaternion(&encode_rgb(noisy), cfg)?)
}
