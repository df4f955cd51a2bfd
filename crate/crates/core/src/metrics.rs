//! Image quality metrics and seeded Gaussian noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rgb::RgbImage;

const PEAK: f64 = 255.0;
const SSIM_WINDOW: usize = 11;
const SSIM_STD: f64 = 1.5;
const C1: f64 = (0.01 * PEAK) * (0.01 * PEAK);
const C2: f64 = (0.03 * PEAK) * (0.03 * PEAK);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    /// `f64::INFINITY` for identical images.
    pub psnr_db: f64,
    pub ssim: f64,
}

impl MetricReport {
    pub fn compute(reference: &RgbImage, test: &RgbImage) -> Result<Self> {
        Ok(Self { psnr_db: psnr(reference, test)?, ssim: ssim(reference, test)? })
    }
}

fn same_shape(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!(
            "images are {}x{} and {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// PSNR in dB from one MSE over all pixels and channels.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    same_shape(a, b)?;
    let (sum, n) = a
        .channels()
        .iter()
        .zip(b.channels())
        .flat_map(|(x, y)| x.iter().zip(y))
        .fold((0.0, 0usize), |(s, n), (x, y)| (s + (x - y) * (x - y), n + 1));
    let mse = sum / n as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (PEAK / mse.sqrt()).log10())
}

fn gaussian_window() -> Vec<f64> {
    let c = (SSIM_WINDOW / 2) as f64;
    let g: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * SSIM_STD * SSIM_STD)).exp())
        .collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|v| v / s).collect()
}

/// Separable valid-mode filtering of a row-major plane.
fn filter_valid(p: &[f64], rows: usize, cols: usize, g: &[f64]) -> Vec<f64> {
    let k = g.len();
    let (or, oc) = (rows - k + 1, cols - k + 1);
    let mut horiz = vec![0.0; rows * oc];
    for r in 0..rows {
        for c in 0..oc {
            horiz[r * oc + c] = g.iter().enumerate().map(|(t, w)| w * p[r * cols + c + t]).sum();
        }
    }
    let mut out = vec![0.0; or * oc];
    for r in 0..or {
        for c in 0..oc {
            out[r * oc + c] = g.iter().enumerate().map(|(t, w)| w * horiz[(r + t) * oc + c]).sum();
        }
    }
    out
}

fn ssim_channel(x: &[f64], y: &[f64], rows: usize, cols: usize, g: &[f64]) -> f64 {
    let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u * v).collect() };
    let mx = filter_valid(x, rows, cols, g);
    let my = filter_valid(y, rows, cols, g);
    let mxx = filter_valid(&prod(x, x), rows, cols, g);
    let myy = filter_valid(&prod(y, y), rows, cols, g);
    let mxy = filter_valid(&prod(x, y), rows, cols, g);
    let n = mx.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = mxx[i] - ux * ux;
            let vy = myy[i] - uy * uy;
            let cxy = mxy[i] - ux * uy;
            ((2.0 * ux * uy + C1) * (2.0 * cxy + C2)) / ((ux * ux + uy * uy + C1) * (vx + vy + C2))
        })
        .sum();
    total / n as f64
}

/// Single-scale SSIM (11×11 Gaussian window, std 1.5), averaged over channels.
pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    same_shape(a, b)?;
    let (rows, cols) = a.shape();
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::shape(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {rows}x{cols}"
        )));
    }
    let g = gaussian_window();
    let sum: f64 = a
        .channels()
        .iter()
        .zip(b.channels())
        .map(|(x, y)| ssim_channel(x, y, rows, cols, &g))
        .sum();
    Ok(sum / 3.0)
}

/// Adds i.i.d. `N(0, sigma²)` samples to every channel of every pixel, then clamps.
///
/// Samples are drawn from a ChaCha8 stream seeded with `seed`, in row-major
/// pixel order with R, G, B interleaved.
pub fn add_gaussian_noise(img: &RgbImage, sigma: f64, seed: u64) -> Result<RgbImage> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Parameter(format!("noise sigma must be finite and nonnegative, got {sigma}")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RgbImage::from_fn(img.height(), img.width(), |r, c| {
        img.pixel(r, c)
            .map(|v| (v + normal.sample(&mut rng)).clamp(0.0, PEAK))
    })
}
