//! Multi-focus color image fusion.
//!
//! Aligned patches from the `K` sources are stacked into an `M₁×M₂×K`
//! tensor. A partial QHOSVD over modes (2, 1) gives `U₁`, `U₂` and a core
//! whose frontal slices are the features of the individual patches. The
//! feature with the largest L1 norm is kept (the mean when all norms tie)
//! and mapped back through the factors; overlapping fused patches are
//! averaged.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hosvd::{qhosvd, QhosvdFactors};
use crate::matrix::QuaternionMatrix;
use crate::patches::{aggregate_patches, extract_patches_strided, PatchGrid};
use crate::rgb::{decode, encode_rgb, RgbImage};
use crate::tensor::QuaternionTensor;

/// Modes decomposed for each patch stack, in processing order.
pub const FUSION_MODES: [usize; 2] = [2, 1];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FusionConfig {
    pub patch_rows: usize,
    pub patch_cols: usize,
    pub overlap: usize,
    pub tie_tolerance: f64,
    /// Accept a single source and pass it through the pipeline.
    pub allow_single_source: bool,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self { patch_rows: 25, patch_cols: 25, overlap: 6, tie_tolerance: 1e-12, allow_single_source: false }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patch_rows == 0 || self.patch_cols == 0 {
            return Err(Error::Parameter("patch extents must be positive".into()));
        }
        if self.overlap >= self.patch_rows.min(self.patch_cols) {
            return Err(Error::Parameter(format!(
                "overlap {} must be smaller than the patch extents {}x{}",
                self.overlap, self.patch_rows, self.patch_cols
            )));
        }
        if !(self.tie_tolerance >= 0.0) {
            return Err(Error::Parameter(format!("tie tolerance must be nonnegative, got {}", self.tie_tolerance)));
        }
        Ok(())
    }

    /// `(patch_rows − overlap, patch_cols − overlap)`.
    pub fn stride(&self) -> (usize, usize) {
        (self.patch_rows - self.overlap, self.patch_cols - self.overlap)
    }
}

/// The `d`-th patch of every source, one frontal slice per source.
#[derive(Clone, Debug)]
pub struct PatchStack {
    pub tensor: QuaternionTensor,
    pub source_count: usize,
}

impl PatchStack {
    pub fn new(patches: &[QuaternionMatrix]) -> Result<Self> {
        Ok(Self { tensor: QuaternionTensor::from_frontal_slices(patches)?, source_count: patches.len() })
    }
}

/// Which core feature a group keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    /// 0-based frontal slice index.
    Slice(usize),
    /// Entrywise mean of all slices.
    Mean,
}

impl Selection {
    pub fn apply(self, core: &QuaternionTensor) -> Result<QuaternionMatrix> {
        check_order3(core)?;
        match self {
            Selection::Slice(k) => core.frontal_slice(k),
            Selection::Mean => {
                let k = core.dims()[2];
                let mut acc = core.frontal_slice(0)?;
                for s in 1..k {
                    acc = acc.add(&core.frontal_slice(s)?)?;
                }
                Ok(acc.scale(1.0 / k as f64))
            }
        }
    }
}

fn check_order3(core: &QuaternionTensor) -> Result<()> {
    if core.order() != 3 {
        return Err(Error::shape(format!("expected an order-3 tensor, got order {}", core.order())));
    }
    Ok(())
}

/// L1 norm of every frontal slice.
pub fn slice_l1_norms(core: &QuaternionTensor) -> Result<Vec<f64>> {
    check_order3(core)?;
    (0..core.dims()[2]).map(|k| Ok(core.frontal_slice(k)?.l1_norm())).collect()
}

/// Largest L1 norm wins (first index on partial ties); the mean is used when
/// all norms agree within `tie_tolerance` relative to the largest.
pub fn select_feature(core: &QuaternionTensor, tie_tolerance: f64) -> Result<Selection> {
    let norms = slice_l1_norms(core)?;
    let (mut best, mut max, mut min) = (0, norms[0], norms[0]);
    for (k, &n) in norms.iter().enumerate().skip(1) {
        if n > max {
            best = k;
            max = n;
        }
        min = min.min(n);
    }
    if max - min <= tie_tolerance * max {
        Ok(Selection::Mean)
    } else {
        Ok(Selection::Slice(best))
    }
}

pub fn select_coefficients(core: &QuaternionTensor, tie_tolerance: f64) -> Result<QuaternionMatrix> {
    select_feature(core, tie_tolerance)?.apply(core)
}

/// `(U₂·(U₁·S)^T)^T` with plain transposes.
pub fn reconstruct_feature(factors: &QhosvdFactors, feature: &QuaternionMatrix) -> Result<QuaternionMatrix> {
    let missing = |m| Error::Mode(format!("mode {m} was not decomposed"));
    let u1 = factors.factor(1).ok_or_else(|| missing(1))?;
    let u2 = factors.factor(2).ok_or_else(|| missing(2))?;
    Ok(u2.matmul(&u1.matmul(feature)?.transpose())?.transpose())
}

pub fn decompose_stack(stack: &PatchStack) -> Result<QhosvdFactors> {
    qhosvd(&stack.tensor, &FUSION_MODES)
}

pub fn fuse_group(stack: &PatchStack, cfg: &FusionConfig) -> Result<QuaternionMatrix> {
    let factors = decompose_stack(stack)?;
    let feature = select_coefficients(&factors.core, cfg.tie_tolerance)?;
    reconstruct_feature(&factors, &feature)
}

/// Fuses encoded sources; all must share one shape.
pub fn fuse_quaternion(sources: &[QuaternionMatrix], cfg: &FusionConfig) -> Result<QuaternionMatrix> {
    cfg.validate()?;
    let min_sources = if cfg.allow_single_source { 1 } else { 2 };
    if sources.len() < min_sources {
        return Err(Error::Parameter(format!(
            "fusion needs at least {min_sources} source(s), got {}",
            sources.len()
        )));
    }
    let shape = sources[0].shape();
    if let Some(bad) = sources.iter().find(|s| s.shape() != shape) {
        return Err(Error::shape(format!(
            "source extents differ: {}x{} vs {}x{}",
            shape.0,
            shape.1,
            bad.rows(),
            bad.cols()
        )));
    }

    let size = (cfg.patch_rows, cfg.patch_cols);
    let grids = sources
        .iter()
        .map(|s| extract_patches_strided(s, size, cfg.stride()))
        .collect::<Result<Vec<PatchGrid>>>()?;
    let fused = (0..grids[0].positions.len())
        .into_par_iter()
        .map(|d| {
            let patches: Vec<_> = grids.iter().map(|g| g.patches[d].clone()).collect();
            fuse_group(&PatchStack::new(&patches)?, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    aggregate_patches(&grids[0].with_patches(fused)?)
}

pub fn fuse(sources: &[RgbImage], cfg: &FusionConfig) -> Result<RgbImage> {
    let encoded: Vec<_> = sources.iter().map(encode_rgb).collect();
    decode(&fuse_quaternion(&encoded, cfg)?)
}
