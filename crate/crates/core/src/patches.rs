//! Sliding-window patch extraction and overlap-averaged aggregation.

use crate::error::{Error, Result};
use crate::matrix::QuaternionMatrix;

/// Anchors `0, stride, 2·stride, …` that fit, plus a final anchor clamped to
/// `extent − size` so the last window touches the border.
pub fn axis_anchors(extent: usize, size: usize, stride: usize) -> Result<Vec<usize>> {
    if size == 0 || size > extent {
        return Err(Error::shape(format!("patch extent {size} does not fit canvas extent {extent}")));
    }
    if stride == 0 {
        return Err(Error::Parameter("stride must be positive".into()));
    }
    let last = extent - size;
    let mut out: Vec<usize> = (0..=last).step_by(stride).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    Ok(out)
}

/// Row-major `(top, left)` anchors covering a `rows × cols` canvas.
pub fn patch_anchors(
    rows: usize,
    cols: usize,
    patch: (usize, usize),
    stride: (usize, usize),
) -> Result<Vec<(usize, usize)>> {
    let tops = axis_anchors(rows, patch.0, stride.0)?;
    let lefts = axis_anchors(cols, patch.1, stride.1)?;
    Ok(tops.iter().flat_map(|&t| lefts.iter().map(move |&l| (t, l))).collect())
}

#[derive(Clone, Debug)]
pub struct PatchGrid {
    pub patch_rows: usize,
    pub patch_cols: usize,
    pub positions: Vec<(usize, usize)>,
    pub patches: Vec<QuaternionMatrix>,
    pub canvas_dims: (usize, usize),
}

impl PatchGrid {
    /// Same anchors with new patch contents.
    pub fn with_patches(&self, patches: Vec<QuaternionMatrix>) -> Result<Self> {
        if patches.len() != self.positions.len() {
            return Err(Error::shape(format!(
                "{} patches for {} anchors",
                patches.len(),
                self.positions.len()
            )));
        }
        Ok(Self { patches, ..self.clone_layout() })
    }

    fn clone_layout(&self) -> Self {
        Self {
            patch_rows: self.patch_rows,
            patch_cols: self.patch_cols,
            positions: self.positions.clone(),
            patches: Vec::new(),
            canvas_dims: self.canvas_dims,
        }
    }
}

pub fn extract_patches(q: &QuaternionMatrix, size: (usize, usize), stride: usize) -> Result<PatchGrid> {
    extract_patches_strided(q, size, (stride, stride))
}

/// Like [`extract_patches`] with separate row and column strides.
pub fn extract_patches_strided(
    q: &QuaternionMatrix,
    size: (usize, usize),
    stride: (usize, usize),
) -> Result<PatchGrid> {
    let positions = patch_anchors(q.rows(), q.cols(), size, stride)?;
    let patches = positions
        .iter()
        .map(|&(t, l)| q.block(t, l, size.0, size.1))
        .collect::<Result<_>>()?;
    Ok(PatchGrid {
        patch_rows: size.0,
        patch_cols: size.1,
        positions,
        patches,
        canvas_dims: q.shape(),
    })
}

/// Running sum and coverage count over a canvas.
#[derive(Clone, Debug)]
pub struct Accumulator {
    sum: QuaternionMatrix,
    count: Vec<u32>,
}

impl Accumulator {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { sum: QuaternionMatrix::zeros(rows, cols), count: vec![0; rows * cols] }
    }

    pub fn add(&mut self, top: usize, left: usize, patch: &QuaternionMatrix) -> Result<()> {
        let (rows, cols) = self.sum.shape();
        let (pr, pc) = patch.shape();
        if top + pr > rows || left + pc > cols {
            return Err(Error::shape(format!(
                "{pr}x{pc} patch at ({top},{left}) exceeds {rows}x{cols} canvas"
            )));
        }
        let (sw, sx, sy, sz) = self.sum.planes_mut();
        let (w, x, y, z) = patch.planes();
        for r in 0..pr {
            for c in 0..pc {
                let d = (top + r) * cols + left + c;
                let s = r * pc + c;
                sw[d] += w[s];
                sx[d] += x[s];
                sy[d] += y[s];
                sz[d] += z[s];
                self.count[d] += 1;
            }
        }
        Ok(())
    }

    pub fn coverage(&self) -> &[u32] {
        &self.count
    }

    /// Divides every entry by its coverage count.
    pub fn finish(mut self) -> Result<QuaternionMatrix> {
        let cols = self.sum.cols();
        if let Some(i) = self.count.iter().position(|&c| c == 0) {
            return Err(Error::Integrity(format!("canvas entry ({}, {}) is not covered", i / cols, i % cols)));
        }
        let (w, x, y, z) = self.sum.planes_mut();
        for (i, &c) in self.count.iter().enumerate() {
            let inv = f64::from(c);
            w[i] /= inv;
            x[i] /= inv;
            y[i] /= inv;
            z[i] /= inv;
        }
        Ok(self.sum)
    }
}

pub fn coverage_counts(grid: &PatchGrid) -> Vec<u32> {
    let (rows, cols) = grid.canvas_dims;
    let mut count = vec![0; rows * cols];
    for &(t, l) in &grid.positions {
        for r in t..t + grid.patch_rows {
            for c in l..l + grid.patch_cols {
                count[r * cols + c] += 1;
            }
        }
    }
    count
}

pub fn aggregate_patches(grid: &PatchGrid) -> Result<QuaternionMatrix> {
    if grid.patches.len() != grid.positions.len() {
        return Err(Error::Integrity(format!(
            "{} patches for {} anchors",
            grid.patches.len(),
            grid.positions.len()
        )));
    }
    let mut acc = Accumulator::new(grid.canvas_dims.0, grid.canvas_dims.1);
    for (&(t, l), p) in grid.positions.iter().zip(&grid.patches) {
        if p.shape() != (grid.patch_rows, grid.patch_cols) {
            return Err(Error::shape(format!(
                "patch is {}x{}, grid expects {}x{}",
                p.rows(),
                p.cols(),
                grid.patch_rows,
                grid.patch_cols
            )));
        }
        acc.add(t, l, p)?;
    }
    acc.finish()
}
