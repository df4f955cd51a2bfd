//! Dense quaternion matrices.
//!
//! Entries are kept as four row-major real planes (`w`, `x`, `y`, `z`) so the
//! product kernel runs over contiguous `f64` rows. Scalars are assembled on
//! access.

use std::fmt;

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

#[derive(Clone, PartialEq)]
pub struct QuaternionMatrix {
    rows: usize,
    cols: usize,
    w: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl QuaternionMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        Self {
            rows,
            cols,
            w: vec![0.0; n],
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.w[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Builds a matrix from row-major scalars.
    pub fn from_scalars(rows: usize, cols: usize, entries: &[Quaternion]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let mut m = Self::zeros(rows, cols);
        for (i, q) in entries.iter().enumerate() {
            m.w[i] = q.w;
            m.x[i] = q.x;
            m.y[i] = q.y;
            m.z[i] = q.z;
        }
        Ok(m)
    }

    /// Builds a matrix from nested rows; all rows must share one length.
    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("ragged rows"));
        }
        let flat: Vec<Quaternion> = rows.iter().flatten().copied().collect();
        Self::from_scalars(rows.len(), cols, &flat)
    }

    /// Real matrix from row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                values.len()
            )));
        }
        let mut m = Self::zeros(rows, cols);
        m.w.copy_from_slice(values);
        Ok(m)
    }

    /// Assembles a matrix from its four component planes.
    pub fn from_planes(
        rows: usize,
        cols: usize,
        w: Vec<f64>,
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
    ) -> Result<Self> {
        let n = rows * cols;
        if w.len() != n || x.len() != n || y.len() != n || z.len() != n {
            return Err(Error::shape(format!("plane lengths do not match {rows}x{cols}")));
        }
        Ok(Self { rows, cols, w, x, y, z })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Component planes `(w, x, y, z)`, row-major.
    pub fn planes(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        (&self.w, &self.x, &self.y, &self.z)
    }

    pub fn planes_mut(&mut self) -> (&mut [f64], &mut [f64], &mut [f64], &mut [f64]) {
        (&mut self.w, &mut self.x, &mut self.y, &mut self.z)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        let i = r * self.cols + c;
        Quaternion::new(self.w[i], self.x[i], self.y[i], self.z[i])
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        let i = r * self.cols + c;
        self.w[i] = q.w;
        self.x[i] = q.x;
        self.y[i] = q.y;
        self.z[i] = q.z;
    }

    /// Row-major scalars.
    pub fn to_scalars(&self) -> Vec<Quaternion> {
        (0..self.rows * self.cols)
            .map(|i| Quaternion::new(self.w[i], self.x[i], self.y[i], self.z[i]))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Quaternion> + '_ {
        (0..self.rows * self.cols).map(move |i| Quaternion::new(self.w[i], self.x[i], self.y[i], self.z[i]))
    }

    /// True when every entry has zero real part.
    pub fn is_pure(&self) -> bool {
        self.w.iter().all(|&v| v == 0.0)
    }

    /// Largest absolute real part.
    pub fn max_real_part(&self) -> f64 {
        self.w.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self · other`, with each scalar product taken as `a[m,p]·b[p,n]`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let row = i * n..(i + 1) * n;
            let cw = &mut out.w[row.clone()];
            let cx = &mut out.x[row.clone()];
            let cy = &mut out.y[row.clone()];
            let cz = &mut out.z[row];
            for p in 0..k {
                let a = i * k + p;
                let (aw, ax, ay, az) = (self.w[a], self.x[a], self.y[a], self.z[a]);
                if aw == 0.0 && ax == 0.0 && ay == 0.0 && az == 0.0 {
                    continue;
                }
                let brow = p * n..(p + 1) * n;
                let bw = &other.w[brow.clone()];
                let bx = &other.x[brow.clone()];
                let by = &other.y[brow.clone()];
                let bz = &other.z[brow];
                // Hamilton sign table, one real plane product per term.
                for j in 0..n {
                    cw[j] += aw * bw[j] - ax * bx[j] - ay * by[j] - az * bz[j];
                    cx[j] += aw * bx[j] + ax * bw[j] + ay * bz[j] - az * by[j];
                    cy[j] += aw * by[j] - ax * bz[j] + ay * bw[j] + az * bx[j];
                    cz[j] += aw * bz[j] + ax * by[j] - ay * bx[j] + az * bw[j];
                }
            }
        }
        Ok(out)
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let s = r * self.cols + c;
                let d = c * self.rows + r;
                out.w[d] = self.w[s];
                out.x[d] = self.x[s];
                out.y[d] = self.y[s];
                out.z[d] = self.z[s];
            }
        }
        out
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for v in out.x.iter_mut().chain(out.y.iter_mut()).chain(out.z.iter_mut()) {
            *v = -*v;
        }
        out
    }

    /// Conjugate transpose `A^H`.
    pub fn conj_transpose(&self) -> Self {
        let mut out = self.transpose();
        for v in out.x.iter_mut().chain(out.y.iter_mut()).chain(out.z.iter_mut()) {
            *v = -*v;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let n2 = self.frobenius_norm_sqr();
        if n2.is_normal() && n2 < f64::MAX {
            return n2.sqrt();
        }
        let planes = || self.w.iter().chain(&self.x).chain(&self.y).chain(&self.z);
        let scale = planes().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return scale;
        }
        scale * planes().map(|v| (v / scale) * (v / scale)).sum::<f64>().sqrt()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.w
            .iter()
            .chain(&self.x)
            .chain(&self.y)
            .chain(&self.z)
            .map(|v| v * v)
            .sum()
    }

    /// Sum of entry moduli.
    pub fn l1_norm(&self) -> f64 {
        self.iter().map(Quaternion::modulus).sum()
    }

    /// `⟨A, B⟩ = Σ a_mn · conj(b_mn)`.
    pub fn inner(&self, other: &Self) -> Result<Quaternion> {
        self.check_same_shape(other)?;
        Ok(self.iter().zip(other.iter()).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_planes(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_planes(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out
            .w
            .iter_mut()
            .chain(out.x.iter_mut())
            .chain(out.y.iter_mut())
            .chain(out.z.iter_mut())
        {
            *v *= s;
        }
        out
    }

    /// Largest absolute component difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .w
            .iter()
            .zip(&other.w)
            .chain(self.x.iter().zip(&other.x))
            .chain(self.y.iter().zip(&other.y))
            .chain(self.z.iter().zip(&other.z))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `‖A − B‖_F`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    /// `‖A^H A − I‖_F`; zero for unitary `A`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self
            .conj_transpose()
            .matmul(self)
            .expect("A^H A is always conformable");
        gram.sub(&Self::identity(self.cols))
            .expect("square gram")
            .frobenius_norm()
    }

    /// Copies the `rows × cols` block anchored at `(top, left)`.
    pub fn block(&self, top: usize, left: usize, rows: usize, cols: usize) -> Result<Self> {
        if top + rows > self.rows || left + cols > self.cols {
            return Err(Error::shape(format!(
                "{rows}x{cols} block at ({top},{left}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            let s = (top + r) * self.cols + left;
            let d = r * cols;
            out.w[d..d + cols].copy_from_slice(&self.w[s..s + cols]);
            out.x[d..d + cols].copy_from_slice(&self.x[s..s + cols]);
            out.y[d..d + cols].copy_from_slice(&self.y[s..s + cols]);
            out.z[d..d + cols].copy_from_slice(&self.z[s..s + cols]);
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn zip_planes(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_shape(other)?;
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&p, &q)| f(p, q)).collect::<Vec<_>>();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            w: zip(&self.w, &other.w),
            x: zip(&self.x, &other.x),
            y: zip(&self.y, &other.y),
            z: zip(&self.z, &other.z),
        })
    }
}

impl fmt::Debug for QuaternionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QuaternionMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for c in 0..self.cols {
                write!(f, " {}", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Frobenius norm, L1 norm, and the inner product `⟨A, B⟩`.
pub fn norms_and_inner(a: &QuaternionMatrix, b: &QuaternionMatrix) -> Result<(f64, f64, Quaternion)> {
    let inner = a.inner(b)?;
    Ok((a.frobenius_norm(), a.l1_norm(), inner))
}
