//! Complex adjoint representation of quaternion matrices.
//!
//! Writing `Q = A + B·j` with complex `A = Q0 + Q1·i` and `B = Q2 + Q3·i`,
//! the adjoint is the `2M × 2N` block matrix `[[A, B], [−conj(B), conj(A)]]`.
//! The map is an injective ring homomorphism, and every singular value of `Q`
//! appears twice among those of its adjoint.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::QuaternionMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self.get(i, p);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(p, j);
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

pub fn complex_adjoint(q: &QuaternionMatrix) -> ComplexMatrix {
    let (m, n) = q.shape();
    let mut out = ComplexMatrix::zeros(2 * m, 2 * n);
    for r in 0..m {
        for c in 0..n {
            let e = q.get(r, c);
            let a = Complex64::new(e.w, e.x);
            let b = Complex64::new(e.y, e.z);
            out.set(r, c, a);
            out.set(r, n + c, b);
            out.set(m + r, c, -b.conj());
            out.set(m + r, n + c, a.conj());
        }
    }
    out
}
