//! Quaternion singular value decomposition `Q = U Σ V^H`.
//!
//! The input is reduced to a real nonnegative upper-bidiagonal matrix by
//! quaternion Householder reflectors, each followed by a unit-quaternion
//! phase on its leading row/column so the produced entry is real. A real
//! implicit-shift QR pass then diagonalizes the bidiagonal, and the
//! quaternion factors are the accumulated reflectors times the real
//! rotations.

mod adjoint;
mod bidiagonal;

pub use adjoint::{complex_adjoint, ComplexMatrix};

use crate::error::Result;
use crate::matrix::QuaternionMatrix;
use crate::quaternion::Quaternion;

/// Sweep budget per unit of `min(M, N)` for the bidiagonal QR.
pub const SWEEPS_PER_DIMENSION: usize = 30;

#[derive(Clone, Debug)]
pub struct QsvdResult {
    /// `M × M` unitary.
    pub u: QuaternionMatrix,
    /// `min(M, N)` values, descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// `N × N` unitary.
    pub v: QuaternionMatrix,
}

impl QsvdResult {
    /// `U Σ V^H` rebuilt from the factors.
    pub fn reconstruct(&self) -> QuaternionMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut us = QuaternionMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for r in 0..m {
                us.set(r, k, self.u.get(r, k).scale(s));
            }
        }
        us.matmul(&self.v.conj_transpose())
            .expect("factor shapes agree by construction")
    }
}

/// Full QSVD with both unitary factors.
pub fn qsvd(q: &QuaternionMatrix) -> Result<QsvdResult> {
    let (u, singular_values, v) = decompose(q, true, true)?;
    Ok(QsvdResult {
        u: u.expect("requested"),
        singular_values,
        v: v.expect("requested"),
    })
}

/// Left singular vectors (`M × M` unitary) and singular values only.
pub fn left_singular_vectors(q: &QuaternionMatrix) -> Result<(QuaternionMatrix, Vec<f64>)> {
    let (u, s, _) = decompose(q, true, false)?;
    Ok((u.expect("requested"), s))
}

/// Singular values only.
pub fn singular_values(q: &QuaternionMatrix) -> Result<Vec<f64>> {
    Ok(decompose(q, false, false)?.1)
}

type Parts = (Option<QuaternionMatrix>, Vec<f64>, Option<QuaternionMatrix>);

fn decompose(q: &QuaternionMatrix, want_u: bool, want_v: bool) -> Result<Parts> {
    if q.rows() >= q.cols() {
        decompose_tall(q, want_u, want_v)
    } else {
        // Q^H = U' Σ V'^H  ⇒  Q = V' Σ U'^H
        let (u, s, v) = decompose_tall(&q.conj_transpose(), want_v, want_u)?;
        Ok((v, s, u))
    }
}

/// Row-major scalar workspace.
struct Work {
    cols: usize,
    data: Vec<Quaternion>,
}

impl Work {
    fn from_matrix(m: &QuaternionMatrix) -> Self {
        Self { cols: m.cols(), data: m.to_scalars() }
    }

    fn identity(n: usize) -> Self {
        let mut data = vec![Quaternion::ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Quaternion::ONE;
        }
        Self { cols: n, data }
    }

    fn rows(&self) -> usize {
        self.data.len() / self.cols.max(1)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> Quaternion {
        self.data[r * self.cols + c]
    }

    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut Quaternion {
        &mut self.data[r * self.cols + c]
    }

    fn into_matrix(self) -> QuaternionMatrix {
        let rows = self.rows();
        QuaternionMatrix::from_scalars(rows, self.cols, &self.data).expect("consistent workspace")
    }
}

/// Euclidean norm, scaled against underflow and overflow.
fn vector_norm(x: &[Quaternion]) -> f64 {
    let scale = x
        .iter()
        .flat_map(|q| [q.w, q.x, q.y, q.z])
        .fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * x.iter().map(|&q| (q / scale).norm_sqr()).sum::<f64>().sqrt()
}

/// `G = D·(I − β v v^H)` with `D = diag(conj(phase), 1, …)`; maps the source
/// vector to `norm · e₁`.
struct Reflector {
    v: Vec<Quaternion>,
    beta: f64,
    phase: Quaternion,
    norm: f64,
}

impl Reflector {
    fn new(x: &[Quaternion]) -> Option<Self> {
        let norm = vector_norm(x);
        if norm == 0.0 {
            return None;
        }
        let head = x[0];
        let tail_zero = x[1..].iter().all(|q| q.is_zero());
        if tail_zero && head.x == 0.0 && head.y == 0.0 && head.z == 0.0 && head.w >= 0.0 {
            return None;
        }
        // Work with v/‖x‖ so tiny or huge columns neither underflow nor overflow.
        let head_phase = head.phase();
        let mut v: Vec<Quaternion> = x.iter().map(|&q| q / norm).collect();
        v[0] += head_phase;
        Some(Self {
            v,
            beta: 1.0 / (1.0 + head.modulus() / norm),
            phase: -head_phase,
            norm,
        })
    }

    /// `A[r0.., c0..] ← G · A[r0.., c0..]`.
    fn apply_left(&self, a: &mut Work, r0: usize, c0: usize) {
        let cols = a.cols;
        let phase_conj = self.phase.conj();
        for c in c0..cols {
            let s: Quaternion = self
                .v
                .iter()
                .enumerate()
                .map(|(p, vp)| vp.conj() * a.at(r0 + p, c))
                .sum();
            let s = s.scale(self.beta);
            for (p, vp) in self.v.iter().enumerate() {
                *a.at_mut(r0 + p, c) -= *vp * s;
            }
            let head = a.at_mut(r0, c);
            *head = phase_conj * *head;
        }
    }

    /// `A[.., c0..] ← A[.., c0..] · G^H`.
    fn apply_right_adjoint(&self, a: &mut Work, c0: usize) {
        for r in 0..a.rows() {
            let t: Quaternion = self
                .v
                .iter()
                .enumerate()
                .map(|(p, vp)| a.at(r, c0 + p) * *vp)
                .sum();
            let t = t.scale(self.beta);
            for (p, vp) in self.v.iter().enumerate() {
                *a.at_mut(r, c0 + p) -= t * vp.conj();
            }
            *a.at_mut(r, c0) *= self.phase;
        }
    }
}

fn decompose_tall(q: &QuaternionMatrix, want_u: bool, want_v: bool) -> Result<Parts> {
    let (m, n) = q.shape();
    let mut a = Work::from_matrix(q);
    let mut u = want_u.then(|| Work::identity(m));
    let mut v = want_v.then(|| Work::identity(n));
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n.saturating_sub(1)];
    // Remainders at or below this are roundoff and are zeroed instead of
    // reflected; reflectors built from subnormal data lose unitarity.
    let negligible = f64::EPSILON * q.frobenius_norm();

    for k in 0..n {
        let column: Vec<Quaternion> = (k..m).map(|r| a.at(r, k)).collect();
        if vector_norm(&column) <= negligible {
            (k..m).for_each(|r| *a.at_mut(r, k) = Quaternion::ZERO);
        }
        let column: Vec<Quaternion> = (k..m).map(|r| a.at(r, k)).collect();
        match Reflector::new(&column) {
            Some(refl) => {
                refl.apply_left(&mut a, k, k);
                if let Some(u) = u.as_mut() {
                    refl.apply_right_adjoint(u, k);
                }
                diag[k] = refl.norm;
            }
            None => diag[k] = a.at(k, k).w,
        }
        if k + 1 < n {
            // Right transform W with (row · W) = norm · e₁ᵀ, built from the
            // conjugated row so that W^H row^H is real.
            let mut row: Vec<Quaternion> = (k + 1..n).map(|c| a.at(k, c).conj()).collect();
            if vector_norm(&row) <= negligible {
                (k + 1..n).for_each(|c| *a.at_mut(k, c) = Quaternion::ZERO);
                row.fill(Quaternion::ZERO);
            }
            match Reflector::new(&row) {
                Some(refl) => {
                    refl.apply_right_adjoint(&mut a, k + 1);
                    if let Some(v) = v.as_mut() {
                        refl.apply_right_adjoint(v, k + 1);
                    }
                    sup[k] = refl.norm;
                }
                None => sup[k] = a.at(k, k + 1).w,
            }
        }
    }

    let max_sweeps = SWEEPS_PER_DIMENSION * n.max(1);
    let svd = bidiagonal::bidiagonal_svd(diag, sup, want_u, want_v, max_sweeps)?;

    let u = u.map(|u| rotate_leading_columns(u, svd.left.as_deref().expect("requested"), n));
    let v = v.map(|v| rotate_leading_columns(v, svd.right.as_deref().expect("requested"), n));
    Ok((u, svd.values, v))
}

/// Replaces the first `n` columns of `acc` by `acc[:, ..n] · rot` (`rot` real `n × n`).
fn rotate_leading_columns(mut acc: Work, rot: &[f64], n: usize) -> QuaternionMatrix {
    let cols = acc.cols;
    let mut buf = vec![Quaternion::ZERO; n];
    for r in 0..acc.rows() {
        let row = &mut acc.data[r * cols..r * cols + n];
        for (c, out) in buf.iter_mut().enumerate() {
            *out = row
                .iter()
                .enumerate()
                .map(|(k, q)| q.scale(rot[k * n + c]))
                .sum();
        }
        row.copy_from_slice(&buf);
    }
    acc.into_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_matrix, rng};

    fn check_invariants(q: &QuaternionMatrix, res: &QsvdResult) {
        assert!(res.u.unitarity_residual() <= 1e-10);
        assert!(res.v.unitarity_residual() <= 1e-10);
        assert_eq!(res.singular_values.len(), q.rows().min(q.cols()));
        assert!(res.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(res.singular_values.iter().all(|&s| s >= 0.0));
        let err = q.distance(&res.reconstruct()).unwrap();
        assert!(err / q.frobenius_norm().max(1.0) <= 1e-10, "residual {err}");
    }

    #[test]
    fn unit_imaginary_scalar() {
        let q = QuaternionMatrix::from_scalars(1, 1, &[Quaternion::I]).unwrap();
        let res = qsvd(&q).unwrap();
        assert!((res.singular_values[0] - 1.0).abs() < 1e-15);
        assert!(res.reconstruct().max_abs_diff(&q).unwrap() < 1e-15);
        check_invariants(&q, &res);
    }

    #[test]
    fn real_diagonal_is_already_decomposed() {
        let q = QuaternionMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let res = qsvd(&q).unwrap();
        assert_eq!(res.singular_values, vec![2.0, 1.0]);
        check_invariants(&q, &res);
    }

    #[test]
    fn random_shapes() {
        let mut r = rng(10);
        for &(m, n) in &[(1, 5), (5, 1), (3, 3), (4, 3), (3, 4), (10, 7), (7, 10), (16, 16)] {
            let q = random_matrix(&mut r, m, n);
            check_invariants(&q, &qsvd(&q).unwrap());
        }
    }

    #[test]
    fn rank_deficient_trailing_values_vanish() {
        let mut r = rng(11);
        let a = random_matrix(&mut r, 6, 2);
        let b = random_matrix(&mut r, 2, 5);
        let q = a.matmul(&b).unwrap();
        let res = qsvd(&q).unwrap();
        check_invariants(&q, &res);
        let f = q.frobenius_norm();
        assert!(res.singular_values[2..].iter().all(|&s| s <= 1e-10 * f));
        assert!(res.singular_values[1] > 1e-3);
    }

    #[test]
    fn constant_matrix_is_rank_one() {
        let q = QuaternionMatrix::from_fn(25, 25, |_, _| Quaternion::pure(10.0, 20.0, 30.0));
        let res = qsvd(&q).unwrap();
        check_invariants(&q, &res);
        assert!((res.singular_values[0] - q.frobenius_norm()).abs() <= 1e-10 * q.frobenius_norm());
        assert!(res.singular_values[1..].iter().all(|&s| s <= 1e-10 * q.frobenius_norm()));
    }

    #[test]
    fn extreme_scales() {
        let mut r = rng(14);
        let q = random_matrix(&mut r, 6, 4);
        let base = singular_values(&q).unwrap();
        for c in [1e-200, 1e200] {
            let scaled = singular_values(&q.scale(c)).unwrap();
            for (a, b) in base.iter().zip(&scaled) {
                assert!((a * c - b).abs() <= 1e-10 * b);
            }
        }
    }

    #[test]
    fn zero_matrix_gives_identity_factors() {
        let q = QuaternionMatrix::zeros(3, 2);
        let res = qsvd(&q).unwrap();
        assert_eq!(res.singular_values, vec![0.0, 0.0]);
        assert_eq!(res.u, QuaternionMatrix::identity(3));
        assert_eq!(res.v, QuaternionMatrix::identity(2));
    }

    #[test]
    fn positive_scaling_scales_values() {
        let mut r = rng(12);
        let q = random_matrix(&mut r, 5, 4);
        let base = singular_values(&q).unwrap();
        let scaled = singular_values(&q.scale(3.5)).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            assert!((3.5 * a - b).abs() <= 1e-10 * b);
        }
    }

    #[test]
    fn partial_requests_agree_with_full() {
        let mut r = rng(13);
        let q = random_matrix(&mut r, 4, 9);
        let full = qsvd(&q).unwrap();
        let (u, s) = left_singular_vectors(&q).unwrap();
        assert_eq!(s, full.singular_values);
        assert_eq!(u, full.u);
    }

    #[test]
    fn repeated_singular_values() {
        // unitary input: every singular value is one
        let mut r = rng(14);
        let q = qsvd(&random_matrix(&mut r, 5, 5)).unwrap().u;
        let res = qsvd(&q).unwrap();
        check_invariants(&q, &res);
        assert!(res.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }
}
