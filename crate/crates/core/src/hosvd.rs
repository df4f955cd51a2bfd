//! Quaternion higher-order SVD.
//!
//! Modes are processed in the caller's order (descending `L, …, 1` for the
//! full decomposition). Each factor is the left singular basis of the
//! current unfolding, and the tensor is multiplied on that mode by the
//! factor's conjugate transpose before the next mode is processed. What is
//! left after the last mode is the core, so
//! `T = S ×₁ U₁ ×₂ U₂ ⋯ ×_L U_L` with the products taken in ascending mode
//! order.
//!
//! The core's slice norms along every decomposed mode equal the singular
//! values captured at that mode's stage and are therefore nonincreasing.
//! Only mode-1 slices are mutually orthogonal in general; quaternion
//! non-commutativity breaks orthogonality for the other modes.

use crate::error::{Error, Result};
use crate::matrix::QuaternionMatrix;
use crate::qsvd::left_singular_vectors;
use crate::quaternion::Quaternion;
use crate::tensor::{check_mode, QuaternionTensor};

/// Relative cutoff for [`QhosvdFactors::rank`].
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct QhosvdFactors {
    pub core: QuaternionTensor,
    /// One unitary `N_l × N_l` factor per entry of `modes`, same order.
    pub factors: Vec<QuaternionMatrix>,
    /// Decomposed modes (1-based) in processing order.
    pub modes: Vec<usize>,
    /// Stage singular values per decomposed mode, zero-padded to `N_l`.
    pub mode_singular_values: Vec<Vec<f64>>,
}

impl QhosvdFactors {
    fn position(&self, mode: usize) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    pub fn factor(&self, mode: usize) -> Option<&QuaternionMatrix> {
        self.position(mode).map(|i| &self.factors[i])
    }

    pub fn singular_values(&self, mode: usize) -> Option<&[f64]> {
        self.position(mode).map(|i| self.mode_singular_values[i].as_slice())
    }

    /// Number of mode singular values above `RANK_TOLERANCE · σ₁`.
    pub fn rank(&self, mode: usize) -> Option<usize> {
        let s = self.singular_values(mode)?;
        let cutoff = RANK_TOLERANCE * s.first().copied().unwrap_or(0.0);
        Some(s.iter().filter(|&&v| v > cutoff).count())
    }
}

/// Full decomposition order `(L, L−1, …, 1)`.
pub fn full_modes(order: usize) -> Vec<usize> {
    (1..=order).rev().collect()
}

pub fn qhosvd(t: &QuaternionTensor, modes: &[usize]) -> Result<QhosvdFactors> {
    if t.is_empty() {
        return Err(Error::shape("empty tensor"));
    }
    if modes.is_empty() {
        return Err(Error::Mode("no modes to decompose".into()));
    }
    for (i, &m) in modes.iter().enumerate() {
        check_mode(m, t.order())?;
        if modes[..i].contains(&m) {
            return Err(Error::Mode(format!("mode {m} repeated in {modes:?}")));
        }
    }

    let mut work = t.clone();
    let mut factors = Vec::with_capacity(modes.len());
    let mut mode_singular_values = Vec::with_capacity(modes.len());
    for &mode in modes {
        let (u, mut sigma) = left_singular_vectors(&work.unfold(mode)?)?;
        sigma.resize(t.dims()[mode - 1], 0.0);
        work = work.mode_product(mode, &u.conj_transpose())?;
        factors.push(u);
        mode_singular_values.push(sigma);
    }
    Ok(QhosvdFactors {
        core: work,
        factors,
        modes: modes.to_vec(),
        mode_singular_values,
    })
}

/// `core ×_m U_m` over the decomposed modes in ascending order.
pub fn reconstruct(f: &QhosvdFactors) -> Result<QuaternionTensor> {
    if f.factors.len() != f.modes.len() {
        return Err(Error::shape(format!(
            "{} factors for {} modes",
            f.factors.len(),
            f.modes.len()
        )));
    }
    let mut order: Vec<usize> = (0..f.modes.len()).collect();
    order.sort_by_key(|&i| f.modes[i]);
    let mut out = f.core.clone();
    for i in order {
        let mode = f.modes[i];
        check_mode(mode, out.order())?;
        let n = out.dims()[mode - 1];
        let u = &f.factors[i];
        if u.shape() != (n, n) {
            return Err(Error::shape(format!(
                "mode-{mode} factor is {}x{}, core extent is {n}",
                u.rows(),
                u.cols()
            )));
        }
        out = out.mode_product(mode, u)?;
    }
    Ok(out)
}

/// Zeroes every entry whose modulus is below `tau`; survivors are untouched.
pub fn hard_threshold_core(s: &QuaternionTensor, tau: f64) -> Result<QuaternionTensor> {
    if !(tau >= 0.0) {
        return Err(Error::Parameter(format!("threshold must be nonnegative, got {tau}")));
    }
    let mut out = s.clone();
    for q in out.entries_mut() {
        if q.modulus() < tau {
            *q = Quaternion::ZERO;
        }
    }
    Ok(out)
}
