//! Quaternion linear algebra and the quaternion higher-order SVD (QHOSVD),
//! with multi-focus color image fusion and nonlocal color image denoising
//! built on top of it.
//!
//! Color pixels are pure quaternions `R·i + G·j + B·k`; an image is a
//! [`QuaternionMatrix`] and a stack of patches is a [`QuaternionTensor`].

// Negated comparisons are NaN-rejecting parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod denoise;
pub mod error;
pub mod fusion;
pub mod hosvd;
pub mod matrix;
pub mod metrics;
pub mod patches;
pub mod qsvd;
pub mod quaternion;
pub mod rgb;
pub mod tensor;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};

pub use matrix::{norms_and_inner, QuaternionMatrix};
pub use qsvd::{complex_adjoint, qsvd, QsvdResult};
pub use quaternion::Quaternion;
pub use hosvd::{hard_threshold_core, qhosvd, reconstruct, QhosvdFactors};
pub use rgb::{decode, encode_rgb, read_image, write_image, RgbImage};

pub use tensor::{kronecker, QuaternionTensor};
