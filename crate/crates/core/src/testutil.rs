use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::QuaternionMatrix;
use crate::quaternion::Quaternion;
use crate::qsvd::qsvd;
use crate::tensor::QuaternionTensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quaternion(r: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    )
}

pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> QuaternionMatrix {
    QuaternionMatrix::from_fn(rows, cols, |_, _| random_quaternion(r))
}

pub fn random_tensor(r: &mut impl Rng, dims: &[usize]) -> QuaternionTensor {
    QuaternionTensor::from_fn(dims, |_| random_quaternion(r)).unwrap()
}

pub fn random_unitary(r: &mut impl Rng, n: usize) -> QuaternionMatrix {
    qsvd(&random_matrix(r, n, n)).unwrap().u
}
