#![allow(dead_code)]

pub mod blur;

use qhosvd::{qsvd, Quaternion, QuaternionMatrix, QuaternionTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn quaternion(r: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    )
}

pub fn matrix(r: &mut impl Rng, rows: usize, cols: usize) -> QuaternionMatrix {
    QuaternionMatrix::from_fn(rows, cols, |_, _| quaternion(r))
}

pub fn tensor(r: &mut impl Rng, dims: &[usize]) -> QuaternionTensor {
    QuaternionTensor::from_fn(dims, |_| quaternion(r)).unwrap()
}

pub fn unitary(r: &mut impl Rng, n: usize) -> QuaternionMatrix {
    let u = qsvd(&matrix(r, n, n)).unwrap().u;
    assert!(u.unitarity_residual() < 1e-12);
    u
}

/// Mode product straight from the entry-wise sum, factor on the left.
pub fn mode_product_by_definition(t: &QuaternionTensor, mode: usize, u: &QuaternionMatrix) -> QuaternionTensor {
    let k = mode - 1;
    let mut dims = t.dims().to_vec();
    dims[k] = u.rows();
    QuaternionTensor::from_fn(&dims, |idx| {
        let mut src = idx.to_vec();
        let mut acc = Quaternion::ZERO;
        for n in 0..t.dims()[k] {
            src[k] = n;
            acc += u.get(idx[k], n) * t.get(&src);
        }
        acc
    })
    .unwrap()
}

/// Block Kronecker product with `a_ij · B` blocks.
pub fn kron(a: &QuaternionMatrix, b: &QuaternionMatrix) -> QuaternionMatrix {
    let (br, bc) = b.shape();
    QuaternionMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| a.get(r / br, c / bc) * b.get(r % br, c % bc))
}
