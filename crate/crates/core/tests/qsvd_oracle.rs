mod common;

use common::{matrix, rng};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use qhosvd::{qsvd, QuaternionMatrix};

/// `[[A, B], [−conj(B), conj(A)]]` for `Q = A + B·j`, built here independently.
fn adjoint(q: &QuaternionMatrix) -> DMatrix<Complex<f64>> {
    let (m, n) = q.shape();
    DMatrix::from_fn(2 * m, 2 * n, |r, c| {
        let e = q.get(r % m, c % n);
        let a = Complex::new(e.w, e.x);
        let b = Complex::new(e.y, e.z);
        match (r < m, c < n) {
            (true, true) => a,
            (true, false) => b,
            (false, true) => -b.conj(),
            (false, false) => a.conj(),
        }
    })
}

/// Adjoint singular values, sorted descending, every other one kept.
fn oracle_singular_values(q: &QuaternionMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = adjoint(q).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    for pair in s.chunks(2) {
        assert!((pair[0] - pair[1]).abs() <= 1e-9 * s[0].max(1.0), "adjoint values not paired: {pair:?}");
    }
    s.iter().step_by(2).copied().collect()
}

fn assert_matches_oracle(q: &QuaternionMatrix) {
    let ours = qsvd(q).unwrap();
    let oracle = oracle_singular_values(q);
    assert_eq!(ours.singular_values.len(), oracle.len());
    let top = oracle[0].max(f64::MIN_POSITIVE);
    for (a, b) in ours.singular_values.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-8 * top, "{a} vs {b} (shape {:?})", q.shape());
    }
    assert!(ours.u.unitarity_residual() <= 1e-10);
    assert!(ours.v.unitarity_residual() <= 1e-10);
    assert!(ours.reconstruct().distance(q).unwrap() <= 1e-10 * q.frobenius_norm().max(1.0));
}

#[test]
fn random_shapes_match_complex_adjoint() {
    let mut r = rng(2024);
    for _ in 0..40 {
        let m = rand::Rng::random_range(&mut r, 1..=32);
        let n = rand::Rng::random_range(&mut r, 1..=24);
        assert_matches_oracle(&matrix(&mut r, m, n));
    }
}

#[test]
fn rank_deficient_product_matches_complex_adjoint() {
    let mut r = rng(7);
    let q = matrix(&mut r, 12, 3).matmul(&matrix(&mut r, 3, 9)).unwrap();
    assert_matches_oracle(&q);
    let s = qsvd(&q).unwrap().singular_values;
    assert!(s[3..].iter().all(|&v| v <= 1e-10 * q.frobenius_norm()));
}

#[test]
fn singular_values_are_roots_of_gram_eigenvalues() {
    let mut r = rng(8);
    let q = matrix(&mut r, 6, 4);
    let gram = adjoint(&q.conj_transpose().matmul(&q).unwrap());
    let mut ev: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().map(|z| z.abs().sqrt()).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let s = qsvd(&q).unwrap().singular_values;
    for (i, v) in s.iter().enumerate() {
        assert!((v - ev[2 * i]).abs() <= 1e-8 * s[0]);
        assert!((v - ev[2 * i + 1]).abs() <= 1e-8 * s[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn positive_scaling_scales_singular_values(m in 1usize..10, n in 1usize..10, c in 1e-3f64..1e3, seed in any::<u64>()) {
        let q = matrix(&mut rng(seed), m, n);
        let base = qsvd(&q).unwrap().singular_values;
        let scaled = qsvd(&q.scale(c)).unwrap().singular_values;
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert!((c * a - b).abs() <= 1e-10 * c * base[0]);
        }
    }

    #[test]
    fn up_to_64_square_matches_oracle(n in 1usize..=64, seed in any::<u64>()) {
        assert_matches_oracle(&matrix(&mut rng(seed), n, n));
    }
}
