//! Dense quaternion tensors of arbitrary order.
//!
//! Entries are stored with the first index varying fastest. Modes are
//! 1-based in every public function (`1..=order`); entry indices are 0-based.
//!
//! The mode-`k` unfolding places the mode-`k` fibers in columns, with the
//! remaining indices enumerated smallest mode first. Under this ordering
//! `unfold(T ×₁ U₁ ⋯ ×_L U_L, L) = U_L ((U_{L−1} ⊗ ⋯ ⊗ U₁) · unfold(T, L)ᵀ)ᵀ`
//! holds with plain transposes.

use crate::error::{Error, Result};
use crate::matrix::QuaternionMatrix;
use crate::quaternion::Quaternion;

#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionTensor {
    dims: Vec<usize>,
    data: Vec<Quaternion>,
}

impl QuaternionTensor {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            data: vec![Quaternion::ZERO; dims.iter().product()],
        })
    }

    /// Builds a tensor from entries laid out first-index-fastest.
    pub fn from_entries(dims: &[usize], data: Vec<Quaternion>) -> Result<Self> {
        check_dims(dims)?;
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::shape(format!(
                "{} entries for dims {:?} (need {n})",
                data.len(),
                dims
            )));
        }
        Ok(Self { dims: dims.to_vec(), data })
    }

    /// Builds a tensor by evaluating `f` at every 0-based multi-index.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> Quaternion) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        let mut idx = vec![0usize; dims.len()];
        for lin in 0..t.data.len() {
            t.data[lin] = f(&idx);
            for (i, d) in idx.iter_mut().zip(dims) {
                *i += 1;
                if *i < *d {
                    break;
                }
                *i = 0;
            }
        }
        Ok(t)
    }

    /// Order-2 tensor with the same entries as `m`.
    pub fn from_matrix(m: &QuaternionMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut data = vec![Quaternion::ZERO; rows * cols];
        for c in 0..cols {
            for r in 0..rows {
                data[r + rows * c] = m.get(r, c);
            }
        }
        Self { dims: vec![rows, cols], data }
    }

    /// Inverse of [`from_matrix`](Self::from_matrix); order must be 2.
    pub fn to_matrix(&self) -> Result<QuaternionMatrix> {
        if self.order() != 2 {
            return Err(Error::shape(format!("order-{} tensor is not a matrix", self.order())));
        }
        let (rows, cols) = (self.dims[0], self.dims[1]);
        Ok(QuaternionMatrix::from_fn(rows, cols, |r, c| self.data[r + rows * c]))
    }

    /// Stacks equally sized matrices as frontal slices of an order-3 tensor.
    pub fn from_frontal_slices(slices: &[QuaternionMatrix]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::shape("no slices to stack"))?;
        let (rows, cols) = first.shape();
        let plane = rows * cols;
        let mut data = vec![Quaternion::ZERO; plane * slices.len()];
        for (k, s) in slices.iter().enumerate() {
            if s.shape() != (rows, cols) {
                return Err(Error::shape(format!(
                    "slice {k} is {}x{}, expected {rows}x{cols}",
                    s.rows(),
                    s.cols()
                )));
            }
            let (w, x, y, z) = s.planes();
            for r in 0..rows {
                for c in 0..cols {
                    let i = r * cols + c;
                    data[k * plane + r + rows * c] = Quaternion::new(w[i], x[i], y[i], z[i]);
                }
            }
        }
        Self::from_entries(&[rows, cols, slices.len()], data)
    }

    /// Frontal slice `T(:, :, k)` (0-based `k`) of an order-3 tensor.
    pub fn frontal_slice(&self, k: usize) -> Result<QuaternionMatrix> {
        if self.order() != 3 {
            return Err(Error::shape(format!("order-{} tensor has no frontal slices", self.order())));
        }
        let (rows, cols, depth) = (self.dims[0], self.dims[1], self.dims[2]);
        if k >= depth {
            return Err(Error::shape(format!("slice {k} out of {depth}")));
        }
        let base = k * rows * cols;
        Ok(QuaternionMatrix::from_fn(rows, cols, |r, c| self.data[base + r + rows * c]))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [Quaternion] {
        &mut self.data
    }

    fn linear_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len(), "index order mismatch");
        let mut lin = 0;
        let mut stride = 1;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            assert!(i < d, "index {i} out of extent {d}");
            lin += i * stride;
            stride *= d;
        }
        lin
    }

    pub fn get(&self, idx: &[usize]) -> Quaternion {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], q: Quaternion) {
        let lin = self.linear_index(idx);
        self.data[lin] = q;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::shape(format!("dims {:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(Self {
            dims: self.dims.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        })
    }

    /// `‖A − B‖_F`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    /// `(left, extent, right)`: products of extents before, at, and after `mode`.
    fn split(&self, mode: usize) -> Result<(usize, usize, usize)> {
        check_mode(mode, self.order())?;
        let k = mode - 1;
        Ok((
            self.dims[..k].iter().product(),
            self.dims[k],
            self.dims[k + 1..].iter().product(),
        ))
    }

    /// Mode-`mode` unfolding, `N_k × Π_{m≠k} N_m`.
    pub fn unfold(&self, mode: usize) -> Result<QuaternionMatrix> {
        let (left, extent, right) = self.split(mode)?;
        let cols = left * right;
        let mut w = vec![0.0; extent * cols];
        let mut x = w.clone();
        let mut y = w.clone();
        let mut z = w.clone();
        for r in 0..right {
            for n in 0..extent {
                let src = left * (n + extent * r);
                let dst = n * cols + left * r;
                for l in 0..left {
                    let q = self.data[src + l];
                    w[dst + l] = q.w;
                    x[dst + l] = q.x;
                    y[dst + l] = q.y;
                    z[dst + l] = q.z;
                }
            }
        }
        QuaternionMatrix::from_planes(extent, cols, w, x, y, z)
    }

    /// Inverse of [`unfold`](Self::unfold) for the given target extents.
    pub fn fold(m: &QuaternionMatrix, mode: usize, dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        check_mode(mode, dims.len())?;
        let k = mode - 1;
        let left: usize = dims[..k].iter().product();
        let extent = dims[k];
        let right: usize = dims[k + 1..].iter().product();
        let cols = left * right;
        if m.shape() != (extent, cols) {
            return Err(Error::shape(format!(
                "{}x{} matrix cannot fold into {:?} along mode {mode} (need {extent}x{cols})",
                m.rows(),
                m.cols(),
                dims
            )));
        }
        let (w, x, y, z) = m.planes();
        let mut data = vec![Quaternion::ZERO; extent * cols];
        for r in 0..right {
            for n in 0..extent {
                let dst = left * (n + extent * r);
                let src = n * cols + left * r;
                for l in 0..left {
                    let i = src + l;
                    data[dst + l] = Quaternion::new(w[i], x[i], y[i], z[i]);
                }
            }
        }
        Ok(Self { dims: dims.to_vec(), data })
    }

    /// `T ×_mode U`: every mode fiber left-multiplied by `U`.
    pub fn mode_product(&self, mode: usize, u: &QuaternionMatrix) -> Result<Self> {
        let (_, extent, _) = self.split(mode)?;
        if u.cols() != extent {
            return Err(Error::shape(format!(
                "{}x{} factor against mode-{mode} extent {extent}",
                u.rows(),
                u.cols()
            )));
        }
        let product = u.matmul(&self.unfold(mode)?)?;
        let mut dims = self.dims.clone();
        dims[mode - 1] = u.rows();
        Self::fold(&product, mode, &dims)
    }

    /// Frobenius norms of the sub-tensors with index `mode` fixed, one per index.
    pub fn slice_norms(&self, mode: usize) -> Result<Vec<f64>> {
        let (left, extent, right) = self.split(mode)?;
        let mut norms = vec![0.0; extent];
        for r in 0..right {
            for (n, acc) in norms.iter_mut().enumerate() {
                let base = left * (n + extent * r);
                *acc += self.data[base..base + left].iter().map(|q| q.norm_sqr()).sum::<f64>();
            }
        }
        Ok(norms.into_iter().map(f64::sqrt).collect())
    }

    /// Inner product `⟨S_{mode=α}, S_{mode=β}⟩ = Σ s_α · conj(s_β)` (0-based α, β).
    pub fn slice_inner(&self, mode: usize, alpha: usize, beta: usize) -> Result<Quaternion> {
        let (left, extent, right) = self.split(mode)?;
        if alpha >= extent || beta >= extent {
            return Err(Error::shape(format!("slice index out of extent {extent}")));
        }
        let mut acc = Quaternion::ZERO;
        for r in 0..right {
            let a = left * (alpha + extent * r);
            let b = left * (beta + extent * r);
            for l in 0..left {
                acc += self.data[a + l] * self.data[b + l].conj();
            }
        }
        Ok(acc)
    }
}

/// Block Kronecker product: block `(i, j)` is `a_ij` left-multiplying `B`.
pub fn kronecker(a: &QuaternionMatrix, b: &QuaternionMatrix) -> QuaternionMatrix {
    let (am, an) = a.shape();
    let (bm, bn) = b.shape();
    QuaternionMatrix::from_fn(am * bm, an * bn, |r, c| a.get(r / bm, c / bn) * b.get(r % bm, c % bn))
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::shape("tensor order must be at least 1"));
    }
    if dims.contains(&0) {
        return Err(Error::shape(format!("empty extent in {dims:?}")));
    }
    Ok(())
}

pub(crate) fn check_mode(mode: usize, order: usize) -> Result<()> {
    if mode == 0 || mode > order {
        return Err(Error::Mode(format!("mode {mode} outside 1..={order}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_matrix, random_tensor, random_unitary, rng};

    fn real_tensor_2x2x2() -> QuaternionTensor {
        // t_{n1 n2 n3} = n1 + 2(n2 − 1) + 4(n3 − 1), 1-based
        QuaternionTensor::from_fn(&[2, 2, 2], |i| {
            Quaternion::real((i[0] + 1 + 2 * i[1] + 4 * i[2]) as f64)
        })
        .unwrap()
    }

    #[test]
    fn mode_one_unfolding_by_enumeration() {
        let t = real_tensor_2x2x2();
        let expect =
            QuaternionMatrix::from_real(2, 4, &[1.0, 3.0, 5.0, 7.0, 2.0, 4.0, 6.0, 8.0]).unwrap();
        assert_eq!(t.unfold(1).unwrap(), expect);

        // brute-force enumeration of the column rule for every mode
        for mode in 1..=3 {
            let u = t.unfold(mode).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        let idx = [a, b, c];
                        let rest: Vec<usize> =
                            (0..3).filter(|&m| m != mode - 1).map(|m| idx[m]).collect();
                        let col = rest[0] + 2 * rest[1];
                        assert_eq!(u.get(idx[mode - 1], col), t.get(&idx));
                    }
                }
            }
        }
    }

    #[test]
    fn fold_rebuilds_enumerated_tensor() {
        let m = QuaternionMatrix::from_real(2, 4, &[1.0, 3.0, 5.0, 7.0, 2.0, 4.0, 6.0, 8.0]).unwrap();
        assert_eq!(QuaternionTensor::fold(&m, 1, &[2, 2, 2]).unwrap(), real_tensor_2x2x2());
    }

    #[test]
    fn matrix_specialization() {
        let mut r = rng(30);
        let m = random_matrix(&mut r, 3, 5);
        let t = QuaternionTensor::from_matrix(&m);
        assert_eq!(t.unfold(1).unwrap(), m);
        assert_eq!(t.unfold(2).unwrap(), m.transpose());
        assert_eq!(t.to_matrix().unwrap(), m);
    }

    #[test]
    fn fold_unfold_round_trip() {
        let mut r = rng(31);
        let t = random_tensor(&mut r, &[3, 4, 2]);
        for mode in 1..=3 {
            let back = QuaternionTensor::fold(&t.unfold(mode).unwrap(), mode, t.dims()).unwrap();
            assert_eq!(back, t);
        }
        let one = QuaternionTensor::from_entries(&[1, 1, 1], vec![Quaternion::J]).unwrap();
        assert_eq!(one.unfold(2).unwrap().shape(), (1, 1));
        assert_eq!(QuaternionTensor::fold(&one.unfold(2).unwrap(), 2, &[1, 1, 1]).unwrap(), one);
    }

    #[test]
    fn errors() {
        let t = QuaternionTensor::zeros(&[2, 3]).unwrap();
        assert!(matches!(t.unfold(0), Err(Error::Mode(_))));
        assert!(matches!(t.unfold(3), Err(Error::Mode(_))));
        assert!(matches!(
            QuaternionTensor::fold(&QuaternionMatrix::zeros(2, 2), 1, &[2, 3]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            t.mode_product(1, &QuaternionMatrix::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
        assert!(QuaternionTensor::zeros(&[2, 0]).is_err());
    }

    #[test]
    fn mode_product_multiplies_on_the_left() {
        let t = QuaternionTensor::from_entries(&[1, 1, 1], vec![Quaternion::J]).unwrap();
        let u = QuaternionMatrix::from_scalars(1, 1, &[Quaternion::I]).unwrap();
        assert_eq!(t.mode_product(1, &u).unwrap().entries(), &[Quaternion::K]);
    }

    #[test]
    fn mode_product_identity() {
        let mut r = rng(32);
        let t = random_tensor(&mut r, &[3, 2, 4]);
        for mode in 1..=3 {
            let id = QuaternionMatrix::identity(t.dims()[mode - 1]);
            assert_eq!(t.mode_product(mode, &id).unwrap(), t);
        }
    }

    #[test]
    fn mode_product_matches_definition() {
        let mut r = rng(33);
        let t = random_tensor(&mut r, &[3, 2, 2]);
        for mode in 1..=3 {
            let u = random_matrix(&mut r, 4, t.dims()[mode - 1]);
            let y = t.mode_product(mode, &u).unwrap();
            let mut dims = t.dims().to_vec();
            dims[mode - 1] = 4;
            let oracle = QuaternionTensor::from_fn(&dims, |idx| {
                (0..t.dims()[mode - 1])
                    .map(|n| {
                        let mut src = idx.to_vec();
                        src[mode - 1] = n;
                        u.get(idx[mode - 1], n) * t.get(&src)
                    })
                    .sum()
            })
            .unwrap();
            assert!(y.distance(&oracle).unwrap() <= 1e-13);
        }
    }

    #[test]
    fn kronecker_examples() {
        let mut r = rng(34);
        let b = random_matrix(&mut r, 2, 3);
        let k = kronecker(&QuaternionMatrix::identity(2), &b);
        assert_eq!(k.block(0, 0, 2, 3).unwrap(), b);
        assert_eq!(k.block(2, 3, 2, 3).unwrap(), b);
        assert_eq!(k.block(0, 3, 2, 3).unwrap(), QuaternionMatrix::zeros(2, 3));

        let i = QuaternionMatrix::from_scalars(1, 1, &[Quaternion::I]).unwrap();
        let j = QuaternionMatrix::from_scalars(1, 1, &[Quaternion::J]).unwrap();
        assert_eq!(kronecker(&i, &j).get(0, 0), Quaternion::K);
    }

    #[test]
    fn unitary_mode_product_preserves_other_mode_slice_norms() {
        let mut r = rng(35);
        let t = random_tensor(&mut r, &[3, 4, 2]);
        for mode in 1..=3 {
            let u = random_unitary(&mut r, t.dims()[mode - 1]);
            let y = t.mode_product(mode, &u).unwrap();
            for other in (1..=3).filter(|&m| m != mode) {
                let before = t.slice_norms(other).unwrap();
                let after = y.slice_norms(other).unwrap();
                for (a, b) in before.iter().zip(&after) {
                    assert!((a - b).abs() <= 1e-12 * a.max(1.0));
                }
            }
        }
    }

    #[test]
    fn frontal_slices_round_trip() {
        let mut r = rng(36);
        let slices: Vec<_> = (0..3).map(|_| random_matrix(&mut r, 2, 4)).collect();
        let t = QuaternionTensor::from_frontal_slices(&slices).unwrap();
        assert_eq!(t.dims(), &[2, 4, 3]);
        for (k, s) in slices.iter().enumerate() {
            assert_eq!(&t.frontal_slice(k).unwrap(), s);
        }
        assert_eq!(t.get(&[1, 2, 1]), slices[1].get(1, 2));
    }
}
