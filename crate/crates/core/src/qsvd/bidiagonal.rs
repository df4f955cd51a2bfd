//! SVD of a real upper-bidiagonal matrix by implicit-shift QR (Golub–Kahan
//! steps with zero-diagonal chasing).
//!
//! Computes `B = P · diag(s) · Oᵀ` where `B` has diagonal `d` and
//! superdiagonal `e`. `P` and `O` are `n × n`, row-major.

use crate::error::{Error, Result};

pub(crate) struct BidiagonalSvd {
    pub values: Vec<f64>,
    pub left: Option<Vec<f64>>,
    pub right: Option<Vec<f64>>,
}

#[inline]
fn givens(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        (1.0, 0.0, f)
    } else if f == 0.0 {
        (0.0, 1.0, g)
    } else {
        let r = f.hypot(g);
        (f / r, g / r, r)
    }
}

/// Column update `col_a ← c·col_a + s·col_b`, `col_b ← −s·col_a + c·col_b`.
#[inline]
fn rotate_cols(m: &mut Option<Vec<f64>>, n: usize, a: usize, b: usize, c: f64, s: f64) {
    if let Some(m) = m.as_mut() {
        for row in m.chunks_exact_mut(n) {
            let (x, y) = (row[a], row[b]);
            row[a] = c * x + s * y;
            row[b] = -s * x + c * y;
        }
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

pub(crate) fn bidiagonal_svd(
    mut d: Vec<f64>,
    mut e: Vec<f64>,
    want_left: bool,
    want_right: bool,
    max_sweeps: usize,
) -> Result<BidiagonalSvd> {
    let n = d.len();
    debug_assert!(n == 0 || e.len() + 1 == n);
    let mut left = want_left.then(|| identity(n));
    let mut right = want_right.then(|| identity(n));
    if n == 0 {
        return Ok(BidiagonalSvd { values: d, left, right });
    }

    // Iterate on B / max|B| so the shifts neither underflow nor overflow.
    let scale = d.iter().chain(&e).fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(BidiagonalSvd { values: d, left, right });
    }
    d.iter_mut().chain(e.iter_mut()).for_each(|v| *v /= scale);

    let eps = f64::EPSILON;
    // Entries below eps·‖B‖ are roundoff; dropping them is a backward-stable
    // perturbation and keeps graded tails from underflowing in the shifts.
    let floor = eps * d.iter().chain(&e).fold(0.0f64, |m, v| m.max(v.abs()));
    for v in d.iter_mut() {
        if v.abs() <= floor {
            *v = 0.0;
        }
    }
    let mut sweeps = 0usize;
    let mut hi = n - 1;
    loop {
        for i in 0..n - 1 {
            if e[i] != 0.0 && (e[i].abs() <= eps * (d[i].abs() + d[i + 1].abs()) || e[i].abs() <= floor) {
                e[i] = 0.0;
            }
        }
        while hi > 0 && e[hi - 1] == 0.0 {
            hi -= 1;
        }
        if hi == 0 {
            break;
        }
        let mut lo = hi - 1;
        while lo > 0 && e[lo - 1] != 0.0 {
            lo -= 1;
        }

        if sweeps >= max_sweeps {
            let residual = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            return Err(Error::Convergence { sweeps, residual });
        }
        sweeps += 1;

        let block_norm = (lo..=hi)
            .map(|i| d[i].abs() + if i < hi { e[i].abs() } else { 0.0 })
            .fold(0.0f64, f64::max);
        let tiny = eps * block_norm;

        if let Some(i) = (lo..hi).find(|&i| d[i].abs() <= tiny) {
            // Zero diagonal inside the block: rotate row i against the rows
            // below until its superdiagonal entry is gone.
            d[i] = 0.0;
            let mut bulge = e[i];
            e[i] = 0.0;
            for j in i + 1..=hi {
                let (c, s, r) = givens(d[j], bulge);
                d[j] = r;
                rotate_cols(&mut left, n, j, i, c, s);
                if j < hi {
                    bulge = -s * e[j];
                    e[j] *= c;
                }
            }
            continue;
        }
        if d[hi].abs() <= tiny {
            // Zero last diagonal: chase the column entry upward.
            d[hi] = 0.0;
            let mut bulge = e[hi - 1];
            e[hi - 1] = 0.0;
            for j in (lo..hi).rev() {
                let (c, s, r) = givens(d[j], bulge);
                d[j] = r;
                rotate_cols(&mut right, n, j, hi, c, s);
                if j > lo {
                    bulge = -s * e[j - 1];
                    e[j - 1] *= c;
                }
            }
            continue;
        }

        golub_kahan_step(&mut d, &mut e, lo, hi, &mut left, &mut right, n);
    }

    // Nonnegative values, then descending order.
    for i in 0..n {
        if d[i] < 0.0 {
            d[i] = -d[i];
            let target = if right.is_some() { &mut right } else { &mut left };
            if let Some(m) = target.as_mut() {
                for row in m.chunks_exact_mut(n) {
                    row[i] = -row[i];
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| d[i] * scale).collect();
    let permute = |m: Option<Vec<f64>>| {
        m.map(|m| {
            let mut out = vec![0.0; n * n];
            for r in 0..n {
                for (c, &src) in order.iter().enumerate() {
                    out[r * n + c] = m[r * n + src];
                }
            }
            out
        })
    };
    Ok(BidiagonalSvd {
        values,
        left: permute(left),
        right: permute(right),
    })
}

/// One implicit-shift QR step on the unreduced block `lo..=hi`.
fn golub_kahan_step(
    d: &mut [f64],
    e: &mut [f64],
    lo: usize,
    hi: usize,
    left: &mut Option<Vec<f64>>,
    right: &mut Option<Vec<f64>>,
    n: usize,
) {
    // Shift: eigenvalue of the trailing 2x2 of BᵀB closest to its last entry.
    let dm = d[hi - 1];
    let dn = d[hi];
    let em = e[hi - 1];
    let el = if hi - 1 > lo { e[hi - 2] } else { 0.0 };
    let t11 = dm * dm + el * el;
    let t12 = dm * em;
    let t22 = dn * dn + em * em;
    let half = (t11 - t22) / 2.0;
    let shift = if t12 == 0.0 {
        t22
    } else {
        let sign = if half >= 0.0 { 1.0 } else { -1.0 };
        t22 - t12 * t12 / (half + sign * half.hypot(t12))
    };

    let mut y = d[lo] * d[lo] - shift;
    let mut z = d[lo] * e[lo];
    for k in lo..hi {
        let (c, s, r) = givens(y, z);
        if k > lo {
            e[k - 1] = r;
        }
        let (dk, ek, dk1) = (d[k], e[k], d[k + 1]);
        d[k] = c * dk + s * ek;
        e[k] = -s * dk + c * ek;
        let bulge = s * dk1;
        d[k + 1] = c * dk1;
        rotate_cols(right, n, k, k + 1, c, s);

        let (c, s, r) = givens(d[k], bulge);
        d[k] = r;
        let (ek, dk1) = (e[k], d[k + 1]);
        e[k] = c * ek + s * dk1;
        d[k + 1] = -s * ek + c * dk1;
        rotate_cols(left, n, k, k + 1, c, s);
        if k + 1 < hi {
            let ek1 = e[k + 1];
            y = e[k];
            z = s * ek1;
            e[k + 1] = c * ek1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(svd: &BidiagonalSvd, n: usize) -> Vec<f64> {
        let p = svd.left.as_ref().unwrap();
        let o = svd.right.as_ref().unwrap();
        let mut b = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                b[r * n + c] = (0..n).map(|k| p[r * n + k] * svd.values[k] * o[c * n + k]).sum();
            }
        }
        b
    }

    fn dense(d: &[f64], e: &[f64]) -> Vec<f64> {
        let n = d.len();
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            b[i * n + i] = d[i];
            if i + 1 < n {
                b[i * n + i + 1] = e[i];
            }
        }
        b
    }

    fn check(d: &[f64], e: &[f64]) -> BidiagonalSvd {
        let n = d.len();
        let svd = bidiagonal_svd(d.to_vec(), e.to_vec(), true, true, 30 * n).unwrap();
        let b = dense(d, e);
        let rec = reconstruct(&svd, n);
        let scale = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let err = b.iter().zip(&rec).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-13 * scale, "reconstruction error {err}");
        assert!(svd.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.values.iter().all(|&v| v >= 0.0));
        svd
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let svd = check(&[1.0, 3.0, 2.0], &[0.0, 0.0]);
        assert_eq!(svd.values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[3, 4], [0, 5]]: singular values sqrt(45) and sqrt(5) (det 15, frob² 50)
        let svd = check(&[3.0, 5.0], &[4.0]);
        assert!((svd.values[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((svd.values[1] - 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn zero_diagonals_are_chased() {
        check(&[0.0, 2.0, 3.0, 0.0], &[1.0, 1.0, 1.0]);
        check(&[1.0, 0.0, 3.0], &[2.0, 5.0]);
        let svd = check(&[0.0, 0.0, 0.0], &[1.0, 0.0]);
        assert!((svd.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_bidiagonals() {
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for n in 1usize..30 {
            let d: Vec<f64> = (0..n).map(|_| next()).collect();
            let e: Vec<f64> = (0..n.saturating_sub(1)).map(|_| next()).collect();
            check(&d, &e);
        }
    }

    #[test]
    fn graded_roundoff_tail_converges() {
        let mut d = vec![187.0, 1.95e-13, 7e-44, 5.3e-75, 3.5e-106, 1.6e-136, 0.0];
        d.extend([-2.8e-172; 18]);
        let mut e = vec![916.5, 8.5e-29, 1.8e-59, 8.1e-91, 2.8e-121, 2.7e-152];
        e.extend([-2.8e-172; 18]);
        let svd = check(&d, &e);
        assert!(svd.values[1..].iter().all(|&v| v <= 1e-12));
    }

    #[test]
    fn negative_entries_give_nonnegative_values() {
        let svd = check(&[-2.0, -1.0], &[0.0]);
        assert_eq!(svd.values, vec![2.0, 1.0]);
    }
}
