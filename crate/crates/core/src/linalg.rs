//! Dense linear algebra for the SR solve and the small-size oracles.
//! Matrices are row-major `Vec<f64>`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Column block height of the covariance product.
const COVARIANCE_BLOCK: usize = 256;

/// Column means and the `1/N`-normalised covariance of a row-major
/// `rows x cols` sample matrix.
pub fn covariance(data: &[f64], rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(data.len(), rows * cols);
    let mut means = alloc::vec![0.0; cols];
    for row in data.chunks_exact(cols) {
        for (m, x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    let inv = 1.0 / rows as f64;
    for m in &mut means {
        *m *= inv;
    }
    let mut centered = data.to_vec();
    for row in centered.chunks_exact_mut(cols) {
        for (x, m) in row.iter_mut().zip(&means) {
            *x -= m;
        }
    }
    let mut cov = alloc::vec![0.0; cols * cols];
    // lower block-trapezoid of centered^T * centered / rows, one dgemm per
    // block row, then mirrored
    let mut r0 = 0;
    while r0 < cols {
        let nb = COVARIANCE_BLOCK.min(cols - r0);
        let width = r0 + nb;
        // SAFETY: the output block rows r0..r0+nb, columns 0..width lie inside `cov`.
        unsafe {
            matrixmultiply::dgemm(
                nb,
                rows,
                width,
                inv,
                centered.as_ptr().add(r0),
                1,
                cols as isize,
                centered.as_ptr(),
                cols as isize,
                1,
                0.0,
                cov.as_mut_ptr().add(r0 * cols),
                cols as isize,
                1,
            );
        }
        r0 += nb;
    }
    for i in 0..cols {
        for j in 0..i {
            cov[j * cols + i] = cov[i * cols + j];
        }
    }
    (means, cov)
}

/// Block size of the right-looking Cholesky factorisation.
const CHOLESKY_BLOCK: usize = 64;

/// In-place lower Cholesky factor of a symmetric positive-definite matrix.
/// The strict upper triangle is zeroed.
pub fn cholesky(a: &mut [f64], n: usize) -> Result<()> {
    assert_eq!(a.len(), n * n);
    let mut kb = 0;
    while kb < n {
        let b = CHOLESKY_BLOCK.min(n - kb);
        // diagonal block
        for j in kb..kb + b {
            let mut d = a[j * n + j];
            for k in kb..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = sqrt(d);
            a[j * n + j] = d;
            for i in j + 1..kb + b {
                let mut s = a[i * n + j];
                for k in kb..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / d;
            }
        }
        // panel below the diagonal block: L21 = A21 L11^{-T}
        for i in kb + b..n {
            for j in kb..kb + b {
                let mut s = a[i * n + j];
                for k in kb..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / a[j * n + j];
            }
        }
        // trailing update A22 -= L21 L21^T, lower block-trapezoid only
        let start = kb + b;
        let mut r0 = start;
        while r0 < n {
            let nb = COVARIANCE_BLOCK.min(n - r0);
            let width = r0 + nb - start;
            let base = a.as_mut_ptr();
            // SAFETY: the panel (columns kb..kb+b) and the trailing block
            // (columns kb+b..n) of rows kb+b..n are disjoint regions of `a`.
            unsafe {
                matrixmultiply::dgemm(
                    nb,
                    b,
                    width,
                    -1.0,
                    base.add(r0 * n + kb),
                    n as isize,
                    1,
                    base.add(start * n + kb),
                    1,
                    n as isize,
                    1.0,
                    base.add(r0 * n + start),
                    n as isize,
                    1,
                );
            }
            r0 += nb;
        }
        kb += b;
    }
    for i in 0..n {
        for j in i + 1..n {
            a[i * n + j] = 0.0;
        }
    }
    Ok(())
}

/// Solves `A x = b` for symmetric positive-definite `A`.
pub fn cholesky_solve(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(b.len(), n);
    let mut l = a.to_vec();
    cholesky(&mut l, n)?;
    let mut y = b.to_vec();
    for i in 0..n {
        let s: f64 = l[i * n..i * n + i].iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
        y[i] = (y[i] - s) / l[i * n + i];
    }
    // L^T x = y, column-oriented so `l` is read row by row
    for i in (0..n).rev() {
        y[i] /= l[i * n + i];
        let yi = y[i];
        for (yk, lik) in y[..i].iter_mut().zip(&l[i * n..i * n + i]) {
            *yk -= lik * yi;
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("linear solve"));
    }
    Ok(y)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns ascending eigenvalues and the matching eigenvectors as columns
/// of a row-major matrix.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = alloc::vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[a * n + a].total_cmp(&m[b * n + b]));
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let mut vectors = alloc::vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + col] = v[row * n + k];
        }
    }
    (values, vectors)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn covariance_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (rows, cols) in [(37, 9), (20, 300)] {
            check_covariance(&mut rng, rows, cols);
        }
    }

    fn check_covariance(rng: &mut ChaCha8Rng, rows: usize, cols: usize) {
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (means, cov) = covariance(&data, rows, cols);
        for a in 0..cols {
            for b in 0..cols {
                let mut s = 0.0;
                for r in 0..rows {
                    s += data[r * cols + a] * data[r * cols + b];
                }
                let naive = s / rows as f64 - means[a] * means[b];
                assert!((cov[a * cols + b] - naive).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 12;
        let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += 0.5;
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 3.0).collect();
        let rhs: Vec<f64> = (0..n).map(|i| dot(&a[i * n..(i + 1) * n], &x)).collect();
        let sol = cholesky_solve(&a, n, &rhs).unwrap();
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs() < 1e-10);
        }
        assert_eq!(cholesky_solve(&[1.0, 2.0, 2.0, 1.0], 2, &[1.0, 1.0]), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn blocked_cholesky_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = COVARIANCE_BLOCK + 2 * CHOLESKY_BLOCK + 13;
        let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = dot(&b[i * n..(i + 1) * n], &b[j * n..(j + 1) * n]) / n as f64;
            }
            a[i * n + i] += 0.1;
        }
        let mut l = a.clone();
        cholesky(&mut l, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let llt: f64 = (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum();
                assert!((llt - a[i * n + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_eigen_reconstructs() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, -0.2, 0.5, -0.2, 1.0];
        let (vals, vecs) = symmetric_eigen(&a, 3);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i * 3 + j] * vecs[j * 3 + k]).sum();
                assert!((av - vals[k] * vecs[i * 3 + k]).abs() < 1e-12);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 8.0).abs() < 1e-12);
    }
}
