//! Small dense linear-algebra helpers.
//!
//! Everything in this crate lives in dimension at most eight, so the kernels
//! below are plain row-major `Vec<f64>` routines with partial pivoting; no
//! external matrix library is needed.

use crate::error::{GeomError, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Row-major `n x n` determinant by LU with partial pivoting.
pub fn det(n: usize, a: &[f64]) -> f64 {
    let mut m = a.to_vec();
    let mut sign = 1.0;
    let mut d = 1.0;
    for k in 0..n {
        let mut piv = k;
        for r in (k + 1)..n {
            if m[r * n + k].abs() > m[piv * n + k].abs() {
                piv = r;
            }
        }
        if m[piv * n + k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            for c in 0..n {
                m.swap(k * n + c, piv * n + c);
            }
            sign = -sign;
        }
        d *= m[k * n + k];
        for r in (k + 1)..n {
            let f = m[r * n + k] / m[k * n + k];
            for c in k..n {
                m[r * n + c] -= f * m[k * n + c];
            }
        }
    }
    sign * d
}

/// Row-major inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for k in 0..n {
        let mut piv = k;
        for r in (k + 1)..n {
            if m[r * n + k].abs() > m[piv * n + k].abs() {
                piv = r;
            }
        }
        let p = m[piv * n + k];
        if p.abs() < 1e-14 {
            return Err(GeomError::InvalidArgument(
                "singular matrix has no inverse".into(),
            ));
        }
        if piv != k {
            for c in 0..n {
                m.swap(k * n + c, piv * n + c);
                inv.swap(k * n + c, piv * n + c);
            }
        }
        let p = m[k * n + k];
        for c in 0..n {
            m[k * n + c] /= p;
            inv[k * n + c] /= p;
        }
        for r in 0..n {
            if r == k {
                continue;
            }
            let f = m[r * n + k];
            if f != 0.0 {
                for c in 0..n {
                    m[r * n + c] -= f * m[k * n + c];
                    inv[r * n + c] -= f * inv[k * n + c];
                }
            }
        }
    }
    Ok(inv)
}

/// Cholesky factorization; fails when the matrix is not positive definite
/// within a relative pivot tolerance of 1e-12.
pub fn cholesky(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let tol = 1e-12 * (1.0 + scale);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= tol {
                    return Err(GeomError::NotPositiveDefinite);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solve `a x = b` for a single right-hand side (row-major `a`).
pub fn solve(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let inv = inverse(n, a)?;
    Ok((0..n)
        .map(|i| (0..n).map(|j| inv[i * n + j] * b[j]).sum())
        .collect())
}

/// Gram-Schmidt on the given vectors with respect to an arbitrary inner
/// product; returns an orthonormal family spanning the same flag.
pub fn gram_schmidt(
    vectors: &[Vec<f64>],
    ip: &dyn Fn(&[f64], &[f64]) -> f64,
) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = ip(&w, e);
            axpy(&mut w, -c, e);
        }
        // second pass for numerical orthogonality
        for e in &out {
            let c = ip(&w, e);
            axpy(&mut w, -c, e);
        }
        let n = ip(&w, &w).sqrt();
        if n < 1e-10 {
            return Err(GeomError::RankDeficient { point: vec![] });
        }
        out.push(scale(&w, 1.0 / n));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse_roundtrip() {
        let a = vec![2.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.5];
        let inv = inverse(3, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a[i * 3 + k] * inv[k * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12);
            }
        }
        assert!((det(3, &a) * det(3, &inv) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(cholesky(2, &a).is_err());
    }

    #[test]
    fn gram_schmidt_orthonormalizes() {
        let vs = vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]];
        let ip = |a: &[f64], b: &[f64]| dot(a, b);
        let q = gram_schmidt(&vs, &ip).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&q[i], &q[j]) - expect).abs() < 1e-12);
            }
        }
    }
}
