//! Eigenvalues of a Hermitian matrix by Householder reduction to tridiagonal form
//! followed by implicit QL iterations. Used in the inner loop of the rotation search,
//! where eigenvectors are not needed.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

const MAX_QL_ITERATIONS: usize = 60;

/// Overwrites the lower triangle of the row-major Hermitian buffer `a` and writes the (unsorted) eigenvalues
/// into `values`. `off` is scratch of length `n`. Returns false if QL failed to converge.
pub(crate) fn hermitian_eigenvalues<T: Real>(
    a: &mut [Complex<T>],
    n: usize,
    values: &mut [T],
    off: &mut [T],
    v: &mut [Complex<T>],
    p: &mut [Complex<T>],
) -> bool {
    debug_assert!(a.len() == n * n && values.len() == n && off.len() == n);
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // length of the column below the diagonal
        let mut xnorm_sq = T::zero();
        for i in 0..m {
            xnorm_sq = xnorm_sq + a[(k + 1 + i) * n + k].norm_sqr();
        }
        let tail_sq = xnorm_sq - a[(k + 1) * n + k].norm_sqr();
        if tail_sq <= T::zero() {
            continue;
        }
        let xnorm = xnorm_sq.sqrt();
        let x0 = a[(k + 1) * n + k];
        let x0n = x0.norm();
        let phase = if x0n > T::zero() { x0 / x0n } else { Complex::new(T::one(), T::zero()) };
        let alpha = -phase * xnorm;
        for i in 0..m {
            v[i] = a[(k + 1 + i) * n + k];
        }
        v[0] = v[0] - alpha;
        let vnorm_sq: T = v[..m].iter().map(|z| z.norm_sqr()).sum();
        let tau = two / vnorm_sq;
        // p = tau * A22 v, reading only the lower triangle of A22
        for i in 0..m {
            let row = (k + 1 + i) * n + k + 1;
            let mut acc: Complex<T> = Complex::zero();
            for j in 0..=i {
                acc = acc + a[row + j] * v[j];
            }
            for j in i + 1..m {
                acc = acc + a[(k + 1 + j) * n + k + 1 + i].conj() * v[j];
            }
            p[i] = acc * tau;
        }
        // q = p - (tau/2)(v† p) v
        let mut vp: Complex<T> = Complex::zero();
        for i in 0..m {
            vp = vp + v[i].conj() * p[i];
        }
        let kfac = vp.re * tau * half;
        for i in 0..m {
            p[i] = p[i] - v[i] * kfac;
        }
        // A22 -= v q† + q v†, lower triangle only
        for i in 0..m {
            let row = (k + 1 + i) * n + k + 1;
            let (vi, pi) = (v[i], p[i]);
            for j in 0..=i {
                a[row + j] = a[row + j] - vi * p[j].conj() - pi * v[j].conj();
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in 1..m {
            a[(k + 1 + i) * n + k] = Complex::zero();
        }
    }
    for i in 0..n {
        values[i] = a[i * n + i].re;
        off[i] = if i + 1 < n { a[(i + 1) * n + i].norm() } else { T::zero() };
    }
    symmetric_tridiagonal_ql(values, off)
}

/// Implicit QL with Wilkinson-type shifts on the tridiagonal `(d, e)`, where `e[i]` couples
/// `i` and `i + 1`. Eigenvalues replace `d`.
fn symmetric_tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T]) -> bool {
    let n = d.len();
    if n == 0 {
        return true;
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let one = T::one();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (e[l] + e[l]);
            let mut r = pythag(g, one);
            let signed = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed);
            let (mut s, mut c, mut p) = (one, one, T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r.is_zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + (c + c) * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    true
}

/// `sqrt(a² + b²)`; plain formula unless squaring could overflow (`hypot` is much slower).
#[inline]
fn pythag<T: Real>(a: T, b: T) -> T {
    let big = T::max_value().sqrt() * T::lit(0.5);
    if a.abs() < big && b.abs() < big {
        (a * a + b * b).sqrt()
    } else {
        a.hypot(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, ComplexMatrix, HermitianMatrix};
    use proptest::prelude::*;

    fn solve(h: &HermitianMatrix<f64>) -> Vec<f64> {
        let n = h.dim();
        let mut a = h.as_matrix().as_slice().to_vec();
        let mut vals = vec![0.0; n];
        let mut off = vec![0.0; n];
        let mut v = vec![Complex::zero(); n];
        let mut p = vec![Complex::zero(); n];
        assert!(hermitian_eigenvalues(&mut a, n, &mut vals, &mut off, &mut v, &mut p));
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    proptest! {
        #[test]
        fn agrees_with_jacobi(n in 1usize..12, entries in prop::collection::vec(-1.0..1.0f64, 288)) {
            let m = ComplexMatrix::from_fn(n, n, |i, j| Complex::new(entries[2 * (i * 12 + j)], entries[2 * (i * 12 + j) + 1]));
            let h = HermitianMatrix::symmetrized(m);
            let jac = eigh(&h).unwrap().values;
            let tri = solve(&h);
            for (a, b) in jac.iter().zip(&tri) {
                prop_assert!((a - b).abs() < 1e-12 * (1.0 + h.as_matrix().frobenius_norm()));
            }
        }
    }

    #[test]
    fn handles_already_tridiagonal_and_degenerate() {
        let h = HermitianMatrix::from_real_diagonal(&[2.0, 2.0, -1.0, 0.0]);
        assert_eq!(solve(&h), vec![-1.0, 0.0, 2.0, 2.0]);
        assert_eq!(solve(&HermitianMatrix::zeros(5)), vec![0.0; 5]);
    }
}
