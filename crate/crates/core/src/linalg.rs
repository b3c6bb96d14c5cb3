//! Small dense linear algebra on `ndarray` matrices.
//!
//! Channel matrices here are at most a few tens of rows, so everything is
//! plain O(n^3) code written against [`Real`].

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative singular value threshold below which a matrix counts as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Thin SVD of a tall matrix via one-sided (Hestenes) Jacobi rotations.
///
/// For `a` of shape `r x c` with `r >= c`, returns `(w, s, v)` with
/// `a = w * v^T`, where the columns of `w` are mutually orthogonal with norms
/// `s`, and `v` is `c x c` orthogonal.
fn one_sided_jacobi<T: Real>(a: ArrayView2<T>) -> (Array2<T>, Array1<T>, Array2<T>) {
    let (rows, cols) = a.dim();
    debug_assert!(rows >= cols);
    let mut w = a.to_owned();
    let mut v = Array2::<T>::eye(cols);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..rows {
                    let (wp, wq) = (w[[i, p]], w[[i, q]]);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::of(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (wp, wq) = (w[[i, p]], w[[i, q]]);
                    w[[i, p]] = c * wp - s * wq;
                    w[[i, q]] = s * wp + c * wq;
                }
                for i in 0..cols {
                    let (vp, vq) = (v[[i, p]], v[[i, q]]);
                    v[[i, p]] = c * vp - s * vq;
                    v[[i, q]] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let s = w
        .axis_iter(Axis(1))
        .map(|col| col.iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    (w, s, v)
}

/// Singular values of `a`, in no particular order.
pub fn singular_values<T: Real>(a: ArrayView2<T>) -> Vec<T> {
    let (r, c) = a.dim();
    let (_, s, _) = if r >= c {
        one_sided_jacobi(a)
    } else {
        one_sided_jacobi(a.t())
    };
    s.to_vec()
}

/// Moore–Penrose pseudo-inverse of a full-row-rank `m x k` matrix (`m <= k`).
///
/// Returns the `k x m` matrix `P` with `a * P = I_m`. When `k == m` this is the
/// ordinary inverse. Fails with [`Error::InvalidChannel`] when the smallest
/// singular value is below [`RANK_TOLERANCE`] times the largest.
pub fn pseudo_inverse<T: Real>(a: ArrayView2<T>) -> Result<Array2<T>> {
    let (m, k) = a.dim();
    if m == 0 {
        return Err(Error::arg("cannot invert an empty matrix"));
    }
    if m > k {
        return Err(Error::InvalidChannel(format!(
            "{m}x{k} matrix cannot have full row rank"
        )));
    }
    // a^T = W V^T with orthogonal columns in W, so a^+ = W S^-2 V^T.
    let (w, s, v) = one_sided_jacobi(a.t());
    let smax = s.iter().fold(T::zero(), |acc, &x| acc.max(x));
    let smin = s.iter().fold(T::infinity(), |acc, &x| acc.min(x));
    if smax == T::zero() || smin / smax < T::of(RANK_TOLERANCE) {
        return Err(Error::InvalidChannel(format!(
            "rank deficient: singular value ratio {:e} below {:e}",
            (smin / smax).as_f64(),
            RANK_TOLERANCE
        )));
    }
    let mut scaled = w;
    for (mut col, &sv) in scaled.axis_iter_mut(Axis(1)).zip(s.iter()) {
        col.mapv_inplace(|x| x / (sv * sv));
    }
    Ok(scaled.dot(&v.t()))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: ArrayView2<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::arg("solve needs a square system"));
    }
    let mut m = a.to_owned();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().partial_cmp(&m[[j, col]].abs()).unwrap())
            .unwrap();
        if m[[pivot, col]].abs() <= T::epsilon() * T::of_usize(n) {
            return Err(Error::arg("singular linear system"));
        }
        if pivot != col {
            for j in 0..n {
                m.swap([pivot, j], [col, j]);
            }
            rhs.swap(pivot, col);
        }
        for row in (col + 1)..n {
            let factor = m[[row, col]] / m[[col, col]];
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let delta = factor * m[[col, j]];
                m[[row, j]] -= delta;
            }
            let delta = factor * rhs[col];
            rhs[row] -= delta;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..n {
            acc -= m[[row, j]] * x[j];
        }
        x[row] = acc / m[[row, row]];
    }
    Ok(x)
}

/// Stationary distribution `p` of a row-stochastic matrix (`p P = p`, `sum p = 1`).
pub fn stationary_distribution<T: Real>(transition: ArrayView2<T>) -> Result<Vec<T>> {
    let m = transition.nrows();
    // (P^T - I) p = 0 with the last equation replaced by sum(p) = 1.
    let mut a = transition.t().to_owned();
    for i in 0..m {
        a[[i, i]] -= T::one();
    }
    for j in 0..m {
        a[[m - 1, j]] = T::one();
    }
    let mut b = vec![T::zero(); m];
    b[m - 1] = T::one();
    solve(a.view(), &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        (a - b).iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn inverse_of_two_by_two() {
        let a: Array2<f64> = array![[0.841_344_746_068_543, 0.158_655_253_931_457], [0.158_655_253_931_457, 0.841_344_746_068_543]];
        let inv = pseudo_inverse(a.view()).unwrap();
        assert!(max_abs_diff(&a.dot(&inv), &Array2::eye(2)) < 1e-12);
        assert!((inv[[0, 0]] - 1.232_397_39).abs() < 1e-7);
        assert!((inv[[0, 1]] + 0.232_397_39).abs() < 1e-7);
    }

    #[test]
    fn pseudo_inverse_of_wide_matrix() {
        let a: Array2<f64> = array![[0.7, 0.2, 0.1, 0.0], [0.1, 0.1, 0.3, 0.5]];
        let p = pseudo_inverse(a.view()).unwrap();
        assert_eq!(p.dim(), (4, 2));
        assert!(max_abs_diff(&a.dot(&p), &Array2::eye(2)) < 1e-12);
        // Moore–Penrose: p a p = p and (a p)^T = a p, (p a)^T = p a
        assert!(max_abs_diff(&p.dot(&a).dot(&p), &p) < 1e-12);
        let pa = p.dot(&a);
        assert!(max_abs_diff(&pa, &pa.t().to_owned()) < 1e-12);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a: Array2<f64> = array![[0.5, 0.5], [0.5, 0.5]];
        assert!(matches!(pseudo_inverse(a.view()), Err(Error::InvalidChannel(_))));
        let tall: Array2<f64> = array![[1.0], [0.0]];
        assert!(matches!(pseudo_inverse(tall.view()), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a: Array2<f64> = array![[3.0, 0.0], [0.0, -2.0], [0.0, 0.0]];
        let mut s = singular_values(a.view());
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((s[0] - 2.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn solve_and_stationary() {
        let a: Array2<f64> = array![[2.0, 1.0], [1.0, 3.0]];
        let x = solve(a.view(), &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);

        let p: Array2<f64> = array![[0.9, 0.1], [0.3, 0.7]];
        let pi = stationary_distribution(p.view()).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-14 && (pi[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn works_in_f32() {
        let a = array![[0.8f32, 0.2], [0.3, 0.7]];
        let inv = pseudo_inverse(a.view()).unwrap();
        let id = a.dot(&inv);
        assert!((id[[0, 0]] - 1.0).abs() < 1e-5 && id[[0, 1]].abs() < 1e-5);
    }
}
