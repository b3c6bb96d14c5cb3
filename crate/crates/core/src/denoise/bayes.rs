use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-symbol loss `Lambda(x, xhat)`, rows indexed by the true symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix<T> {
    values: Array2<T>,
    lambda_max: T,
}

impl<T: Real> LossMatrix<T> {
    pub fn new(values: Array2<T>) -> Result<Self> {
        if values.nrows() != values.ncols() || values.is_empty() {
            return Err(Error::arg("loss matrix must be square and nonempty"));
        }
        if values.iter().any(|&v| !(v >= T::zero()) || !v.is_finite()) {
            return Err(Error::arg("loss entries must be finite and nonnegative"));
        }
        let lambda_max = values.iter().fold(T::zero(), |m, &v| m.max(v));
        Ok(Self { values, lambda_max })
    }

    /// 0/1 loss.
    pub fn hamming(m: usize) -> Self {
        let values = Array2::from_shape_fn((m, m), |(i, j)| if i == j { T::zero() } else { T::one() });
        Self::new(values).expect("hamming loss is valid")
    }

    pub fn values(&self) -> ArrayView2<'_, T> {
        self.values.view()
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, x: usize, xhat: usize) -> T {
        self.values[[x, xhat]]
    }
}

/// `argmin_xhat sum_x Lambda(x, xhat) v(x)`, ties to the smallest symbol.
///
/// `v` need not be normalised or even nonnegative.
pub fn bayes_response<T: Real>(v: &[T], loss: &LossMatrix<T>) -> usize {
    let m = loss.size();
    debug_assert_eq!(v.len(), m);
    let mut best = 0;
    let mut best_score = T::infinity();
    for xhat in 0..m {
        let score: T = (0..m).map(|x| loss.values[[x, xhat]] * v[x]).sum();
        if score < best_score {
            best = xhat;
            best_score = score;
        }
    }
    best
}
