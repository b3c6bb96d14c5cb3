use ndarray::{Array2, ArrayView2};

use super::{ChannelModel, Quantizer};
use crate::error::{Error, Result};
use crate::linalg::pseudo_inverse;
use crate::scalar::Real;

/// Discrete channel induced by quantizing a continuous channel's output.
///
/// `pi` is `M x K` and row-stochastic; `pi_inv` is its `K x M` right inverse
/// (the ordinary inverse when `K == M`).
#[derive(Debug, Clone, PartialEq)]
pub struct InducedDmc<T> {
    pi: Array2<T>,
    pi_inv: Array2<T>,
}

impl<T: Real> InducedDmc<T> {
    /// Wraps an explicit transition matrix, checking it and computing its inverse.
    pub fn from_matrix(pi: Array2<T>) -> Result<Self> {
        let tol = T::of(1e-9);
        for (x, row) in pi.outer_iter().enumerate() {
            if row.iter().any(|&p| !(p >= T::zero() && p <= T::one())) {
                return Err(Error::arg(format!("row {x} has entries outside [0, 1]")));
            }
            let s: T = row.iter().copied().sum();
            if (s - T::one()).abs() > tol {
                return Err(Error::arg(format!("row {x} sums to {s}, not 1")));
            }
        }
        let pi_inv = pseudo_inverse(pi.view())?;
        Ok(Self { pi, pi_inv })
    }

    pub fn pi(&self) -> ArrayView2<'_, T> {
        self.pi.view()
    }

    pub fn pi_inv(&self) -> ArrayView2<'_, T> {
        self.pi_inv.view()
    }

    /// Number of source symbols `M`.
    pub fn num_inputs(&self) -> usize {
        self.pi.nrows()
    }

    /// Number of quantized symbols `K`.
    pub fn num_outputs(&self) -> usize {
        self.pi.ncols()
    }
}

/// `Pi(x, z) = integral of f_x over cell z`, using exact CDF differences.
pub fn induced_dmc<T: Real>(channel: &ChannelModel<T>, q: &Quantizer<T>) -> Result<InducedDmc<T>> {
    let m = channel.alphabet_size();
    let k = q.num_cells();
    let mut pi = Array2::<T>::zeros((m, k));
    for (x, d) in channel.densities().iter().enumerate() {
        // consecutive CDF differences telescope, so each row sums to one
        let mut prev = T::zero();
        for z in 0..k {
            let upper = if z + 1 == k { T::one() } else { d.cdf(q.cell(z).1) };
            pi[[x, z]] = (upper - prev).max(T::zero());
            prev = upper.max(prev);
        }
    }
    let pi_inv = pseudo_inverse(pi.view()).map_err(|e| match e {
        Error::InvalidChannel(msg) => Error::InvalidChannel(format!(
            "induced {m}x{k} channel matrix is not full row rank ({msg}); the quantizer cannot separate the input densities"
        )),
        other => other,
    })?;
    Ok(InducedDmc { pi, pi_inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Density;
    use crate::quadrature::adaptive_simpson;
    use ndarray::array;

    fn max_dev_from_identity(a: &Array2<f64>) -> f64 {
        let m = a.nrows();
        (a - &Array2::<f64>::eye(m)).iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn binary_gaussian_matrix() {
        let c = ChannelModel::<f64>::gaussian(&[-1.0, 1.0], 1.0).unwrap();
        let q = Quantizer::<f64>::new(vec![0.0]).unwrap();
        let dmc = induced_dmc(&c, &q).unwrap();
        let expected = array![[0.841_345, 0.158_655], [0.158_655, 0.841_345]];
        assert!((&dmc.pi - &expected).iter().all(|d| d.abs() < 1e-5));
        // oracle: direct 2x2 inversion of the exact matrix
        let (a, b) = (dmc.pi[[0, 0]], dmc.pi[[0, 1]]);
        let det = a * a - b * b;
        let inv = array![[a / det, -b / det], [-b / det, a / det]];
        assert!((&dmc.pi_inv - &inv).iter().all(|d| d.abs() < 1e-12));
        assert!((dmc.pi_inv[[0, 0]] - 1.232_397).abs() < 1e-4);
        assert!((dmc.pi_inv[[0, 1]] + 0.232_397).abs() < 1e-4);
    }

    #[test]
    fn noiseless_channel_is_identity() {
        let c = ChannelModel::<f64>::gaussian(&[-3.0, -1.0, 1.0, 3.0], 1e-9).unwrap();
        let q = Quantizer::<f64>::new(vec![-2.0, 0.0, 2.0]).unwrap();
        let dmc = induced_dmc(&c, &q).unwrap();
        assert!(max_dev_from_identity(&dmc.pi.to_owned()) < 1e-6);
    }

    #[test]
    fn quadrature_agrees_with_cdf_route() {
        let kde = Density::<f64>::kde(vec![-0.3, 0.2, 0.4, 1.9], 0.6).unwrap();
        let c = ChannelModel::<f64>::new(vec![kde, Density::<f64>::gaussian(2.0, 0.5).unwrap()]).unwrap();
        let q = Quantizer::<f64>::new(vec![0.0, 1.0]).unwrap();
        let dmc = induced_dmc(&c, &q).unwrap();
        for (x, d) in c.densities().iter().enumerate() {
            let (slo, shi) = d.support();
            for z in 0..q.num_cells() {
                let (lo, hi) = q.cell(z);
                let (lo, hi) = (lo.max(slo), hi.min(shi));
                let v = if lo < hi { adaptive_simpson(|y| d.pdf(y), lo, hi, 1e-11) } else { 0.0 };
                assert!((v - dmc.pi[[x, z]]).abs() < 1e-8, "({x},{z}): {v} vs {}", dmc.pi[[x, z]]);
            }
        }
    }

    #[test]
    fn identical_densities_fail_rank_check() {
        let c = ChannelModel::<f64>::gaussian(&[0.0, 0.0], 1.0).unwrap();
        let q = Quantizer::<f64>::new(vec![0.0]).unwrap();
        assert!(matches!(induced_dmc(&c, &q), Err(Error::InvalidChannel(_))));
        // fewer cells than inputs can never be inverted
        let c = ChannelModel::<f64>::gaussian(&[-1.0, 1.0], 1.0).unwrap();
        let q = Quantizer::<f64>::new(vec![]).unwrap();
        assert!(matches!(induced_dmc(&c, &q), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn from_matrix_validates() {
        assert!(InducedDmc::from_matrix(array![[0.5, 0.6], [0.5, 0.5]]).is_err());
        assert!(InducedDmc::from_matrix(array![[1.2, -0.2], [0.5, 0.5]]).is_err());
        let d = InducedDmc::from_matrix(array![[0.9, 0.1], [0.2, 0.8]]).unwrap();
        assert_eq!(d.num_inputs(), 2);
        assert_eq!(d.num_outputs(), 2);
    }
}
