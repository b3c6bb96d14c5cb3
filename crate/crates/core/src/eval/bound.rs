use crate::channel::InducedDmc;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inputs to the finite-sample bound on the probability that Gen-CUDE's
/// loss exceeds the best `k`-th order sliding-window loss by more than `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub k: usize,
    pub n: usize,
    pub alphabet: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub epsilon_star: f64,
    pub lambda_max: f64,
}

impl BoundInputs {
    /// `lambda_max * (3 epsilon* + M delta / 2)`; `epsilon` must exceed it.
    pub fn threshold(&self) -> f64 {
        self.lambda_max * (3.0 * self.epsilon_star + self.alphabet as f64 * self.delta / 2.0)
    }

    /// `2 (2k+1) (1/delta + 1)^M`.
    pub fn c1(&self) -> f64 {
        2.0 * (2 * self.k + 1) as f64 * (1.0 / self.delta + 1.0).powi(self.alphabet as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub c1: f64,
    pub c2: f64,
    pub threshold: f64,
    pub bound: f64,
}

pub fn theorem_bound(b: &BoundInputs) -> Result<BoundReport> {
    if !(b.delta > 0.0 && b.delta.is_finite()) {
        return Err(Error::arg("delta must be > 0"));
    }
    if !(b.lambda_max > 0.0 && b.lambda_max.is_finite()) {
        return Err(Error::arg("lambda_max must be > 0"));
    }
    if !(b.epsilon_star >= 0.0) {
        return Err(Error::arg("epsilon_star must be >= 0"));
    }
    if b.alphabet == 0 {
        return Err(Error::arg("alphabet must be nonempty"));
    }
    if b.n <= 2 * b.k {
        return Err(Error::arg(format!("n = {} leaves no interior positions for k = {}", b.n, b.k)));
    }
    let threshold = b.threshold();
    if !(b.epsilon > threshold) {
        return Err(Error::arg(format!(
            "epsilon = {} must exceed lambda_max*(3*epsilon_star + M*delta/2) = {threshold}",
            b.epsilon
        )));
    }
    let c1 = b.c1();
    let gap = b.epsilon - threshold;
    let c2 = gap * gap / (b.lambda_max * b.lambda_max);
    let w = (2 * b.k + 1) as f64;
    let bound = (c1 * (-2.0 * (b.n - 2 * b.k) as f64 / w * c2).exp()).min(1.0);
    Ok(BoundReport { c1, c2, threshold, bound })
}

/// `epsilon' * sum_a ||column a of Pi^-1||_2`.
pub fn epsilon_star<T: Real>(epsilon_prime: f64, dmc: &InducedDmc<T>) -> Result<f64> {
    if !(epsilon_prime >= 0.0) {
        return Err(Error::arg("epsilon' must be >= 0"));
    }
    let norms: f64 = dmc
        .pi_inv()
        .columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v.as_f64().powi(2)).sum::<f64>().sqrt())
        .sum();
    Ok(epsilon_prime * norms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn inputs(n: usize, k: usize) -> BoundInputs {
        BoundInputs { k, n, alphabet: 2, delta: 0.5, epsilon: 0.6, epsilon_star: 0.01, lambda_max: 1.0 }
    }

    #[test]
    fn constants() {
        let r = theorem_bound(&inputs(100_000, 1)).unwrap();
        assert_eq!(r.c1, 54.0);
        assert!((r.threshold - 0.53).abs() < 1e-12);
        assert!((r.c2 - 0.0049).abs() < 1e-12);
        let want = (54.0 * (-2.0 * 99_998.0 / 3.0 * r.c2).exp()).min(1.0);
        assert_eq!(r.bound, want);
    }

    #[test]
    fn epsilon_at_threshold_is_rejected() {
        let mut b = inputs(1000, 1);
        b.epsilon = b.threshold();
        let msg = theorem_bound(&b).unwrap_err().to_string();
        assert!(msg.contains("0.53"), "{msg}");
        b.epsilon = 0.5;
        assert!(theorem_bound(&b).is_err());
    }

    #[test]
    fn monotone_in_n_and_k() {
        let mut prev = f64::INFINITY;
        for n in (1..=10).map(|i| i * 2000) {
            let b = theorem_bound(&inputs(n, 1)).unwrap().bound;
            assert!(b <= prev);
            prev = b;
        }
        let mut prev = 0.0;
        for k in 0..6 {
            let b = theorem_bound(&inputs(5000, k)).unwrap().bound;
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn epsilon_star_values() {
        let id = InducedDmc::from_matrix(Array2::<f64>::eye(2)).unwrap();
        assert_eq!(epsilon_star(0.0, &id).unwrap(), 0.0);
        assert_eq!(epsilon_star(0.3, &id).unwrap(), 0.6);
        let p = 0.841_344_746_068_542_9;
        let dmc = InducedDmc::from_matrix(array![[p, 1.0 - p], [1.0 - p, p]]).unwrap();
        // oracle: numpy.linalg.norm(inv(Pi), axis=0).sum()
        assert!((epsilon_star(1.0, &dmc).unwrap() - 2.508_236).abs() < 1e-4);
    }
}
