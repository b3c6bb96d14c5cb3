//! Forward-backward posteriors for a hidden Markov process observed through
//! the continuous channel, and Baum-Welch re-estimation of the transition
//! matrix with emissions held fixed.

use ndarray::{Array2, ArrayView2};

use super::{bayes_response, LossMatrix};
use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::linalg::stationary_distribution;
use crate::scalar::Real;
use crate::source::{ObservationSequence, SymbolSequence};

/// Smoothed posteriors `P(X_t = a | Y^n)` (one row per position) and `ln P(Y^n)`.
#[derive(Debug, Clone)]
pub struct FbResult<T> {
    pub posteriors: Array2<T>,
    pub log_likelihood: T,
}

struct Messages<T> {
    alpha: Array2<T>,
    beta: Array2<T>,
    emit: Array2<T>,
    scale: Vec<T>,
}

fn check_transition<T: Real>(transition: ArrayView2<T>, m: usize) -> Result<()> {
    if transition.dim() != (m, m) {
        return Err(Error::arg(format!(
            "transition matrix is {:?}, expected {m}x{m}",
            transition.dim()
        )));
    }
    let tol = T::of(1e-9);
    for row in transition.rows() {
        if row.iter().any(|&p| !(p >= T::zero() && p <= T::one())) {
            return Err(Error::arg("transition entries must lie in [0, 1]"));
        }
        let s: T = row.iter().copied().sum();
        if (s - T::one()).abs() > tol {
            return Err(Error::arg(format!("transition row sums to {s}")));
        }
    }
    Ok(())
}

fn messages<T: Real>(
    y: &[T],
    transition: ArrayView2<T>,
    channel: &ChannelModel<T>,
    initial: &[T],
) -> Result<Messages<T>> {
    let n = y.len();
    let m = channel.alphabet_size();
    let mut emit = Array2::zeros((n, m));
    for (t, &yt) in y.iter().enumerate() {
        channel.density_vector_into(yt, emit.row_mut(t).as_slice_mut().expect("standard layout"));
    }
    let mut alpha = Array2::zeros((n, m));
    let mut scale = vec![T::zero(); n];
    for t in 0..n {
        for a in 0..m {
            let prior = if t == 0 {
                initial[a]
            } else {
                (0..m).map(|b| alpha[[t - 1, b]] * transition[[b, a]]).sum()
            };
            alpha[[t, a]] = prior * emit[[t, a]];
        }
        let c: T = alpha.row(t).sum();
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::NumericalUnderflow { position: t });
        }
        alpha.row_mut(t).mapv_inplace(|v| v / c);
        scale[t] = c;
    }
    let mut beta = Array2::zeros((n, m));
    beta.row_mut(n - 1).fill(T::one());
    for t in (0..n - 1).rev() {
        for a in 0..m {
            let s: T = (0..m)
                .map(|b| transition[[a, b]] * emit[[t + 1, b]] * beta[[t + 1, b]])
                .sum();
            beta[[t, a]] = s / scale[t + 1];
        }
    }
    Ok(Messages { alpha, beta, emit, scale })
}

/// Scaled forward-backward. `initial` defaults to the stationary
/// distribution of `transition`.
pub fn fb_posteriors<T: Real>(
    y: &ObservationSequence<T>,
    transition: ArrayView2<T>,
    channel: &ChannelModel<T>,
    initial: Option<&[T]>,
) -> Result<FbResult<T>> {
    let m = channel.alphabet_size();
    check_transition(transition, m)?;
    if y.is_empty() {
        return Err(Error::arg("empty observation sequence"));
    }
    let init = match initial {
        Some(p) if p.len() == m => p.to_vec(),
        Some(p) => return Err(Error::arg(format!("initial distribution has {} entries, expected {m}", p.len()))),
        None => stationary_distribution(transition)?,
    };
    let msg = messages(y.values(), transition, channel, &init)?;
    let mut post = &msg.alpha * &msg.beta;
    for (t, mut row) in post.rows_mut().into_iter().enumerate() {
        let s: T = row.sum();
        if !(s > T::zero()) {
            return Err(Error::NumericalUnderflow { position: t });
        }
        row.mapv_inplace(|v| v / s);
    }
    let log_likelihood = msg.scale.iter().map(|c| c.ln()).sum();
    Ok(FbResult { posteriors: post, log_likelihood })
}

/// Bayes response to the forward-backward posterior at every position.
pub fn fb_recursion<T: Real>(
    y: &ObservationSequence<T>,
    transition: ArrayView2<T>,
    channel: &ChannelModel<T>,
    loss: &LossMatrix<T>,
) -> Result<SymbolSequence> {
    if loss.size() != channel.alphabet_size() {
        return Err(Error::arg("loss matrix and channel disagree on the source alphabet"));
    }
    let fb = fb_posteriors(y, transition, channel, None)?;
    let out = fb
        .posteriors
        .rows()
        .into_iter()
        .map(|r| bayes_response(r.as_slice().expect("standard layout"), loss))
        .collect();
    SymbolSequence::new(out, channel.alphabet_size())
}

#[derive(Debug, Clone)]
pub struct BaumWelchConfig<T> {
    pub max_iters: usize,
    /// Stop once the log-likelihood gain of one iteration falls below this.
    pub tol: T,
    /// Starting transition matrix; defaults to 0.5 on the diagonal with the
    /// rest spread evenly.
    pub init: Option<Array2<T>>,
}

impl<T: Real> Default for BaumWelchConfig<T> {
    fn default() -> Self {
        Self { max_iters: 200, tol: T::of(1e-6), init: None }
    }
}

#[derive(Debug, Clone)]
pub struct BaumWelchFit<T> {
    pub transition: Array2<T>,
    /// Log-likelihood under the transition matrix entering each iteration.
    pub log_likelihoods: Vec<T>,
    pub iterations: usize,
}

/// Re-estimates the transition matrix from `y` alone. Emission densities
/// come from `channel` and stay fixed; the initial distribution is uniform.
pub fn baum_welch<T: Real>(
    y: &ObservationSequence<T>,
    channel: &ChannelModel<T>,
    alphabet: usize,
    cfg: &BaumWelchConfig<T>,
) -> Result<BaumWelchFit<T>> {
    let m = channel.alphabet_size();
    if alphabet != m {
        return Err(Error::arg(format!("alphabet {alphabet} but channel has {m} densities")));
    }
    if y.len() < 2 {
        return Err(Error::arg("Baum-Welch needs at least two observations"));
    }
    let mut p = match &cfg.init {
        Some(p) => p.clone(),
        None if m == 1 => Array2::ones((1, 1)),
        None => {
            let off = T::of(0.5) / T::of_usize(m - 1);
            Array2::from_shape_fn((m, m), |(i, j)| if i == j { T::of(0.5) } else { off })
        }
    };
    check_transition(p.view(), m)?;
    let init = vec![T::one() / T::of_usize(m); m];
    let ys = y.values();
    let n = ys.len();
    let mut lls = Vec::new();
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let msg = messages(ys, p.view(), channel, &init)?;
        let ll: T = msg.scale.iter().map(|c| c.ln()).sum();
        let converged = lls.last().is_some_and(|&prev: &T| ll - prev < cfg.tol);
        lls.push(ll);
        if converged {
            break;
        }
        let mut xi = Array2::<T>::zeros((m, m));
        for t in 0..n - 1 {
            let c = msg.scale[t + 1];
            for a in 0..m {
                let fa = msg.alpha[[t, a]] / c;
                for b in 0..m {
                    xi[[a, b]] += fa * p[[a, b]] * msg.emit[[t + 1, b]] * msg.beta[[t + 1, b]];
                }
            }
        }
        for (a, mut row) in xi.rows_mut().into_iter().enumerate() {
            let s: T = row.sum();
            if s > T::zero() {
                row.mapv_inplace(|v| v / s);
            } else {
                row.assign(&p.row(a));
            }
        }
        p = xi;
        iterations += 1;
    }
    Ok(BaumWelchFit { transition: p, log_likelihoods: lls, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{corrupt, gen_markov_source, symmetric_transition};
    use ndarray::array;

    /// Brute-force marginals by summing over every state path.
    fn brute(y: &[f64], p: &Array2<f64>, ch: &ChannelModel<f64>, init: &[f64]) -> (Array2<f64>, f64) {
        let (n, m) = (y.len(), init.len());
        let mut post = Array2::zeros((n, m));
        let mut total = 0.0;
        let mut path = vec![0usize; n];
        loop {
            let mut w = init[path[0]] * ch.density_eval(path[0], y[0]).unwrap();
            for t in 1..n {
                w *= p[[path[t - 1], path[t]]] * ch.density_eval(path[t], y[t]).unwrap();
            }
            total += w;
            for t in 0..n {
                post[[t, path[t]]] += w;
            }
            let mut i = 0;
            while i < n {
                path[i] += 1;
                if path[i] < m {
                    break;
                }
                path[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        (post / total, total.ln())
    }

    #[test]
    fn matches_path_enumeration() {
        let p = array![[0.8, 0.15, 0.05], [0.1, 0.7, 0.2], [0.3, 0.3, 0.4]];
        let ch = ChannelModel::<f64>::gaussian(&[-2.0, 0.0, 2.0], 1.1).unwrap();
        let y = [0.3, -1.7, 2.2, 0.1, 1.4, -0.6, 0.0];
        let init = stationary_distribution(p.view()).unwrap();
        let (want, ll) = brute(&y, &p, &ch, &init);
        let obs = ObservationSequence::new(y.to_vec()).unwrap();
        let got = fb_posteriors(&obs, p.view(), &ch, None).unwrap();
        assert!((&got.posteriors - &want).iter().all(|d| d.abs() < 1e-12));
        assert!((got.log_likelihood - ll).abs() < 1e-10);
    }

    #[test]
    fn far_outlier_underflows_cleanly() {
        let ch = ChannelModel::<f64>::gaussian(&[-1.0, 1.0], 0.01).unwrap();
        let y = ObservationSequence::new(vec![0.9, 1e6]).unwrap();
        let p = symmetric_transition::<f64>(2, 0.9);
        match fb_posteriors(&y, p.view(), &ch, None) {
            Err(Error::NumericalUnderflow { position: 1 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_transition() {
        let ch = ChannelModel::<f64>::gaussian(&[-1.0, 1.0], 1.0).unwrap();
        let y = ObservationSequence::new(vec![0.0]).unwrap();
        assert!(fb_posteriors(&y, array![[0.5, 0.6], [0.5, 0.5]].view(), &ch, None).is_err());
    }

    #[test]
    fn baum_welch_likelihood_is_monotone() {
        let x = gen_markov_source(2, 4000, 0.9, 3).unwrap();
        let ch = ChannelModel::<f64>::gaussian(&[-1.0, 1.0], 1.0).unwrap();
        let y = corrupt(&x, &ch, 4).unwrap();
        let fit = baum_welch(&y, &ch, 2, &BaumWelchConfig::default()).unwrap();
        assert!(fit.log_likelihoods.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!((fit.transition[[0, 0]] - 0.9).abs() < 0.05, "{:?}", fit.transition);
    }

    #[test]
    fn zero_iterations_return_initialization() {
        let ch = ChannelModel::<f64>::gaussian(&[-1.0, 1.0], 1.0).unwrap();
        let y = ObservationSequence::new(vec![0.2, -0.4, 1.0]).unwrap();
        let cfg = BaumWelchConfig { max_iters: 0, ..BaumWelchConfig::default() };
        let fit = baum_welch(&y, &ch, 2, &cfg).unwrap();
        assert_eq!(fit.transition, array![[0.5, 0.5], [0.5, 0.5]]);
        assert_eq!(fit.iterations, 0);
    }

    #[test]
    fn single_observation_uses_stationary_prior() {
        let p = array![[0.9, 0.1], [0.3, 0.7]];
        let ch = ChannelModel::<f64>::gaussian(&[-1.0, 1.0], 1.0).unwrap();
        let y = ObservationSequence::new(vec![0.4]).unwrap();
        let got = fb_posteriors(&y, p.view(), &ch, None).unwrap();
        let w = [0.75 * ch.density_eval(0, 0.4).unwrap(), 0.25 * ch.density_eval(1, 0.4).unwrap()];
        assert!((got.posteriors[[0, 0]] - w[0] / (w[0] + w[1])).abs() < 1e-14);
    }

    #[test]
    fn uniform_rows_reduce_to_ml() {
        let ch = ChannelModel::<f64>::gaussian(&[-3.0, -1.0, 1.0, 3.0], 1.0).unwrap();
        let x = gen_markov_source(4, 500, 0.9, 1).unwrap();
        let y = corrupt(&x, &ch, 2).unwrap();
        let p = Array2::from_elem((4, 4), 0.25);
        let fb = fb_recursion(&y, p.view(), &ch, &LossMatrix::hamming(4)).unwrap();
        assert_eq!(fb, crate::denoise::ml_pdf(&y, &ch).unwrap());
    }
}
