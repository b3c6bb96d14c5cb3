//! Gen-CUDE.
//!
//! A network `p(w, .)` is trained to predict the quantized centre symbol
//! `Z_i` from the continuous two-sided context of `Y_i`. Since
//! `P(Z_0 | ctx) = P(X_0 | ctx) Pi`, the source posterior given the whole
//! window is proportional to `[p(w, ctx) Pi^-1] ⊙ f(Y_i)`, and the
//! reconstruction is its Bayes response.

use ndarray::Axis;

use super::{bayes_response, boundary_symbol, LossMatrix};
use crate::channel::{induced_dmc, ChannelModel, InducedDmc, Quantizer};
use crate::error::{Error, Result};
use crate::neural::{build_contexts, train, Predict, TrainConfig, TrainOutcome};
use crate::scalar::Real;
use crate::source::{ObservationSequence, SymbolSequence};

const PREDICT_CHUNK: usize = 8192;

/// `(p · Pi^-1) ⊙ f`, unnormalised; negative entries are kept.
pub fn gen_cude_posterior<T: Real>(p: &[T], dmc: &InducedDmc<T>, fvec: &[T]) -> Vec<T> {
    let inv = dmc.pi_inv();
    debug_assert_eq!(p.len(), inv.nrows());
    debug_assert_eq!(fvec.len(), inv.ncols());
    fvec.iter()
        .enumerate()
        .map(|(a, &f)| {
            let s: T = p.iter().enumerate().map(|(z, &pz)| pz * inv[[z, a]]).sum();
            s * f
        })
        .collect()
}

/// Maps a posterior estimate onto the probability simplex (negative entries
/// set to 0, then normalised) and rounds every coordinate to the nearest
/// multiple of `delta`.
pub fn delta_round<T: Real>(posterior: &[T], delta: T) -> Vec<T> {
    let clamped: Vec<T> = posterior.iter().map(|&v| v.max(T::zero())).collect();
    let total: T = clamped.iter().copied().sum();
    clamped
        .iter()
        .map(|&v| {
            let p = if total > T::zero() { v / total } else { v };
            ((p / delta).round() * delta).min(T::one())
        })
        .collect()
}

fn check_inputs<T: Real>(
    y: &ObservationSequence<T>,
    k: usize,
    channel: &ChannelModel<T>,
    loss: &LossMatrix<T>,
) -> Result<()> {
    if loss.size() != channel.alphabet_size() {
        return Err(Error::arg("loss matrix and channel disagree on the source alphabet"));
    }
    if y.len() < 2 * k + 1 {
        return Err(Error::arg(format!(
            "sequence of length {} too short for window {k}",
            y.len()
        )));
    }
    Ok(())
}

/// Unnormalised posteriors at interior positions `k..n-k`, one row each.
pub fn gen_cude_posteriors<T: Real, P: Predict<T> + ?Sized>(
    y: &ObservationSequence<T>,
    k: usize,
    channel: &ChannelModel<T>,
    q: &Quantizer<T>,
    model: &P,
) -> Result<Vec<Vec<T>>> {
    let dmc = induced_dmc(channel, q)?;
    let ys = y.values();
    let z = q.quantize_all(ys);
    let data = build_contexts(ys, &z, k, q.num_cells())?;
    let mut out = Vec::with_capacity(data.len());
    let mut f = vec![T::zero(); channel.alphabet_size()];
    let mut i = k;
    for chunk in data.inputs.axis_chunks_iter(Axis(0), PREDICT_CHUNK) {
        let probs = model.predict_batch(chunk);
        if probs.ncols() != q.num_cells() {
            return Err(Error::arg(format!(
                "model predicts {} classes but the quantizer has {} cells",
                probs.ncols(),
                q.num_cells()
            )));
        }
        for p in probs.rows() {
            channel.density_vector_into(ys[i], &mut f);
            out.push(gen_cude_posterior(&p.to_vec(), &dmc, &f));
            i += 1;
        }
    }
    Ok(out)
}

/// Gen-CUDE with a caller-supplied conditional model for `P(Z_0 | context)`.
pub fn gen_cude_denoise_with<T: Real, P: Predict<T> + ?Sized>(
    y: &ObservationSequence<T>,
    k: usize,
    channel: &ChannelModel<T>,
    q: &Quantizer<T>,
    loss: &LossMatrix<T>,
    model: &P,
) -> Result<SymbolSequence> {
    check_inputs(y, k, channel, loss)?;
    let dmc = induced_dmc(channel, q)?;
    let posteriors = gen_cude_posteriors(y, k, channel, q, model)?;
    let ys = y.values();
    let n = ys.len();
    let edge = |i: usize| boundary_symbol(q.quantize(ys[i]), dmc.pi());
    let mut out: Vec<usize> = (0..k).map(edge).collect();
    out.extend(posteriors.iter().map(|v| bayes_response(v, loss)));
    out.extend((n - k..n).map(edge));
    SymbolSequence::new(out, channel.alphabet_size())
}

/// A trained Gen-CUDE model and its training history.
#[derive(Debug, Clone)]
pub struct GenCudeModel<T> {
    pub outcome: TrainOutcome<T>,
    pub dmc: InducedDmc<T>,
}

impl<T: Real> GenCudeModel<T> {
    /// Quantizes `y`, checks the induced channel and trains on
    /// (continuous context -> quantized centre).
    pub fn fit(
        y: &ObservationSequence<T>,
        k: usize,
        channel: &ChannelModel<T>,
        q: &Quantizer<T>,
        hidden: &[usize],
        cfg: &TrainConfig,
    ) -> Result<Self> {
        let dmc = induced_dmc(channel, q)?;
        let ys = y.values();
        let z = q.quantize_all(ys);
        let data = build_contexts(ys, &z, k, q.num_cells())?;
        let outcome = train(&data, hidden, cfg)?;
        Ok(Self { outcome, dmc })
    }
}

/// Full Gen-CUDE: quantize, train, then denoise every interior position.
#[allow(clippy::too_many_arguments)]
pub fn gen_cude_denoise<T: Real>(
    y: &ObservationSequence<T>,
    k: usize,
    channel: &ChannelModel<T>,
    q: &Quantizer<T>,
    loss: &LossMatrix<T>,
    hidden: &[usize],
    cfg: &TrainConfig,
) -> Result<SymbolSequence> {
    check_inputs(y, k, channel, loss)?;
    let model = GenCudeModel::fit(y, k, channel, q, hidden, cfg)?;
    gen_cude_denoise_with(y, k, channel, q, loss, &model.outcome.network)
}
