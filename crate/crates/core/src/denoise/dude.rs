//! Discrete denoisers on the quantized sequence: DUDE with empirical context
//! counts and CUDE with a learned conditional.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView2, Axis};

use super::{bayes_response, boundary_symbol, LossMatrix};
use crate::error::{Error, Result};
use crate::linalg::pseudo_inverse;
use crate::neural::{build_onehot_contexts, train, Predict, TrainConfig};
use crate::scalar::Real;
use crate::source::SymbolSequence;

const PREDICT_CHUNK: usize = 8192;

/// Joint counts of (two-sided context, centre symbol) over positions `k..n-k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextCountTable {
    k: usize,
    num_symbols: usize,
    counts: HashMap<u64, Vec<u32>>,
}

impl ContextCountTable {
    pub fn window(&self) -> usize {
        self.k
    }

    pub fn num_contexts(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all counts, `n - 2k`.
    pub fn total(&self) -> u64 {
        self.counts.values().flatten().map(|&c| c as u64).sum()
    }

    /// Centre-symbol counts for a context given as `(left..., right...)`.
    pub fn get(&self, context: &[usize]) -> Option<&[u32]> {
        if context.len() != 2 * self.k || context.iter().any(|&s| s >= self.num_symbols) {
            return None;
        }
        let key = context.iter().fold(0u64, |acc, &s| acc * self.num_symbols as u64 + s as u64);
        self.counts.get(&key).map(Vec::as_slice)
    }

    fn key_at(z: &[usize], i: usize, k: usize, base: u64) -> u64 {
        let mut key = 0u64;
        for &s in z[i - k..i].iter().chain(&z[i + 1..=i + k]) {
            key = key * base + s as u64;
        }
        key
    }
}

/// Counts every (context, centre) pair of `z` for window `k`.
pub fn dude_counts(z: &SymbolSequence, k: usize) -> Result<ContextCountTable> {
    let n = z.len();
    if n < 2 * k + 1 {
        return Err(Error::arg(format!("sequence of length {n} too short for window {k}")));
    }
    let base = z.alphabet().max(1);
    if (base as f64).powi(2 * k as i32) >= u64::MAX as f64 {
        return Err(Error::arg(format!("{base}^{} contexts do not fit a 64-bit key", 2 * k)));
    }
    let syms = z.symbols();
    let mut counts: HashMap<u64, Vec<u32>> = HashMap::new();
    for i in k..n - k {
        let key = ContextCountTable::key_at(syms, i, k, base as u64);
        counts.entry(key).or_insert_with(|| vec![0; base])[syms[i]] += 1;
    }
    Ok(ContextCountTable {
        k,
        num_symbols: base,
        counts,
    })
}

/// Estimated (unnormalised) posterior over source symbols:
/// `gamma_z ⊙ (gamma_pinv^T p)`.
pub fn dude_posterior<T: Real>(p: &[T], z: usize, gamma: ArrayView2<T>, gamma_pinv: ArrayView2<T>) -> Vec<T> {
    let m = gamma.nrows();
    (0..m)
        .map(|x| {
            let inv: T = p.iter().enumerate().map(|(j, &pj)| gamma_pinv[[j, x]] * pj).sum();
            gamma[[x, z]] * inv
        })
        .collect()
}

fn check_channel<T: Real>(z: &SymbolSequence, gamma: ArrayView2<T>, loss: &LossMatrix<T>) -> Result<Array2<T>> {
    if gamma.ncols() != z.alphabet() {
        return Err(Error::arg(format!(
            "channel matrix has {} outputs but the sequence alphabet is {}",
            gamma.ncols(),
            z.alphabet()
        )));
    }
    if loss.size() != gamma.nrows() {
        return Err(Error::arg("loss matrix and channel disagree on the source alphabet"));
    }
    pseudo_inverse(gamma)
}

/// DUDE: at each interior position, Bayes response against the empirical
/// context-conditional pushed through the channel inverse.
pub fn dude_denoise<T: Real>(
    z: &SymbolSequence,
    k: usize,
    gamma: ArrayView2<T>,
    loss: &LossMatrix<T>,
) -> Result<SymbolSequence> {
    let gamma_pinv = check_channel(z, gamma, loss)?;
    let table = dude_counts(z, k)?;
    let syms = z.symbols();
    let n = syms.len();
    let base = table.num_symbols as u64;
    let mut out = Vec::with_capacity(n);
    let mut p = vec![T::zero(); z.alphabet()];
    for i in 0..n {
        if i < k || i >= n - k {
            out.push(boundary_symbol(syms[i], gamma));
            continue;
        }
        let c = &table.counts[&ContextCountTable::key_at(syms, i, k, base)];
        let total = T::of(c.iter().map(|&v| v as f64).sum());
        for (pj, &cj) in p.iter_mut().zip(c) {
            *pj = T::of(cj as f64) / total;
        }
        let v = dude_posterior(&p, syms[i], gamma, gamma_pinv.view());
        out.push(bayes_response(&v, loss));
    }
    SymbolSequence::new(out, gamma.nrows())
}

/// CUDE with a caller-supplied conditional model over one-hot quantized contexts.
pub fn cude_denoise_with<T: Real, P: Predict<T> + ?Sized>(
    z: &SymbolSequence,
    k: usize,
    gamma: ArrayView2<T>,
    loss: &LossMatrix<T>,
    model: &P,
) -> Result<SymbolSequence> {
    let gamma_pinv = check_channel(z, gamma, loss)?;
    let data = build_onehot_contexts::<T>(z.symbols(), k, z.alphabet())?;
    let syms = z.symbols();
    let n = syms.len();
    let mut out: Vec<usize> = syms[..k].iter().map(|&s| boundary_symbol(s, gamma)).collect();
    let mut row = k;
    for chunk in data.inputs.axis_chunks_iter(Axis(0), PREDICT_CHUNK) {
        let probs = model.predict_batch(chunk);
        for p in probs.rows() {
            let p = p.to_vec();
            let v = dude_posterior(&p, syms[row], gamma, gamma_pinv.view());
            out.push(bayes_response(&v, loss));
            row += 1;
        }
    }
    out.extend(syms[n - k..].iter().map(|&s| boundary_symbol(s, gamma)));
    SymbolSequence::new(out, gamma.nrows())
}

/// CUDE: trains a network `[2k*K, hidden..., K]` on one-hot quantized
/// contexts, then denoises with it.
pub fn cude_denoise<T: Real>(
    z: &SymbolSequence,
    k: usize,
    gamma: ArrayView2<T>,
    loss: &LossMatrix<T>,
    hidden: &[usize],
    cfg: &TrainConfig,
) -> Result<SymbolSequence> {
    check_channel(z, gamma, loss)?;
    let data = build_onehot_contexts::<T>(z.symbols(), k, z.alphabet())?;
    let trained = train(&data, hidden, cfg)?;
    cude_denoise_with(z, k, gamma, loss, &trained.network)
}
