//! Clean sources, channel corruption, flow-space conversion and sequence files.

mod flow;
mod io;

pub use flow::{dna_to_flow, flow_to_dna, gen_dna, read_dna, FlowEncoding, WashCycle};
pub use io::{load_sequence, save_sequence, Sequence, SequenceKind};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Clean symbols over the alphabet `0..alphabet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    symbols: Vec<usize>,
    alphabet: usize,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<usize>, alphabet: usize) -> Result<Self> {
        if let Some((i, &s)) = symbols.iter().enumerate().find(|(_, &s)| s >= alphabet) {
            return Err(Error::arg(format!(
                "symbol {s} at position {i} outside alphabet of size {alphabet}"
            )));
        }
        Ok(Self { symbols, alphabet })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<usize> {
        self.symbols
    }
}

/// Real-valued channel outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSequence<T> {
    values: Vec<T>,
}

impl<T: Real> ObservationSequence<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::arg(format!("observation {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Symmetric Markov chain: stay with `stay_prob`, otherwise jump uniformly to another symbol.
pub fn gen_markov_source(alphabet: usize, n: usize, stay_prob: f64, seed: u64) -> Result<SymbolSequence> {
    if alphabet < 2 {
        return Err(Error::arg("markov source needs at least two symbols"));
    }
    if n == 0 {
        return Err(Error::arg("sequence length must be at least 1"));
    }
    if !(stay_prob > 0.0 && stay_prob < 1.0) {
        return Err(Error::arg(format!("stay probability must lie in (0, 1), got {stay_prob}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symbols = Vec::with_capacity(n);
    let mut cur = rng.random_range(0..alphabet);
    symbols.push(cur);
    for _ in 1..n {
        if rng.random::<f64>() >= stay_prob {
            let r = rng.random_range(0..alphabet - 1);
            cur = if r >= cur { r + 1 } else { r };
        }
        symbols.push(cur);
    }
    SymbolSequence::new(symbols, alphabet)
}

/// Transition matrix of the chain produced by [`gen_markov_source`].
pub fn symmetric_transition<T: Real>(alphabet: usize, stay_prob: f64) -> ndarray::Array2<T> {
    let off = (1.0 - stay_prob) / (alphabet as f64 - 1.0);
    ndarray::Array2::from_shape_fn((alphabet, alphabet), |(i, j)| {
        T::of(if i == j { stay_prob } else { off })
    })
}

/// Passes `x` through the memoryless channel: `Y_i ~ f_{x_i}` independently.
pub fn corrupt<T: Real>(x: &SymbolSequence, channel: &ChannelModel<T>, seed: u64) -> Result<ObservationSequence<T>> {
    if x.alphabet() > channel.alphabet_size() {
        return Err(Error::arg(format!(
            "channel has {} densities but the source alphabet has {}",
            channel.alphabet_size(),
            x.alphabet()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = x
        .symbols()
        .iter()
        .map(|&a| channel.sample_output(a, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    ObservationSequence::new(values)
}
