//! FIGO channel densities, output quantizers and the induced discrete channel.

mod dmc;
mod io;
mod quantizer;

pub use dmc::{induced_dmc, InducedDmc};
pub use io::{load_channel, load_quantizer, parse_channel, parse_quantizer};
pub use quantizer::Quantizer;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::scalar::Real;

/// Default kernel bandwidth for channel estimation.
pub const DEFAULT_KDE_BANDWIDTH: f64 = 0.6;

/// Kernel density support is cut off this many bandwidths past the extreme samples.
const KDE_SUPPORT_WIDTHS: f64 = 6.0;
/// Kernels further than this many bandwidths away contribute below f64 resolution.
const KDE_EVAL_WIDTHS: f64 = 10.0;

/// Output density for one input symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum Density<T> {
    Gaussian { mean: T, stddev: T },
    /// Gaussian-kernel density estimate. `samples` are kept sorted.
    Kde { samples: Vec<T>, bandwidth: T },
}

impl<T: Real> Density<T> {
    pub fn gaussian(mean: T, stddev: T) -> Result<Self> {
        if !(stddev > T::zero()) || !mean.is_finite() || !stddev.is_finite() {
            return Err(Error::arg(format!(
                "gaussian needs finite mean and stddev > 0, got ({mean}, {stddev})"
            )));
        }
        Ok(Density::Gaussian { mean, stddev })
    }

    pub fn kde(mut samples: Vec<T>, bandwidth: T) -> Result<Self> {
        if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
            return Err(Error::arg(format!("kde bandwidth must be > 0, got {bandwidth}")));
        }
        if samples.is_empty() {
            return Err(Error::arg("kde needs at least one sample"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::arg("kde samples must be finite"));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Density::Kde { samples, bandwidth })
    }

    pub fn pdf(&self, y: T) -> T {
        match self {
            Density::Gaussian { mean, stddev } => ((y - *mean) / *stddev).std_normal_pdf() / *stddev,
            Density::Kde { samples, bandwidth } => {
                let reach = *bandwidth * T::of(KDE_EVAL_WIDTHS);
                let lo = samples.partition_point(|&s| s < y - reach);
                let hi = samples.partition_point(|&s| s <= y + reach);
                let sum: T = samples[lo..hi]
                    .iter()
                    .map(|&s| ((y - s) / *bandwidth).std_normal_pdf())
                    .sum();
                sum / (T::of_usize(samples.len()) * *bandwidth)
            }
        }
    }

    pub fn cdf(&self, y: T) -> T {
        match self {
            Density::Gaussian { mean, stddev } => ((y - *mean) / *stddev).std_normal_cdf(),
            Density::Kde { samples, bandwidth } => {
                let sum: T = samples
                    .iter()
                    .map(|&s| ((y - s) / *bandwidth).std_normal_cdf())
                    .sum();
                sum / T::of_usize(samples.len())
            }
        }
    }

    /// Probability mass of the half-open interval `[lo, hi)`.
    pub fn mass(&self, lo: T, hi: T) -> T {
        (self.cdf(hi) - self.cdf(lo)).max(T::zero())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let z: f64 = rng.sample(StandardNormal);
        match self {
            Density::Gaussian { mean, stddev } => *mean + *stddev * T::of(z),
            Density::Kde { samples, bandwidth } => {
                let centre = samples[rng.random_range(0..samples.len())];
                centre + *bandwidth * T::of(z)
            }
        }
    }

    /// Interval carrying all but a negligible part of the mass.
    pub fn support(&self) -> (T, T) {
        match self {
            Density::Gaussian { mean, stddev } => {
                let w = *stddev * T::of(12.0);
                (*mean - w, *mean + w)
            }
            Density::Kde { samples, bandwidth } => {
                let w = *bandwidth * T::of(KDE_SUPPORT_WIDTHS);
                (samples[0] - w, samples[samples.len() - 1] + w)
            }
        }
    }
}

/// The channel `{f_a}`: one output density per source symbol `0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel<T> {
    densities: Vec<Density<T>>,
}

impl<T: Real> ChannelModel<T> {
    pub fn new(densities: Vec<Density<T>>) -> Result<Self> {
        if densities.is_empty() {
            return Err(Error::arg("channel needs at least one density"));
        }
        Ok(Self { densities })
    }

    /// Additive Gaussian noise around the given per-symbol means.
    pub fn gaussian(means: &[T], stddev: T) -> Result<Self> {
        let densities = means
            .iter()
            .map(|&m| Density::gaussian(m, stddev))
            .collect::<Result<Vec<_>>>()?;
        Self::new(densities)
    }

    pub fn alphabet_size(&self) -> usize {
        self.densities.len()
    }

    pub fn densities(&self) -> &[Density<T>] {
        &self.densities
    }

    pub fn density(&self, a: usize) -> Result<&Density<T>> {
        self.densities.get(a).ok_or_else(|| {
            Error::arg(format!(
                "symbol {a} out of range for alphabet of size {}",
                self.densities.len()
            ))
        })
    }

    /// `f_a(y)`.
    pub fn density_eval(&self, a: usize, y: T) -> Result<T> {
        Ok(self.density(a)?.pdf(y))
    }

    /// The vector `(f_0(y), ..., f_{M-1}(y))`.
    pub fn density_vector(&self, y: T) -> Vec<T> {
        self.densities.iter().map(|d| d.pdf(y)).collect()
    }

    pub fn density_vector_into(&self, y: T, out: &mut [T]) {
        for (o, d) in out.iter_mut().zip(&self.densities) {
            *o = d.pdf(y);
        }
    }

    /// Draws `Y ~ f_a`.
    pub fn sample_output<R: Rng + ?Sized>(&self, a: usize, rng: &mut R) -> Result<T> {
        Ok(self.density(a)?.sample(rng))
    }

    /// Numerically integrates `f_a` over its support.
    pub fn total_mass(&self, a: usize, tol: T) -> Result<T> {
        let d = self.density(a)?;
        let (lo, hi) = d.support();
        // split at the samples' span so Simpson sees the bumps
        let pieces = 64;
        let step = (hi - lo) / T::of_usize(pieces);
        Ok((0..pieces)
            .map(|i| {
                let a0 = lo + step * T::of_usize(i);
                adaptive_simpson(|y| d.pdf(y), a0, a0 + step, tol / T::of_usize(pieces))
            })
            .sum())
    }

    /// Builds a per-symbol KDE channel from paired `(symbol, output)` holdout samples.
    pub fn kde_estimate(paired_holdout: &[(usize, T)], bandwidth: T, alphabet: usize) -> Result<Self> {
        if !(bandwidth > T::zero()) {
            return Err(Error::arg(format!("kde bandwidth must be > 0, got {bandwidth}")));
        }
        let mut per_symbol = vec![Vec::new(); alphabet];
        for &(a, y) in paired_holdout {
            per_symbol
                .get_mut(a)
                .ok_or_else(|| Error::arg(format!("holdout symbol {a} outside alphabet {alphabet}")))?
                .push(y);
        }
        let densities = per_symbol
            .into_iter()
            .enumerate()
            .map(|(symbol, samples)| {
                if samples.is_empty() {
                    Err(Error::InsufficientData { symbol })
                } else {
                    Density::kde(samples, bandwidth)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(densities)
    }
}

/// Maps source symbols to channel input values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    /// `{-(M-1), ..., -1, +1, ..., M-1}` for even `M`, ascending.
    OddIntegers,
    /// Symbol `s` encodes to the value `s` (homopolymer length).
    Identity,
}

impl Encoding {
    pub fn value<T: Real>(self, symbol: usize, alphabet: usize) -> T {
        match self {
            Encoding::OddIntegers => T::of(2.0 * symbol as f64 - (alphabet as f64 - 1.0)),
            Encoding::Identity => T::of_usize(symbol),
        }
    }

    pub fn values<T: Real>(self, alphabet: usize) -> Vec<T> {
        (0..alphabet).map(|s| self.value(s, alphabet)).collect()
    }

    /// Boundaries of the rounding quantizer that maps each output to the nearest encoded value.
    pub fn rounding_quantizer<T: Real>(self, alphabet: usize) -> Quantizer<T> {
        let values: Vec<T> = self.values(alphabet);
        let two = T::of(2.0);
        let boundaries = values.windows(2).map(|w| (w[0] + w[1]) / two).collect();
        Quantizer::new(boundaries).expect("encoded values are strictly increasing")
    }
}
