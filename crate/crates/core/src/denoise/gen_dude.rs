//! Gen-DUDE: Bayes response against the joint of the source symbol and the
//! observed window, expanded over every source `(2k+1)`-tuple.

use ndarray::ArrayView2;

use super::{bayes_response, boundary_symbol, LossMatrix};
use crate::channel::{induced_dmc, ChannelModel, Quantizer};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::source::{ObservationSequence, SymbolSequence};

/// Default limit on the number of enumerated tuples.
pub const DEFAULT_TUPLE_CAP: u128 = 1_000_000;

fn tuple_count(base: usize, width: usize) -> u128 {
    (0..width).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Applies `inv` (`K x M`) along every coordinate of a `K^width` tensor,
/// producing an `M^width` tensor (row-major, first coordinate slowest).
fn tensor_inverse<T: Real>(dist: Vec<T>, width: usize, inv: ArrayView2<T>) -> Vec<T> {
    let (kq, m) = inv.dim();
    let mut cur = dist;
    // dims[j] is the current extent of coordinate j
    let mut dims = vec![kq; width];
    for j in 0..width {
        let outer: usize = dims[..j].iter().product();
        let inner: usize = dims[j + 1..].iter().product();
        let mut next = vec![T::zero(); outer * m * inner];
        for o in 0..outer {
            for z in 0..kq {
                let src = &cur[(o * kq + z) * inner..(o * kq + z + 1) * inner];
                for a in 0..m {
                    let w = inv[[z, a]];
                    if w == T::zero() {
                        continue;
                    }
                    let dst = &mut next[(o * m + a) * inner..(o * m + a + 1) * inner];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d += w * s;
                    }
                }
            }
        }
        dims[j] = m;
        cur = next;
    }
    cur
}

/// Gen-DUDE with quantizer `q`.
///
/// The source tuple distribution is estimated from the empirical distribution
/// of quantized `(2k+1)`-tuples through the per-coordinate channel inverse,
/// clamped at zero and renormalised. Fails with [`Error::ComplexityCap`] when
/// `M^(2k+1)` (or `K^(2k+1)`) exceeds `cap`.
pub fn gen_dude_denoise<T: Real>(
    y: &ObservationSequence<T>,
    k: usize,
    channel: &ChannelModel<T>,
    q: &Quantizer<T>,
    loss: &LossMatrix<T>,
    cap: u128,
) -> Result<SymbolSequence> {
    let m = channel.alphabet_size();
    let kq = q.num_cells();
    let width = 2 * k + 1;
    for base in [m, kq] {
        let size = tuple_count(base, width);
        if size > cap {
            return Err(Error::ComplexityCap {
                base,
                exponent: width,
                size,
                cap,
            });
        }
    }
    if loss.size() != m {
        return Err(Error::arg("loss matrix and channel disagree on the source alphabet"));
    }
    let ys = y.values();
    let n = ys.len();
    if n < width {
        return Err(Error::arg(format!("sequence of length {n} too short for window {k}")));
    }
    let dmc = induced_dmc(channel, q)?;
    let z = q.quantize_all(ys);

    // empirical distribution of quantized tuples
    let mut dist = vec![T::zero(); kq.pow(width as u32)];
    for i in k..n - k {
        let idx = z[i - k..=i + k].iter().fold(0usize, |acc, &s| acc * kq + s);
        dist[idx] += T::one();
    }
    let total = T::of_usize(n - 2 * k);
    dist.iter_mut().for_each(|d| *d /= total);

    let mut prior = tensor_inverse(dist, width, dmc.pi_inv());
    prior.iter_mut().for_each(|p| *p = p.max(T::zero()));
    let mass: T = prior.iter().copied().sum();
    if mass > T::zero() {
        prior.iter_mut().for_each(|p| *p /= mass);
    } else {
        let u = T::one() / T::of_usize(prior.len());
        prior.iter_mut().for_each(|p| *p = u);
    }

    // densities per position
    let dens: Vec<T> = ys.iter().flat_map(|&v| channel.density_vector(v)).collect();

    let mut out = Vec::with_capacity(n);
    let mut score = vec![T::zero(); m];
    let mut digits = vec![0usize; width];
    for i in 0..n {
        if i < k || i >= n - k {
            out.push(boundary_symbol(z[i], dmc.pi()));
            continue;
        }
        score.iter_mut().for_each(|s| *s = T::zero());
        digits.iter_mut().for_each(|d| *d = 0);
        let window = &dens[(i - k) * m..(i + k + 1) * m];
        for &p in &prior {
            if p != T::zero() {
                let mut prod = p;
                for (j, &d) in digits.iter().enumerate() {
                    prod *= window[j * m + d];
                }
                score[digits[k]] += prod;
            }
            // odometer increment, last coordinate fastest
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        out.push(bayes_response(&score, loss));
    }
    SymbolSequence::new(out, m)
}
