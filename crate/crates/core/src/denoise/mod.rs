//! Reconstruction schemes.
//!
//! Every sliding-window scheme with window `k` denoises positions
//! `k..n-k`; the `k` positions at either end fall back to
//! [`boundary_symbol`].

mod bayes;
mod dude;
mod gen_cude;
mod gen_dude;
mod hmm;
mod ml;

pub use bayes::{bayes_response, LossMatrix};
pub use dude::{cude_denoise, cude_denoise_with, dude_counts, dude_denoise, dude_posterior, ContextCountTable};
pub use gen_cude::{
    delta_round, gen_cude_denoise, gen_cude_denoise_with, gen_cude_posterior, gen_cude_posteriors, GenCudeModel,
};
pub use gen_dude::{gen_dude_denoise, DEFAULT_TUPLE_CAP};
pub use hmm::{baum_welch, fb_posteriors, fb_recursion, BaumWelchConfig, BaumWelchFit, FbResult};
pub use ml::ml_pdf;

use ndarray::ArrayView2;

use crate::scalar::Real;

/// Output at positions outside the window range: the quantized symbol itself
/// when quantizer cells and source symbols coincide (`K == M`), otherwise
/// the source symbol most likely to land in that cell.
pub fn boundary_symbol<T: Real>(z: usize, pi: ArrayView2<T>) -> usize {
    let (m, k) = pi.dim();
    if m == k {
        return z;
    }
    let mut best = 0;
    for x in 1..m {
        if pi[[x, z]] > pi[[best, z]] {
            best = x;
        }
    }
    best
}
