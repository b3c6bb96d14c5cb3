//! Loss and similarity metrics, the finite-sample bound calculator and the
//! experiment harness.

mod bound;
mod harness;

pub use bound::{epsilon_star, theorem_bound, BoundInputs, BoundReport};
pub use harness::{
    build_channel, build_quantizer, plan_cells, run_experiment, run_scheme, simulate, true_transition, write_csv,
    DenoiseRun, Scheme, Simulation, CSV_COLUMNS,
};

use crate::error::{Error, Result};
use crate::source::SymbolSequence;

/// Fraction of mismatched positions. With `interior_only`, positions
/// `k..n-k` only.
pub fn hamming_loss(x: &SymbolSequence, xhat: &SymbolSequence, interior_only: bool, k: usize) -> Result<f64> {
    let n = x.len();
    if xhat.len() != n {
        return Err(Error::arg(format!("length mismatch: {n} vs {}", xhat.len())));
    }
    let range = if interior_only {
        if n <= 2 * k {
            return Err(Error::arg(format!("no interior positions for n = {n}, k = {k}")));
        }
        k..n - k
    } else {
        if n == 0 {
            return Err(Error::arg("empty sequences"));
        }
        0..n
    };
    let len = range.len();
    let wrong = range.filter(|&i| x.symbols()[i] != xhat.symbols()[i]).count();
    Ok(wrong as f64 / len as f64)
}

/// `run / baseline`.
pub fn normalized_error(run_error: f64, baseline_error: f64) -> Result<f64> {
    if !(baseline_error > 0.0) {
        return Err(Error::arg(format!("baseline error must be > 0, got {baseline_error}")));
    }
    Ok(run_error / baseline_error)
}

/// Longest common subsequence length of two byte strings, computed with a
/// bit-parallel scan over `a` in `O(|a| |b| / 64)` time and `O(|a|)` space.
pub fn lcs_length(a: &[u8], b: &[u8]) -> usize {
    let m = a.len();
    if m == 0 || b.is_empty() {
        return 0;
    }
    let words = m.div_ceil(64);
    let mut masks: Vec<Option<Vec<u64>>> = vec![None; 256];
    for (i, &c) in a.iter().enumerate() {
        masks[c as usize].get_or_insert_with(|| vec![0; words])[i / 64] |= 1 << (i % 64);
    }
    let mut v = vec![u64::MAX; words];
    for &c in b {
        let Some(pm) = &masks[c as usize] else { continue };
        let mut carry = false;
        for (vw, &p) in v.iter_mut().zip(pm) {
            let u = *vw & p;
            let (s1, c1) = vw.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            carry = c1 || c2;
            *vw = s2 | (*vw & !p);
        }
    }
    let tail = m % 64;
    let zeros: usize = v
        .iter()
        .enumerate()
        .map(|(w, &vw)| {
            let live = if w == words - 1 && tail != 0 { (1u64 << tail) - 1 } else { u64::MAX };
            (!vw & live).count_ones() as usize
        })
        .sum();
    zeros
}

/// Global alignment score with match 1, mismatch 0 and gap 0, divided by the
/// longer of the two lengths, so that 1 means the candidate equals the
/// reference (inserted bases cost as much as deleted ones).
pub fn alignment_similarity(reference: &str, candidate: &str) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::arg("empty reference sequence"));
    }
    let len = reference.len().max(candidate.len());
    Ok(lcs_length(reference.as_bytes(), candidate.as_bytes()) as f64 / len as f64)
}
