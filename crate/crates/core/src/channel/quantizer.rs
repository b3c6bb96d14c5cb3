use crate::error::{Error, Result};
use crate::scalar::Real;

/// Partition of the real line into `K` half-open cells `[b_{i-1}, b_i)`.
///
/// The first cell extends to `-inf`, the last to `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer<T> {
    boundaries: Vec<T>,
}

impl<T: Real> Quantizer<T> {
    pub fn new(boundaries: Vec<T>) -> Result<Self> {
        if boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::arg("quantizer boundaries must be finite"));
        }
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::arg("quantizer boundaries must be strictly increasing"));
        }
        Ok(Self { boundaries })
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    /// Number of output cells `K`.
    pub fn num_cells(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Index of the cell containing `y`; a boundary point belongs to the cell on its right.
    pub fn quantize(&self, y: T) -> usize {
        self.boundaries.partition_point(|&b| b <= y)
    }

    pub fn quantize_all(&self, ys: &[T]) -> Vec<usize> {
        ys.iter().map(|&y| self.quantize(y)).collect()
    }

    /// Lower and upper edge of cell `z`, infinite at the ends.
    pub fn cell(&self, z: usize) -> (T, T) {
        let lo = if z == 0 { T::neg_infinity() } else { self.boundaries[z - 1] };
        let hi = self.boundaries.get(z).copied().unwrap_or_else(T::infinity);
        (lo, hi)
    }
}
