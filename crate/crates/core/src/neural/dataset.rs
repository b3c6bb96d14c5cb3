use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Context rows and the quantized centre symbol each row should predict.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextDataset<T> {
    pub inputs: Array2<T>,
    pub targets: Vec<usize>,
    pub num_classes: usize,
}

impl<T: Real> ContextDataset<T> {
    pub fn new(inputs: Array2<T>, targets: Vec<usize>, num_classes: usize) -> Result<Self> {
        if inputs.nrows() != targets.len() {
            return Err(Error::arg(format!(
                "{} context rows but {} targets",
                inputs.nrows(),
                targets.len()
            )));
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= num_classes) {
            return Err(Error::arg(format!("target {t} outside 0..{num_classes}")));
        }
        Ok(Self {
            inputs,
            targets,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.ncols()
    }
}

fn check_window(n: usize, k: usize) -> Result<()> {
    if n < 2 * k + 1 {
        return Err(Error::arg(format!(
            "sequence of length {n} is too short for window k = {k} (needs at least {})",
            2 * k + 1
        )));
    }
    Ok(())
}

/// Row `r` (position `i = r + k`) holds `(y[i-k..i], y[i+1..=i+k])` and target `z[i]`.
pub fn build_contexts<T: Real>(y: &[T], z: &[usize], k: usize, num_classes: usize) -> Result<ContextDataset<T>> {
    if y.len() != z.len() {
        return Err(Error::arg("observation and quantized sequences differ in length"));
    }
    let n = y.len();
    check_window(n, k)?;
    let rows = n - 2 * k;
    let inputs = Array2::from_shape_fn((rows, 2 * k), |(r, j)| {
        let i = r + k;
        if j < k {
            y[i - k + j]
        } else {
            y[i + 1 + (j - k)]
        }
    });
    ContextDataset::new(inputs, z[k..n - k].to_vec(), num_classes)
}

/// Same layout as [`build_contexts`] but over discrete symbols, each one-hot
/// encoded into `num_classes` columns.
pub fn build_onehot_contexts<T: Real>(z: &[usize], k: usize, num_classes: usize) -> Result<ContextDataset<T>> {
    let n = z.len();
    check_window(n, k)?;
    let rows = n - 2 * k;
    let mut inputs = Array2::<T>::zeros((rows, 2 * k * num_classes));
    for r in 0..rows {
        let i = r + k;
        let ctx = (i - k..i).chain(i + 1..=i + k);
        for (slot, pos) in ctx.enumerate() {
            let sym = z[pos];
            if sym >= num_classes {
                return Err(Error::arg(format!("symbol {sym} outside 0..{num_classes}")));
            }
            inputs[[r, slot * num_classes + sym]] = T::one();
        }
    }
    ContextDataset::new(inputs, z[k..n - k].to_vec(), num_classes)
}
