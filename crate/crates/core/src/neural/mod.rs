//! Feed-forward ReLU network with a softmax output, trained by Adam on
//! sliding-window contexts.

mod dataset;
mod network;
mod train;

pub use dataset::{build_contexts, build_onehot_contexts, ContextDataset};
pub use network::{Layer, NetworkParams};
pub use train::{train, Standardizer, TrainConfig, TrainOutcome, TrainedNetwork, Trainer};

use ndarray::{Array2, ArrayView2};

/// Anything that maps a batch of contexts (one per row) to probability rows.
pub trait Predict<T> {
    fn predict_batch(&self, inputs: ArrayView2<T>) -> Array2<T>;
}

impl<T, F> Predict<T> for F
where
    F: Fn(ArrayView2<T>) -> Array2<T>,
{
    fn predict_batch(&self, inputs: ArrayView2<T>) -> Array2<T> {
        self(inputs)
    }
}
