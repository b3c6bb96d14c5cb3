use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ContextDataset, NetworkParams, Predict};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Adam and minibatch settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Standardise each input feature to zero mean and unit variance.
    pub standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 256,
            epochs: 10,
            seed: 0,
            standardize: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::arg("learning rate must be > 0"));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::arg(format!("{name} must lie in [0, 1)")));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::arg("adam epsilon must be > 0"));
        }
        if self.batch_size == 0 {
            return Err(Error::arg("batch size must be at least 1"));
        }
        Ok(())
    }
}

/// Per-feature affine map `(x - mean) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer<T> {
    pub mean: Array1<T>,
    pub scale: Array1<T>,
}

impl<T: Real> Standardizer<T> {
    pub fn fit(inputs: ArrayView2<T>) -> Self {
        let cols = inputs.ncols();
        if inputs.nrows() == 0 {
            return Self {
                mean: Array1::zeros(cols),
                scale: Array1::ones(cols),
            };
        }
        let mean = inputs.mean_axis(Axis(0)).expect("nonempty");
        let var = inputs.var_axis(Axis(0), T::zero());
        let scale = var.mapv(|v| if v > T::zero() { v.sqrt() } else { T::one() });
        Self { mean, scale }
    }

    pub fn apply(&self, inputs: ArrayView2<T>) -> Array2<T> {
        let mut out = inputs.to_owned();
        out -= &self.mean;
        out /= &self.scale;
        out
    }
}

/// Trained parameters together with the input transform they expect.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedNetwork<T> {
    pub params: NetworkParams<T>,
    pub standardizer: Option<Standardizer<T>>,
}

impl<T: Real> Predict<T> for TrainedNetwork<T> {
    fn predict_batch(&self, inputs: ArrayView2<T>) -> Array2<T> {
        match &self.standardizer {
            Some(s) => self.params.forward_batch(s.apply(inputs).view()),
            None => self.params.forward_batch(inputs),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub network: TrainedNetwork<T>,
    /// Mean minibatch loss of each epoch.
    pub epoch_losses: Vec<T>,
}

/// Adam optimiser state over one parameter set.
#[derive(Debug, Clone)]
pub struct Trainer<T> {
    params: NetworkParams<T>,
    m: NetworkParams<T>,
    v: NetworkParams<T>,
    step: i32,
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
}

impl<T: Real> Trainer<T> {
    pub fn new(params: NetworkParams<T>, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let dims = params.layer_dims();
        Ok(Self {
            m: NetworkParams::zeros(&dims)?,
            v: NetworkParams::zeros(&dims)?,
            params,
            step: 0,
            lr: T::of(cfg.learning_rate),
            beta1: T::of(cfg.beta1),
            beta2: T::of(cfg.beta2),
            eps: T::of(cfg.epsilon),
        })
    }

    pub fn params(&self) -> &NetworkParams<T> {
        &self.params
    }

    pub fn into_params(self) -> NetworkParams<T> {
        self.params
    }

    /// One Adam update on a minibatch; returns the batch loss before the update.
    pub fn step(&mut self, inputs: ArrayView2<T>, targets: &[usize]) -> Result<T> {
        let (loss, grad) = self.params.loss_and_grad(inputs, targets)?;
        self.step += 1;
        let one = T::one();
        let bc1 = one - self.beta1.powi(self.step);
        let bc2 = one - self.beta2.powi(self.step);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        for (((w, g), m), v) in self
            .params
            .iter_params_mut()
            .zip(grad.iter_params())
            .zip(self.m.iter_params_mut())
            .zip(self.v.iter_params_mut())
        {
            *m = b1 * *m + (one - b1) * *g;
            *v = b2 * *v + (one - b2) * *g * *g;
            let mhat = *m / bc1;
            let vhat = *v / bc2;
            *w -= lr * mhat / (vhat.sqrt() + eps);
        }
        Ok(loss)
    }
}

/// Trains a fresh network of shape `[input, hidden..., classes]` with Adam over
/// shuffled minibatches. Deterministic given `cfg.seed`.
pub fn train<T: Real>(dataset: &ContextDataset<T>, hidden: &[usize], cfg: &TrainConfig) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(Error::arg("cannot train on an empty dataset"));
    }
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(dataset.input_dim());
    dims.extend_from_slice(hidden);
    dims.push(dataset.num_classes);
    let init = NetworkParams::init(&dims, cfg.seed)?;

    let standardizer = cfg.standardize.then(|| Standardizer::fit(dataset.inputs.view()));
    let inputs = match &standardizer {
        Some(s) => s.apply(dataset.inputs.view()),
        None => dataset.inputs.clone(),
    };

    let mut trainer = Trainer::new(init, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut batch_t = Vec::with_capacity(cfg.batch_size);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = T::zero();
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let batch_x = inputs.select(Axis(0), chunk);
            batch_t.clear();
            batch_t.extend(chunk.iter().map(|&i| dataset.targets[i]));
            let loss = trainer.step(batch_x.view(), &batch_t)?;
            if !loss.is_finite() || !trainer.params().is_finite() {
                return Err(Error::TrainingDiverged { epoch: epoch + 1 });
            }
            total += loss;
            batches += 1;
        }
        epoch_losses.push(total / T::of_usize(batches));
    }

    Ok(TrainOutcome {
        network: TrainedNetwork {
            params: trainer.into_params(),
            standardizer,
        },
        epoch_losses,
    })
}
