use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Predict;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One affine layer; `weights` is `inputs x outputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
}

/// Parameters of a ReLU MLP whose last layer feeds a softmax.
///
/// The same type doubles as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams<T> {
    layers: Vec<Layer<T>>,
}

impl<T: Real> NetworkParams<T> {
    pub fn from_layers(layers: Vec<Layer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::arg("network needs at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.weights.ncols() != l.bias.len() {
                return Err(Error::arg(format!("layer {i}: bias length does not match outputs")));
            }
            if i > 0 && layers[i - 1].weights.ncols() != l.weights.nrows() {
                return Err(Error::arg(format!("layer {i}: input width does not chain")));
            }
        }
        if layers[layers.len() - 1].weights.ncols() == 0 {
            return Err(Error::arg("output layer needs at least one class"));
        }
        Ok(Self { layers })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::arg("layer dims need an input and an output width"));
        }
        Self::from_layers(
            dims.windows(2)
                .map(|w| Layer {
                    weights: Array2::zeros((w[0], w[1])),
                    bias: Array1::zeros(w[1]),
                })
                .collect(),
        )
    }

    /// He-style uniform initialisation: weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
    pub fn init(dims: &[usize], seed: u64) -> Result<Self> {
        let mut p = Self::zeros(dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in &mut p.layers {
            let fan_in = l.weights.nrows().max(1);
            let limit = (6.0 / fan_in as f64).sqrt();
            l.weights.mapv_inplace(|_| T::of(rng.random_range(-limit..limit)));
        }
        Ok(p)
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    /// `[input, hidden..., output]` widths.
    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].weights.nrows())
            .chain(self.layers.iter().map(|l| l.weights.ncols()))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.layers[self.layers.len() - 1].weights.ncols()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Row-major weights then bias, layer by layer.
    pub fn iter_params(&self) -> impl Iterator<Item = &T> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn iter_params_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn is_finite(&self) -> bool {
        self.iter_params().all(|v| v.is_finite())
    }

    /// Pre-softmax outputs for a batch.
    pub fn logits_batch(&self, inputs: ArrayView2<T>) -> Array2<T> {
        let last = self.layers.len() - 1;
        let mut act = inputs.to_owned();
        for (i, l) in self.layers.iter().enumerate() {
            let mut z = act.dot(&l.weights);
            z += &l.bias;
            if i < last {
                z.mapv_inplace(|v| v.max(T::zero()));
            }
            act = z;
        }
        act
    }

    pub fn forward_batch(&self, inputs: ArrayView2<T>) -> Array2<T> {
        let mut logits = self.logits_batch(inputs);
        for mut row in logits.axis_iter_mut(Axis(0)) {
            softmax_inplace(row.as_slice_mut().expect("logits are contiguous"));
        }
        logits
    }

    /// Class probabilities for a single context.
    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.input_dim() {
            return Err(Error::arg(format!(
                "input has length {} but the network expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        let x = ArrayView2::from_shape((1, input.len()), input).expect("row shape");
        Ok(self.forward_batch(x).row(0).to_vec())
    }

    /// Mean cross-entropy over the batch and its gradient.
    pub fn loss_and_grad(&self, inputs: ArrayView2<T>, targets: &[usize]) -> Result<(T, NetworkParams<T>)> {
        let batch = targets.len();
        if batch == 0 || inputs.nrows() != batch {
            return Err(Error::arg("batch must be nonempty with one target per row"));
        }
        if inputs.ncols() != self.input_dim() {
            return Err(Error::arg("batch width does not match the network input"));
        }
        let classes = self.num_classes();
        if let Some(&t) = targets.iter().find(|&&t| t >= classes) {
            return Err(Error::arg(format!("target {t} outside 0..{classes}")));
        }

        let last = self.layers.len() - 1;
        // activations[l] is the input to layer l
        let mut activations = Vec::with_capacity(self.layers.len());
        let mut act = inputs.to_owned();
        for (i, l) in self.layers.iter().enumerate() {
            let mut z = act.dot(&l.weights);
            z += &l.bias;
            if i < last {
                z.mapv_inplace(|v| v.max(T::zero()));
            }
            activations.push(act);
            act = z;
        }
        let mut delta = act;
        let inv_b = T::one() / T::of_usize(batch);
        let mut loss = T::zero();
        for (mut row, &t) in delta.axis_iter_mut(Axis(0)).zip(targets) {
            let row = row.as_slice_mut().expect("contiguous");
            let lse = log_sum_exp(row);
            loss += lse - row[t];
            for v in row.iter_mut() {
                *v = (*v - lse).exp();
            }
            row[t] -= T::one();
            for v in row.iter_mut() {
                *v *= inv_b;
            }
        }
        loss *= inv_b;

        let mut grads = Vec::with_capacity(self.layers.len());
        for i in (0..self.layers.len()).rev() {
            let a = &activations[i];
            let dw = a.t().dot(&delta);
            let db = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut da = delta.dot(&self.layers[i].weights.t());
                // a is the ReLU output of the previous layer: zero exactly where it was inactive
                Zip::from(&mut da).and(a).for_each(|d, &x| {
                    if x <= T::zero() {
                        *d = T::zero();
                    }
                });
                delta = da;
            }
            grads.push(Layer { weights: dw, bias: db });
        }
        grads.reverse();
        Ok((loss, NetworkParams { layers: grads }))
    }

    /// Text checkpoint: a `dims` line, then one parameter per line in
    /// [`iter_params`](Self::iter_params) order.
    pub fn to_text(&self) -> String {
        let mut out = String::from("dims");
        for d in self.layer_dims() {
            write!(out, " {d}").unwrap();
        }
        out.push('\n');
        for v in self.iter_params() {
            writeln!(out, "{v}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Format {
            line: 1,
            message: "empty checkpoint".into(),
        })?;
        let mut toks = header.split_whitespace();
        if toks.next() != Some("dims") {
            return Err(Error::Format {
                line: 1,
                message: "checkpoint must start with `dims`".into(),
            });
        }
        let dims = toks
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Format {
                    line: 1,
                    message: format!("bad layer width `{t}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut params = Self::zeros(&dims)?;
        let expected = params.num_params();
        for (count, slot) in params.iter_params_mut().enumerate() {
            let (idx, tok) = lines.next().ok_or(Error::Format {
                line: count + 2,
                message: format!("checkpoint ends after {count} of {expected} parameters"),
            })?;
            *slot = tok.trim().parse::<T>().map_err(|_| Error::Format {
                line: idx + 1,
                message: format!("bad parameter `{}`", tok.trim()),
            })?;
        }
        if let Some((idx, _)) = lines.next() {
            return Err(Error::Format {
                line: idx + 1,
                message: "trailing values after the last parameter".into(),
            });
        }
        Ok(params)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_text(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    /// `self += scale * other`, for parameter-shaped arithmetic.
    pub fn add_scaled(&mut self, other: &NetworkParams<T>, scale: T) {
        for (a, b) in self.iter_params_mut().zip(other.iter_params()) {
            *a += scale * *b;
        }
    }
}

impl<T: Real> Predict<T> for NetworkParams<T> {
    fn predict_batch(&self, inputs: ArrayView2<T>) -> Array2<T> {
        self.forward_batch(inputs)
    }
}

fn log_sum_exp<T: Real>(row: &[T]) -> T {
    let max = row.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    let sum: T = row.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

fn softmax_inplace<T: Real>(row: &mut [T]) {
    let lse = log_sum_exp(row);
    for v in row.iter_mut() {
        *v = (*v - lse).exp();
    }
}
