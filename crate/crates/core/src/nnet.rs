//! Fully connected feed-forward regression network trained with mini-batch
//! Adam on mean-squared error. The output layer is always linear; hidden
//! layers share one activation and one width.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::mix64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnetError {
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("shape mismatch: expected input of length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative expressed through the activation value itself.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Activation::Tanh => write!(f, "tanh"),
            Activation::Sigmoid => write!(f, "sigmoid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub n_layers: usize,
    pub n_neurons: usize,
    pub activation: Activation,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<(), NnetError> {
        let bad = |msg: &str| Err(NnetError::InvalidHyperparameters(msg.into()));
        if self.n_layers < 1 {
            return bad("n_layers must be >= 1");
        }
        if self.n_neurons < 1 {
            return bad("n_neurons must be >= 1");
        }
        if self.batch_size < 1 {
            return bad("batch_size must be >= 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be >= 1");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be > 0");
        }
        Ok(())
    }
}

/// One dense layer; weights are row-major `[output][input]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn forward(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (row, b) in self.weights.iter().zip(&self.bias) {
            out.push(row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b);
        }
    }

    pub fn zeros_like(&self) -> Layer {
        Layer {
            weights: self.weights.iter().map(|r| vec![0.0; r.len()]).collect(),
            bias: vec![0.0; self.bias.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub input_dim: usize,
    /// Hidden layers followed by the linear scalar output layer.
    pub layers: Vec<Layer>,
    pub hyperparameters: Hyperparameters,
    /// Mean training MSE per epoch, on the quantile-transformed scale.
    pub loss_history: Vec<f64>,
}

/// Glorot-uniform initialization, biases zero, deterministic per seed.
pub fn mlp_init(input_dim: usize, hp: &Hyperparameters) -> Result<MlpModel, NnetError> {
    hp.validate()?;
    if input_dim < 1 {
        return Err(NnetError::InvalidHyperparameters(
            "input_dim must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(hp.seed);
    let mut dims = vec![input_dim];
    dims.extend(std::iter::repeat_n(hp.n_neurons, hp.n_layers));
    dims.push(1);
    let layers = dims
        .windows(2)
        .map(|d| {
            let (fan_in, fan_out) = (d[0], d[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            Layer {
                weights: (0..fan_out)
                    .map(|_| (0..fan_in).map(|_| rng.gen_range(-limit..limit)).collect())
                    .collect(),
                bias: vec![0.0; fan_out],
            }
        })
        .collect();
    Ok(MlpModel {
        input_dim,
        layers,
        hyperparameters: hp.clone(),
        loss_history: Vec::new(),
    })
}

/// All layer activations, input first. The last entry is the scalar output.
fn forward_trace(model: &MlpModel, x: &[f64]) -> Vec<Vec<f64>> {
    let act = model.hyperparameters.activation;
    let n_hidden = model.layers.len() - 1;
    let mut trace = Vec::with_capacity(model.layers.len() + 1);
    trace.push(x.to_vec());
    let mut buf = Vec::new();
    for (k, layer) in model.layers.iter().enumerate() {
        layer.forward(trace.last().unwrap(), &mut buf);
        if k < n_hidden {
            for v in &mut buf {
                *v = act.apply(*v);
            }
        }
        trace.push(buf.clone());
    }
    trace
}

pub fn forward(model: &MlpModel, x: &[f64]) -> Result<f64, NnetError> {
    if x.len() != model.input_dim {
        return Err(NnetError::ShapeMismatch {
            expected: model.input_dim,
            got: x.len(),
        });
    }
    Ok(forward_trace(model, x).last().unwrap()[0])
}

/// Accumulate dL/dparams for one sample into `grads`; returns the squared
/// error. `scale` multiplies the gradient (use 1/batch for batch averaging).
pub fn backprop(
    model: &MlpModel,
    x: &[f64],
    y: f64,
    scale: f64,
    grads: &mut [Layer],
) -> f64 {
    let act = model.hyperparameters.activation;
    let trace = forward_trace(model, x);
    let n_layers = model.layers.len();
    let pred = trace[n_layers][0];
    let err = pred - y;

    // delta for the linear output layer: dL/dz_out
    let mut delta = vec![2.0 * err * scale];
    for k in (0..n_layers).rev() {
        let input = &trace[k];
        let grad = &mut grads[k];
        for (j, &dj) in delta.iter().enumerate() {
            grad.bias[j] += dj;
            for (i, &xi) in input.iter().enumerate() {
                grad.weights[j][i] += dj * xi;
            }
        }
        if k == 0 {
            break;
        }
        let layer = &model.layers[k];
        let mut prev = vec![0.0; input.len()];
        for (j, &dj) in delta.iter().enumerate() {
            for (i, w) in layer.weights[j].iter().enumerate() {
                prev[i] += dj * w;
            }
        }
        // chain through the hidden activation of layer k-1
        for (i, v) in prev.iter_mut().enumerate() {
            *v *= act.derivative_from_output(trace[k][i]);
        }
        delta = prev;
    }
    err * err
}

pub struct AdamState {
    m: Vec<Layer>,
    v: Vec<Layer>,
    t: u64,
}

impl AdamState {
    pub fn new(model: &MlpModel) -> AdamState {
        AdamState {
            m: model.layers.iter().map(Layer::zeros_like).collect(),
            v: model.layers.iter().map(Layer::zeros_like).collect(),
            t: 0,
        }
    }

    pub fn step(&mut self, model: &mut MlpModel, grads: &[Layer], lr: f64) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        const EPS: f64 = 1e-8;
        self.t += 1;
        let c1 = 1.0 - B1.powi(self.t as i32);
        let c2 = 1.0 - B2.powi(self.t as i32);
        for (k, layer) in model.layers.iter_mut().enumerate() {
            let (m, v, g) = (&mut self.m[k], &mut self.v[k], &grads[k]);
            for j in 0..layer.bias.len() {
                for i in 0..layer.weights[j].len() {
                    let gw = g.weights[j][i];
                    m.weights[j][i] = B1 * m.weights[j][i] + (1.0 - B1) * gw;
                    v.weights[j][i] = B2 * v.weights[j][i] + (1.0 - B2) * gw * gw;
                    let mh = m.weights[j][i] / c1;
                    let vh = v.weights[j][i] / c2;
                    layer.weights[j][i] -= lr * mh / (vh.sqrt() + EPS);
                }
                let gb = g.bias[j];
                m.bias[j] = B1 * m.bias[j] + (1.0 - B1) * gb;
                v.bias[j] = B2 * v.bias[j] + (1.0 - B2) * gb * gb;
                let mh = m.bias[j] / c1;
                let vh = v.bias[j] / c2;
                layer.bias[j] -= lr * mh / (vh.sqrt() + EPS);
            }
        }
    }
}

/// Train by mini-batch Adam; the per-epoch mean MSE lands in
/// `loss_history`. Deterministic for a fixed seed, data, and shapes.
pub fn train(
    mut model: MlpModel,
    x: &[Vec<f64>],
    y: &[f64],
) -> Result<MlpModel, NnetError> {
    let hp = model.hyperparameters.clone();
    hp.validate()?;
    if x.len() != y.len() || x.is_empty() {
        return Err(NnetError::ShapeMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    for row in x {
        if row.len() != model.input_dim {
            return Err(NnetError::ShapeMismatch {
                expected: model.input_dim,
                got: row.len(),
            });
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(mix64(hp.seed ^ 0x7261_696e_5f72_6e67));
    let mut adam = AdamState::new(&model);
    let mut grads: Vec<Layer> = model.layers.iter().map(Layer::zeros_like).collect();
    let mut order: Vec<usize> = (0..x.len()).collect();
    model.loss_history.clear();
    for epoch in 0..hp.epochs {
        order.shuffle(&mut rng);
        let mut epoch_sse = 0.0;
        for batch in order.chunks(hp.batch_size) {
            for g in &mut grads {
                for row in &mut g.weights {
                    row.fill(0.0);
                }
                g.bias.fill(0.0);
            }
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                epoch_sse += backprop(&model, &x[i], y[i], scale, &mut grads);
            }
            adam.step(&mut model, &grads, hp.learning_rate);
        }
        let epoch_mse = epoch_sse / x.len() as f64;
        if !epoch_mse.is_finite() {
            return Err(NnetError::NonFiniteLoss { epoch });
        }
        model.loss_history.push(epoch_mse);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(seed: u64) -> Hyperparameters {
        Hyperparameters {
            n_layers: 2,
            n_neurons: 4,
            activation: Activation::Tanh,
            batch_size: 8,
            epochs: 5,
            learning_rate: 0.001,
            seed,
        }
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = mlp_init(3, &hp(7)).unwrap();
        let b = mlp_init(3, &hp(7)).unwrap();
        assert_eq!(a, b);
        let c = mlp_init(3, &hp(8)).unwrap();
        assert_ne!(a, c);
        for layer in &a.layers {
            let fan_in = layer.weights[0].len();
            let fan_out = layer.weights.len();
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            assert!(layer.bias.iter().all(|&b| b == 0.0));
            assert!(layer
                .weights
                .iter()
                .flatten()
                .all(|w| w.abs() <= limit));
        }
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let mut h = hp(1);
        h.epochs = 0;
        assert!(matches!(
            mlp_init(2, &h),
            Err(NnetError::InvalidHyperparameters(_))
        ));
        let mut h = hp(1);
        h.learning_rate = 0.0;
        assert!(mlp_init(2, &h).is_err());
    }

    #[test]
    fn forward_zero_weights_returns_bias() {
        let mut m = mlp_init(2, &hp(3)).unwrap();
        for layer in &mut m.layers {
            for row in &mut layer.weights {
                row.fill(0.0);
            }
        }
        m.layers.last_mut().unwrap().bias[0] = 0.25;
        assert_eq!(forward(&m, &[5.0, -3.0]).unwrap(), 0.25);
    }

    #[test]
    fn forward_hand_computed_2_2_1() {
        let model = MlpModel {
            input_dim: 2,
            layers: vec![
                Layer {
                    weights: vec![vec![0.5, -0.25], vec![0.1, 0.3]],
                    bias: vec![0.1, -0.2],
                },
                Layer {
                    weights: vec![vec![1.5, -2.0]],
                    bias: vec![0.05],
                },
            ],
            hyperparameters: Hyperparameters {
                n_layers: 1,
                n_neurons: 2,
                activation: Activation::Tanh,
                batch_size: 1,
                epochs: 1,
                learning_rate: 0.001,
                seed: 0,
            },
            loss_history: vec![],
        };
        let x = [1.0, 2.0];
        let h1 = (0.5 - 0.5 + 0.1_f64).tanh();
        let h2 = (0.1 + 0.6 - 0.2_f64).tanh();
        let want = 1.5 * h1 - 2.0 * h2 + 0.05;
        let got = forward(&model, &x).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn output_is_affine_in_hidden_state() {
        // superposition check on the last layer
        let m = mlp_init(3, &hp(11)).unwrap();
        let out_layer = m.layers.last().unwrap();
        let f = |h: &[f64]| {
            out_layer.weights[0]
                .iter()
                .zip(h)
                .map(|(w, a)| w * a)
                .sum::<f64>()
                + out_layer.bias[0]
        };
        let a = [0.3, -0.7, 0.2, 0.9];
        let b = [0.1, 0.5, -0.4, -0.2];
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = f(&sum) + f(&[0.0; 4]);
        let rhs = f(&a) + f(&b);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn adam_single_step_hand_example() {
        // f(w) = w^2 at w0 = 1: gradient 2, bias-corrected m=2, v=4
        let mut model = MlpModel {
            input_dim: 1,
            layers: vec![Layer {
                weights: vec![vec![1.0]],
                bias: vec![0.0],
            }],
            hyperparameters: Hyperparameters {
                n_layers: 0,
                n_neurons: 1,
                activation: Activation::Tanh,
                batch_size: 1,
                epochs: 1,
                learning_rate: 0.001,
                seed: 0,
            },
            loss_history: vec![],
        };
        let mut adam = AdamState::new(&model);
        let grads = vec![Layer {
            weights: vec![vec![2.0]],
            bias: vec![0.0],
        }];
        adam.step(&mut model, &grads, 0.001);
        let w1 = model.layers[0].weights[0][0];
        assert!((w1 - (1.0 - 0.001 * 2.0 / (2.0 + 1e-8))).abs() < 1e-12);
        assert!((w1 - 0.999).abs() < 1e-6);
    }

    fn numeric_gradients(model: &MlpModel, x: &[f64], y: f64) -> Vec<Layer> {
        let step = 1e-5;
        let loss = |m: &MlpModel| {
            let p = forward(m, x).unwrap();
            (p - y) * (p - y)
        };
        model
            .layers
            .iter()
            .enumerate()
            .map(|(k, layer)| {
                let mut g = layer.zeros_like();
                for j in 0..layer.bias.len() {
                    for i in 0..layer.weights[j].len() {
                        let mut up = model.clone();
                        up.layers[k].weights[j][i] += step;
                        let mut dn = model.clone();
                        dn.layers[k].weights[j][i] -= step;
                        g.weights[j][i] = (loss(&up) - loss(&dn)) / (2.0 * step);
                    }
                    let mut up = model.clone();
                    up.layers[k].bias[j] += step;
                    let mut dn = model.clone();
                    dn.layers[k].bias[j] -= step;
                    g.bias[j] = (loss(&up) - loss(&dn)) / (2.0 * step);
                }
                g
            })
            .collect()
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for draw in 0..100 {
            let activation = if draw % 2 == 0 {
                Activation::Tanh
            } else {
                Activation::Sigmoid
            };
            let h = Hyperparameters {
                n_layers: 1 + draw % 3,
                n_neurons: 2 + draw % 7,
                activation,
                batch_size: 1,
                epochs: 1,
                learning_rate: 0.001,
                seed: draw as u64,
            };
            let dim = 1 + draw % 4;
            let model = mlp_init(dim, &h).unwrap();
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: f64 = rng.gen_range(-1.0..1.0);
            let mut analytic: Vec<Layer> =
                model.layers.iter().map(Layer::zeros_like).collect();
            backprop(&model, &x, y, 1.0, &mut analytic);
            let numeric = numeric_gradients(&model, &x, y);
            for (a, n) in analytic.iter().zip(&numeric) {
                for (ar, nr) in a.weights.iter().zip(&n.weights) {
                    for (&av, &nv) in ar.iter().zip(nr) {
                        let denom = av.abs().max(nv.abs()).max(1e-6);
                        assert!(
                            ((av - nv) / denom).abs() < 1e-4,
                            "draw {draw}: {av} vs {nv}"
                        );
                    }
                }
                for (&av, &nv) in a.bias.iter().zip(&n.bias) {
                    let denom = av.abs().max(nv.abs()).max(1e-6);
                    assert!(((av - nv) / denom).abs() < 1e-4);
                }
            }
        }
    }

    #[test]
    fn fits_a_line_and_training_is_deterministic() {
        let x: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64 / 100.0 - 0.5]).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v[0]).collect();
        let h = Hyperparameters {
            n_layers: 1,
            n_neurons: 8,
            activation: Activation::Tanh,
            batch_size: 16,
            epochs: 2000,
            learning_rate: 0.01,
            seed: 5,
        };
        let m1 = train(mlp_init(1, &h).unwrap(), &x, &y).unwrap();
        let m2 = train(mlp_init(1, &h).unwrap(), &x, &y).unwrap();
        assert_eq!(m1, m2);
        let final_mse = *m1.loss_history.last().unwrap();
        assert!(final_mse < 1e-4, "final MSE {final_mse}");
        let n = m1.loss_history.len();
        let head: f64 = m1.loss_history[..n / 10].iter().sum::<f64>() / (n / 10) as f64;
        let tail: f64 = m1.loss_history[n - n / 10..].iter().sum::<f64>() / (n / 10) as f64;
        assert!(tail < head);
    }
}
