//! Feed-forward classifier: `m → h1 → h2 → s`, ReLU hidden units, softmax
//! output, mean cross-entropy loss, Adam updates over seeded mini-batches.

use serde::{Deserialize, Serialize};

use super::NnConfig;
use crate::error::{Error, Result};
use crate::features::LabeledDataset;
use crate::rng::SeededRng;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// Dense layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.inputs)
                .zip(&self.biases)
                .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b),
        );
    }

    fn params(&self) -> impl Iterator<Item = &f64> {
        self.weights.iter().chain(&self.biases)
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights.iter_mut().chain(self.biases.iter_mut())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

struct Trace {
    // activations[0] is the input; pre[i] feeds activations[i + 1]
    activations: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

impl Mlp {
    /// He-normal weights, zero biases. `sizes` lists every layer width
    /// including input and output.
    pub fn init(sizes: &[usize], rng: &mut SeededRng) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let mut layer = Layer::zeros(w[0], w[1]);
                let sd = (2.0 / w[0] as f64).sqrt();
                layer
                    .weights
                    .iter_mut()
                    .for_each(|v| *v = sd * rng.normal());
                layer
            })
            .collect();
        Self { layers }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        Self {
            layers: sizes.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect(),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.layers.last().expect("at least one layer").outputs
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(Layer::params)
            .copied()
            .collect()
    }

    fn param_mut(&mut self, mut idx: usize) -> &mut f64 {
        for layer in &mut self.layers {
            let len = layer.weights.len() + layer.biases.len();
            if idx < len {
                return layer.params_mut().nth(idx).expect("in range");
            }
            idx -= len;
        }
        panic!("parameter index out of range");
    }

    fn forward(&self, x: &[f64]) -> Trace {
        let mut activations = vec![x.to_vec()];
        let mut pre = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(layer.outputs);
            layer.affine(&activations[i], &mut z);
            let a = if i + 1 < self.layers.len() {
                z.iter().map(|v| v.max(0.0)).collect()
            } else {
                z.clone()
            };
            pre.push(z);
            activations.push(a);
        }
        Trace { activations, pre }
    }

    /// Softmax class probabilities for one row.
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        softmax(self.forward(x).activations.last().expect("output"))
    }

    /// Mean cross-entropy over the rows.
    pub fn loss(&self, x: &[Vec<f64>], y: &[usize]) -> f64 {
        let total: f64 = x
            .iter()
            .zip(y)
            .map(|(row, &label)| {
                let logits = self.forward(row).activations.pop().expect("output");
                log_sum_exp(&logits) - logits[label]
            })
            .sum();
        total / x.len() as f64
    }

    /// Mean loss and its gradient over the rows at `batch`.
    fn loss_and_grad(&self, x: &[Vec<f64>], y: &[usize], batch: &[usize], grad: &mut Mlp) -> f64 {
        for layer in &mut grad.layers {
            layer.weights.iter_mut().for_each(|v| *v = 0.0);
            layer.biases.iter_mut().for_each(|v| *v = 0.0);
        }
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for &i in batch {
            let trace = self.forward(&x[i]);
            let logits = trace.activations.last().expect("output");
            loss += log_sum_exp(logits) - logits[y[i]];

            let mut delta = softmax(logits);
            delta[y[i]] -= 1.0;
            for l in (0..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let input = &trace.activations[l];
                let g = &mut grad.layers[l];
                for (o, d) in delta.iter().enumerate() {
                    let d = d * scale;
                    g.biases[o] += d;
                    let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (gw, a) in row.iter_mut().zip(input) {
                        *gw += d * a;
                    }
                }
                if l == 0 {
                    break;
                }
                let mut back = vec![0.0; layer.inputs];
                for (o, d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (b, w) in back.iter_mut().zip(row) {
                        *b += d * w;
                    }
                }
                for (b, z) in back.iter_mut().zip(&trace.pre[l - 1]) {
                    if *z <= 0.0 {
                        *b = 0.0;
                    }
                }
                delta = back;
            }
        }
        loss * scale
    }

    /// Analytic gradient of the mean loss over all rows, flattened in
    /// [`Mlp::params`] order.
    pub fn gradient(&self, x: &[Vec<f64>], y: &[usize]) -> Vec<f64> {
        let mut grad = self.zeros_like();
        let all: Vec<usize> = (0..x.len()).collect();
        self.loss_and_grad(x, y, &all, &mut grad);
        grad.params()
    }

    fn zeros_like(&self) -> Mlp {
        Mlp {
            layers: self
                .layers
                .iter()
                .map(|l| Layer::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

struct Adam {
    m: Mlp,
    v: Mlp,
    step: i32,
    lr: f64,
}

impl Adam {
    fn new(like: &Mlp, lr: f64) -> Self {
        Self {
            m: like.zeros_like(),
            v: like.zeros_like(),
            step: 0,
            lr,
        }
    }

    fn update(&mut self, net: &mut Mlp, grad: &Mlp) {
        self.step += 1;
        let c1 = 1.0 - BETA1.powi(self.step);
        let c2 = 1.0 - BETA2.powi(self.step);
        for (((p, g), m), v) in net
            .layers
            .iter_mut()
            .zip(&grad.layers)
            .zip(&mut self.m.layers)
            .zip(&mut self.v.layers)
        {
            for (((p, g), m), v) in p
                .params_mut()
                .zip(g.params())
                .zip(m.params_mut())
                .zip(v.params_mut())
            {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
            }
        }
    }
}

/// Train on already-standardized rows.
pub fn train(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    cfg: &NnConfig,
    seed: u64,
) -> Result<Mlp> {
    let m = x
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::invalid("empty training set"))?;
    if let Some(bad) = x.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: bad.len(),
        });
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let mut init_rng = SeededRng::derived(seed, 0);
    let mut order_rng = SeededRng::derived(seed, 1);
    let mut net = Mlp::init(&[m, cfg.hidden[0], cfg.hidden[1], n_classes], &mut init_rng);
    let mut grad = net.zeros_like();
    let mut adam = Adam::new(&net, cfg.learning_rate);
    let mut order: Vec<usize> = (0..x.len()).collect();
    for epoch in 0..cfg.epochs {
        order_rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let loss = net.loss_and_grad(x, y, batch, &mut grad);
            let grad_ok = grad
                .layers
                .iter()
                .all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()));
            if !loss.is_finite() || !grad_ok {
                return Err(Error::NonFiniteLoss { epoch });
            }
            epoch_loss += loss * batch.len() as f64;
            adam.update(&mut net, &grad);
        }
        if epoch % 50 == 0 || epoch + 1 == cfg.epochs {
            log::debug!("nn epoch {epoch}: loss {:.6}", epoch_loss / x.len() as f64);
        }
    }
    Ok(net)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub max_relative_error: f64,
    pub max_abs_error: f64,
    /// `|analytic - numeric|` per parameter, in [`Mlp::params`] order.
    pub abs_errors: Vec<f64>,
}

/// Relative errors are `|a - n| / max(|a|, |n|, 1e-6)`; the floor keeps
/// parameters with vanishing gradient (dead units) from dividing rounding
/// noise by zero.
pub fn check_gradient(net: &Mlp, x: &[Vec<f64>], y: &[usize], step: f64) -> GradientCheck {
    let analytic = net.gradient(x, y);
    let mut probe = net.clone();
    let mut abs_errors = Vec::with_capacity(analytic.len());
    let mut max_rel: f64 = 0.0;
    for (i, a) in analytic.iter().enumerate() {
        let orig = *probe.param_mut(i);
        *probe.param_mut(i) = orig + step;
        let plus = probe.loss(x, y);
        *probe.param_mut(i) = orig - step;
        let minus = probe.loss(x, y);
        *probe.param_mut(i) = orig;
        let numeric = (plus - minus) / (2.0 * step);
        let err = (a - numeric).abs();
        max_rel = max_rel.max(err / a.abs().max(numeric.abs()).max(1e-6));
        abs_errors.push(err);
    }
    GradientCheck {
        max_relative_error: max_rel,
        max_abs_error: abs_errors.iter().copied().fold(0.0, f64::max),
        abs_errors,
    }
}

/// Compare backpropagation against central differences (step `1e-5`) for a
/// freshly initialized network shaped by `cfg` and `sample`. Returns the
/// maximum relative error over all parameters.
pub fn nn_gradient_check(cfg: &super::ClassifierConfig, sample: &LabeledDataset) -> Result<f64> {
    if sample.is_empty() || sample.len() > 10 || sample.m_star == 0 || sample.m_star > 10 {
        return Err(Error::invalid(
            "gradient check needs 1..=10 rows with 1..=10 features",
        ));
    }
    let mut rng = SeededRng::derived(cfg.seed, 0);
    let net = Mlp::init(
        &[
            sample.m_star,
            cfg.nn.hidden[0],
            cfg.nn.hidden[1],
            sample.n_classes(),
        ],
        &mut rng,
    );
    Ok(check_gradient(&net, &sample.features, &sample.labels, 1e-5).max_relative_error)
}
