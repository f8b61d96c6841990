//! Linear one-vs-rest SVM.
//!
//! Each class gets its own `(w, b)` minimizing
//! `λ/2·|w|² + mean(max(0, 1 - t·(w·x + b)))` with `t = ±1` and
//! `λ = 1 / (C·n)`. Training is stochastic sub-gradient descent over a
//! seeded visiting order with step `C / (epoch + 1)`, constant within an
//! epoch (the Pegasos `1/(λt)` schedule evaluated at epoch ends). The bias is not regularized.

use serde::{Deserialize, Serialize};

use super::SvmConfig;
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    /// One weight vector per class.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

impl LinearSvm {
    pub fn decision_values(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b)
            .collect()
    }
}

fn train_binary(
    x: &[Vec<f64>],
    target: &[f64],
    cfg: &SvmConfig,
    rng: &mut SeededRng,
) -> (Vec<f64>, f64) {
    let n = x.len();
    let lambda = 1.0 / (cfg.c * n as f64);
    let mut w = vec![0.0; x[0].len()];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..cfg.epochs {
        let eta = cfg.c / (epoch + 1) as f64;
        let shrink = 1.0 - eta * lambda;
        rng.shuffle(&mut order);
        for &i in &order {
            let margin = target[i] * (w.iter().zip(&x[i]).map(|(a, v)| a * v).sum::<f64>() + b);
            w.iter_mut().for_each(|a| *a *= shrink);
            if margin < 1.0 {
                let step = eta * target[i];
                for (a, v) in w.iter_mut().zip(&x[i]) {
                    *a += step * v;
                }
                b += step;
            }
        }
    }
    (w, b)
}

/// Train on already-standardized rows.
pub fn train(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    cfg: &SvmConfig,
    seed: u64,
) -> LinearSvm {
    let mut weights = Vec::with_capacity(n_classes);
    let mut biases = Vec::with_capacity(n_classes);
    for class in 0..n_classes {
        let mut rng = SeededRng::derived(seed, class as u64);
        let target: Vec<f64> = y
            .iter()
            .map(|&l| if l == class { 1.0 } else { -1.0 })
            .collect();
        let (w, b) = train_binary(x, &target, cfg, &mut rng);
        weights.push(w);
        biases.push(b);
    }
    LinearSvm { weights, biases }
}
