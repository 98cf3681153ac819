use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Linear classifier `logits = h · W + b` on frozen embeddings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProbe {
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
}

/// Gradients of the probe loss.
#[derive(Clone, Debug)]
pub struct ProbeGrad {
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
    pub input: Vec<f64>,
}

impl ProbeGrad {
    pub fn zeros(probe: &LinearProbe) -> Self {
        Self {
            weights: DenseMatrix::zeros(probe.weights.rows(), probe.weights.cols()),
            bias: vec![0.0; probe.bias.len()],
            input: vec![0.0; probe.weights.rows()],
        }
    }
}

impl LinearProbe {
    pub fn zeros(input_dim: usize, num_classes: usize) -> Self {
        Self { weights: DenseMatrix::zeros(input_dim, num_classes), bias: vec![0.0; num_classes] }
    }

    pub fn num_classes(&self) -> usize {
        self.bias.len()
    }

    pub fn logits(&self, h: &[f64]) -> Vec<f64> {
        let mut out = self.weights.vec_mul(h);
        for (o, b) in out.iter_mut().zip(&self.bias) {
            *o += b;
        }
        out
    }

    /// Index of the largest logit; ties go to the lowest class id.
    pub fn predict(&self, h: &[f64]) -> usize {
        argmax(&self.logits(h))
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Softmax cross-entropy of the probe on one embedding, with gradients
/// w.r.t. the probe parameters and the embedding.
pub fn probe_loss(probe: &LinearProbe, h: &[f64], label: usize) -> Result<(f64, ProbeGrad)> {
    let c = probe.num_classes();
    if label >= c {
        return Err(Error::OutOfRange(format!("label {label} ≥ num_classes {c}")));
    }
    if h.len() != probe.weights.rows() {
        return Err(Error::Shape(format!(
            "embedding dim {} ≠ probe input dim {}",
            h.len(),
            probe.weights.rows()
        )));
    }
    let logits = probe.logits(h);
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|z| (z - max).exp()).sum();
    let lse = max + sum.ln();
    let loss = lse - logits[label];

    let mut d_logits: Vec<f64> = logits.iter().map(|z| (z - lse).exp()).collect();
    d_logits[label] -= 1.0;

    let mut weights = DenseMatrix::zeros(h.len(), c);
    for (r, &x) in h.iter().enumerate() {
        for (w, g) in weights.row_mut(r).iter_mut().zip(&d_logits) {
            *w = x * g;
        }
    }
    let input = probe.weights.mul_vec(&d_logits);
    Ok((loss, ProbeGrad { weights, bias: d_logits, input }))
}
