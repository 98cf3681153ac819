use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{dot, sigmoid, DenseMatrix};

/// Pair scorer `p = σ(W₂ · ReLU((h_i + h_j) · W₁))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    /// `d_h × d_p`.
    pub w1: DenseMatrix,
    /// `d_p × 1`.
    pub w2: DenseMatrix,
}

impl Projector {
    pub fn init<R: Rng + ?Sized>(input_dim: usize, hidden: usize, rng: &mut R) -> Self {
        Self { w1: DenseMatrix::glorot(input_dim, hidden, rng), w2: DenseMatrix::glorot(hidden, 1, rng) }
    }

    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        Self { w1: DenseMatrix::zeros(input_dim, hidden), w2: DenseMatrix::zeros(hidden, 1) }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.rows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1.cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.w2.rows() != self.w1.cols() || self.w2.cols() != 1 {
            return Err(Error::Shape(format!(
                "projector w1 {:?} and w2 {:?} do not chain",
                self.w1.shape(),
                self.w2.shape()
            )));
        }
        if !self.w1.is_finite() || !self.w2.is_finite() {
            return Err(Error::NonFinite("projector weights".into()));
        }
        Ok(())
    }

    /// Pre-sigmoid score from the projected node rows `u_i = h_i·W₁`,
    /// `u_j = h_j·W₁`.
    #[inline]
    pub(crate) fn logit_from_projected(&self, u_i: &[f64], u_j: &[f64]) -> f64 {
        u_i.iter()
            .zip(u_j)
            .zip(self.w2.data())
            .map(|((a, b), w)| (a + b).max(0.0) * w)
            .sum()
    }
}

/// Probability and whether the clamp was active (zero gradient if so).
#[inline]
pub(crate) fn clamp_prob(raw: f64, eps: f64) -> (f64, bool) {
    if raw < eps {
        (eps, true)
    } else if raw > 1.0 - eps {
        (1.0 - eps, true)
    } else {
        (raw, false)
    }
}

/// Edge probability for a node pair, clamped to `[ε, 1−ε]`. Symmetric in its
/// arguments.
pub fn projector_prob(projector: &Projector, h_i: &[f64], h_j: &[f64], eps: f64) -> Result<f64> {
    let d = projector.input_dim();
    if h_i.len() != d || h_j.len() != d {
        return Err(Error::Shape(format!(
            "embeddings of dim {} and {} for projector input dim {d}",
            h_i.len(),
            h_j.len()
        )));
    }
    let sum: Vec<f64> = h_i.iter().zip(h_j).map(|(a, b)| a + b).collect();
    let hidden: Vec<f64> = projector.w1.vec_mul(&sum).into_iter().map(|v| v.max(0.0)).collect();
    Ok(clamp_prob(sigmoid(dot(&hidden, projector.w2.data())), eps).0)
}
