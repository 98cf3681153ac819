use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::nn::DenseMatrix;

/// Two-class contextual stochastic block model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsbmParams {
    pub num_nodes: usize,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    /// Edge probability between nodes of the same class.
    pub intra_prob: f64,
    /// Edge probability between nodes of different classes.
    pub inter_prob: f64,
    /// Fraction of nodes in the first class.
    #[serde(default = "default_balance")]
    pub class_balance: f64,
}

fn default_balance() -> f64 {
    0.5
}

impl CsbmParams {
    /// Means `±sep/2` along the first axis of a `dim`-dimensional space.
    pub fn symmetric(num_nodes: usize, dim: usize, sep: f64, p: f64, q: f64) -> Self {
        let mut mu1 = vec![0.0; dim];
        let mut mu2 = vec![0.0; dim];
        if dim > 0 {
            mu1[0] = sep / 2.0;
            mu2[0] = -sep / 2.0;
        }
        Self { num_nodes, mu1, mu2, intra_prob: p, inter_prob: q, class_balance: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu1.len() != self.mu2.len() {
            return Err(Error::InvalidParams("mu1 and mu2 differ in dimension".into()));
        }
        if self.mu1 == self.mu2 {
            return Err(Error::InvalidParams("mu1 must differ from mu2".into()));
        }
        for (name, v) in [("intra_prob", self.intra_prob), ("inter_prob", self.inter_prob)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParams(format!("{name} = {v} not in (0, 1)")));
            }
        }
        if !(0.0..=1.0).contains(&self.class_balance) {
            return Err(Error::InvalidParams(format!(
                "class_balance = {} not in [0, 1]",
                self.class_balance
            )));
        }
        Ok(())
    }

    /// Number of nodes assigned to the first class (ids `0..first_class_size`).
    pub fn first_class_size(&self) -> usize {
        ((self.class_balance * self.num_nodes as f64).ceil() as usize).min(self.num_nodes)
    }

    pub fn mean_separation(&self) -> f64 {
        self.mu1.iter().zip(&self.mu2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }
}

/// Sample a CSBM graph. Nodes `0..⌈balance·n⌉` are class 0, the rest class 1;
/// features are `N(μ_class, I)`; each unordered pair is linked independently.
pub fn generate_csbm(params: &CsbmParams, seed: u64) -> Result<Graph> {
    params.validate()?;
    let n = params.num_nodes;
    let d = params.mu1.len();
    let split = params.first_class_size();
    let class = |i: usize| usize::from(i >= split);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        let mu = if class(i) == 0 { &params.mu1 } else { &params.mu2 };
        for &m in mu {
            let z: f64 = rng.sample(StandardNormal);
            data.push(m + z);
        }
    }
    let features = DenseMatrix::from_vec(n, d, data)?;

    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if class(u) == class(v) { params.intra_prob } else { params.inter_prob };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let labels = (0..n).map(|i| Some(class(i))).collect();
    Graph::new(n, features, edges, Some(labels), 2)
}
