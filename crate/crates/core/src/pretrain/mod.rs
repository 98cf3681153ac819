//! Self-supervised link-prediction pre-training of the GCN backbone.

mod checkpoint;
mod negatives;

pub use checkpoint::{load_model, save_model, ModelCheckpoint};
pub use negatives::sample_negative_pairs;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::nn::{adam_step, dot, AdamState, DenseMatrix, GcnModel, SparseNormAdj};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PretrainMode {
    /// Binary cross-entropy on σ(h_u·h_v) for edges vs. sampled non-edges.
    Bce,
    /// Margin loss on (anchor, neighbour, non-neighbour) triples.
    Triplet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PretrainConfig {
    pub mode: PretrainMode,
    pub epochs: usize,
    pub lr: f64,
    pub hidden_dim: usize,
    pub negatives_per_positive: usize,
    pub edge_sample_fraction: f64,
    pub margin: f64,
    pub seed: u64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        Self {
            mode: PretrainMode::Bce,
            epochs: 200,
            lr: 0.005,
            hidden_dim: 128,
            negatives_per_positive: 1,
            edge_sample_fraction: 1.0,
            margin: 1.0,
            seed: 0,
        }
    }
}

impl PretrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidParams("pretrain epochs must be ≥ 1".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::InvalidParams(format!("pretrain lr {} must be > 0", self.lr)));
        }
        if !(self.edge_sample_fraction > 0.0 && self.edge_sample_fraction <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "edge_sample_fraction {} not in (0, 1]",
                self.edge_sample_fraction
            )));
        }
        if self.hidden_dim == 0 || self.negatives_per_positive == 0 {
            return Err(Error::InvalidParams("hidden_dim and negatives_per_positive must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Result of a pre-training run.
#[derive(Clone, Debug)]
pub struct Pretrained {
    pub model: GcnModel,
    /// Training loss per epoch, evaluated before that epoch's update.
    pub losses: Vec<f64>,
}

/// Intermediate activations of a full-graph forward pass.
struct Forward {
    ax: DenseMatrix,
    z1: DenseMatrix,
    aa1: DenseMatrix,
    h: DenseMatrix,
}

fn forward(model: &GcnModel, adj: &SparseNormAdj, ax: DenseMatrix) -> Result<Forward> {
    let z1 = ax.matmul(&model.layer1)?;
    let a1 = z1.map(|v| model.activation.apply(v));
    let aa1 = adj.spmm(&a1);
    let h = aa1.matmul(&model.layer2)?;
    Ok(Forward { ax, z1, aa1, h })
}

/// Gradients of the backbone weights given `∂L/∂H`.
fn backward(
    model: &GcnModel,
    adj: &SparseNormAdj,
    fwd: &Forward,
    d_h: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let d_w2 = fwd.aa1.t_matmul(d_h)?;
    let d_aa1 = d_h.matmul_t(&model.layer2)?;
    let mut d_z1 = adj.spmm(&d_aa1);
    for (g, z) in d_z1.data_mut().iter_mut().zip(fwd.z1.data()) {
        *g *= model.activation.grad(*z);
    }
    let d_w1 = fwd.ax.t_matmul(&d_z1)?;
    Ok((d_w1, d_w2))
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn bce_loss(
    h: &DenseMatrix,
    pos: &[(usize, usize)],
    neg: &[(usize, usize)],
) -> (f64, DenseMatrix) {
    let total = (pos.len() + neg.len()) as f64;
    let mut loss = 0.0;
    let mut d_h = DenseMatrix::zeros(h.rows(), h.cols());
    for (pairs, y) in [(pos, 1.0), (neg, 0.0)] {
        for &(u, v) in pairs {
            let s = dot(h.row(u), h.row(v));
            // −[y ln σ(s) + (1−y) ln(1−σ(s))]
            loss += if y == 1.0 { softplus(-s) } else { softplus(s) };
            let g = (crate::nn::sigmoid(s) - y) / total;
            for k in 0..h.cols() {
                d_h[(u, k)] += g * h[(v, k)];
                d_h[(v, k)] += g * h[(u, k)];
            }
        }
    }
    (loss / total, d_h)
}

fn triplet_loss(h: &DenseMatrix, triples: &[(usize, usize, usize)], margin: f64) -> (f64, DenseMatrix) {
    let total = triples.len() as f64;
    let mut loss = 0.0;
    let mut d_h = DenseMatrix::zeros(h.rows(), h.cols());
    for &(a, p, n) in triples {
        let l = margin - dot(h.row(a), h.row(p)) + dot(h.row(a), h.row(n));
        if l > 0.0 {
            loss += l;
            for k in 0..h.cols() {
                let (ha, hp, hn) = (h[(a, k)], h[(p, k)], h[(n, k)]);
                d_h[(a, k)] += (hn - hp) / total;
                d_h[(p, k)] -= ha / total;
                d_h[(n, k)] += ha / total;
            }
        }
    }
    (loss / total, d_h)
}

fn sample_triples(graph: &Graph, fraction: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, usize)> {
    let n = graph.num_nodes();
    let anchors: Vec<usize> = (0..n)
        .filter(|&v| graph.degree(v) > 0 && graph.degree(v) + 1 < n)
        .collect();
    let count = ((anchors.len() as f64 * fraction).ceil() as usize).clamp(1, anchors.len().max(1));
    let mut out = Vec::with_capacity(count);
    for i in sample(rng, anchors.len(), count.min(anchors.len())) {
        let a = anchors[i];
        let nbrs = graph.neighbors(a);
        let p = nbrs[rng.gen_range(0..nbrs.len())];
        let neg = loop {
            let c = rng.gen_range(0..n);
            if c != a && !graph.has_edge(a, c) {
                break c;
            }
        };
        out.push((a, p, neg));
    }
    out
}

/// Pre-train a fresh two-layer GCN on `graph` by link prediction.
pub fn pretrain_lp(graph: &Graph, config: &PretrainConfig) -> Result<Pretrained> {
    config.validate()?;
    if graph.num_edges() == 0 {
        return Err(Error::InvalidGraph("link-prediction pre-training needs at least one edge".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = GcnModel::init(graph.num_features(), config.hidden_dim, &mut rng);
    let adj = SparseNormAdj::from_graph(graph);
    let ax = adj.spmm(graph.features());
    let mut adam = AdamState::new(&[model.layer1.data().len(), model.layer2.data().len()]);
    let edges = graph.edges();
    let mut losses = Vec::with_capacity(config.epochs);
    let mut ax = Some(ax);

    for epoch in 0..config.epochs {
        let fwd = forward(&model, &adj, ax.take().expect("restored every epoch"))?;
        let (loss, d_h) = match config.mode {
            PretrainMode::Bce => {
                let count = ((edges.len() as f64 * config.edge_sample_fraction).ceil() as usize)
                    .clamp(1, edges.len());
                let pos: Vec<(usize, usize)> =
                    sample(&mut rng, edges.len(), count).into_iter().map(|i| edges[i]).collect();
                let neg_count = count * config.negatives_per_positive;
                let neg = sample_negative_pairs(graph, neg_count, rng.gen())?;
                bce_loss(&fwd.h, &pos, &neg)
            }
            PretrainMode::Triplet => {
                let triples = sample_triples(graph, config.edge_sample_fraction, &mut rng);
                if triples.is_empty() {
                    return Err(Error::Infeasible("no anchor has both a neighbour and a non-neighbour".into()));
                }
                triplet_loss(&fwd.h, &triples, config.margin)
            }
        };
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("pre-training loss at epoch {epoch}")));
        }
        losses.push(loss);
        let (d_w1, d_w2) = backward(&model, &adj, &fwd, &d_h)?;
        adam_step(
            &mut [model.layer1.data_mut(), model.layer2.data_mut()],
            &[d_w1.data(), d_w2.data()],
            &mut adam,
            config.lr,
        )?;
        ax = Some(fwd.ax);
    }
    model.validate()?;
    Ok(Pretrained { model, losses })
}
