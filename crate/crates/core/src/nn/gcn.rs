use serde::{Deserialize, Serialize};

use super::{DenseMatrix, SparseNormAdj};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }

    /// Derivative evaluated at pre-activation `x` (0 at the ReLU kink).
    #[inline]
    pub fn grad(self, x: f64) -> f64 {
        match self {
            Activation::Relu => f64::from(u8::from(x > 0.0)),
            Activation::Identity => 1.0,
        }
    }
}

/// Two-layer, bias-free GCN: `H = Â · act(Â · X · W₁) · W₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct GcnModel {
    pub layer1: DenseMatrix,
    pub layer2: DenseMatrix,
    pub activation: Activation,
}

impl GcnModel {
    pub fn new(layer1: DenseMatrix, layer2: DenseMatrix, activation: Activation) -> Result<Self> {
        let model = Self { layer1, layer2, activation };
        model.validate()?;
        Ok(model)
    }

    pub fn init<R: rand::Rng + ?Sized>(in_dim: usize, hidden: usize, rng: &mut R) -> Self {
        Self {
            layer1: DenseMatrix::glorot(in_dim, hidden, rng),
            layer2: DenseMatrix::glorot(hidden, hidden, rng),
            activation: Activation::Relu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer1.cols() != self.layer2.rows() || self.layer2.rows() != self.layer2.cols() {
            return Err(Error::Shape(format!(
                "layer shapes {:?} and {:?} do not chain d_x → d_h → d_h",
                self.layer1.shape(),
                self.layer2.shape()
            )));
        }
        if !self.layer1.is_finite() || !self.layer2.is_finite() {
            return Err(Error::NonFinite("GCN weights".into()));
        }
        Ok(())
    }

    pub fn in_dim(&self) -> usize {
        self.layer1.rows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.layer2.cols()
    }
}

/// `D̃^{-1/2}(S + I)D̃^{-1/2}` together with `D̃^{-1/2}` for the backward pass.
#[derive(Clone, Debug)]
pub struct NormalizedAdjacency {
    pub matrix: DenseMatrix,
    pub inv_sqrt_degree: Vec<f64>,
}

impl NormalizedAdjacency {
    /// Normalise without validating the input.
    pub fn compute(soft_adj: &DenseMatrix) -> Self {
        let m = soft_adj.rows();
        let inv_sqrt_degree: Vec<f64> = (0..m)
            .map(|a| (1.0 + soft_adj.row(a).iter().sum::<f64>() - soft_adj[(a, a)]).powf(-0.5))
            .collect();
        let mut matrix = DenseMatrix::zeros(m, m);
        for a in 0..m {
            let ra = inv_sqrt_degree[a];
            let src = soft_adj.row(a);
            let dst = matrix.row_mut(a);
            for b in 0..m {
                let w = if a == b { 1.0 } else { src[b] };
                dst[b] = w * ra * inv_sqrt_degree[b];
            }
        }
        Self { matrix, inv_sqrt_degree }
    }
}

/// Symmetric GCN normalisation of a soft adjacency with unit self-loops.
/// Degrees are row sums of `S + I`, so the result is differentiable in every
/// entry of `S`.
pub fn normalize_adjacency(soft_adj: &DenseMatrix) -> Result<DenseMatrix> {
    if soft_adj.rows() != soft_adj.cols() {
        return Err(Error::Shape(format!("adjacency {:?} is not square", soft_adj.shape())));
    }
    for a in 0..soft_adj.rows() {
        if soft_adj[(a, a)] != 0.0 {
            return Err(Error::InvalidParams(format!("non-zero diagonal at {a}")));
        }
        for b in 0..soft_adj.cols() {
            let v = soft_adj[(a, b)];
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!("entry ({a}, {b}) = {v} outside [0, 1]")));
            }
            if v != soft_adj[(b, a)] {
                return Err(Error::InvalidParams(format!("asymmetric at ({a}, {b})")));
            }
        }
    }
    Ok(NormalizedAdjacency::compute(soft_adj).matrix)
}

/// Gradient of a scalar loss w.r.t. each entry `S[a, b]` of the soft
/// adjacency (entries treated as independent), given `∂L/∂Â`.
pub fn normalize_backward(
    soft_adj: &DenseMatrix,
    norm: &NormalizedAdjacency,
    d_norm: &DenseMatrix,
) -> DenseMatrix {
    let m = soft_adj.rows();
    let r = &norm.inv_sqrt_degree;
    // ∂L/∂d_a, through r_a = d_a^{-1/2} appearing in row a and column a.
    let d_degree: Vec<f64> = (0..m)
        .map(|a| {
            let mut acc = 0.0;
            for b in 0..m {
                let w = if a == b { 1.0 } else { soft_adj[(a, b)] };
                if w != 0.0 {
                    acc += (d_norm[(a, b)] + d_norm[(b, a)]) * w * r[b];
                }
            }
            -0.5 * r[a].powi(3) * acc
        })
        .collect();
    let mut out = DenseMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            if a != b {
                out[(a, b)] = d_norm[(a, b)] * r[a] * r[b] + d_degree[a];
            }
        }
    }
    out
}

/// Dense two-layer forward pass over a normalised adjacency.
pub fn gcn_forward(
    model: &GcnModel,
    norm_adj: &DenseMatrix,
    features: &DenseMatrix,
) -> Result<DenseMatrix> {
    if norm_adj.rows() != norm_adj.cols() || norm_adj.rows() != features.rows() {
        return Err(Error::Shape(format!(
            "adjacency {:?} vs features {:?}",
            norm_adj.shape(),
            features.shape()
        )));
    }
    if features.cols() != model.in_dim() {
        return Err(Error::Shape(format!(
            "feature dim {} ≠ model input dim {}",
            features.cols(),
            model.in_dim()
        )));
    }
    let z1 = norm_adj.matmul(&features.matmul(&model.layer1)?)?;
    let a1 = z1.map(|v| model.activation.apply(v));
    norm_adj.matmul(&a1.matmul(&model.layer2)?)
}

/// Embeddings of every node under the intact graph. Computed once, before
/// prompt tuning.
pub fn embed_full_graph(model: &GcnModel, graph: &Graph) -> Result<DenseMatrix> {
    if graph.num_features() != model.in_dim() {
        return Err(Error::Shape(format!(
            "graph has {} features, model expects {}",
            graph.num_features(),
            model.in_dim()
        )));
    }
    let adj = SparseNormAdj::from_graph(graph);
    let z1 = adj.spmm(&graph.features().matmul(&model.layer1)?);
    let a1 = z1.map(|v| model.activation.apply(v));
    Ok(adj.spmm(&a1.matmul(&model.layer2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{khop_subgraph, CsbmParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_adjacency(&DenseMatrix::zeros(1, 1)).unwrap().data(), &[1.0]);

        let hard = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let n = normalize_adjacency(&hard).unwrap();
        assert!(n.data().iter().all(|&v| close(v, 0.5)));

        let soft = DenseMatrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let n = normalize_adjacency(&soft).unwrap();
        assert!(close(n[(0, 0)], 1.0 / 1.5) && close(n[(1, 1)], 1.0 / 1.5));
        assert!(close(n[(0, 1)], 0.5 / 1.5) && close(n[(1, 0)], 0.5 / 1.5));
    }

    #[test]
    fn normalization_rejects_bad_input() {
        let asym = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(normalize_adjacency(&asym).is_err());
        let big = DenseMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert!(normalize_adjacency(&big).is_err());
        assert!(normalize_adjacency(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn regular_graph_off_diagonal() {
        // Cycle C6 is 2-regular: off-diagonal entries are 1/3.
        let mut a = DenseMatrix::zeros(6, 6);
        for i in 0..6 {
            a[(i, (i + 1) % 6)] = 1.0;
            a[((i + 1) % 6, i)] = 1.0;
        }
        let n = normalize_adjacency(&a).unwrap();
        assert!(n.is_symmetric());
        for i in 0..6 {
            assert!(close(n[(i, (i + 1) % 6)], 1.0 / 3.0));
        }
    }

    #[test]
    fn normalize_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = 5;
        let mut s = DenseMatrix::zeros(m, m);
        for a in 0..m {
            for b in a + 1..m {
                let v = rand::Rng::gen_range(&mut rng, 0.0..1.0);
                s[(a, b)] = v;
                s[(b, a)] = v;
            }
        }
        let weights = DenseMatrix::glorot(m, m, &mut rng);
        let loss = |s: &DenseMatrix| -> f64 {
            let n = NormalizedAdjacency::compute(s).matrix;
            n.data().iter().zip(weights.data()).map(|(a, b)| a * b).sum()
        };
        let norm = NormalizedAdjacency::compute(&s);
        let grad = normalize_backward(&s, &norm, &weights);
        let h = 1e-6;
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let mut sp = s.clone();
                sp[(a, b)] += h;
                let mut sm = s.clone();
                sm[(a, b)] -= h;
                let fd = (loss(&sp) - loss(&sm)) / (2.0 * h);
                assert!((fd - grad[(a, b)]).abs() < 1e-8, "({a},{b}) {fd} vs {}", grad[(a, b)]);
            }
        }
    }

    #[test]
    fn single_node_identity_weights() {
        let x = DenseMatrix::from_rows(&[vec![0.3, 2.0, 0.0]]).unwrap();
        let model =
            GcnModel::new(DenseMatrix::identity(3), DenseMatrix::identity(3), Activation::Relu)
                .unwrap();
        let norm = normalize_adjacency(&DenseMatrix::zeros(1, 1)).unwrap();
        assert_eq!(gcn_forward(&model, &norm, &x).unwrap(), x);
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = DenseMatrix::glorot(4, 3, &mut rng);
        let model = GcnModel::new(
            DenseMatrix::zeros(3, 5),
            DenseMatrix::zeros(5, 5),
            Activation::Relu,
        )
        .unwrap();
        let norm = normalize_adjacency(&DenseMatrix::zeros(4, 4)).unwrap();
        assert!(gcn_forward(&model, &norm, &x).unwrap().data().iter().all(|&v| v == 0.0));
    }

    /// Element-by-element evaluation with explicit loops, no matmul kernel.
    fn reference_forward(model: &GcnModel, adj: &DenseMatrix, x: &DenseMatrix) -> DenseMatrix {
        let m = adj.rows();
        let deg: Vec<f64> = (0..m).map(|a| 1.0 + (0..m).map(|b| adj[(a, b)]).sum::<f64>()).collect();
        let norm = |a: usize, b: usize| {
            let w = if a == b { 1.0 } else { adj[(a, b)] };
            w / (deg[a] * deg[b]).sqrt()
        };
        let dh = model.hidden_dim();
        let mut h1 = vec![vec![0.0; dh]; m];
        for a in 0..m {
            for k in 0..dh {
                let mut acc = 0.0;
                for b in 0..m {
                    for f in 0..x.cols() {
                        acc += norm(a, b) * x[(b, f)] * model.layer1[(f, k)];
                    }
                }
                h1[a][k] = model.activation.apply(acc);
            }
        }
        let mut out = DenseMatrix::zeros(m, dh);
        for a in 0..m {
            for k in 0..dh {
                let mut acc = 0.0;
                for b in 0..m {
                    for j in 0..dh {
                        acc += norm(a, b) * h1[b][j] * model.layer2[(j, k)];
                    }
                }
                out[(a, k)] = acc;
            }
        }
        out
    }

    fn random_adj(m: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                if rand::Rng::gen_bool(rng, 0.5) {
                    a[(i, j)] = 1.0;
                    a[(j, i)] = 1.0;
                }
            }
        }
        a
    }

    #[test]
    fn forward_matches_reference_on_random_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let adj = random_adj(5, &mut rng);
        let x = DenseMatrix::glorot(5, 3, &mut rng);
        let model = GcnModel::init(3, 4, &mut rng);
        let got = gcn_forward(&model, &normalize_adjacency(&adj).unwrap(), &x).unwrap();
        let want = reference_forward(&model, &adj, &x);
        for (a, b) in got.data().iter().zip(want.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let adj = random_adj(6, &mut rng);
            let x = DenseMatrix::glorot(6, 3, &mut rng);
            let model = GcnModel::init(3, 4, &mut rng);
            let mut perm: Vec<usize> = (0..6).collect();
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            let mut padj = DenseMatrix::zeros(6, 6);
            for a in 0..6 {
                for b in 0..6 {
                    padj[(a, b)] = adj[(perm[a], perm[b])];
                }
            }
            let px = x.select_rows(&perm);
            let h = gcn_forward(&model, &normalize_adjacency(&adj).unwrap(), &x).unwrap();
            let ph = gcn_forward(&model, &normalize_adjacency(&padj).unwrap(), &px).unwrap();
            let want = h.select_rows(&perm);
            for (a, b) in ph.data().iter().zip(want.data()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_graph_agrees_with_subgraph_forward_on_small_diameter() {
        // Dense CSBM on 30 nodes has diameter ≤ 2, so every 2-hop ball is the
        // whole graph.
        let params = CsbmParams::symmetric(30, 3, 1.0, 0.6, 0.4);
        let g = crate::graph::generate_csbm(&params, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = GcnModel::init(3, 8, &mut rng);
        let h = embed_full_graph(&model, &g).unwrap();
        for t in [0, 13, 29] {
            let s = khop_subgraph(&g, t, 2).unwrap();
            assert_eq!(s.len(), 30);
            let hs = gcn_forward(&model, &normalize_adjacency(&s.base_adjacency).unwrap(), &s.features)
                .unwrap();
            for (a, b) in hs.row(0).iter().zip(h.row(t)) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        assert_eq!(h, embed_full_graph(&model, &g).unwrap());
    }

    #[test]
    fn one_node_graph_embedding() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 0.5]]).unwrap();
        let g = Graph::new(1, x.clone(), [], None, 0).unwrap();
        let model =
            GcnModel::new(DenseMatrix::identity(2), DenseMatrix::identity(2), Activation::Relu)
                .unwrap();
        assert_eq!(embed_full_graph(&model, &g).unwrap(), x);
    }
}
