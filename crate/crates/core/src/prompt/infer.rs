use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::local::local_forward;
use super::projector::Projector;
use super::rewire::{candidate_pairs, overwrite_pairs, pair_probs};
use super::tune::TrainedPrompt;
use super::RewireScope;
use crate::error::{Error, Result};
use crate::graph::{khop_egonet, khop_subgraph, Graph, LabeledSplit, Subgraph};
use crate::nn::{
    adam_step, embed_full_graph, gcn_forward, normalize_adjacency, probe_loss, AdamState,
    DenseMatrix, GcnModel, LinearProbe,
};
use crate::par;

/// Source of edge probabilities for an ego-net's candidate pairs. `nodes`
/// holds the global ids of the ego-net, target first; pairs index into it.
pub trait EdgeScorer: Sync {
    fn probs(&self, nodes: &[usize], pairs: &[(usize, usize)]) -> Vec<f64>;
}

/// Learned projector applied to precomputed `H · W₁` rows.
pub struct LearnedScorer<'a> {
    projector: &'a Projector,
    projected: DenseMatrix,
    eps: f64,
}

impl<'a> LearnedScorer<'a> {
    pub fn new(projector: &'a Projector, embeddings: &DenseMatrix, eps: f64) -> Result<Self> {
        Ok(Self { projector, projected: embeddings.matmul(&projector.w1)?, eps })
    }
}

impl EdgeScorer for LearnedScorer<'_> {
    fn probs(&self, nodes: &[usize], pairs: &[(usize, usize)]) -> Vec<f64> {
        let rows = self.projected.select_rows(nodes);
        pair_probs(self.projector, &rows, pairs, self.eps).into_iter().map(|p| p.0).collect()
    }
}

/// Scores 1 for same-label pairs and 0 otherwise (0 if either is unlabelled).
pub struct LabelOracle<'g> {
    pub graph: &'g Graph,
}

impl EdgeScorer for LabelOracle<'_> {
    fn probs(&self, nodes: &[usize], pairs: &[(usize, usize)]) -> Vec<f64> {
        pairs
            .iter()
            .map(|&(a, b)| {
                let la = self.graph.label(nodes[a]);
                let lb = self.graph.label(nodes[b]);
                f64::from(u8::from(la.is_some() && la == lb))
            })
            .collect()
    }
}

/// Target embedding after deterministic rewiring: an edge is kept iff its
/// probability is at least 0.5.
pub fn hard_rewired_embedding(
    model: &GcnModel,
    graph: &Graph,
    scorer: &dyn EdgeScorer,
    target: usize,
    rho: usize,
    scope: RewireScope,
) -> Result<Vec<f64>> {
    let xw1 = graph.features().matmul(&model.layer1)?;
    rewired_embedding(model, graph, &xw1, scorer, target, rho, scope)
}

fn hard(probs: Vec<f64>) -> Vec<f64> {
    probs.into_iter().map(|p| if p >= 0.5 { 1.0 } else { 0.0 }).collect()
}

/// As [`hard_rewired_embedding`] with the full-graph `X·W₁` precomputed.
fn rewired_embedding(
    model: &GcnModel,
    graph: &Graph,
    xw1: &DenseMatrix,
    scorer: &dyn EdgeScorer,
    target: usize,
    rho: usize,
    scope: RewireScope,
) -> Result<Vec<f64>> {
    match scope {
        RewireScope::TargetOnly => {
            let ego = khop_egonet(graph, target, rho)?;
            let pairs = candidate_pairs(ego.len(), scope);
            let mut s = vec![0.0];
            s.extend(hard(scorer.probs(&ego.local_to_global, &pairs)));
            Ok(local_forward(model, &ego, &xw1.select_rows(&ego.local_to_global), &s)?.h)
        }
        RewireScope::AllPairs => {
            let sub = khop_subgraph(graph, target, rho)?;
            let pairs = candidate_pairs(sub.len(), scope);
            let s = hard(scorer.probs(&sub.local_to_global, &pairs));
            let adj = overwrite_pairs(&sub.base_adjacency, &pairs, &s);
            let out = gcn_forward(model, &normalize_adjacency(&adj)?, &sub.features)?;
            Ok(out.row(Subgraph::TARGET).to_vec())
        }
    }
}

/// Hard-rewired inference with cached full-graph embeddings.
pub struct Predictor<'a> {
    model: &'a GcnModel,
    graph: &'a Graph,
    probe: &'a LinearProbe,
    scorer: Box<dyn EdgeScorer + 'a>,
    rho: usize,
    scope: RewireScope,
    xw1: DenseMatrix,
}

impl<'a> Predictor<'a> {
    pub fn new(model: &'a GcnModel, prompt: &'a TrainedPrompt, graph: &'a Graph) -> Result<Self> {
        let h = embed_full_graph(model, graph)?;
        Self::with_embeddings(model, prompt, graph, &h)
    }

    pub fn with_embeddings(
        model: &'a GcnModel,
        prompt: &'a TrainedPrompt,
        graph: &'a Graph,
        embeddings: &DenseMatrix,
    ) -> Result<Self> {
        let scorer = LearnedScorer::new(&prompt.projector, embeddings, prompt.config.prob_clamp)?;
        Self::with_scorer(
            model,
            graph,
            &prompt.probe,
            Box::new(scorer),
            prompt.config.rho,
            prompt.config.rewire_scope,
        )
    }

    pub fn with_scorer(
        model: &'a GcnModel,
        graph: &'a Graph,
        probe: &'a LinearProbe,
        scorer: Box<dyn EdgeScorer + 'a>,
        rho: usize,
        scope: RewireScope,
    ) -> Result<Self> {
        let xw1 = graph.features().matmul(&model.layer1)?;
        Ok(Self { model, graph, probe, scorer, rho, scope, xw1 })
    }

    pub fn embedding(&self, target: usize) -> Result<Vec<f64>> {
        if target >= self.graph.num_nodes() {
            return Err(Error::OutOfRange(format!("target {target} ≥ {}", self.graph.num_nodes())));
        }
        rewired_embedding(self.model, self.graph, &self.xw1, self.scorer.as_ref(), target, self.rho, self.scope)
    }

    /// Predicted class and logits.
    pub fn infer(&self, target: usize) -> Result<(usize, Vec<f64>)> {
        let h = self.embedding(target)?;
        let scores = self.probe.logits(&h);
        Ok((crate::nn::probe::argmax(&scores), scores))
    }

    pub fn accuracy(&self, nodes: &[(usize, usize)]) -> Result<f64> {
        if nodes.is_empty() {
            return Err(Error::InvalidParams("cannot evaluate on an empty node list".into()));
        }
        let hits = par::try_map(nodes, |&(v, y)| self.infer(v).map(|(p, _)| usize::from(p == y)))?;
        Ok(hits.iter().sum::<usize>() as f64 / nodes.len() as f64)
    }
}

/// Predict one node's class under the learned, hard-thresholded rewiring.
pub fn infer_node(
    model: &GcnModel,
    prompt: &TrainedPrompt,
    graph: &Graph,
    target: usize,
) -> Result<(usize, Vec<f64>)> {
    if target >= graph.num_nodes() {
        return Err(Error::OutOfRange(format!("target {target} ≥ {}", graph.num_nodes())));
    }
    Predictor::new(model, prompt, graph)?.infer(target)
}

/// Fraction of `(node, label)` pairs predicted correctly.
pub fn evaluate(
    model: &GcnModel,
    prompt: &TrainedPrompt,
    graph: &Graph,
    nodes: &[(usize, usize)],
) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::InvalidParams("cannot evaluate on an empty node list".into()));
    }
    Predictor::new(model, prompt, graph)?.accuracy(nodes)
}

/// Full-batch Adam on mean cross-entropy over fixed inputs.
pub fn fit_probe(
    inputs: &DenseMatrix,
    labels: &[usize],
    num_classes: usize,
    epochs: usize,
    lr: f64,
    seed: u64,
) -> Result<LinearProbe> {
    if inputs.rows() != labels.len() || labels.is_empty() {
        return Err(Error::Shape(format!("{} inputs for {} labels", inputs.rows(), labels.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = LinearProbe::zeros(inputs.cols(), num_classes);
    probe.weights = DenseMatrix::glorot(inputs.cols(), num_classes, &mut rng);
    probe.weights.scale_in_place(0.01);
    let mut adam = AdamState::new(&[probe.weights.data().len(), num_classes]);
    let scale = 1.0 / labels.len() as f64;
    for _ in 0..epochs {
        let mut gw = DenseMatrix::zeros(inputs.cols(), num_classes);
        let mut gb = vec![0.0; num_classes];
        for (r, &y) in labels.iter().enumerate() {
            let (_, g) = probe_loss(&probe, inputs.row(r), y)?;
            gw.add_scaled(&g.weights, scale);
            for (a, b) in gb.iter_mut().zip(&g.bias) {
                *a += b * scale;
            }
        }
        adam_step(
            &mut [probe.weights.data_mut(), probe.bias.as_mut_slice()],
            &[gw.data(), &gb],
            &mut adam,
            lr,
        )?;
    }
    Ok(probe)
}

/// Linear-probe baseline: train ω on frozen full-graph embeddings of the
/// training nodes.
pub fn train_linear_probe(
    model: &GcnModel,
    graph: &Graph,
    split: &LabeledSplit,
    epochs: usize,
    lr: f64,
    seed: u64,
) -> Result<LinearProbe> {
    let h = embed_full_graph(model, graph)?;
    let nodes: Vec<usize> = split.train.iter().map(|t| t.0).collect();
    let labels: Vec<usize> = split.train.iter().map(|t| t.1).collect();
    fit_probe(&h.select_rows(&nodes), &labels, graph.num_classes(), epochs, lr, seed)
}

/// Accuracy of `probe` applied directly to rows of `embeddings`.
pub fn probe_accuracy(probe: &LinearProbe, embeddings: &DenseMatrix, nodes: &[(usize, usize)]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(Error::InvalidParams("cannot evaluate on an empty node list".into()));
    }
    let hits = nodes.iter().filter(|&&(v, y)| probe.predict(embeddings.row(v)) == y).count();
    Ok(hits as f64 / nodes.len() as f64)
}
