use rand::Rng;

use super::local::{local_backward, local_forward};
use super::projector::Projector;
use super::rewire::{candidate_pairs, draw_noise, overwrite_pairs, pair_probs};
use super::{bernoulli_entropy, PromptConfig, RewireScope};
use crate::error::{Error, Result};
use crate::graph::{khop_egonet, khop_subgraph, EgoNet, Graph, LabeledSplit, Subgraph};
use crate::nn::{
    normalize_backward, probe_loss, sigmoid, DenseMatrix, GcnModel, LinearProbe, NormalizedAdjacency,
};
use crate::par;

/// Ego-net structure: sparse for target-only rewiring, dense otherwise.
#[derive(Clone, Debug)]
pub enum EgoStructure {
    Sparse(EgoNet),
    Dense(Subgraph),
}

/// Per-target data that stays fixed for the whole tuning run.
#[derive(Clone, Debug)]
pub struct TargetContext {
    /// Global ids of the ego-net nodes, target first.
    pub nodes: Vec<usize>,
    pub structure: EgoStructure,
    pub label: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Frozen embeddings of the ego-net nodes (projector input).
    pub embeddings: DenseMatrix,
    /// Ego-net features times the backbone's first layer.
    pub xw1: DenseMatrix,
}

/// Gradients w.r.t. the prompt parameters φ (projector) and ω (probe).
#[derive(Clone, Debug)]
pub struct PromptGrads {
    pub projector: Projector,
    pub probe: LinearProbe,
}

#[derive(Clone, Debug)]
pub struct Objective {
    pub lp: f64,
    pub le: f64,
    pub ls: f64,
    pub total: f64,
    pub grads: PromptGrads,
    /// Clamped edge probabilities, per target, in candidate-pair order.
    pub probs: Vec<Vec<f64>>,
}

/// The labelled targets of one tuning problem with their ego-nets.
#[derive(Clone, Debug)]
pub struct PromptProblem<'m> {
    pub model: &'m GcnModel,
    pub targets: Vec<TargetContext>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
    pub eps: f64,
    pub scope: RewireScope,
}

struct TargetTerms {
    lp: f64,
    le: f64,
    ls: f64,
    d_w1: DenseMatrix,
    d_w2: Vec<f64>,
    d_probe_w: DenseMatrix,
    d_probe_b: Vec<f64>,
    probs: Vec<f64>,
}

impl<'m> PromptProblem<'m> {
    /// Extract the ρ-hop ego-net of every training node.
    pub fn new(
        model: &'m GcnModel,
        graph: &Graph,
        embeddings: &DenseMatrix,
        train: &[(usize, usize)],
        config: &PromptConfig,
    ) -> Result<Self> {
        Self::build(model, graph, embeddings, train, config, false)
    }

    pub(crate) fn build(
        model: &'m GcnModel,
        graph: &Graph,
        embeddings: &DenseMatrix,
        train: &[(usize, usize)],
        config: &PromptConfig,
        force_dense: bool,
    ) -> Result<Self> {
        config.validate()?;
        if train.is_empty() {
            return Err(Error::InvalidParams("no labelled training nodes".into()));
        }
        if embeddings.rows() != graph.num_nodes() || embeddings.cols() != model.hidden_dim() {
            return Err(Error::Shape(format!(
                "embeddings {:?} for {} nodes and hidden dim {}",
                embeddings.shape(),
                graph.num_nodes(),
                model.hidden_dim()
            )));
        }
        let targets = par::try_map(train, |&(node, label)| -> Result<TargetContext> {
            let structure = if config.rewire_scope == RewireScope::TargetOnly && !force_dense {
                EgoStructure::Sparse(khop_egonet(graph, node, config.rho)?)
            } else {
                EgoStructure::Dense(khop_subgraph(graph, node, config.rho)?)
            };
            let nodes = match &structure {
                EgoStructure::Sparse(e) => e.local_to_global.clone(),
                EgoStructure::Dense(d) => d.local_to_global.clone(),
            };
            let pairs = candidate_pairs(nodes.len(), config.rewire_scope);
            let xw1 = graph.features().select_rows(&nodes).matmul(&model.layer1)?;
            let embeddings = embeddings.select_rows(&nodes);
            Ok(TargetContext { nodes, structure, label, pairs, embeddings, xw1 })
        })?;
        Ok(Self {
            model,
            targets,
            lambda1: config.lambda1,
            lambda2: config.lambda2,
            gamma: config.gamma,
            eps: config.prob_clamp,
            scope: config.rewire_scope,
        })
    }

    /// One `g₁ − g₂` per candidate pair, drawn sequentially in target order.
    pub fn draw_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<f64>> {
        self.targets.iter().map(|t| draw_noise(t.pairs.len(), rng)).collect()
    }

    /// `L_P + λ₁L_E + λ₂L_S` at fixed noise, with gradients for the projector
    /// (all three terms) and the probe (`L_P`, the only term depending on it).
    pub fn objective(
        &self,
        probe: &LinearProbe,
        projector: &Projector,
        noise: &[Vec<f64>],
        tau: f64,
    ) -> Result<Objective> {
        if noise.len() != self.targets.len() {
            return Err(Error::Shape(format!(
                "noise for {} targets, problem has {}",
                noise.len(),
                self.targets.len()
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParams(format!("temperature {tau} must be > 0")));
        }
        projector.validate()?;
        let weight = 1.0 / self.targets.len() as f64;
        let idx: Vec<usize> = (0..self.targets.len()).collect();
        let terms = par::try_map(&idx, |&i| {
            self.target_terms(&self.targets[i], probe, projector, &noise[i], tau, weight)
        })?;

        let mut grads = PromptGrads {
            projector: Projector::zeros(projector.input_dim(), projector.hidden_dim()),
            probe: LinearProbe::zeros(probe.weights.rows(), probe.num_classes()),
        };
        let (mut lp, mut le, mut ls) = (0.0, 0.0, 0.0);
        let mut probs = Vec::with_capacity(terms.len());
        for t in terms {
            lp += t.lp * weight;
            le += t.le * weight;
            ls += t.ls * weight;
            grads.projector.w1.add_scaled(&t.d_w1, 1.0);
            for (g, d) in grads.projector.w2.data_mut().iter_mut().zip(&t.d_w2) {
                *g += d;
            }
            grads.probe.weights.add_scaled(&t.d_probe_w, 1.0);
            for (g, d) in grads.probe.bias.iter_mut().zip(&t.d_probe_b) {
                *g += d;
            }
            probs.push(t.probs);
        }
        let total = lp + self.lambda1 * le + self.lambda2 * ls;
        if !total.is_finite() {
            return Err(Error::NonFinite("prompt objective".into()));
        }
        Ok(Objective { lp, le, ls, total, grads, probs })
    }

    fn target_terms(
        &self,
        ctx: &TargetContext,
        probe: &LinearProbe,
        projector: &Projector,
        noise: &[f64],
        tau: f64,
        weight: f64,
    ) -> Result<TargetTerms> {
        let model = self.model;
        let m = ctx.nodes.len();
        let n_pairs = ctx.pairs.len();
        if noise.len() != n_pairs {
            return Err(Error::Shape(format!("{} noise values for {n_pairs} pairs", noise.len())));
        }

        // Forward: projector → selectors → prompted adjacency → GCN → probe.
        let projected = ctx.embeddings.matmul(&projector.w1)?;
        let probs = pair_probs(projector, &projected, &ctx.pairs, self.eps);
        let mut sel = Vec::with_capacity(n_pairs);
        let mut sel_grad = Vec::with_capacity(n_pairs);
        for (&(p, _), &g) in probs.iter().zip(noise) {
            let x = (g + (p / (1.0 - p)).ln()) / tau;
            let s = sigmoid(x.clamp(-36.0, 36.0));
            sel.push(s);
            sel_grad.push(if x.abs() >= 36.0 { 0.0 } else { s * (1.0 - s) / (tau * p * (1.0 - p)) });
        }
        let (lp, pg, d_sel) = match &ctx.structure {
            EgoStructure::Sparse(ego) => {
                let mut s_full = vec![0.0; m];
                s_full[1..].copy_from_slice(&sel);
                let fwd = local_forward(model, ego, &ctx.xw1, &s_full)?;
                let (lp, pg) = probe_loss(probe, &fwd.h, ctx.label)?;
                let ds = local_backward(model, ego, &ctx.xw1, &s_full, &fwd, &pg.input);
                (lp, pg, ds[1..].to_vec())
            }
            EgoStructure::Dense(sub) => dense_terms(model, sub, ctx, probe, &sel)?,
        };

        // Regularisers on the clamped probabilities.
        let (le, ls, ls_sign) = if n_pairs == 0 {
            (0.0, 0.0, 0.0)
        } else {
            let mean = probs.iter().map(|p| p.0).sum::<f64>() / n_pairs as f64;
            let le = probs.iter().map(|p| bernoulli_entropy(p.0)).sum::<f64>() / n_pairs as f64;
            let dev = mean - self.gamma;
            let sign = if dev > 0.0 { 1.0 } else if dev < 0.0 { -1.0 } else { 0.0 };
            (le, dev.abs(), sign)
        };

        // Back through selectors and projector.
        let d_hidden_out = projector.w2.data();
        let mut d_w2 = vec![0.0; projector.hidden_dim()];
        let mut node_grad = DenseMatrix::zeros(m, projector.hidden_dim());
        let per_pair = 1.0 / n_pairs.max(1) as f64;
        for (k, &(a, b)) in ctx.pairs.iter().enumerate() {
            let (p, clamped) = probs[k];
            if clamped {
                continue;
            }
            let d_p = weight
                * (d_sel[k] * sel_grad[k]
                    + self.lambda1 * per_pair * ((1.0 - p) / p).ln()
                    + self.lambda2 * per_pair * ls_sign);
            let d_logit = d_p * p * (1.0 - p);
            if d_logit == 0.0 {
                continue;
            }
            let (ua, ub) = (projected.row(a), projected.row(b));
            for c in 0..d_w2.len() {
                let pre = ua[c] + ub[c];
                if pre > 0.0 {
                    d_w2[c] += d_logit * pre;
                    let g = d_logit * d_hidden_out[c];
                    node_grad[(a, c)] += g;
                    node_grad[(b, c)] += g;
                }
            }
        }
        let d_w1 = ctx.embeddings.t_matmul(&node_grad)?;

        let mut d_probe_w = pg.weights;
        d_probe_w.scale_in_place(weight);
        let d_probe_b = pg.bias.iter().map(|g| g * weight).collect();

        Ok(TargetTerms {
            lp,
            le,
            ls,
            d_w1,
            d_w2,
            d_probe_w,
            d_probe_b,
            probs: probs.into_iter().map(|p| p.0).collect(),
        })
    }
}

/// Dense forward and backward for arbitrary candidate pairs: returns `L_P`,
/// the probe gradient and `∂L_P/∂s` per pair.
fn dense_terms(
    model: &GcnModel,
    sub: &Subgraph,
    ctx: &TargetContext,
    probe: &LinearProbe,
    sel: &[f64],
) -> Result<(f64, crate::nn::ProbeGrad, Vec<f64>)> {
    let m = sub.len();
    let soft = overwrite_pairs(&sub.base_adjacency, &ctx.pairs, sel);
    let norm = NormalizedAdjacency::compute(&soft);
    let z1 = norm.matrix.matmul(&ctx.xw1)?;
    let a1 = z1.map(|v| model.activation.apply(v));
    let mixed = a1.matmul(&model.layer2)?;
    let target_row = norm.matrix.row(Subgraph::TARGET);
    let h = mixed.vec_mul(target_row);
    let (lp, pg) = probe_loss(probe, &h, ctx.label)?;

    // Only the target row of the second layer is used, so ∂L/∂A1 is rank one.
    let d_h = &pg.input;
    let v = model.layer2.mul_vec(d_h);
    let mut d_z1 = DenseMatrix::zeros(m, model.hidden_dim());
    for k in 0..m {
        let nk = target_row[k];
        let z_row = z1.row(k);
        for (c, g) in d_z1.row_mut(k).iter_mut().enumerate() {
            *g = nk * v[c] * model.activation.grad(z_row[c]);
        }
    }
    let mut d_norm = d_z1.matmul_t(&ctx.xw1)?;
    for k in 0..m {
        d_norm[(Subgraph::TARGET, k)] += crate::nn::dot(mixed.row(k), d_h);
    }
    let d_soft = normalize_backward(&soft, &norm, &d_norm);
    let d_sel = ctx.pairs.iter().map(|&(a, b)| d_soft[(a, b)] + d_soft[(b, a)]).collect();
    Ok((lp, pg, d_sel))
}

/// Build the problem for `split`'s training nodes, draw one round of noise
/// from `rng`, and evaluate the objective.
#[allow(clippy::too_many_arguments)]
pub fn prompt_objective<R: Rng + ?Sized>(
    model: &GcnModel,
    probe: &LinearProbe,
    projector: &Projector,
    split: &LabeledSplit,
    graph: &Graph,
    embeddings: &DenseMatrix,
    tau: f64,
    config: &PromptConfig,
    rng: &mut R,
) -> Result<Objective> {
    let problem = PromptProblem::new(model, graph, embeddings, &split.train, config)?;
    let noise = problem.draw_noise(rng);
    problem.objective(probe, projector, &noise, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_csbm, sample_k_shot, CsbmParams};
    use crate::nn::{embed_full_graph, finite_diff_check, gcn_forward, normalize_adjacency};
    use crate::prompt::soft_edge_selector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        graph: Graph,
        model: GcnModel,
        h: DenseMatrix,
        split: LabeledSplit,
    }

    fn fixture(n: usize, seed: u64) -> Fixture {
        let graph = generate_csbm(&CsbmParams::symmetric(n, 4, 2.0, 0.15, 0.05), seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let model = GcnModel::init(4, 8, &mut rng);
        let h = embed_full_graph(&model, &graph).unwrap();
        let split = sample_k_shot(&graph, 1, seed).unwrap();
        Fixture { graph, model, h, split }
    }

    /// Objective recomputed from the public building blocks, sharing no code
    /// with the hand-written backward pass.
    fn reference_total(
        f: &Fixture,
        cfg: &PromptConfig,
        probe: &LinearProbe,
        proj: &Projector,
        noise: &[Vec<f64>],
        tau: f64,
    ) -> f64 {
        let mut total = 0.0;
        let n = f.split.train.len() as f64;
        for (t, &(node, label)) in f.split.train.iter().enumerate() {
            let sub = khop_subgraph(&f.graph, node, cfg.rho).unwrap();
            let pairs = candidate_pairs(sub.len(), cfg.rewire_scope);
            let mut s = sub.base_adjacency.clone();
            let mut ps = Vec::new();
            for (k, &(a, b)) in pairs.iter().enumerate() {
                let p = crate::prompt::projector_prob(
                    proj,
                    f.h.row(sub.local_to_global[a]),
                    f.h.row(sub.local_to_global[b]),
                    cfg.prob_clamp,
                )
                .unwrap();
                let v = soft_edge_selector(p, noise[t][k], 0.0, tau);
                s[(a, b)] = v;
                s[(b, a)] = v;
                ps.push(p);
            }
            let out = gcn_forward(&f.model, &normalize_adjacency(&s).unwrap(), &sub.features).unwrap();
            let (lp, _) = probe_loss(probe, out.row(0), label).unwrap();
            let (mut le, mut ls) = (0.0, 0.0);
            if !ps.is_empty() {
                let k = ps.len() as f64;
                le = ps.iter().map(|&p| bernoulli_entropy(p)).sum::<f64>() / k;
                ls = (ps.iter().sum::<f64>() / k - cfg.gamma).abs();
            }
            total += (lp + cfg.lambda1 * le + cfg.lambda2 * ls) / n;
        }
        total
    }

    #[test]
    fn matches_reference_forward() {
        let f = fixture(40, 1);
        let cfg = PromptConfig { lambda1: 0.7, lambda2: 1.3, projector_hidden: 6, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let proj = Projector::init(8, 6, &mut rng);
        let probe = LinearProbe { weights: DenseMatrix::glorot(8, 2, &mut rng), bias: vec![0.1, -0.2] };
        let problem = PromptProblem::new(&f.model, &f.graph, &f.h, &f.split.train, &cfg).unwrap();
        let noise = problem.draw_noise(&mut rng);
        let obj = problem.objective(&probe, &proj, &noise, 0.6).unwrap();
        let want = reference_total(&f, &cfg, &probe, &proj, &noise, 0.6);
        assert!((obj.total - want).abs() < 1e-12, "{} vs {want}", obj.total);
    }

    fn flatten(proj: &Projector, probe: &LinearProbe) -> Vec<f64> {
        let mut v = proj.w1.data().to_vec();
        v.extend(proj.w2.data());
        v.extend(probe.weights.data());
        v.extend(&probe.bias);
        v
    }

    fn unflatten(v: &[f64], like_proj: &Projector, like_probe: &LinearProbe) -> (Projector, LinearProbe) {
        let (r1, c1) = like_proj.w1.shape();
        let n1 = r1 * c1;
        let n2 = c1;
        let (rp, cp) = like_probe.weights.shape();
        let np = rp * cp;
        let proj = Projector {
            w1: DenseMatrix::from_vec(r1, c1, v[..n1].to_vec()).unwrap(),
            w2: DenseMatrix::from_vec(c1, 1, v[n1..n1 + n2].to_vec()).unwrap(),
        };
        let probe = LinearProbe {
            weights: DenseMatrix::from_vec(rp, cp, v[n1 + n2..n1 + n2 + np].to_vec()).unwrap(),
            bias: v[n1 + n2 + np..].to_vec(),
        };
        (proj, probe)
    }

    #[test]
    fn gradients_match_finite_differences() {
        for (seed, scope) in [(2, RewireScope::TargetOnly), (3, RewireScope::AllPairs)] {
            let f = fixture(40, seed);
            let cfg = PromptConfig {
                lambda1: 0.5,
                lambda2: 2.0,
                projector_hidden: 6,
                rewire_scope: scope,
                ..Default::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let proj = Projector::init(8, 6, &mut rng);
            let probe = LinearProbe { weights: DenseMatrix::glorot(8, 2, &mut rng), bias: vec![0.0, 0.3] };
            let problem = PromptProblem::new(&f.model, &f.graph, &f.h, &f.split.train, &cfg).unwrap();
            let noise = problem.draw_noise(&mut rng);
            let obj = problem.objective(&probe, &proj, &noise, 0.8).unwrap();
            let analytic = flatten(&obj.grads.projector, &obj.grads.probe);
            let err = finite_diff_check(
                |v| {
                    let (pj, pb) = unflatten(v, &proj, &probe);
                    problem.objective(&pb, &pj, &noise, 0.8).unwrap().total
                },
                &flatten(&proj, &probe),
                &analytic,
                1e-5,
            )
            .unwrap();
            assert!(err <= 1e-4, "{scope:?}: {err}");
        }
    }

    #[test]
    fn sparse_and_dense_target_only_agree() {
        let f = fixture(50, 7);
        let cfg = PromptConfig { lambda1: 0.3, lambda2: 0.9, projector_hidden: 5, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let proj = Projector::init(8, 5, &mut rng);
        let probe = LinearProbe { weights: DenseMatrix::glorot(8, 2, &mut rng), bias: vec![0.2, 0.0] };
        let sparse = PromptProblem::new(&f.model, &f.graph, &f.h, &f.split.train, &cfg).unwrap();
        let dense = PromptProblem::build(&f.model, &f.graph, &f.h, &f.split.train, &cfg, true).unwrap();
        assert!(matches!(sparse.targets[0].structure, EgoStructure::Sparse(_)));
        assert!(matches!(dense.targets[0].structure, EgoStructure::Dense(_)));
        let noise = sparse.draw_noise(&mut rng);
        let a = sparse.objective(&probe, &proj, &noise, 0.4).unwrap();
        let b = dense.objective(&probe, &proj, &noise, 0.4).unwrap();
        assert!((a.total - b.total).abs() < 1e-12);
        let (ga, gb) = (flatten(&a.grads.projector, &a.grads.probe), flatten(&b.grads.projector, &b.grads.probe));
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y).abs() <= 1e-10 * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn sparsity_term_vanishes_at_gamma() {
        // Zero projector gives p = 0.5 = γ everywhere.
        let f = fixture(30, 4);
        let cfg = PromptConfig { lambda2: 1.0, projector_hidden: 4, ..Default::default() };
        let problem = PromptProblem::new(&f.model, &f.graph, &f.h, &f.split.train, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let noise = problem.draw_noise(&mut rng);
        let obj = problem
            .objective(&LinearProbe::zeros(8, 2), &Projector::zeros(8, 4), &noise, 1.0)
            .unwrap();
        assert_eq!(obj.ls, 0.0);
        assert!((obj.le - 2f64.ln()).abs() < 1e-12);
        assert!((obj.lp - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_vanishes_when_clamped() {
        let f = fixture(30, 5);
        let cfg = PromptConfig { lambda1: 1.0, projector_hidden: 1, ..Default::default() };
        // Positive embeddings through a huge positive weight saturate p at 1−ε.
        let h_pos = f.h.map(|v| v.abs() + 1.0);
        let problem = PromptProblem::new(&f.model, &f.graph, &h_pos, &f.split.train, &cfg).unwrap();
        let mut proj = Projector::zeros(8, 1);
        proj.w1.data_mut().iter_mut().for_each(|w| *w = 1.0);
        proj.w2[(0, 0)] = 1e3;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let noise = problem.draw_noise(&mut rng);
        let obj = problem.objective(&LinearProbe::zeros(8, 2), &proj, &noise, 1.0).unwrap();
        assert!(obj.probs.iter().flatten().all(|&p| p == 1.0 - 1e-6));
        assert!(obj.le < 2e-5);
    }

    #[test]
    fn isolated_target_contributes_only_lp() {
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![-1.0], vec![0.5]]).unwrap();
        let g = Graph::new(3, x, [(1, 2)], Some(vec![Some(0), Some(1), Some(1)]), 2).unwrap();
        let model = GcnModel::new(DenseMatrix::identity(1), DenseMatrix::identity(1), crate::nn::Activation::Relu).unwrap();
        let h = embed_full_graph(&model, &g).unwrap();
        let cfg = PromptConfig { lambda1: 1.0, lambda2: 1.0, projector_hidden: 2, ..Default::default() };
        let problem = PromptProblem::new(&model, &g, &h, &[(0, 0)], &cfg).unwrap();
        let noise = problem.draw_noise(&mut ChaCha8Rng::seed_from_u64(0));
        let obj = problem.objective(&LinearProbe::zeros(1, 2), &Projector::zeros(1, 2), &noise, 1.0).unwrap();
        assert_eq!((obj.le, obj.ls), (0.0, 0.0));
        assert!((obj.total - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn wrapper_draws_noise_and_evaluates() {
        let f = fixture(30, 6);
        let cfg = PromptConfig { projector_hidden: 4, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let proj = Projector::init(8, 4, &mut rng);
        let a = prompt_objective(&f.model, &LinearProbe::zeros(8, 2), &proj, &f.split, &f.graph, &f.h, 0.5, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = prompt_objective(&f.model, &LinearProbe::zeros(8, 2), &proj, &f.split, &f.graph, &f.h, 0.5, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.total, b.total);
        assert_eq!(a.probs.len(), f.split.train.len());
    }
}
