use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::objective::PromptProblem;
use super::projector::Projector;
use super::PromptConfig;
use crate::error::{Error, Result};
use crate::graph::{Graph, LabeledSplit};
use crate::nn::{adam_step, embed_full_graph, AdamState, DenseMatrix, GcnModel, LinearProbe};

/// Linear anneal `max(0.97·(1 − e/E) + 0.03, 0.1)`.
pub fn temperature(epoch: usize, total: usize) -> f64 {
    temperature_with_floor(epoch, total, 0.1)
}

pub fn temperature_with_floor(epoch: usize, total: usize, floor: f64) -> f64 {
    let frac = epoch as f64 / total.max(1) as f64;
    f64::max(0.97 * (1.0 - frac) + 0.03, floor)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub tau: f64,
    pub lp: f64,
    pub le: f64,
    pub ls: f64,
    pub total: f64,
}

/// Learned prompt parameters and the training trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedPrompt {
    pub projector: Projector,
    pub probe: LinearProbe,
    pub config: PromptConfig,
    pub log: Vec<EpochLog>,
}

/// Tune projector and probe against a frozen backbone.
///
/// Embeddings and ego-nets are computed once. Each epoch anneals τ, redraws
/// the Gumbel noise, and applies one Adam step to the probe and one to the
/// projector.
pub fn tune_prompt(
    model: &GcnModel,
    graph: &Graph,
    split: &LabeledSplit,
    config: &PromptConfig,
) -> Result<TrainedPrompt> {
    config.validate()?;
    let embeddings = embed_full_graph(model, graph)?;
    tune_prompt_with_embeddings(model, graph, &embeddings, split, config)
}

/// As [`tune_prompt`], reusing precomputed full-graph embeddings.
pub fn tune_prompt_with_embeddings(
    model: &GcnModel,
    graph: &Graph,
    embeddings: &DenseMatrix,
    split: &LabeledSplit,
    config: &PromptConfig,
) -> Result<TrainedPrompt> {
    tune_prompt_observed(model, graph, embeddings, split, config, &mut |_| {})
}

/// As [`tune_prompt_with_embeddings`], calling `observer` after every epoch's
/// updates.
pub fn tune_prompt_observed(
    model: &GcnModel,
    graph: &Graph,
    embeddings: &DenseMatrix,
    split: &LabeledSplit,
    config: &PromptConfig,
    observer: &mut dyn FnMut(&EpochLog),
) -> Result<TrainedPrompt> {
    config.validate()?;
    let problem = PromptProblem::new(model, graph, embeddings, &split.train, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut projector = Projector::init(model.hidden_dim(), config.projector_hidden, &mut rng);
    let mut probe = LinearProbe::zeros(model.hidden_dim(), graph.num_classes());
    let mut probe_adam = AdamState::new(&[probe.weights.data().len(), probe.bias.len()]);
    let mut proj_adam = AdamState::new(&[projector.w1.data().len(), projector.w2.data().len()]);
    let mut log = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let tau = temperature_with_floor(epoch, config.epochs, config.tau_floor);
        let noise = problem.draw_noise(&mut rng);
        let obj = problem
            .objective(&probe, &projector, &noise, tau)
            .map_err(|e| Error::NonFinite(format!("epoch {epoch}: {e}")))?;
        log.push(EpochLog { epoch, tau, lp: obj.lp, le: obj.le, ls: obj.ls, total: obj.total });

        let g = &obj.grads;
        adam_step(
            &mut [probe.weights.data_mut(), probe.bias.as_mut_slice()],
            &[g.probe.weights.data(), &g.probe.bias],
            &mut probe_adam,
            config.lr,
        )?;
        adam_step(
            &mut [projector.w1.data_mut(), projector.w2.data_mut()],
            &[g.projector.w1.data(), g.projector.w2.data()],
            &mut proj_adam,
            config.lr,
        )?;
        observer(&log[log.len() - 1]);
    }
    Ok(TrainedPrompt { projector, probe, config: config.clone(), log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_csbm, sample_k_shot, CsbmParams};

    #[test]
    fn temperature_cited_points() {
        assert_eq!(temperature(0, 500), 1.0);
        assert_eq!(temperature(250, 500), 0.515);
        assert_eq!(temperature(500, 500), 0.1);
        assert_eq!(temperature(1, 1), 0.1);
    }

    #[test]
    fn temperature_monotone_and_bounded() {
        let mut prev = f64::INFINITY;
        for e in 0..=500 {
            let t = temperature(e, 500);
            assert!(t <= prev && (0.1..=1.0).contains(&t));
            prev = t;
        }
    }

    fn setup() -> (Graph, GcnModel, LabeledSplit) {
        let g = generate_csbm(&CsbmParams::symmetric(60, 4, 2.0, 0.15, 0.03), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = GcnModel::init(4, 8, &mut rng);
        let split = sample_k_shot(&g, 2, 0).unwrap();
        (g, model, split)
    }

    #[test]
    fn single_epoch_run() {
        let (g, model, split) = setup();
        let cfg = PromptConfig { epochs: 1, projector_hidden: 4, ..Default::default() };
        let out = tune_prompt(&model, &g, &split, &cfg).unwrap();
        assert_eq!(out.log.len(), 1);
        assert_eq!(out.log[0].tau, 0.1);
    }

    #[test]
    fn deterministic_and_backbone_frozen() {
        let (g, model, split) = setup();
        let before = model.clone();
        let cfg = PromptConfig { epochs: 15, lambda1: 1.0, lambda2: 1.0, projector_hidden: 4, seed: 3, ..Default::default() };
        let a = tune_prompt(&model, &g, &split, &cfg).unwrap();
        let b = tune_prompt(&model, &g, &split, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(model, before);
        assert!(a.log.iter().all(|l| l.total.is_finite()));
    }
}
