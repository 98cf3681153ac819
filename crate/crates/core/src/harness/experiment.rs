use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::stats::AccuracySummary;
use crate::checkpoint::{write_json, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::graph::{generate_csbm, load_graph, sample_k_shot, CsbmParams, Graph};
use crate::nn::{embed_full_graph, GcnModel};
use crate::par;
use crate::pretrain::{load_model, pretrain_lp, PretrainConfig};
use crate::prompt::{fit_probe, probe_accuracy, tune_prompt_with_embeddings, Predictor, PromptConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GraphSource {
    /// Graph directory, shared by every seed.
    Directory { path: PathBuf },
    /// Fresh CSBM sample per seed, generated with that seed.
    Csbm { params: CsbmParams },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Baselines {
    pub linear_probe: bool,
    pub probe_epochs: usize,
    pub probe_lr: f64,
}

impl Default for Baselines {
    fn default() -> Self {
        Self { linear_probe: true, probe_epochs: 500, probe_lr: 0.005 }
    }
}

/// Experiment description. Per seed `s`, the seed fields inside `pretrain`
/// and `prompt` are replaced by `s`, as are the CSBM and split seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    /// Pre-trained backbone to load instead of pre-training per seed.
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub pretrain: PretrainConfig,
    #[serde(default)]
    pub prompt: PromptConfig,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub baselines: Baselines,
    /// λ₁ values to sweep; empty means `prompt.lambda1` only.
    #[serde(default)]
    pub lambda1_grid: Vec<f64>,
    #[serde(default)]
    pub lambda2_grid: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_shots() -> usize {
    5
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

impl ExperimentConfig {
    pub fn new(graph: GraphSource) -> Self {
        Self {
            graph,
            model: None,
            pretrain: PretrainConfig::default(),
            prompt: PromptConfig::default(),
            shots: default_shots(),
            seeds: default_seeds(),
            baselines: Baselines::default(),
            lambda1_grid: Vec::new(),
            lambda2_grid: Vec::new(),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidParams("at least one seed is required".into()));
        }
        if self.shots == 0 {
            return Err(Error::InvalidParams("shots must be ≥ 1".into()));
        }
        if let GraphSource::Csbm { params } = &self.graph {
            params.validate()?;
        }
        if self.model.is_none() {
            self.pretrain.validate()?;
        }
        for (l1, l2) in self.grid() {
            PromptConfig { lambda1: l1, lambda2: l2, ..self.prompt.clone() }.validate()?;
        }
        Ok(())
    }

    /// Cross product of the λ grids, λ₁-major.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let l1 = if self.lambda1_grid.is_empty() { vec![self.prompt.lambda1] } else { self.lambda1_grid.clone() };
        let l2 = if self.lambda2_grid.is_empty() { vec![self.prompt.lambda2] } else { self.lambda2_grid.clone() };
        l1.iter().flat_map(|&a| l2.iter().map(move |&b| (a, b))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub lambda1: f64,
    pub lambda2: f64,
    pub graphtop: AccuracySummary,
}

/// Wall-clock seconds per phase, summed over seeds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub graph: f64,
    pub pretrain: f64,
    pub tune: f64,
    pub evaluate: f64,
    pub linear_probe: f64,
}

impl PhaseTimings {
    fn add(&mut self, o: &PhaseTimings) {
        self.graph += o.graph;
        self.pretrain += o.pretrain;
        self.tune += o.tune;
        self.evaluate += o.evaluate;
        self.linear_probe += o.linear_probe;
    }
}

/// Accuracies per seed with aggregates. Timings are not serialised so that
/// the result file is reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub format_version: u32,
    pub seeds: Vec<u64>,
    pub graphtop: Vec<GridResult>,
    pub linear_probe: Option<AccuracySummary>,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub timings: PhaseTimings,
}

struct SeedOutcome {
    graphtop: Vec<f64>,
    linear_probe: Option<f64>,
    timings: PhaseTimings,
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn run_seed(config: &ExperimentConfig, shared: Option<&Graph>, loaded: Option<&GcnModel>, seed: u64) -> Result<SeedOutcome> {
    let mut timings = PhaseTimings::default();
    let t = Instant::now();
    let owned;
    let graph = match (shared, &config.graph) {
        (Some(g), _) => g,
        (None, GraphSource::Csbm { params }) => {
            owned = generate_csbm(params, seed)?;
            &owned
        }
        (None, GraphSource::Directory { path }) => {
            owned = load_graph(path)?;
            &owned
        }
    };
    timings.graph = secs(t);

    let t = Instant::now();
    let trained;
    let model = match loaded {
        Some(m) => m,
        None => {
            trained = pretrain_lp(graph, &PretrainConfig { seed, ..config.pretrain.clone() })?.model;
            &trained
        }
    };
    timings.pretrain = secs(t);

    let split = sample_k_shot(graph, config.shots, seed)?;
    let h = embed_full_graph(model, graph)?;
    let mut graphtop = Vec::new();
    for (lambda1, lambda2) in config.grid() {
        let cfg = PromptConfig { lambda1, lambda2, seed, ..config.prompt.clone() };
        let t = Instant::now();
        let prompt = tune_prompt_with_embeddings(model, graph, &h, &split, &cfg)?;
        timings.tune += secs(t);
        let t = Instant::now();
        graphtop.push(Predictor::with_embeddings(model, &prompt, graph, &h)?.accuracy(&split.test)?);
        timings.evaluate += secs(t);
    }

    let linear_probe = if config.baselines.linear_probe {
        let t = Instant::now();
        let nodes: Vec<usize> = split.train.iter().map(|x| x.0).collect();
        let labels: Vec<usize> = split.train.iter().map(|x| x.1).collect();
        let b = &config.baselines;
        let probe = fit_probe(&h.select_rows(&nodes), &labels, graph.num_classes(), b.probe_epochs, b.probe_lr, seed)?;
        let acc = probe_accuracy(&probe, &h, &split.test)?;
        timings.linear_probe = secs(t);
        Some(acc)
    } else {
        None
    };
    Ok(SeedOutcome { graphtop, linear_probe, timings })
}

/// Run every seed (in parallel when enabled), aggregate, and write the JSON
/// result to `config.output` if set. Any failing seed aborts the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    let shared = match &config.graph {
        GraphSource::Directory { path } => Some(load_graph(path)?),
        GraphSource::Csbm { .. } => None,
    };
    let loaded = config.model.as_ref().map(load_model).transpose()?;
    let outcomes = par::try_map(&config.seeds, |&seed| {
        run_seed(config, shared.as_ref(), loaded.as_ref(), seed).map_err(|e| Error::Seed { seed, source: Box::new(e) })
    })?;

    let mut timings = PhaseTimings::default();
    for o in &outcomes {
        timings.add(&o.timings);
    }
    let graphtop = config
        .grid()
        .into_iter()
        .enumerate()
        .map(|(i, (lambda1, lambda2))| GridResult {
            lambda1,
            lambda2,
            graphtop: AccuracySummary::from_values(outcomes.iter().map(|o| o.graphtop[i]).collect()),
        })
        .collect();
    let linear_probe = config
        .baselines
        .linear_probe
        .then(|| AccuracySummary::from_values(outcomes.iter().map(|o| o.linear_probe.unwrap_or(f64::NAN)).collect()));
    let result = RunResult {
        format_version: FORMAT_VERSION,
        seeds: config.seeds.clone(),
        graphtop,
        linear_probe,
        config: config.clone(),
        timings,
    };
    if let Some(path) = &config.output {
        write_json(&result, path)?;
    }
    Ok(result)
}
