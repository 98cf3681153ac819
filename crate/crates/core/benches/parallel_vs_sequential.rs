//! Rayon pool vs. a one-thread pool on the data-parallel hot paths.
//!
//! Built with `--no-default-features` both variants run the sequential
//! fallback, which gives the third point of comparison.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graphtop::graph::{generate_csbm, sample_k_shot, CsbmParams};
use graphtop::nn::{embed_full_graph, GcnModel, LinearProbe};
use graphtop::par;
use graphtop::prompt::{gumbel_edge_probability, Predictor, Projector, PromptConfig, PromptProblem, TrainedPrompt};

fn variants<F: Fn() + Sync + Send>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    let label = if par::is_parallel() { "rayon" } else { "sequential_build" };
    g.bench_function(BenchmarkId::new(label, "pool"), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new(label, "one_thread"), |b| b.iter(|| par::single_threaded(&f)));
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    variants(c, "gumbel_monte_carlo_2e5", || {
        gumbel_edge_probability(0.3, 200_000, 1).unwrap();
    });
}

fn objective_and_inference(c: &mut Criterion) {
    let graph = generate_csbm(&CsbmParams::symmetric(1000, 8, 2.0, 0.01, 0.002), 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let model = GcnModel::init(8, 64, &mut rng);
    let split = sample_k_shot(&graph, 5, 0).unwrap();
    let h = embed_full_graph(&model, &graph).unwrap();
    let cfg = PromptConfig { projector_hidden: 64, ..Default::default() };
    let problem = PromptProblem::new(&model, &graph, &h, &split.train, &cfg).unwrap();
    let projector = Projector::init(64, 64, &mut rng);
    let probe = LinearProbe::zeros(64, 2);
    let noise = problem.draw_noise(&mut rng);
    variants(c, "prompt_objective", || {
        problem.objective(&probe, &projector, &noise, 0.5).unwrap();
    });

    let prompt = TrainedPrompt { projector, probe, config: cfg, log: Vec::new() };
    let predictor = Predictor::with_embeddings(&model, &prompt, &graph, &h).unwrap();
    let test = &split.test[..300];
    variants(c, "inference_300_targets", || {
        predictor.accuracy(test).unwrap();
    });
}

criterion_group!(benches, monte_carlo, objective_and_inference);
criterion_main!(benches);
