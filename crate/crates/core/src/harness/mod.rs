//! Multi-seed experiments, theorem validators, figure-data exports and the
//! scope runtime benchmark.

mod bench;
mod experiment;
mod export;
mod stats;
mod theorem;

pub use bench::{bench_rewire_scope, available_memory_bytes, estimate_all_pairs_bytes, BenchOutcome, BenchReport};
pub use experiment::{
    run_experiment, Baselines, ExperimentConfig, GraphSource, GridResult, PhaseTimings, RunResult,
};
pub use export::{
    candidate_probabilities, export_edge_density, export_prob_histogram, write_edge_density,
    write_prob_histogram,
};
pub use stats::{mean, sample_std, AccuracySummary};
pub use theorem::{
    verify_theorem1, verify_theorem2, Theorem1Report, Theorem1Row, Theorem2Report, THEOREM1_GRID,
    THEOREM2_TOLERANCE,
};
