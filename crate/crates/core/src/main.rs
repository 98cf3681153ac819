use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use graphtop::checkpoint::FORMAT_VERSION;
use graphtop::graph::{generate_csbm, load_graph, sample_k_shot, save_graph, CsbmParams, Graph, LabeledSplit};
use graphtop::harness::{
    bench_rewire_scope, export_edge_density, export_prob_histogram, run_experiment, verify_theorem1,
    verify_theorem2, ExperimentConfig, THEOREM1_GRID,
};
use graphtop::nn::GcnModel;
use graphtop::pretrain::{load_model, pretrain_lp, save_model, PretrainConfig, PretrainMode};
use graphtop::prompt::{
    evaluate, load_prompt, save_prompt, tune_prompt, write_log_csv, PromptConfig, RewireScope, TrainedPrompt,
};
use graphtop::{Error, Result};

#[derive(Parser)]
#[command(name = "graphtop", version, about = "Edge-rewiring prompts for frozen GCNs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a two-class CSBM graph and write it as a graph directory.
    Csbm(CsbmArgs),
    /// Link-prediction pre-training of the GCN backbone.
    Pretrain(PretrainArgs),
    /// Learn a rewiring prompt on a k-shot split.
    Tune(TuneArgs),
    /// Test accuracy of a tuned prompt.
    Eval(EvalArgs),
    /// Multi-seed experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    #[command(subcommand)]
    Verify(Verify),
    #[command(subcommand)]
    Export(Export),
    /// Time prompt tuning under both rewiring scopes.
    BenchScope(BenchArgs),
}

#[derive(Args)]
struct CsbmArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long = "mu-sep")]
    mu_sep: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PretrainArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "bce")]
    mode: PretrainMode,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.005)]
    lr: f64,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Loss log CSV; stdout when omitted.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, default_value_t = 0.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda2: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 2)]
    rho: usize,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 0.005)]
    lr: f64,
    #[arg(long, value_enum, default_value = "target-only")]
    scope: RewireScope,
    #[arg(long = "projector-hidden", default_value_t = 128)]
    projector_hidden: usize,
    #[arg(long)]
    out: PathBuf,
    /// Training log CSV; stdout when omitted.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long)]
    prompt: PathBuf,
    /// Result JSON; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verify {
    /// Monte-Carlo check of the Gumbel edge-selection probability.
    Theorem1 {
        #[arg(long, value_delimiter = ',', default_values_t = THEOREM1_GRID)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Centroid distances before and after oracle rewiring on a CSBM.
    Theorem2 {
        #[arg(long, default_value_t = 3000)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        d: usize,
        #[arg(long = "mu-sep", default_value_t = 2.0)]
        mu_sep: f64,
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        #[arg(long, default_value_t = 0.02)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Export {
    /// Histogram CSV of learned candidate-pair probabilities.
    Probs {
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        prompt: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-target mean edge probability CSV.
    Density {
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        prompt: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, default_value_t = 2)]
    rho: usize,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long = "projector-hidden", default_value_t = 128)]
    projector_hidden: usize,
    /// Bytes allowed for the all-pairs run; defaults to available memory.
    #[arg(long = "memory-budget")]
    memory_budget: Option<u64>,
}

#[derive(Serialize)]
struct EvalResult {
    format_version: u32,
    seed: u64,
    shots: usize,
    num_test: usize,
    accuracy: f64,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let name = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let res = match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?);
            f(&mut w).and_then(|()| w.flush())
        }
        None => f(&mut io::stdout().lock()),
    };
    res.map_err(|e| Error::io(name, e))
}

fn load_split(args: &SplitArgs) -> Result<(Graph, GcnModel, LabeledSplit)> {
    let graph = load_graph(&args.graph)?;
    let model = load_model(&args.model)?;
    let split = sample_k_shot(&graph, args.k, args.seed)?;
    Ok((graph, model, split))
}

fn load_all(args: &SplitArgs, prompt: &Path) -> Result<(Graph, GcnModel, LabeledSplit, TrainedPrompt)> {
    let (graph, model, split) = load_split(args)?;
    Ok((graph, model, split, load_prompt(prompt)?))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Csbm(a) => {
            let params = CsbmParams::symmetric(a.n, a.d, a.mu_sep, a.p, a.q);
            save_graph(&generate_csbm(&params, a.seed)?, &a.out)?;
        }
        Command::Pretrain(a) => {
            let graph = load_graph(&a.graph)?;
            let cfg = PretrainConfig {
                mode: a.mode,
                epochs: a.epochs,
                lr: a.lr,
                hidden_dim: a.hidden,
                seed: a.seed,
                ..Default::default()
            };
            let out = pretrain_lp(&graph, &cfg)?;
            save_model(&out.model, &a.out)?;
            with_output(a.log.as_deref(), |w| {
                writeln!(w, "epoch,loss")?;
                for (i, l) in out.losses.iter().enumerate() {
                    writeln!(w, "{},{}", i + 1, l)?;
                }
                Ok(())
            })?;
        }
        Command::Tune(a) => {
            let (graph, model, split) = load_split(&a.split)?;
            let cfg = PromptConfig {
                lambda1: a.lambda1,
                lambda2: a.lambda2,
                gamma: a.gamma,
                epochs: a.epochs,
                lr: a.lr,
                rho: a.rho,
                projector_hidden: a.projector_hidden,
                seed: a.split.seed,
                rewire_scope: a.scope,
                ..Default::default()
            };
            let prompt = tune_prompt(&model, &graph, &split, &cfg)?;
            save_prompt(&prompt, &a.out)?;
            with_output(a.log.as_deref(), |w| write_log_csv(&prompt.log, w))?;
        }
        Command::Eval(a) => {
            let (graph, model, split, prompt) = load_all(&a.split, &a.prompt)?;
            let res = EvalResult {
                format_version: FORMAT_VERSION,
                seed: a.split.seed,
                shots: a.split.k,
                num_test: split.test.len(),
                accuracy: evaluate(&model, &prompt, &graph, &split.test)?,
            };
            match a.out {
                Some(p) => graphtop::checkpoint::write_json(&res, p)?,
                None => print_json(&res)?,
            }
        }
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::io(&config, e))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)?;
            let res = run_experiment(&cfg)?;
            let t = res.timings;
            eprintln!(
                "seconds: graph {:.3}, pretrain {:.3}, tune {:.3}, evaluate {:.3}, linear_probe {:.3}",
                t.graph, t.pretrain, t.tune, t.evaluate, t.linear_probe
            );
            if cfg.output.is_none() {
                print_json(&res)?;
            }
        }
        Command::Verify(Verify::Theorem1 { p, samples, seed }) => {
            let report = verify_theorem1(&p, samples, seed)?;
            print_json(&report)?;
            if !report.all_pass {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Verify(Verify::Theorem2 { n, d, mu_sep, p, q, seed }) => {
            let report = verify_theorem2(&CsbmParams::symmetric(n, d, mu_sep, p, q), seed)?;
            print_json(&report)?;
            if !report.pass {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Export(Export::Probs { split, prompt, bins, out }) => {
            let (graph, model, split, prompt) = load_all(&split, &prompt)?;
            export_prob_histogram(&model, &prompt, &graph, &split, bins, out)?;
        }
        Command::Export(Export::Density { split, prompt, out }) => {
            let (graph, model, split, prompt) = load_all(&split, &prompt)?;
            export_edge_density(&model, &prompt, &graph, &split, out)?;
        }
        Command::BenchScope(a) => {
            let (graph, model, split) = load_split(&a.split)?;
            let cfg = PromptConfig {
                rho: a.rho,
                epochs: a.epochs,
                projector_hidden: a.projector_hidden,
                seed: a.split.seed,
                ..Default::default()
            };
            print_json(&bench_rewire_scope(&graph, &model, &split, &cfg, a.memory_budget)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
