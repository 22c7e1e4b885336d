//! Command-line front-end: `chunk`, `eval`, and `gen-synthetic`.
//!
//! Exit codes: 0 success, 2 input error, 3 validation/mismatch, 4 numerical
//! failure.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use s2_chunking::baselines::Segmenter;
use s2_chunking::cli::{
    build_settings, load_file_config, run_chunk, run_eval, run_gen_synthetic, ChunkMethod,
    FileConfig, PredictionSource,
};
use s2_chunking::embed::{ProviderConfig, ProviderKind};
use s2_chunking::graph::EdgePolicy;
use s2_chunking::layout::LayoutConfig;
use s2_chunking::synthetic::{LayoutProfile, SyntheticConfig};

#[derive(Parser)]
#[command(
    name = "s2chunk",
    about = "Layout- and semantics-aware document chunking",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chunk one or more documents.
    Chunk(ChunkArgs),
    /// Score prediction files against documents and optional ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic corpus with planted ground truth.
    GenSynthetic(GenArgs),
}

#[derive(Args)]
struct CommonProviderArgs {
    /// Embedding provider.
    #[arg(long, value_parser = clap::value_parser!(ProviderKind))]
    provider: Option<ProviderKind>,
    /// Embedding dimension.
    #[arg(long)]
    dimension: Option<usize>,
    /// Remote endpoint base URL (S2_EMBED_ENDPOINT also works).
    #[arg(long)]
    endpoint: Option<String>,
    /// Remote batch size.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Embedding cache file (append-only).
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct ChunkArgs {
    /// Input document file(s).
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Chunking method.
    #[arg(long, default_value = "s2", value_parser = clap::value_parser!(ChunkMethod))]
    method: ChunkMethod,
    /// Token budget per chunk.
    #[arg(long)]
    max_tokens: Option<usize>,
    /// Semantic-baseline similarity threshold.
    #[arg(long)]
    tau: Option<f64>,
    /// Semantic-baseline segmenter (region or sentence).
    #[arg(long, value_parser = clap::value_parser!(Segmenter))]
    segmenter: Option<Segmenter>,
    /// Fixed-size chunk size in tokens (defaults to --max-tokens).
    #[arg(long)]
    size: Option<usize>,
    /// Fixed-size overlap in tokens.
    #[arg(long)]
    overlap: Option<usize>,
    /// Clustering seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Edge policy: auto, complete, or knn.
    #[arg(long, value_parser = clap::value_parser!(EdgePolicy))]
    edge_policy: Option<EdgePolicy>,
    /// Neighbors kept per node under the knn policy.
    #[arg(long)]
    knn_k: Option<usize>,
    /// Use raw centroid distances instead of diagonal-normalized ones.
    #[arg(long)]
    no_normalize_distances: bool,
    /// Also write the combined weights as a Matrix Market file.
    #[arg(long)]
    dump_graph: bool,
    /// Worker threads for batches (0 = automatic).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output chunks file (single input) or directory (multiple inputs).
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    provider: CommonProviderArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Document file(s) the predictions refer to.
    #[arg(long, required = true, num_args = 1..)]
    document: Vec<PathBuf>,
    /// Prediction chunks files or directories (one per method).
    #[arg(long, required = true, num_args = 1..)]
    predictions: Vec<PathBuf>,
    /// Ground-truth file(s); omit to score cohesion/layout only.
    #[arg(long, num_args = 0..)]
    truth: Vec<PathBuf>,
    /// Report path prefix; writes <prefix>.txt and <prefix>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    provider: CommonProviderArgs,
}

#[derive(Args)]
struct GenArgs {
    /// Corpus seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of documents.
    #[arg(long, default_value_t = 10)]
    n_docs: usize,
    /// Layout profile: single-column, two-column, figure-caption, or mixed.
    #[arg(long, default_value = "mixed", value_parser = clap::value_parser!(LayoutProfile))]
    profile: LayoutProfile,
    /// Chunk budget the generated group sizes are tuned against.
    #[arg(long, default_value_t = 512)]
    target_tokens: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn file_config(path: &Option<PathBuf>) -> s2_chunking::Result<FileConfig> {
    match path {
        Some(p) => load_file_config(p),
        None => Ok(FileConfig::default()),
    }
}

fn cmd_chunk(args: ChunkArgs) -> s2_chunking::Result<()> {
    let config = file_config(&args.config)?;
    let settings = build_settings(
        &config,
        args.method,
        args.max_tokens,
        args.tau,
        args.segmenter,
        args.size,
        args.overlap,
        args.seed,
        args.provider.provider,
        args.provider.dimension,
        args.provider.endpoint,
        args.provider.batch_size,
        args.provider.cache,
        args.edge_policy,
        args.knn_k,
        args.no_normalize_distances,
        args.dump_graph,
        args.threads,
    )?;
    let started = Instant::now();
    let outcomes = run_chunk(&args.input, args.out.as_deref(), &settings)?;
    for outcome in &outcomes {
        println!(
            "{}: {} chunks, max {} tokens -> {}",
            outcome.doc_id,
            outcome.chunk_count,
            outcome.max_tokens,
            outcome.out_path.display()
        );
    }
    println!(
        "chunked {} document(s) with '{}' in {:.1} ms",
        outcomes.len(),
        settings.method.name(),
        started.elapsed().as_secs_f64() * 1e3
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> s2_chunking::Result<()> {
    let config = file_config(&args.config)?;
    // reuse the settings builder for provider/layout resolution
    let settings = build_settings(
        &config,
        ChunkMethod::S2,
        None,
        None,
        None,
        None,
        None,
        None,
        args.provider.provider,
        args.provider.dimension,
        args.provider.endpoint,
        args.provider.batch_size,
        args.provider.cache,
        None,
        None,
        false,
        false,
        0,
    )?;
    let provider: ProviderConfig = settings.graph.provider.clone();
    let layout: LayoutConfig = settings.graph.layout.clone();
    let sources: Vec<PredictionSource> = args
        .predictions
        .into_iter()
        .map(PredictionSource::from_path)
        .collect();
    let outcome = run_eval(
        &args.document,
        &sources,
        &args.truth,
        &provider,
        &layout,
        args.out.as_deref(),
    )?;
    print!("{}", outcome.table);
    if let Some(prefix) = &args.out {
        println!("wrote {}.txt and {}.csv", prefix.display(), prefix.display());
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> s2_chunking::Result<()> {
    let config = SyntheticConfig {
        seed: args.seed,
        n_docs: args.n_docs,
        profile: args.profile,
        target_chunk_tokens: args.target_tokens,
    };
    let written = run_gen_synthetic(&config, &args.out)?;
    println!(
        "wrote {} document(s) with ground truth to {}",
        written.len(),
        args.out.display()
    );
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Chunk(args) => cmd_chunk(args),
        Command::Eval(args) => cmd_eval(args),
        Command::GenSynthetic(args) => cmd_gen(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
