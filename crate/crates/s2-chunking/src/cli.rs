//! Command implementations behind the `s2chunk` binary: document chunking,
//! evaluation, and synthetic-corpus generation.
//!
//! Settings resolve in flag > config file > default order. Output files are
//! written atomically (temp file in the target directory, then rename), so
//! interrupted runs never leave half-written artifacts.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::baselines::{
    chunk_document_fixed, chunk_document_hybrid, chunk_document_recursive,
    chunk_document_semantic, FixedSizeParams, Segmenter, SemanticParams,
};
use crate::doc_model::{
    parse_chunks, parse_document, parse_ground_truth, serialize_chunks, serialize_document,
    serialize_ground_truth, Chunk, ChunkSet, Document, GroundTruth,
};
use crate::embed::{Embedder, EmbeddingVector, ProviderConfig, ProviderKind, ENDPOINT_ENV_VAR};
use crate::error::{Error, Result};
use crate::graph::{build_graph, dump_matrix_market, EdgePolicy, GraphConfig};
use crate::layout::LayoutConfig;
use crate::metrics::{
    cohesion_score, format_table, layout_consistency_score, nmi, purity, to_csv,
    DocumentScores, EvaluationReport,
};
use crate::spectral::{s2_chunk_graph, SpectralConfig};
use crate::synthetic::{generate_corpus, SyntheticConfig};
use crate::tokenize::SeparatorHierarchy;

/// Chunking method selected with `--method`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkMethod {
    Fixed,
    Recursive,
    Semantic,
    S2,
    HybridBaseline,
}

impl ChunkMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ChunkMethod::Fixed => "fixed",
            ChunkMethod::Recursive => "recursive",
            ChunkMethod::Semantic => "semantic",
            ChunkMethod::S2 => "s2",
            ChunkMethod::HybridBaseline => "hybrid-baseline",
        }
    }
}

impl FromStr for ChunkMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(ChunkMethod::Fixed),
            "recursive" => Ok(ChunkMethod::Recursive),
            "semantic" => Ok(ChunkMethod::Semantic),
            "s2" => Ok(ChunkMethod::S2),
            "hybrid-baseline" => Ok(ChunkMethod::HybridBaseline),
            other => Err(format!(
                "unknown method '{other}' (expected fixed, recursive, semantic, s2, or hybrid-baseline)"
            )),
        }
    }
}

impl FromStr for ProviderKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "builtin" => Ok(ProviderKind::Builtin),
            "remote" => Ok(ProviderKind::Remote),
            other => Err(format!("unknown provider '{other}' (expected builtin or remote)")),
        }
    }
}

impl FromStr for EdgePolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(EdgePolicy::Auto),
            "complete" => Ok(EdgePolicy::Complete),
            "knn" => Ok(EdgePolicy::Knn),
            other => Err(format!(
                "unknown edge policy '{other}' (expected auto, complete, or knn)"
            )),
        }
    }
}

impl FromStr for Segmenter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "region" => Ok(Segmenter::Region),
            "sentence" => Ok(Segmenter::Sentence),
            other => Err(format!("unknown segmenter '{other}' (expected region or sentence)")),
        }
    }
}

/// Optional TOML config file sections; command-line flags win over these.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub tokenize: TokenizeSection,
    pub layout: LayoutSection,
    pub provider: ProviderSection,
    pub graph: GraphSection,
    pub spectral: SpectralSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizeSection {
    pub separators: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSection {
    pub page_gap: Option<f64>,
    pub band_height: Option<f64>,
    pub normalize_distances: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderSection {
    pub kind: Option<String>,
    pub dimension: Option<usize>,
    pub endpoint: Option<String>,
    pub batch_size: Option<usize>,
    pub cache_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    pub edge_policy: Option<String>,
    pub knn_k: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSection {
    pub eig_tolerance: Option<f64>,
    pub max_jacobi_sweeps: Option<usize>,
    pub kmeans_max_iters: Option<usize>,
    pub kmeans_restarts: Option<usize>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = read_file(path)?;
    let text = String::from_utf8(text)
        .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
}

/// Fully resolved settings for one chunking or evaluation run.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub method: ChunkMethod,
    pub fixed: FixedSizeParams,
    pub semantic: SemanticParams,
    pub graph: GraphConfig,
    pub spectral: SpectralConfig,
    pub dump_graph: bool,
    /// 0 means "let the thread pool pick".
    pub threads: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            method: ChunkMethod::S2,
            fixed: FixedSizeParams::default(),
            semantic: SemanticParams::default(),
            graph: GraphConfig::default(),
            spectral: SpectralConfig::default(),
            dump_graph: false,
            threads: 0,
        }
    }
}

/// Resolve the remote endpoint: explicit flag/config first, then the
/// `S2_EMBED_ENDPOINT` environment variable.
pub fn resolve_endpoint(explicit: Option<String>) -> Option<String> {
    explicit.or_else(|| std::env::var(ENDPOINT_ENV_VAR).ok())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("input not found: {}", path.display()),
            ))
        } else {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        }
    })
}

/// Write-temp-then-rename so readers never observe partial files.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Chunk one already-parsed document with the configured method.
pub fn chunk_document(document: &Document, settings: &RunSettings) -> Result<Vec<Chunk>> {
    match settings.method {
        ChunkMethod::S2 => {
            let graph = build_graph(document, &settings.graph)?;
            s2_chunk_graph(&graph, document, &settings.spectral)
        }
        ChunkMethod::Fixed => {
            chunk_document_fixed(document, &settings.fixed, &settings.graph.layout)
        }
        ChunkMethod::Recursive => chunk_document_recursive(
            document,
            &settings.spectral.separators,
            settings.spectral.max_token_length,
            &settings.graph.layout,
        ),
        ChunkMethod::Semantic => chunk_document_semantic(
            document,
            &settings.graph.provider,
            &settings.semantic,
            &settings.graph.layout,
        ),
        ChunkMethod::HybridBaseline => {
            chunk_document_hybrid(document, &settings.graph, &settings.spectral)
        }
    }
}

/// Result of chunking one input file.
#[derive(Debug)]
pub struct ChunkOutcome {
    pub doc_id: String,
    pub chunk_count: usize,
    pub max_tokens: usize,
    pub out_path: PathBuf,
}

fn chunks_out_path(input: &Path, out: Option<&Path>, many: bool) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chunks".to_string());
    match out {
        Some(out) if many || out.is_dir() => out.join(format!("{stem}.chunks.json")),
        Some(out) => out.to_path_buf(),
        None => input.with_file_name(format!("{stem}.chunks.json")),
    }
}

/// `chunk` command: process every input document and write one chunks file
/// per input. Documents are independent, so batches run in parallel; file
/// contents are deterministic regardless of thread count.
pub fn run_chunk(
    inputs: &[PathBuf],
    out: Option<&Path>,
    settings: &RunSettings,
) -> Result<Vec<ChunkOutcome>> {
    if inputs.is_empty() {
        return Err(Error::Validation("no input documents given".into()));
    }
    settings.graph.validate()?;
    settings.spectral.validate()?;
    if let Some(out) = out {
        if inputs.len() > 1 {
            std::fs::create_dir_all(out)?;
        }
    }
    let many = inputs.len() > 1;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    pool.install(|| {
        inputs
            .par_iter()
            .map(|input| {
                let bytes = read_file(input)?;
                let document = parse_document(&bytes)?;
                let chunks = chunk_document(&document, settings)?;
                let set = ChunkSet { doc_id: document.doc_id.clone(), chunks };
                let out_path = chunks_out_path(input, out, many);
                atomic_write(&out_path, &serialize_chunks(&set))?;
                if settings.dump_graph {
                    let graph = build_graph(&document, &settings.graph)?;
                    let dump_path = out_path.with_extension("graph.mtx");
                    atomic_write(&dump_path, dump_matrix_market(&graph).as_bytes())?;
                }
                Ok(ChunkOutcome {
                    doc_id: set.doc_id,
                    chunk_count: set.chunks.len(),
                    max_tokens: set.chunks.iter().map(|c| c.token_count).max().unwrap_or(0),
                    out_path,
                })
            })
            .collect()
    })
}

/// One prediction source for `eval`: a chunks file or a directory of them,
/// labelled by the method name shown in reports.
#[derive(Debug, Clone)]
pub struct PredictionSource {
    pub method: String,
    pub path: PathBuf,
}

impl PredictionSource {
    /// Label a path: directory name, or file stem minus `.chunks`.
    pub fn from_path(path: PathBuf) -> Self {
        let method = if path.is_dir() {
            path.file_name().map(|s| s.to_string_lossy().into_owned())
        } else {
            path.file_stem().map(|s| {
                let stem = s.to_string_lossy();
                stem.trim_end_matches(".chunks").to_string()
            })
        }
        .unwrap_or_else(|| "method".to_string());
        PredictionSource { method, path }
    }

    fn chunk_files(&self) -> Result<Vec<PathBuf>> {
        if self.path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&self.path)?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    p.file_name()
                        .map(|n| n.to_string_lossy().ends_with(".chunks.json"))
                        .unwrap_or(false)
                })
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::Validation(format!(
                    "no *.chunks.json files in {}",
                    self.path.display()
                )));
            }
            Ok(files)
        } else {
            Ok(vec![self.path.clone()])
        }
    }
}

/// Everything `eval` produces: per-method reports plus rendered table/CSV.
#[derive(Debug)]
pub struct EvalOutcome {
    pub reports: Vec<EvaluationReport>,
    pub table: String,
    pub csv: String,
}

/// `eval` command: score prediction sets against their documents and
/// optional ground truth.
pub fn run_eval(
    documents: &[PathBuf],
    predictions: &[PredictionSource],
    truths: &[PathBuf],
    provider: &ProviderConfig,
    layout: &LayoutConfig,
    out_prefix: Option<&Path>,
) -> Result<EvalOutcome> {
    if documents.is_empty() {
        return Err(Error::Validation("no documents given".into()));
    }
    if predictions.is_empty() {
        return Err(Error::Validation("no prediction files given".into()));
    }

    let mut docs: HashMap<String, Document> = HashMap::new();
    for path in documents {
        let doc = parse_document(&read_file(path)?)?;
        docs.insert(doc.doc_id.clone(), doc);
    }
    let mut truth_by_doc: HashMap<String, GroundTruth> = HashMap::new();
    for path in truths {
        let truth = parse_ground_truth(&read_file(path)?)?;
        truth_by_doc.insert(truth.doc_id.clone(), truth);
    }

    // Embed each document's regions once; all methods share the vectors.
    let embedder = Embedder::new(provider.clone())?;
    let mut region_embeddings: HashMap<String, HashMap<String, EmbeddingVector>> = HashMap::new();
    for (doc_id, doc) in &docs {
        let texts: Vec<String> = doc.regions.iter().map(|r| r.text.clone()).collect();
        let vectors = embedder.embed_texts(&texts)?;
        let map = doc
            .regions
            .iter()
            .zip(vectors)
            .map(|(r, v)| (r.id.clone(), v))
            .collect();
        region_embeddings.insert(doc_id.clone(), map);
    }

    let mut reports = Vec::new();
    for source in predictions {
        let mut per_document = Vec::new();
        for file in source.chunk_files()? {
            let set = parse_chunks(&read_file(&file)?)?;
            let doc = docs.get(&set.doc_id).ok_or_else(|| {
                Error::Validation(format!(
                    "predictions {} reference document '{}' which was not supplied",
                    file.display(),
                    set.doc_id
                ))
            })?;
            per_document.push(score_document(
                doc,
                &set,
                truth_by_doc.get(&set.doc_id),
                &region_embeddings[&set.doc_id],
                layout,
            )?);
        }
        per_document.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        reports.push(EvaluationReport::from_documents(&source.method, per_document)?);
    }

    let table = format_table(&reports);
    let csv = to_csv(&reports);
    if let Some(prefix) = out_prefix {
        let mut table_path = prefix.as_os_str().to_owned();
        table_path.push(".txt");
        atomic_write(&PathBuf::from(table_path), table.as_bytes())?;
        let mut csv_path = prefix.as_os_str().to_owned();
        csv_path.push(".csv");
        atomic_write(&PathBuf::from(csv_path), csv.as_bytes())?;
    }
    Ok(EvalOutcome { reports, table, csv })
}

/// Score one method's chunks on one document.
pub fn score_document(
    document: &Document,
    set: &ChunkSet,
    truth: Option<&GroundTruth>,
    embeddings: &HashMap<String, EmbeddingVector>,
    layout: &LayoutConfig,
) -> Result<DocumentScores> {
    let chunks = &set.chunks;
    let cohesion = cohesion_score(chunks, embeddings)?;
    let layout_score = layout_consistency_score(chunks, document, layout)?;
    let (purity_score, nmi_score) = match truth {
        Some(truth) => (
            Some(purity(chunks, document, truth)?),
            Some(nmi(chunks, document, truth)?),
        ),
        None => (None, None),
    };
    let total_regions: usize = chunks
        .iter()
        .map(|c| crate::metrics::region_assignment_from_chunks(std::slice::from_ref(c)).len())
        .sum();
    Ok(DocumentScores {
        doc_id: document.doc_id.clone(),
        cohesion,
        layout_consistency: layout_score,
        purity: purity_score,
        nmi: nmi_score,
        chunk_count: chunks.len(),
        mean_chunk_regions: if chunks.is_empty() {
            0.0
        } else {
            total_regions as f64 / chunks.len() as f64
        },
    })
}

/// `gen-synthetic` command: write `<doc_id>.json` and `<doc_id>.truth.json`
/// per generated document.
pub fn run_gen_synthetic(
    config: &SyntheticConfig,
    out_dir: &Path,
) -> Result<Vec<(PathBuf, PathBuf)>> {
    if config.n_docs < 1 {
        return Err(Error::Validation("n_docs must be >= 1".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::with_capacity(config.n_docs);
    for (document, truth) in generate_corpus(config) {
        let doc_path = out_dir.join(format!("{}.json", document.doc_id));
        let truth_path = out_dir.join(format!("{}.truth.json", document.doc_id));
        atomic_write(&doc_path, &serialize_document(&document))?;
        atomic_write(&truth_path, &serialize_ground_truth(&truth))?;
        written.push((doc_path, truth_path));
    }
    Ok(written)
}

/// Re-exported for the binary's flag parsing.
pub fn parse_separators(raw: &[String]) -> Result<SeparatorHierarchy> {
    let unescaped: Vec<String> = raw
        .iter()
        .map(|s| s.replace("\\n", "\n").replace("\\t", "\t"))
        .collect();
    SeparatorHierarchy::new(unescaped)
}

/// Convenience used by the binary and tests to assemble settings from the
/// optional config file plus already-parsed flag values.
#[allow(clippy::too_many_arguments)]
pub fn build_settings(
    file: &FileConfig,
    method: ChunkMethod,
    max_tokens: Option<usize>,
    tau: Option<f64>,
    segmenter: Option<Segmenter>,
    size: Option<usize>,
    overlap: Option<usize>,
    seed: Option<u64>,
    provider_kind: Option<ProviderKind>,
    dimension: Option<usize>,
    endpoint: Option<String>,
    batch_size: Option<usize>,
    cache_path: Option<PathBuf>,
    edge_policy: Option<EdgePolicy>,
    knn_k: Option<usize>,
    no_normalize_distances: bool,
    dump_graph: bool,
    threads: usize,
) -> Result<RunSettings> {
    let mut settings = RunSettings::default();
    settings.method = method;
    settings.dump_graph = dump_graph;
    settings.threads = threads;

    // tokenize
    if let Some(seps) = &file.tokenize.separators {
        settings.spectral.separators = SeparatorHierarchy::new(seps.clone())?;
    }

    // layout
    let layout = LayoutConfig {
        page_gap: file.layout.page_gap,
        band_height: file.layout.band_height,
        normalize_distances: if no_normalize_distances {
            false
        } else {
            file.layout.normalize_distances.unwrap_or(true)
        },
    };
    settings.graph.layout = layout;

    // provider
    let mut provider = ProviderConfig::default();
    if let Some(kind) = &file.provider.kind {
        provider.kind = kind.parse().map_err(Error::Validation)?;
    }
    if let Some(kind) = provider_kind {
        provider.kind = kind;
    }
    provider.dimension = dimension.or(file.provider.dimension).unwrap_or(provider.dimension);
    provider.batch_size =
        batch_size.or(file.provider.batch_size).unwrap_or(provider.batch_size);
    provider.cache_path = cache_path.or_else(|| file.provider.cache_path.clone());
    provider.endpoint = resolve_endpoint(endpoint.or_else(|| file.provider.endpoint.clone()));
    settings.graph.provider = provider;

    // graph
    if let Some(policy) = &file.graph.edge_policy {
        settings.graph.edge_policy = policy.parse().map_err(Error::Validation)?;
    }
    if let Some(policy) = edge_policy {
        settings.graph.edge_policy = policy;
    }
    settings.graph.knn_k = knn_k.or(file.graph.knn_k);

    // spectral
    let s = &file.spectral;
    if let Some(t) = s.eig_tolerance {
        settings.spectral.eig_tolerance = t;
    }
    if let Some(v) = s.max_jacobi_sweeps {
        settings.spectral.max_jacobi_sweeps = v;
    }
    if let Some(v) = s.kmeans_max_iters {
        settings.spectral.kmeans_max_iters = v;
    }
    if let Some(v) = s.kmeans_restarts {
        settings.spectral.kmeans_restarts = v;
    }
    if let Some(v) = max_tokens {
        settings.spectral.max_token_length = v;
    }
    if let Some(v) = seed {
        settings.spectral.seed = v;
    }

    // baselines
    settings.fixed = FixedSizeParams {
        size: size.unwrap_or(settings.spectral.max_token_length),
        overlap: overlap.unwrap_or(0),
    };
    settings.semantic = SemanticParams {
        threshold: tau.unwrap_or(0.7),
        segmenter: segmenter.unwrap_or_default(),
    };
    settings.fixed.validate()?;
    settings.semantic.validate()?;
    Ok(settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{generate_document, LayoutProfile};

    #[test]
    fn method_names_round_trip() {
        for name in ["fixed", "recursive", "semantic", "s2", "hybrid-baseline"] {
            let method: ChunkMethod = name.parse().unwrap();
            assert_eq!(method.name(), name);
        }
        assert!("spectral".parse::<ChunkMethod>().is_err());
    }

    #[test]
    fn prediction_source_labels() {
        let source = PredictionSource::from_path(PathBuf::from("/tmp/s2.chunks.json"));
        assert_eq!(source.method, "s2");
    }

    #[test]
    fn chunk_and_eval_round_trip_in_tempdir() {
        let dir = tempfile::tempdir().unwrap();
        let (doc, truth) = generate_document(0, 0, LayoutProfile::SingleColumn, 256);
        let doc_path = dir.path().join("doc.json");
        atomic_write(&doc_path, &serialize_document(&doc)).unwrap();
        let truth_path = dir.path().join("doc.truth.json");
        atomic_write(&truth_path, &serialize_ground_truth(&truth)).unwrap();

        let mut settings = RunSettings::default();
        settings.spectral.max_token_length = 256;
        let outcomes = run_chunk(&[doc_path.clone()], None, &settings).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert!(outcomes[0].out_path.exists());
        assert!(outcomes[0].max_tokens <= 256);

        let eval = run_eval(
            &[doc_path],
            &[PredictionSource {
                method: "s2".into(),
                path: outcomes[0].out_path.clone(),
            }],
            &[truth_path],
            &ProviderConfig::default(),
            &LayoutConfig::default(),
            Some(&dir.path().join("report")),
        )
        .unwrap();
        assert_eq!(eval.reports.len(), 1);
        assert!(eval.reports[0].purity.is_some());
        assert!(dir.path().join("report.csv").exists());
        assert!(dir.path().join("report.txt").exists());
        assert!(eval.csv.lines().count() >= 5);
    }

    #[test]
    fn missing_input_maps_to_exit_2() {
        let err = run_chunk(
            &[PathBuf::from("/nonexistent/missing.json")],
            None,
            &RunSettings::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("input not found"));
    }

    #[test]
    fn gen_synthetic_writes_deterministic_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let config = SyntheticConfig {
            seed: 0,
            n_docs: 2,
            profile: LayoutProfile::Mixed,
            target_chunk_tokens: 512,
        };
        let first = run_gen_synthetic(&config, &dir.path().join("a")).unwrap();
        let second = run_gen_synthetic(&config, &dir.path().join("b")).unwrap();
        for ((da, ta), (db, tb)) in first.iter().zip(&second) {
            assert_eq!(std::fs::read(da).unwrap(), std::fs::read(db).unwrap());
            assert_eq!(std::fs::read(ta).unwrap(), std::fs::read(tb).unwrap());
        }
    }
}
