//! Spectral clustering pipeline and the token-constrained chunking
//! algorithm: cluster-count selection, normalized Laplacian, spectral
//! embedding, k-means, and oversize-cluster splitting.

mod eigen;
mod kmeans;

pub use eigen::symmetric_eigendecomposition;
pub use kmeans::{kmeans, ClusterAssignment};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::doc_model::{Chunk, Document};
use crate::error::{Error, Result};
use crate::graph::{build_graph, DocumentGraph, GraphConfig};
use crate::tokenize::{count_tokens, split_text, SeparatorHierarchy, SplitPiece};

/// Settings for the spectral pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Hard upper bound on tokens per emitted chunk.
    pub max_token_length: usize,
    pub seed: u64,
    pub eig_tolerance: f64,
    pub max_jacobi_sweeps: usize,
    pub kmeans_max_iters: usize,
    pub kmeans_restarts: usize,
    /// Separator hierarchy used when a single region must be split.
    pub separators: SeparatorHierarchy,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            max_token_length: 512,
            seed: 0,
            eig_tolerance: 1e-10,
            max_jacobi_sweeps: 100,
            kmeans_max_iters: 300,
            kmeans_restarts: 8,
            separators: SeparatorHierarchy::default(),
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_token_length < 1 {
            return Err(Error::Validation("max_token_length must be >= 1".into()));
        }
        if !(self.eig_tolerance > 0.0) {
            return Err(Error::Validation("eig_tolerance must be > 0".into()));
        }
        if self.max_jacobi_sweeps < 1 || self.kmeans_max_iters < 1 || self.kmeans_restarts < 1 {
            return Err(Error::Validation(
                "iteration limits must all be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Number of clusters for a document: the token total divided by the budget,
/// rounded up and clamped to `[1, n_nodes]`.
pub fn calculate_n_clusters(token_counts: &[usize], max_token_length: usize) -> usize {
    assert!(max_token_length >= 1, "max_token_length must be >= 1");
    assert!(!token_counts.is_empty(), "at least one node required");
    let total: usize = token_counts.iter().sum();
    let k = total.div_ceil(max_token_length);
    k.clamp(1, token_counts.len())
}

/// Normalized symmetric Laplacian `L = I − D^(−1/2) W D^(−1/2)`.
///
/// Isolated nodes (zero row sum) get `L[i][i] = 1` with zero off-diagonals.
pub fn normalized_laplacian(w: &Array2<f64>) -> Result<Array2<f64>> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::Validation(format!(
            "affinity matrix must be square, got {}x{}",
            n,
            w.ncols()
        )));
    }
    for i in 0..n {
        if w[(i, i)] != 0.0 {
            return Err(Error::Validation(format!(
                "affinity matrix must have a zero diagonal (entry {i} is {})",
                w[(i, i)]
            )));
        }
        for j in 0..i {
            if (w[(i, j)] - w[(j, i)]).abs() > 1e-12 {
                return Err(Error::Validation(format!(
                    "affinity matrix is asymmetric at ({i},{j})"
                )));
            }
        }
        for j in 0..n {
            let x = w[(i, j)];
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Validation(format!(
                    "affinity matrix has a negative or non-finite entry at ({i},{j}): {x}"
                )));
            }
        }
    }

    let degrees: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let inv_sqrt: Vec<f64> = degrees
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        l[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let value = -(inv_sqrt[i] * inv_sqrt[j]) * w[(i, j)];
            l[(i, j)] = value;
            l[(j, i)] = value;
        }
    }
    Ok(l)
}

/// Rows of the k lowest eigenvectors of `l`, each row L2-normalized
/// (all-zero rows stay zero). This is the point set handed to k-means.
pub fn spectral_embed(l: &Array2<f64>, k: usize, config: &SpectralConfig) -> Result<Array2<f64>> {
    let n = l.nrows();
    if k < 1 || k > n {
        return Err(Error::Validation(format!(
            "embedding dimension k = {k} must be in [1, {n}]"
        )));
    }
    let (_, vectors) =
        symmetric_eigendecomposition(l, config.eig_tolerance, config.max_jacobi_sweeps)?;
    let mut points = Array2::zeros((n, k));
    for i in 0..n {
        for j in 0..k {
            points[(i, j)] = vectors[(i, j)];
        }
    }
    for i in 0..n {
        let norm = points.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for j in 0..k {
                points[(i, j)] /= norm;
            }
        }
    }
    Ok(points)
}

/// Internal packing item: one region, or one piece of a split region.
struct PackItem {
    region_id: String,
    text: String,
    token_count: usize,
    /// Position of the owning region in reading order.
    order: usize,
}

/// Split an over-budget piece at whitespace-run boundaries so every part
/// stays within the budget; bytes are preserved exactly.
fn split_at_whitespace(text: &str, max_tokens: usize) -> Vec<SplitPiece> {
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut tokens_in_piece = 0;
    let mut in_token = false;
    for (idx, ch) in text.char_indices() {
        if ch.is_whitespace() {
            in_token = false;
        } else if !in_token {
            // a new token starts here
            if tokens_in_piece == max_tokens {
                pieces.push(&text[start..idx]);
                start = idx;
                tokens_in_piece = 0;
            }
            tokens_in_piece += 1;
            in_token = true;
        }
    }
    if start < text.len() {
        pieces.push(&text[start..]);
    }
    pieces
        .into_iter()
        .map(|p| SplitPiece {
            text: p.to_string(),
            token_count: count_tokens(p),
            oversize: false,
        })
        .collect()
}

/// Break a region's text into budget-sized pieces: separator hierarchy
/// first, whitespace runs as the last resort.
fn region_pieces(
    text: &str,
    separators: &SeparatorHierarchy,
    max_tokens: usize,
) -> Vec<SplitPiece> {
    let mut out = Vec::new();
    for piece in split_text(text, separators, max_tokens) {
        if piece.token_count > max_tokens {
            out.extend(split_at_whitespace(&piece.text, max_tokens));
        } else {
            out.push(piece);
        }
    }
    out
}

/// Pack each cluster's regions (in reading order) into chunks whose token
/// sums stay within the budget.
///
/// A single region that alone exceeds the budget is split into sub-regions
/// with derived ids `<id>#0`, `<id>#1`, ... inheriting its geometry; every
/// emitted chunk satisfies the bound. Chunks are ordered by the
/// reading-order position of their first region and numbered `c0`, `c1`, ...
pub fn split_clusters_by_token_length(
    assignment: &ClusterAssignment,
    node_ids: &[String],
    token_counts: &[usize],
    document: &Document,
    max_token_length: usize,
    separators: &SeparatorHierarchy,
) -> Result<Vec<Chunk>> {
    if assignment.labels.len() != node_ids.len() || token_counts.len() != node_ids.len() {
        return Err(Error::Validation(
            "assignment, node ids, and token counts must have equal length".into(),
        ));
    }
    if max_token_length < 1 {
        return Err(Error::Validation("max_token_length must be >= 1".into()));
    }

    let mut pending: Vec<(usize, Vec<PackItem>)> = Vec::new();
    for members in assignment.clusters() {
        if members.is_empty() {
            continue;
        }
        // members are node indices in ascending order = reading order
        let mut items: Vec<PackItem> = Vec::new();
        for &i in &members {
            let id = &node_ids[i];
            let region = document.region(id).ok_or_else(|| {
                Error::Validation(format!("node '{id}' is not a region of the document"))
            })?;
            if token_counts[i] <= max_token_length {
                items.push(PackItem {
                    region_id: id.clone(),
                    text: region.text.clone(),
                    token_count: token_counts[i],
                    order: i,
                });
            } else {
                for (part, piece) in region_pieces(&region.text, separators, max_token_length)
                    .into_iter()
                    .enumerate()
                {
                    items.push(PackItem {
                        region_id: format!("{id}#{part}"),
                        text: piece.text,
                        token_count: piece.token_count,
                        order: i,
                    });
                }
            }
        }

        // Greedy left-to-right packing.
        let mut current: Vec<PackItem> = Vec::new();
        let mut current_tokens = 0usize;
        for item in items {
            if !current.is_empty() && current_tokens + item.token_count > max_token_length {
                let done = std::mem::take(&mut current);
                pending.push((done[0].order, done));
                current_tokens = 0;
            }
            current_tokens += item.token_count;
            current.push(item);
        }
        if !current.is_empty() {
            pending.push((current[0].order, current));
        }
    }

    pending.sort_by_key(|(order, _)| *order);
    let mut out = Vec::with_capacity(pending.len());
    for (idx, (_, items)) in pending.into_iter().enumerate() {
        let text = items
            .iter()
            .map(|item| item.text.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        let token_count = count_tokens(&text);
        debug_assert_eq!(
            token_count,
            items.iter().map(|i| i.token_count).sum::<usize>(),
            "newline joins must not change token counts"
        );
        out.push(Chunk {
            chunk_id: format!("c{idx}"),
            region_ids: items.into_iter().map(|i| i.region_id).collect(),
            token_count,
            text,
        });
    }
    Ok(out)
}

/// End-to-end chunking: build the graph, pick the cluster count from the
/// token budget, spectrally cluster the combined weights, and pack each
/// cluster into token-bounded chunks.
pub fn s2_chunk(
    document: &Document,
    graph_config: &GraphConfig,
    spectral_config: &SpectralConfig,
) -> Result<Vec<Chunk>> {
    let graph = build_graph(document, graph_config)?;
    s2_chunk_graph(&graph, document, spectral_config)
}

/// [`s2_chunk`] over an already-built graph (lets callers reuse the graph
/// for diagnostics such as the matrix dump).
pub fn s2_chunk_graph(
    graph: &DocumentGraph,
    document: &Document,
    spectral_config: &SpectralConfig,
) -> Result<Vec<Chunk>> {
    spectral_config.validate()?;
    let n = graph.node_count();
    let k = calculate_n_clusters(&graph.token_counts, spectral_config.max_token_length);
    let assignment = if k == n {
        // k-means with k = n puts every point in its own cluster no matter
        // what the embedding looks like, so skip the eigen work.
        ClusterAssignment { labels: (0..n).collect(), k }
    } else {
        let laplacian = normalized_laplacian(&graph.w_combined)?;
        let points = spectral_embed(&laplacian, k, spectral_config)?;
        kmeans(&points, k, spectral_config)
    };
    split_clusters_by_token_length(
        &assignment,
        &graph.node_ids,
        &graph.token_counts,
        document,
        spectral_config.max_token_length,
        &spectral_config.separators,
    )
}
