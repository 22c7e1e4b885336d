//! Comparison chunkers: fixed-size (with optional overlap), recursive, and
//! semantic-threshold, plus a hybrid baseline that clusters combined
//! weights by single linkage instead of spectrally.
//!
//! The token- and text-level operations are pure; the `chunk_document_*`
//! wrappers run each baseline over a document's reading-order text and map
//! the resulting text chunks back to regions (majority token ownership) so
//! every method is comparable on the same metrics.

use std::collections::HashMap;
use std::ops::Range;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::doc_model::{Chunk, Document};
use crate::embed::{cosine_similarity, Embedder, ProviderConfig};
use crate::error::{Error, Result};
use crate::graph::{build_graph, EdgePolicy, GraphConfig};
use crate::layout::{reading_order_indices, LayoutConfig};
use crate::spectral::{
    calculate_n_clusters, split_clusters_by_token_length, ClusterAssignment, SpectralConfig,
};
use crate::tokenize::{count_tokens, split_text, SeparatorHierarchy, SplitPiece};

/// Fixed-size chunking parameters: window of `size` tokens advancing by
/// `size − overlap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedSizeParams {
    pub size: usize,
    pub overlap: usize,
}

impl Default for FixedSizeParams {
    fn default() -> Self {
        FixedSizeParams { size: 512, overlap: 0 }
    }
}

impl FixedSizeParams {
    pub fn validate(&self) -> Result<()> {
        if self.size < 1 {
            return Err(Error::Validation("fixed-size chunk size must be >= 1".into()));
        }
        if self.overlap >= self.size {
            return Err(Error::Validation(format!(
                "overlap ({}) must be smaller than size ({})",
                self.overlap, self.size
            )));
        }
        Ok(())
    }
}

/// What the semantic baseline embeds: whole regions or sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segmenter {
    #[default]
    Region,
    Sentence,
}

/// Semantic-threshold chunking parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticParams {
    /// Break between consecutive segments whose similarity falls below this.
    pub threshold: f64,
    pub segmenter: Segmenter,
}

impl Default for SemanticParams {
    fn default() -> Self {
        SemanticParams { threshold: 0.7, segmenter: Segmenter::Region }
    }
}

impl SemanticParams {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() {
            return Err(Error::Validation("semantic threshold must be finite".into()));
        }
        Ok(())
    }
}

/// Slice `tokens` into fixed windows.
///
/// Without overlap the windows are `[i·s, (i+1)·s)` with an empty trailing
/// window dropped. With overlap `o` they are `[i·(s−o), i·(s−o)+s)`; when
/// the stride leaves a tail uncovered, one final shorter window is appended
/// so the output always covers the input.
pub fn fixed_size_chunk<T: Clone>(tokens: &[T], params: &FixedSizeParams) -> Vec<Vec<T>> {
    params.validate().expect("valid fixed-size parameters");
    let n = tokens.len();
    let s = params.size;
    let o = params.overlap;
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if o == 0 {
        let mut start = 0;
        while start < n {
            out.push(tokens[start..(start + s).min(n)].to_vec());
            start += s;
        }
    } else if n <= s {
        out.push(tokens.to_vec());
    } else {
        let step = s - o;
        let i_max = (n - s) / step;
        for i in 0..=i_max {
            let start = i * step;
            out.push(tokens[start..start + s].to_vec());
        }
        let covered = i_max * step + s;
        if covered < n {
            let start = (i_max + 1) * step;
            out.push(tokens[start..n].to_vec());
        }
    }
    out
}

/// Recursive chunking: split `text` down the separator hierarchy until
/// every piece fits the budget. Delegates to [`split_text`]; pieces
/// concatenate back to the input exactly.
pub fn recursive_chunk(
    text: &str,
    separators: &SeparatorHierarchy,
    max_tokens: usize,
) -> Vec<SplitPiece> {
    split_text(text, separators, max_tokens)
}

/// Group consecutive segments: a new chunk starts whenever the cosine
/// similarity between neighboring segment embeddings falls below the
/// threshold. Returns contiguous index ranges covering all segments.
pub fn semantic_chunk(
    segments: &[String],
    provider: &ProviderConfig,
    params: &SemanticParams,
) -> Result<Vec<Range<usize>>> {
    params.validate()?;
    if segments.is_empty() {
        return Err(Error::Validation("semantic_chunk needs at least one segment".into()));
    }
    let embeddings = Embedder::new(provider.clone())?.embed_texts(segments)?;
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..segments.len() {
        let sim = cosine_similarity(&embeddings[i - 1], &embeddings[i])?;
        if sim < params.threshold {
            ranges.push(start..i);
            start = i;
        }
    }
    ranges.push(start..segments.len());
    Ok(ranges)
}

/// Reading-order token stream with per-token region ownership.
struct TokenStream {
    /// Node position (index into `node_ids`) owning each token.
    owners: Vec<usize>,
    /// Region ids in reading order.
    node_ids: Vec<String>,
    /// Region texts in reading order.
    texts: Vec<String>,
}

impl TokenStream {
    fn build(document: &Document, layout: &LayoutConfig) -> Result<Self> {
        document.validate()?;
        let order = reading_order_indices(document, layout)?;
        let mut owners = Vec::new();
        let mut node_ids = Vec::with_capacity(order.len());
        let mut texts = Vec::with_capacity(order.len());
        for (pos, &idx) in order.iter().enumerate() {
            let region = &document.regions[idx];
            node_ids.push(region.id.clone());
            texts.push(region.text.clone());
            for _ in region.text.split_whitespace() {
                owners.push(pos);
            }
        }
        Ok(TokenStream { owners, node_ids, texts })
    }

    fn tokens(&self) -> Vec<String> {
        self.texts
            .iter()
            .flat_map(|t| t.split_whitespace().map(|w| w.to_string()))
            .collect()
    }
}

/// Assign each region to the text chunk owning the majority of its tokens
/// (earliest chunk on ties); regions without tokens follow their
/// reading-order predecessor. Returns node positions grouped per emitted
/// chunk, ordered by first region.
fn majority_groups(stream: &TokenStream, chunk_token_indices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n_nodes = stream.node_ids.len();
    let mut counts: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n_nodes];
    for (chunk_idx, token_indices) in chunk_token_indices.iter().enumerate() {
        for &t in token_indices {
            *counts[stream.owners[t]].entry(chunk_idx).or_insert(0) += 1;
        }
    }
    let mut assigned: Vec<Option<usize>> = vec![None; n_nodes];
    for node in 0..n_nodes {
        assigned[node] = counts[node]
            .iter()
            .max_by(|(ca, na), (cb, nb)| na.cmp(nb).then(cb.cmp(ca)))
            .map(|(&chunk, _)| chunk);
    }
    // Token-free regions (figures) stay with their predecessor.
    let mut last = None;
    for node in 0..n_nodes {
        match assigned[node] {
            Some(c) => last = Some(c),
            None => assigned[node] = last,
        }
    }
    let mut first = None;
    for node in (0..n_nodes).rev() {
        match assigned[node] {
            Some(c) => first = Some(c),
            None => assigned[node] = first,
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (node, chunk) in assigned.into_iter().enumerate() {
        // a document with only token-free regions maps everything to one chunk
        groups.entry(chunk.unwrap_or(0)).or_default().push(node);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|members| members[0]);
    out
}

/// Materialize node-position groups as chunks.
fn groups_to_chunks(groups: Vec<Vec<usize>>, stream: &TokenStream) -> Vec<Chunk> {
    groups
        .into_iter()
        .enumerate()
        .map(|(idx, members)| {
            let text = members
                .iter()
                .map(|&m| stream.texts[m].as_str())
                .collect::<Vec<_>>()
                .join("\n");
            Chunk {
                chunk_id: format!("c{idx}"),
                region_ids: members.iter().map(|&m| stream.node_ids[m].clone()).collect(),
                token_count: count_tokens(&text),
                text,
            }
        })
        .collect()
}

/// Fixed-size baseline over the document's reading-order token stream.
pub fn chunk_document_fixed(
    document: &Document,
    params: &FixedSizeParams,
    layout: &LayoutConfig,
) -> Result<Vec<Chunk>> {
    params.validate()?;
    let stream = TokenStream::build(document, layout)?;
    let indices: Vec<usize> = (0..stream.owners.len()).collect();
    let token_chunks = fixed_size_chunk(&indices, params);
    Ok(groups_to_chunks(majority_groups(&stream, &token_chunks), &stream))
}

/// Recursive baseline over the reading-order text (regions joined by
/// paragraph breaks).
pub fn chunk_document_recursive(
    document: &Document,
    separators: &SeparatorHierarchy,
    max_tokens: usize,
    layout: &LayoutConfig,
) -> Result<Vec<Chunk>> {
    if max_tokens < 1 {
        return Err(Error::Validation("max_tokens must be >= 1".into()));
    }
    let stream = TokenStream::build(document, layout)?;
    let text = stream.texts.join("\n\n");
    let pieces = recursive_chunk(&text, separators, max_tokens);
    // Pieces partition the text, so cumulative token counts give each
    // piece's global token span. Default separators end in whitespace, so
    // spans line up exactly with the region-owned token stream.
    let mut token_chunks = Vec::with_capacity(pieces.len());
    let mut cursor = 0;
    for piece in &pieces {
        let span: Vec<usize> =
            (cursor..(cursor + piece.token_count).min(stream.owners.len())).collect();
        cursor += piece.token_count;
        if !span.is_empty() {
            token_chunks.push(span);
        }
    }
    Ok(groups_to_chunks(majority_groups(&stream, &token_chunks), &stream))
}

/// Semantic-threshold baseline. With the `Region` segmenter the segments
/// are whole regions in reading order; with `Sentence` each region is split
/// into sentences first.
pub fn chunk_document_semantic(
    document: &Document,
    provider: &ProviderConfig,
    params: &SemanticParams,
    layout: &LayoutConfig,
) -> Result<Vec<Chunk>> {
    let stream = TokenStream::build(document, layout)?;
    match params.segmenter {
        Segmenter::Region => {
            let ranges = semantic_chunk(&stream.texts, provider, params)?;
            let groups: Vec<Vec<usize>> = ranges.into_iter().map(|r| r.collect()).collect();
            Ok(groups_to_chunks(groups, &stream))
        }
        Segmenter::Sentence => {
            // sentences never cross region boundaries, so token spans line
            // up exactly with the region-owned stream
            let mut segments = Vec::new();
            for text in &stream.texts {
                segments.extend(split_sentences(text));
            }
            let ranges = semantic_chunk(&segments, provider, params)?;
            // map segment ranges to token chunks via segment token counts
            let seg_tokens: Vec<usize> = segments.iter().map(|s| count_tokens(s)).collect();
            let mut seg_start = vec![0usize; segments.len()];
            let mut acc = 0;
            for (i, t) in seg_tokens.iter().enumerate() {
                seg_start[i] = acc;
                acc += t;
            }
            let mut token_chunks = Vec::new();
            for range in ranges {
                let mut span = Vec::new();
                for seg in range {
                    span.extend(seg_start[seg]..seg_start[seg] + seg_tokens[seg]);
                }
                if !span.is_empty() {
                    token_chunks.push(span);
                }
            }
            Ok(groups_to_chunks(majority_groups(&stream, &token_chunks), &stream))
        }
    }
}

/// Split text into sentence-ish segments (boundary after `". "`); empty
/// text yields one empty segment so every region stays represented.
fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    while let Some(pos) = text[start..].find(". ") {
        let end = start + pos + 2;
        out.push(text[start..end].to_string());
        start = end;
    }
    if start < text.len() || out.is_empty() {
        out.push(text[start..].to_string());
    }
    out
}

/// Single-linkage agglomeration: merge the strongest edges until exactly
/// `k` components remain. Components are labelled in order of their first
/// member.
pub fn single_linkage_assignment(w: &Array2<f64>, k: usize) -> ClusterAssignment {
    let n = w.nrows();
    assert!(k >= 1 && k <= n, "k must be in [1, n]");
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    edges.sort_by(|&(ai, aj), &(bi, bj)| {
        w[(bi, bj)]
            .total_cmp(&w[(ai, aj)])
            .then(ai.cmp(&bi))
            .then(aj.cmp(&bj))
    });
    let mut components = n;
    for (i, j) in edges {
        if components == k {
            break;
        }
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
            parent[hi] = lo;
            components -= 1;
        }
    }
    let mut label_of_root: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let root = find(&mut parent, i);
        let next = label_of_root.len();
        let label = *label_of_root.entry(root).or_insert(next);
        labels.push(label);
    }
    ClusterAssignment { labels, k }
}

/// Hybrid baseline: the combined-weight graph (complete edges) clustered by
/// single-linkage thresholding instead of spectral clustering, then packed
/// under the token budget.
pub fn chunk_document_hybrid(
    document: &Document,
    graph_config: &GraphConfig,
    spectral_config: &SpectralConfig,
) -> Result<Vec<Chunk>> {
    spectral_config.validate()?;
    let mut config = graph_config.clone();
    config.edge_policy = EdgePolicy::Complete;
    let graph = build_graph(document, &config)?;
    let k = calculate_n_clusters(&graph.token_counts, spectral_config.max_token_length);
    let assignment = single_linkage_assignment(&graph.w_combined, k);
    split_clusters_by_token_length(
        &assignment,
        &graph.node_ids,
        &graph.token_counts,
        document,
        spectral_config.max_token_length,
        &spectral_config.separators,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc_model::{BBox, Page, Region};
    use proptest::prelude::*;

    #[test]
    fn fixed_no_overlap_sizes() {
        let tokens: Vec<usize> = (0..10).collect();
        let chunks = fixed_size_chunk(&tokens, &FixedSizeParams { size: 4, overlap: 0 });
        let sizes: Vec<usize> = chunks.iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        let flat: Vec<usize> = chunks.into_iter().flatten().collect();
        assert_eq!(flat, tokens);
    }

    #[test]
    fn fixed_exact_division_has_no_empty_chunk() {
        let tokens: Vec<usize> = (0..8).collect();
        let chunks = fixed_size_chunk(&tokens, &FixedSizeParams { size: 4, overlap: 0 });
        assert_eq!(chunks.len(), 2);
        assert!(chunks.iter().all(|c| !c.is_empty()));
    }

    #[test]
    fn fixed_with_overlap_offsets() {
        let tokens: Vec<usize> = (0..10).collect();
        let chunks = fixed_size_chunk(&tokens, &FixedSizeParams { size: 4, overlap: 2 });
        let starts: Vec<usize> = chunks.iter().map(|c| c[0]).collect();
        assert_eq!(starts, vec![0, 2, 4, 6]);
        assert!(chunks.iter().all(|c| c.len() == 4));
    }

    #[test]
    fn fixed_overlap_tail_coverage() {
        let tokens: Vec<usize> = (0..11).collect();
        let chunks = fixed_size_chunk(&tokens, &FixedSizeParams { size: 4, overlap: 2 });
        assert_eq!(*chunks.last().unwrap().last().unwrap(), 10);
    }

    #[test]
    fn fixed_undersized_input() {
        let tokens = vec!["a", "b", "c"];
        let chunks = fixed_size_chunk(&tokens, &FixedSizeParams { size: 10, overlap: 0 });
        assert_eq!(chunks, vec![vec!["a", "b", "c"]]);
        let with_overlap = fixed_size_chunk(&tokens, &FixedSizeParams { size: 10, overlap: 3 });
        assert_eq!(with_overlap.len(), 1);
    }

    #[test]
    fn fixed_empty_input() {
        let tokens: Vec<u8> = vec![];
        assert!(fixed_size_chunk(&tokens, &FixedSizeParams::default()).is_empty());
    }

    proptest! {
        #[test]
        fn fixed_no_overlap_reconstructs(n in 0usize..200, s in 1usize..40) {
            let tokens: Vec<usize> = (0..n).collect();
            let chunks = fixed_size_chunk(&tokens, &FixedSizeParams { size: s, overlap: 0 });
            let flat: Vec<usize> = chunks.iter().flatten().copied().collect();
            prop_assert_eq!(flat, tokens);
            if !chunks.is_empty() {
                for c in &chunks[..chunks.len() - 1] {
                    prop_assert_eq!(c.len(), s);
                }
            }
        }

        #[test]
        fn fixed_overlap_reconstructs(n in 0usize..200, s in 2usize..40, o_frac in 0.0f64..1.0) {
            let o = ((s as f64 - 1.0) * o_frac) as usize;
            let tokens: Vec<usize> = (0..n).collect();
            let chunks = fixed_size_chunk(&tokens, &FixedSizeParams { size: s, overlap: o });
            // strip the first o tokens of every chunk after the first
            let mut flat: Vec<usize> = Vec::new();
            for (i, c) in chunks.iter().enumerate() {
                let skip = if i == 0 { 0 } else { o };
                flat.extend_from_slice(&c[skip.min(c.len())..]);
            }
            prop_assert_eq!(flat, tokens);
        }
    }

    fn region(id: &str, y: f64, text: &str) -> Region {
        Region {
            id: id.into(),
            page_index: 0,
            bbox: BBox::from([10.0, y, 90.0, y + 8.0]),
            text: text.into(),
            label: None,
        }
    }

    fn doc(regions: Vec<Region>) -> Document {
        Document {
            doc_id: "d".into(),
            pages: vec![Page { index: 0, width: 100.0, height: 200.0 }],
            regions,
        }
    }

    fn words(prefix: &str, n: usize) -> String {
        (0..n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn recursive_text_already_small_stays_whole() {
        let seps = SeparatorHierarchy::default();
        let pieces = recursive_chunk("tiny text", &seps, 100);
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].text, "tiny text");
    }

    #[test]
    fn recursive_two_paragraphs_split() {
        let seps = SeparatorHierarchy::default();
        let text = format!("{}\n\n{}", words("a", 6), words("b", 6));
        let pieces = recursive_chunk(&text, &seps, 8);
        assert_eq!(pieces.len(), 2);
        let joined: String = pieces.iter().map(|p| p.text.as_str()).collect();
        assert_eq!(joined, text);
    }

    #[test]
    fn semantic_breakpoint_rule() {
        // consecutive similarities [high, low, high] with τ between → two chunks
        let segments: Vec<String> = vec![
            "alpha beta gamma".into(),
            "alpha beta delta".into(),
            "omega psi chi".into(),
            "omega psi rho".into(),
        ];
        let params = SemanticParams { threshold: 0.5, segmenter: Segmenter::Region };
        let ranges = semantic_chunk(&segments, &ProviderConfig::default(), &params).unwrap();
        assert_eq!(ranges, vec![0..2, 2..4]);
    }

    #[test]
    fn semantic_threshold_extremes() {
        let segments: Vec<String> =
            vec!["aa bb".into(), "cc dd".into(), "ee ff".into()];
        let low = SemanticParams { threshold: -1.0, segmenter: Segmenter::Region };
        let ranges = semantic_chunk(&segments, &ProviderConfig::default(), &low).unwrap();
        assert_eq!(ranges, vec![0..3]);

        let high = SemanticParams { threshold: 1.5, segmenter: Segmenter::Region };
        let ranges = semantic_chunk(&segments, &ProviderConfig::default(), &high).unwrap();
        assert_eq!(ranges.len(), 3);
    }

    #[test]
    fn semantic_single_segment() {
        let segments = vec!["only one".to_string()];
        let ranges = semantic_chunk(
            &segments,
            &ProviderConfig::default(),
            &SemanticParams::default(),
        )
        .unwrap();
        assert_eq!(ranges, vec![0..1]);
    }

    fn assert_partition(chunks: &[Chunk], document: &Document) {
        let mut covered: Vec<&str> = chunks
            .iter()
            .flat_map(|c| c.region_ids.iter().map(|s| s.as_str()))
            .collect();
        covered.sort();
        let before = covered.len();
        covered.dedup();
        assert_eq!(before, covered.len(), "duplicated region");
        let mut expect: Vec<&str> = document.regions.iter().map(|r| r.id.as_str()).collect();
        expect.sort();
        assert_eq!(covered, expect);
    }

    #[test]
    fn fixed_document_mapping_partitions_regions() {
        let d = doc(vec![
            region("r0", 10.0, &words("a", 7)),
            region("r1", 30.0, &words("b", 5)),
            region("fig", 50.0, ""),
            region("r2", 70.0, &words("c", 9)),
        ]);
        let chunks = chunk_document_fixed(
            &d,
            &FixedSizeParams { size: 6, overlap: 0 },
            &LayoutConfig::default(),
        )
        .unwrap();
        assert_partition(&chunks, &d);
        assert!(chunks.len() >= 2);
    }

    #[test]
    fn recursive_document_mapping_partitions_regions() {
        let d = doc(vec![
            region("r0", 10.0, &words("a", 12)),
            region("r1", 30.0, &words("b", 12)),
            region("r2", 50.0, &words("c", 12)),
        ]);
        let chunks = chunk_document_recursive(
            &d,
            &SeparatorHierarchy::default(),
            20,
            &LayoutConfig::default(),
        )
        .unwrap();
        assert_partition(&chunks, &d);
        // every region fits the budget alone, so recursion stops at regions
        assert_eq!(chunks.len(), 3);
    }

    #[test]
    fn semantic_document_groups_similar_neighbors() {
        let d = doc(vec![
            region("t0", 10.0, "solar panels generate electric power"),
            region("t1", 25.0, "solar panels generate clean power"),
            region("t2", 40.0, "medieval castles defended stone walls"),
            region("t3", 55.0, "medieval castles defended high walls"),
        ]);
        let chunks = chunk_document_semantic(
            &d,
            &ProviderConfig::default(),
            &SemanticParams { threshold: 0.4, segmenter: Segmenter::Region },
            &LayoutConfig::default(),
        )
        .unwrap();
        assert_partition(&chunks, &d);
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[0].region_ids, vec!["t0", "t1"]);
        assert_eq!(chunks[1].region_ids, vec!["t2", "t3"]);
    }

    #[test]
    fn single_linkage_merges_strongest_edges_first() {
        let mut w = Array2::zeros((4, 4));
        let mut set = |i: usize, j: usize, v: f64| {
            w[(i, j)] = v;
            w[(j, i)] = v;
        };
        set(0, 1, 0.9);
        set(2, 3, 0.8);
        set(1, 2, 0.2);
        set(0, 3, 0.1);
        set(0, 2, 0.05);
        set(1, 3, 0.02);
        let assignment = single_linkage_assignment(&w, 2);
        assert_eq!(assignment.labels, vec![0, 0, 1, 1]);
    }

    #[test]
    fn hybrid_document_respects_budget() {
        let d = doc(vec![
            region("a", 10.0, &words("alpha", 30)),
            region("b", 25.0, &words("alpha", 30)),
            region("c", 120.0, &words("beta", 30)),
            region("d", 135.0, &words("beta", 30)),
        ]);
        let config = SpectralConfig { max_token_length: 70, ..SpectralConfig::default() };
        let chunks = chunk_document_hybrid(&d, &GraphConfig::default(), &config).unwrap();
        assert_partition(&chunks, &d);
        assert!(chunks.iter().all(|c| c.token_count <= 70));
    }
}
