//! Evaluation metrics: cohesion, layout consistency, purity, and normalized
//! mutual information, plus the report structures the CLI serializes.
//!
//! Conventions that matter when reading scores:
//! - single-region chunks score 1.0 on both intra-chunk means (the mean
//!   over an empty pair set is taken as "trivially coherent"), which
//!   rewards over-splitting — reports therefore also carry the mean chunk
//!   size;
//! - NMI is normalized by the arithmetic mean of the entropies, natural
//!   logs; two trivial partitions score 1.0, exactly one trivial partition
//!   scores 0.0.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::doc_model::{Chunk, Document, GroundTruth};
use crate::embed::EmbeddingVector;
use crate::error::{Error, Result};
use crate::graph::{semantic_weight, spatial_weight};
use crate::layout::{LayoutConfig, PageFrame};

/// Strip the `#part` suffix a split region carries.
pub fn base_region_id(id: &str) -> &str {
    match id.rsplit_once('#') {
        Some((base, part)) if part.chars().all(|c| c.is_ascii_digit()) && !base.is_empty() => base,
        _ => id,
    }
}

/// Distinct base region ids of a chunk, in order of first appearance.
fn chunk_base_regions(chunk: &Chunk) -> Vec<&str> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for id in &chunk.region_ids {
        let base = base_region_id(id);
        if seen.insert(base) {
            out.push(base);
        }
    }
    out
}

/// Mean pairwise semantic similarity within each chunk, averaged over
/// chunks. Single-region chunks score 1.0.
pub fn cohesion_score(
    chunks: &[Chunk],
    embeddings: &HashMap<String, EmbeddingVector>,
) -> Result<f64> {
    if chunks.is_empty() {
        return Err(Error::Validation("cohesion of an empty chunk list".into()));
    }
    let mut chunk_scores = Vec::with_capacity(chunks.len());
    for chunk in chunks {
        let regions = chunk_base_regions(chunk);
        let vectors: Vec<&EmbeddingVector> = regions
            .iter()
            .map(|id| {
                embeddings.get(*id).ok_or_else(|| {
                    Error::Validation(format!("no embedding for region '{id}'"))
                })
            })
            .collect::<Result<_>>()?;
        if vectors.len() < 2 {
            chunk_scores.push(1.0);
            continue;
        }
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..vectors.len() {
            for j in (i + 1)..vectors.len() {
                total += semantic_weight(vectors[i], vectors[j])?;
                pairs += 1;
            }
        }
        chunk_scores.push(total / pairs as f64);
    }
    Ok(chunk_scores.iter().sum::<f64>() / chunk_scores.len() as f64)
}

/// Mean pairwise spatial proximity `1/(1+d)` within each chunk, averaged
/// over chunks. Single-region chunks score 1.0.
pub fn layout_consistency_score(
    chunks: &[Chunk],
    document: &Document,
    layout_config: &LayoutConfig,
) -> Result<f64> {
    if chunks.is_empty() {
        return Err(Error::Validation(
            "layout consistency of an empty chunk list".into(),
        ));
    }
    let frame = PageFrame::new(document, layout_config)?;
    let mut chunk_scores = Vec::with_capacity(chunks.len());
    for chunk in chunks {
        let ids = chunk_base_regions(chunk);
        let regions: Vec<_> = ids
            .iter()
            .map(|id| {
                document.region(id).ok_or_else(|| {
                    Error::Validation(format!("chunk references unknown region '{id}'"))
                })
            })
            .collect::<Result<_>>()?;
        if regions.len() < 2 {
            chunk_scores.push(1.0);
            continue;
        }
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..regions.len() {
            for j in (i + 1)..regions.len() {
                total += spatial_weight(frame.distance(regions[i], regions[j]))?;
                pairs += 1;
            }
        }
        chunk_scores.push(total / pairs as f64);
    }
    Ok(chunk_scores.iter().sum::<f64>() / chunk_scores.len() as f64)
}

fn check_same_length(predicted: &[usize], truth: &[usize]) -> Result<usize> {
    if predicted.len() != truth.len() {
        return Err(Error::Validation(format!(
            "label vectors differ in length: {} vs {}",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Validation("empty label vectors".into()));
    }
    Ok(predicted.len())
}

/// Purity of `predicted` against `truth`: each predicted cluster is scored
/// by its dominant truth label.
pub fn purity_labels(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    let n = check_same_length(predicted, truth)?;
    let mut per_cluster: HashMap<usize, HashMap<usize, usize>> = HashMap::new();
    for (&p, &t) in predicted.iter().zip(truth) {
        *per_cluster.entry(p).or_default().entry(t).or_insert(0) += 1;
    }
    let dominant: usize = per_cluster
        .values()
        .map(|counts| counts.values().copied().max().unwrap_or(0))
        .sum();
    Ok(dominant as f64 / n as f64)
}

/// Normalized mutual information `2·I(X;Y) / (H(X) + H(Y))` with
/// natural-log entropies over the contingency table.
pub fn nmi_labels(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    let n = check_same_length(predicted, truth)?;
    let n_f = n as f64;
    let mut pred_counts: HashMap<usize, usize> = HashMap::new();
    let mut truth_counts: HashMap<usize, usize> = HashMap::new();
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&p, &t) in predicted.iter().zip(truth) {
        *pred_counts.entry(p).or_insert(0) += 1;
        *truth_counts.entry(t).or_insert(0) += 1;
        *joint.entry((p, t)).or_insert(0) += 1;
    }
    let entropy = |counts: &HashMap<usize, usize>| -> f64 {
        counts
            .values()
            .map(|&c| {
                let p = c as f64 / n_f;
                -p * p.ln()
            })
            .sum()
    };
    let h_pred = entropy(&pred_counts);
    let h_truth = entropy(&truth_counts);
    if h_pred == 0.0 && h_truth == 0.0 {
        return Ok(1.0);
    }
    if h_pred == 0.0 || h_truth == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (&(p, t), &c) in &joint {
        let pxy = c as f64 / n_f;
        let px = pred_counts[&p] as f64 / n_f;
        let py = truth_counts[&t] as f64 / n_f;
        mi += pxy * (pxy / (px * py)).ln();
    }
    Ok((2.0 * mi / (h_pred + h_truth)).clamp(0.0, 1.0))
}

/// Region-level cluster assignment induced by a chunk list.
///
/// Whole regions get their chunk's index. A region split across several
/// chunks goes to the chunk holding most of its parts (earliest chunk on
/// ties). The result maps every base region id to a cluster id.
pub fn region_assignment_from_chunks(chunks: &[Chunk]) -> BTreeMap<String, usize> {
    let mut part_counts: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
    for (idx, chunk) in chunks.iter().enumerate() {
        for id in &chunk.region_ids {
            let base = base_region_id(id).to_string();
            *part_counts.entry(base).or_default().entry(idx).or_insert(0) += 1;
        }
    }
    part_counts
        .into_iter()
        .map(|(region, by_chunk)| {
            let (&chunk_idx, _) = by_chunk
                .iter()
                .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
                .expect("region appears in at least one chunk");
            (region, chunk_idx)
        })
        .collect()
}

/// Align predicted chunks and ground truth into parallel label vectors,
/// erroring when the region sets disagree.
pub fn aligned_labels(
    chunks: &[Chunk],
    document: &Document,
    truth: &GroundTruth,
) -> Result<(Vec<usize>, Vec<usize>)> {
    truth.validate_against(document)?;
    let assignment = region_assignment_from_chunks(chunks);
    let doc_ids: HashSet<&str> = document.regions.iter().map(|r| r.id.as_str()).collect();
    for id in assignment.keys() {
        if !doc_ids.contains(id.as_str()) {
            return Err(Error::Validation(format!(
                "chunks reference region '{id}' which is not in document '{}'",
                document.doc_id
            )));
        }
    }
    let mut truth_label_ids: HashMap<&str, usize> = HashMap::new();
    let mut predicted = Vec::with_capacity(document.regions.len());
    let mut truth_vec = Vec::with_capacity(document.regions.len());
    for region in &document.regions {
        let cluster = assignment.get(&region.id).copied().ok_or_else(|| {
            Error::Validation(format!(
                "region '{}' is missing from the predicted chunks",
                region.id
            ))
        })?;
        let label = truth.assignment.get(&region.id).ok_or_else(|| {
            Error::Validation(format!(
                "region '{}' is missing from the ground truth",
                region.id
            ))
        })?;
        let next = truth_label_ids.len();
        let label_id = *truth_label_ids.entry(label.as_str()).or_insert(next);
        predicted.push(cluster);
        truth_vec.push(label_id);
    }
    Ok((predicted, truth_vec))
}

/// Purity of a chunking against ground truth.
pub fn purity(chunks: &[Chunk], document: &Document, truth: &GroundTruth) -> Result<f64> {
    let (predicted, truth_vec) = aligned_labels(chunks, document, truth)?;
    purity_labels(&predicted, &truth_vec)
}

/// NMI of a chunking against ground truth.
pub fn nmi(chunks: &[Chunk], document: &Document, truth: &GroundTruth) -> Result<f64> {
    let (predicted, truth_vec) = aligned_labels(chunks, document, truth)?;
    nmi_labels(&predicted, &truth_vec)
}

/// Scores for one method on one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentScores {
    pub doc_id: String,
    pub cohesion: f64,
    pub layout_consistency: f64,
    pub purity: Option<f64>,
    pub nmi: Option<f64>,
    pub chunk_count: usize,
    /// Mean number of regions per chunk; context for the singleton-chunk
    /// convention above.
    pub mean_chunk_regions: f64,
}

/// Aggregated scores for one method across a document set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub cohesion: f64,
    pub layout_consistency: f64,
    pub purity: Option<f64>,
    pub nmi: Option<f64>,
    pub mean_chunk_regions: f64,
    pub per_document: Vec<DocumentScores>,
}

impl EvaluationReport {
    /// Average per-document scores into a method-level report.
    pub fn from_documents(method: &str, per_document: Vec<DocumentScores>) -> Result<Self> {
        if per_document.is_empty() {
            return Err(Error::Validation(format!(
                "no documents evaluated for method '{method}'"
            )));
        }
        let n = per_document.len() as f64;
        let mean = |f: &dyn Fn(&DocumentScores) -> f64| {
            per_document.iter().map(|d| f(d)).sum::<f64>() / n
        };
        let opt_mean = |f: &dyn Fn(&DocumentScores) -> Option<f64>| {
            let values: Vec<f64> = per_document.iter().filter_map(|d| f(d)).collect();
            if values.len() == per_document.len() {
                Some(values.iter().sum::<f64>() / n)
            } else {
                None
            }
        };
        Ok(EvaluationReport {
            method: method.to_string(),
            cohesion: mean(&|d| d.cohesion),
            layout_consistency: mean(&|d| d.layout_consistency),
            purity: opt_mean(&|d| d.purity),
            nmi: opt_mean(&|d| d.nmi),
            mean_chunk_regions: mean(&|d| d.mean_chunk_regions),
            per_document,
        })
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.4}"),
        None => "n/a".to_string(),
    }
}

/// Fixed-width comparison table, one row per method.
pub fn format_table(reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<18} {:>10} {:>10} {:>10} {:>10} {:>12}\n",
        "method", "cohesion", "layout", "purity", "nmi", "mean-regions"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<18} {:>10.4} {:>10.4} {:>10} {:>10} {:>12.2}\n",
            r.method,
            r.cohesion,
            r.layout_consistency,
            fmt_opt(r.purity),
            fmt_opt(r.nmi),
            r.mean_chunk_regions,
        ));
    }
    out
}

/// Plot-ready CSV: one `method,metric,value` row per available metric.
pub fn to_csv(reports: &[EvaluationReport]) -> String {
    let mut out = String::from("method,metric,value\n");
    for r in reports {
        out.push_str(&format!("{},cohesion,{:.6}\n", r.method, r.cohesion));
        out.push_str(&format!(
            "{},layout_consistency,{:.6}\n",
            r.method, r.layout_consistency
        ));
        if let Some(p) = r.purity {
            out.push_str(&format!("{},purity,{p:.6}\n", r.method));
        }
        if let Some(m) = r.nmi {
            out.push_str(&format!("{},nmi,{m:.6}\n", r.method));
        }
    }
    out
}
