//! The weighted document graph: nodes are regions in reading order, edges
//! carry spatial, semantic, and combined weights.
//!
//! Spatial weight is `1/(1 + d)` over centroid distance, semantic weight is
//! cosine similarity clamped to `[0, 1]`, and the combined weight is their
//! arithmetic mean. Under the knn edge policy each node keeps only its k
//! strongest combined edges and the matrices are re-symmetrized with an
//! elementwise max.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::doc_model::Document;
use crate::embed::{cosine_similarity, Embedder, EmbeddingVector, ProviderConfig};
use crate::error::{Error, Result};
use crate::layout::{reading_order_indices, LayoutConfig, PageFrame};
use crate::tokenize::count_tokens;

/// Node count at or below which the `Auto` edge policy keeps the complete
/// graph.
pub const AUTO_COMPLETE_LIMIT: usize = 500;

/// Which edges survive graph construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePolicy {
    /// Complete graph up to [`AUTO_COMPLETE_LIMIT`] nodes, knn above.
    #[default]
    Auto,
    Complete,
    Knn,
}

/// Graph construction settings.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GraphConfig {
    pub edge_policy: EdgePolicy,
    pub knn_k: Option<usize>,
    pub layout: LayoutConfig,
    pub provider: ProviderConfig,
}

impl GraphConfig {
    pub fn knn_k(&self) -> usize {
        self.knn_k.unwrap_or(10)
    }

    pub fn validate(&self) -> Result<()> {
        if self.knn_k() < 1 {
            return Err(Error::Validation("knn_k must be >= 1".into()));
        }
        self.layout.validate()?;
        self.provider.validate()
    }
}

/// Dense symmetric document graph over the regions of one document.
#[derive(Debug, Clone)]
pub struct DocumentGraph {
    /// Region ids in reading order; row/column `i` of every matrix refers
    /// to `node_ids[i]`.
    pub node_ids: Vec<String>,
    pub w_spatial: Array2<f64>,
    pub w_semantic: Array2<f64>,
    pub w_combined: Array2<f64>,
    pub token_counts: Vec<usize>,
}

impl DocumentGraph {
    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    /// Check the structural invariants; used by tests and debug tooling.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.node_count();
        for m in [&self.w_spatial, &self.w_semantic, &self.w_combined] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Validation("matrix shape mismatch".into()));
            }
            for i in 0..n {
                if m[(i, i)] != 0.0 {
                    return Err(Error::Validation(format!("nonzero diagonal at {i}")));
                }
                for j in 0..i {
                    if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 {
                        return Err(Error::Validation(format!("asymmetry at ({i},{j})")));
                    }
                    if !(0.0..=1.0).contains(&m[(i, j)]) {
                        return Err(Error::Validation(format!(
                            "weight {} out of range at ({i},{j})",
                            m[(i, j)]
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                let mean = (self.w_spatial[(i, j)] + self.w_semantic[(i, j)]) / 2.0;
                if (self.w_combined[(i, j)] - mean).abs() > 0.0 {
                    return Err(Error::Validation(format!(
                        "combined weight at ({i},{j}) is not the mean of its components"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Spatial proximity weight `1/(1 + d)` for a centroid distance `d >= 0`.
pub fn spatial_weight(d: f64) -> Result<f64> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::Domain(format!(
            "distance must be finite and non-negative, got {d}"
        )));
    }
    Ok(1.0 / (1.0 + d))
}

/// Cosine similarity clamped to `[0, 1]` so combined weights stay valid
/// affinities.
pub fn semantic_weight(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    Ok(cosine_similarity(u, v)?.max(0.0))
}

/// Arithmetic mean of a spatial and a semantic weight.
pub fn combined_weight(ws: f64, wsem: f64) -> Result<f64> {
    for (name, w) in [("spatial", ws), ("semantic", wsem)] {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Domain(format!(
                "{name} weight must be in [0, 1], got {w}"
            )));
        }
    }
    Ok((ws + wsem) / 2.0)
}

/// Build the weighted graph for a document: order regions, embed their
/// texts, and fill the three weight matrices.
pub fn build_graph(document: &Document, config: &GraphConfig) -> Result<DocumentGraph> {
    config.validate()?;
    document.validate()?;

    let order = reading_order_indices(document, &config.layout)?;
    let frame = PageFrame::new(document, &config.layout)?;
    let regions: Vec<_> = order.iter().map(|&i| &document.regions[i]).collect();
    let node_ids: Vec<String> = regions.iter().map(|r| r.id.clone()).collect();
    let token_counts: Vec<usize> = regions.iter().map(|r| count_tokens(&r.text)).collect();

    let texts: Vec<String> = regions.iter().map(|r| r.text.clone()).collect();
    let embeddings = Embedder::new(config.provider.clone())?.embed_texts(&texts)?;

    let n = regions.len();
    let mut w_spatial = Array2::zeros((n, n));
    let mut w_semantic = Array2::zeros((n, n));
    let mut w_combined = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let ws = spatial_weight(frame.distance(regions[i], regions[j]))?;
            let wsem = semantic_weight(&embeddings[i], &embeddings[j])?;
            let wc = combined_weight(ws, wsem)?;
            w_spatial[(i, j)] = ws;
            w_spatial[(j, i)] = ws;
            w_semantic[(i, j)] = wsem;
            w_semantic[(j, i)] = wsem;
            w_combined[(i, j)] = wc;
            w_combined[(j, i)] = wc;
        }
    }

    let use_knn = match config.edge_policy {
        EdgePolicy::Complete => false,
        EdgePolicy::Knn => true,
        EdgePolicy::Auto => n > AUTO_COMPLETE_LIMIT,
    };
    if use_knn {
        let keep = knn_keep_mask(&w_combined, config.knn_k());
        for m in [&mut w_spatial, &mut w_semantic, &mut w_combined] {
            for i in 0..n {
                for j in 0..n {
                    if i != j && !keep[(i, j)] {
                        m[(i, j)] = 0.0;
                    }
                }
            }
        }
    }

    Ok(DocumentGraph { node_ids, w_spatial, w_semantic, w_combined, token_counts })
}

/// Symmetric keep-mask for the knn policy: entry (i, j) survives when j is
/// among the k strongest combined weights of row i or i among row j's.
/// Ties break toward the lower column index.
fn knn_keep_mask(w: &Array2<f64>, k: usize) -> Array2<bool> {
    let n = w.nrows();
    let mut keep = Array2::from_elem((n, n), false);
    for i in 0..n {
        let mut candidates: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        candidates.sort_by(|&a, &b| w[(i, b)].total_cmp(&w[(i, a)]).then(a.cmp(&b)));
        for &j in candidates.iter().take(k) {
            keep[(i, j)] = true;
            keep[(j, i)] = true;
        }
    }
    keep
}

/// Matrix-market coordinate dump of the combined weights (lower triangle,
/// 1-based indices), for debugging and external tooling.
pub fn dump_matrix_market(graph: &DocumentGraph) -> String {
    let n = graph.node_count();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..=i {
            let w = graph.w_combined[(i, j)];
            if w != 0.0 {
                entries.push((i + 1, j + 1, w));
            }
        }
    }
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    out.push_str("% combined document-graph weights; rows follow reading order\n");
    out.push_str(&format!("{n} {n} {}\n", entries.len()));
    for (i, j, w) in entries {
        out.push_str(&format!("{i} {j} {w:.12e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc_model::{BBox, Page, Region};

    fn region(id: &str, x: f64, y: f64, text: &str) -> Region {
        Region {
            id: id.into(),
            page_index: 0,
            bbox: BBox::from([x, y, x + 4.0, y + 4.0]),
            text: text.into(),
            label: None,
        }
    }

    fn doc(regions: Vec<Region>) -> Document {
        Document {
            doc_id: "d".into(),
            pages: vec![Page { index: 0, width: 100.0, height: 100.0 }],
            regions,
        }
    }

    #[test]
    fn spatial_weight_formula() {
        assert_eq!(spatial_weight(0.0).unwrap(), 1.0);
        assert_eq!(spatial_weight(1.0).unwrap(), 0.5);
        assert_eq!(spatial_weight(3.0).unwrap(), 0.25);
    }

    #[test]
    fn spatial_weight_rejects_bad_domain() {
        assert!(spatial_weight(-0.1).is_err());
        assert!(spatial_weight(f64::NAN).is_err());
        assert!(spatial_weight(f64::INFINITY).is_err());
    }

    #[test]
    fn semantic_weight_clamps_negative_cosine() {
        let u = EmbeddingVector::from_raw(vec![1.0, 0.0]).unwrap();
        let v = EmbeddingVector::from_raw(vec![-1.0, 0.0]).unwrap();
        assert_eq!(semantic_weight(&u, &v).unwrap(), 0.0);
        assert_eq!(semantic_weight(&u, &u).unwrap(), 1.0);
    }

    #[test]
    fn semantic_weight_45_degrees() {
        let u = EmbeddingVector::from_raw(vec![1.0, 1.0]).unwrap();
        let v = EmbeddingVector::from_raw(vec![1.0, 0.0]).unwrap();
        let w = semantic_weight(&u, &v).unwrap();
        assert!((w - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn combined_weight_mean_and_domain() {
        assert_eq!(combined_weight(1.0, 0.5).unwrap(), 0.75);
        assert_eq!(combined_weight(0.0, 0.0).unwrap(), 0.0);
        let w = combined_weight(0.25, 0.70711).unwrap();
        assert!((w - 0.47855).abs() < 1e-5);
        assert!(combined_weight(-0.1, 0.5).is_err());
        assert!(combined_weight(0.5, 1.2).is_err());
    }

    #[test]
    fn single_region_graph() {
        let d = doc(vec![region("r", 10.0, 10.0, "three short words")]);
        let g = build_graph(&d, &GraphConfig::default()).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.w_combined[(0, 0)], 0.0);
        assert_eq!(g.token_counts, vec![3]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn identical_coincident_regions_have_weight_one() {
        let d = doc(vec![
            region("a", 10.0, 10.0, "same words here"),
            region("b", 10.0, 10.0, "same words here"),
        ]);
        let g = build_graph(&d, &GraphConfig::default()).unwrap();
        assert_eq!(g.w_combined[(0, 1)], 1.0);
        g.check_invariants().unwrap();
    }

    #[test]
    fn empty_text_region_has_zero_semantic_weight() {
        let d = doc(vec![
            region("fig", 10.0, 10.0, ""),
            region("cap", 10.0, 20.0, "caption text"),
        ]);
        let g = build_graph(&d, &GraphConfig::default()).unwrap();
        assert_eq!(g.w_semantic[(0, 1)], 0.0);
        assert!(g.w_spatial[(0, 1)] > 0.0);
        assert_eq!(g.w_combined[(0, 1)], g.w_spatial[(0, 1)] / 2.0);
    }

    #[test]
    fn knn_keeps_strongest_row_entries_then_symmetrizes() {
        // Same text everywhere, so weights are ordered purely by distance:
        // positions 0, 40, 48 on one axis. Row 0 keeps node 1; rows 1 and 2
        // keep each other; edge (0, 2) dies.
        let d = doc(vec![
            region("a", 0.0, 10.0, "w"),
            region("b", 40.0, 10.0, "w"),
            region("c", 48.0, 10.0, "w"),
        ]);
        let config = GraphConfig {
            edge_policy: EdgePolicy::Knn,
            knn_k: Some(1),
            ..GraphConfig::default()
        };
        let g = build_graph(&d, &config).unwrap();
        assert!(g.w_combined[(0, 1)] > 0.0);
        assert!(g.w_combined[(1, 2)] > 0.0);
        assert_eq!(g.w_combined[(0, 2)], 0.0);
        assert_eq!(g.w_spatial[(0, 2)], 0.0);
        assert_eq!(g.w_semantic[(0, 2)], 0.0);
        g.check_invariants().unwrap();
    }

    #[test]
    fn nodes_follow_reading_order() {
        let d = doc(vec![
            region("lower", 10.0, 60.0, "x"),
            region("upper", 10.0, 10.0, "y"),
        ]);
        let g = build_graph(&d, &GraphConfig::default()).unwrap();
        assert_eq!(g.node_ids, vec!["upper", "lower"]);
    }

    #[test]
    fn combined_recomputable_from_components() {
        let d = doc(vec![
            region("a", 5.0, 5.0, "alpha beta gamma"),
            region("b", 50.0, 20.0, "beta gamma delta"),
            region("c", 20.0, 80.0, "unrelated words entirely"),
        ]);
        let g = build_graph(&d, &GraphConfig::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let mean = (g.w_spatial[(i, j)] + g.w_semantic[(i, j)]) / 2.0;
                    assert_eq!(g.w_combined[(i, j)], mean);
                }
            }
        }
        g.check_invariants().unwrap();
    }

    #[test]
    fn matrix_market_dump_shape() {
        let d = doc(vec![
            region("a", 10.0, 10.0, "x"),
            region("b", 50.0, 10.0, "y"),
        ]);
        let g = build_graph(&d, &GraphConfig::default()).unwrap();
        let dump = dump_matrix_market(&g);
        let mut lines = dump.lines();
        assert_eq!(
            lines.next().unwrap(),
            "%%MatrixMarket matrix coordinate real symmetric"
        );
        let size_line = lines.find(|l| !l.starts_with('%')).unwrap();
        assert_eq!(size_line, "2 2 1");
    }
}
