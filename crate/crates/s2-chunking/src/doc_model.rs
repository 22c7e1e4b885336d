//! Domain types for layout-annotated documents, chunks, and ground truth,
//! plus parsing and serialization of the JSON interchange format.
//!
//! The document format is:
//!
//! ```json
//! { "doc_id": "d1",
//!   "pages": [{"index": 0, "width": 612.0, "height": 792.0}],
//!   "regions": [{"id": "r1", "page": 0, "bbox": [10, 10, 300, 40],
//!                "text": "...", "label": null}] }
//! ```
//!
//! Coordinates use an abstract length unit with the origin at the top-left
//! of each page; y grows downward.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How far a region's bbox may poke past its page bounds before validation
/// rejects the document.
const PAGE_BOUNDS_TOLERANCE: f64 = 1.0;

/// Axis-aligned rectangle `(x0, y0, x1, y1)` locating a region on its page.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    /// Checked constructor: coordinates must be finite with `x0 <= x1` and
    /// `y0 <= y1`.
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let b = BBox { x0, y0, x1, y1 };
        b.check().map_err(Error::Validation)?;
        Ok(b)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if ![self.x0, self.y0, self.x1, self.y1]
            .iter()
            .all(|c| c.is_finite())
        {
            return Err("bbox has non-finite coordinates".into());
        }
        if self.x0 > self.x1 || self.y0 > self.y1 {
            return Err(format!(
                "bbox [{}, {}, {}, {}] is inverted (x0 <= x1 and y0 <= y1 required)",
                self.x0, self.y0, self.x1, self.y1
            ));
        }
        Ok(())
    }

    /// Midpoint of the rectangle in page-local coordinates.
    pub fn centroid(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }
}

impl From<[f64; 4]> for BBox {
    fn from(v: [f64; 4]) -> Self {
        BBox { x0: v[0], y0: v[1], x1: v[2], y1: v[3] }
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x0, b.y0, b.x1, b.y1]
    }
}

/// One detected document element: a paragraph, title, figure, table, ...
///
/// `text` may be empty (figures); such regions still participate in spatial
/// weights and receive the zero embedding. `label` carries an optional
/// category used by ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    #[serde(rename = "page")]
    pub page_index: usize,
    pub bbox: BBox,
    pub text: String,
    pub label: Option<String>,
}

/// Page geometry, same units as [`BBox`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Page {
    pub index: usize,
    pub width: f64,
    pub height: f64,
}

/// An ordered collection of pages and regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub pages: Vec<Page>,
    pub regions: Vec<Region>,
}

impl Document {
    /// Check every structural invariant, naming the offending region or page
    /// in the error message.
    pub fn validate(&self) -> Result<()> {
        if self.pages.is_empty() {
            return Err(Error::Validation(format!(
                "document '{}' has no pages",
                self.doc_id
            )));
        }
        if self.regions.is_empty() {
            return Err(Error::Validation(format!(
                "document '{}' has no regions",
                self.doc_id
            )));
        }
        for (i, page) in self.pages.iter().enumerate() {
            if page.index != i {
                return Err(Error::Validation(format!(
                    "page at position {i} has index {} (pages must be listed in index order 0..n)",
                    page.index
                )));
            }
            if !(page.width.is_finite() && page.height.is_finite())
                || page.width <= 0.0
                || page.height <= 0.0
            {
                return Err(Error::Validation(format!(
                    "page {i} has non-positive dimensions {}x{}",
                    page.width, page.height
                )));
            }
        }
        let mut seen = HashSet::new();
        for region in &self.regions {
            if !seen.insert(region.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate region id '{}'",
                    region.id
                )));
            }
            if region.page_index >= self.pages.len() {
                return Err(Error::Validation(format!(
                    "region '{}' references page {} but the document has {} page(s)",
                    region.id,
                    region.page_index,
                    self.pages.len()
                )));
            }
            region.bbox.check().map_err(|msg| {
                Error::Validation(format!("region '{}': {msg}", region.id))
            })?;
            let page = &self.pages[region.page_index];
            let b = &region.bbox;
            if b.x0 < -PAGE_BOUNDS_TOLERANCE
                || b.y0 < -PAGE_BOUNDS_TOLERANCE
                || b.x1 > page.width + PAGE_BOUNDS_TOLERANCE
                || b.y1 > page.height + PAGE_BOUNDS_TOLERANCE
            {
                return Err(Error::Validation(format!(
                    "region '{}' bbox [{}, {}, {}, {}] lies outside page {} bounds {}x{}",
                    region.id, b.x0, b.y0, b.x1, b.y1, region.page_index, page.width, page.height
                )));
            }
        }
        Ok(())
    }

    /// Look up a region by id.
    pub fn region(&self, id: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }
}

/// An ordered group of regions emitted as one retrieval unit.
///
/// `region_ids` are listed in reading order; `text` is the regions' texts
/// joined by a single newline and `token_count` is the token count of that
/// joined text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub chunk_id: String,
    pub region_ids: Vec<String>,
    pub token_count: usize,
    pub text: String,
}

impl Chunk {
    fn check(&self) -> Result<()> {
        if self.region_ids.is_empty() {
            return Err(Error::Validation(format!(
                "chunk '{}' has no regions",
                self.chunk_id
            )));
        }
        let mut seen = HashSet::new();
        for id in &self.region_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Validation(format!(
                    "chunk '{}' lists region '{}' twice",
                    self.chunk_id, id
                )));
            }
        }
        Ok(())
    }
}

/// A document's chunking result; the unit of the chunks file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkSet {
    pub doc_id: String,
    pub chunks: Vec<Chunk>,
}

impl ChunkSet {
    pub fn validate(&self) -> Result<()> {
        for chunk in &self.chunks {
            chunk.check()?;
        }
        Ok(())
    }
}

/// Reference assignment of regions to truth-chunk labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub doc_id: String,
    pub assignment: BTreeMap<String, String>,
}

impl GroundTruth {
    /// Every assignment key must name a region of `document`.
    pub fn validate_against(&self, document: &Document) -> Result<()> {
        let ids: HashSet<&str> = document.regions.iter().map(|r| r.id.as_str()).collect();
        for key in self.assignment.keys() {
            if !ids.contains(key.as_str()) {
                return Err(Error::Validation(format!(
                    "ground truth names region '{key}' which is not in document '{}'",
                    document.doc_id
                )));
            }
        }
        Ok(())
    }
}

fn parse_error(what: &str, err: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {err}"))
}

/// Parse and validate a document payload.
pub fn parse_document(bytes: &[u8]) -> Result<Document> {
    let doc: Document =
        serde_json::from_slice(bytes).map_err(|e| parse_error("document", e))?;
    doc.validate()?;
    Ok(doc)
}

/// Serialize a document; output parses back to an equal value.
pub fn serialize_document(document: &Document) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(document).expect("document serialization");
    out.push(b'\n');
    out
}

/// Parse and validate a chunks payload.
pub fn parse_chunks(bytes: &[u8]) -> Result<ChunkSet> {
    let set: ChunkSet = serde_json::from_slice(bytes).map_err(|e| parse_error("chunks", e))?;
    set.validate()?;
    Ok(set)
}

/// Serialize chunks; output parses back to an equal value.
pub fn serialize_chunks(set: &ChunkSet) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(set).expect("chunk serialization");
    out.push(b'\n');
    out
}

/// Parse a ground-truth payload (validation against a document is separate
/// because truth files are loaded independently).
pub fn parse_ground_truth(bytes: &[u8]) -> Result<GroundTruth> {
    serde_json::from_slice(bytes).map_err(|e| parse_error("ground truth", e))
}

/// Serialize ground truth; output parses back to an equal value.
pub fn serialize_ground_truth(truth: &GroundTruth) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(truth).expect("ground truth serialization");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc_json() -> &'static str {
        r#"{
            "doc_id": "d1",
            "pages": [{"index": 0, "width": 100.0, "height": 100.0}],
            "regions": [
                {"id": "r1", "page": 0, "bbox": [0, 0, 10, 10], "text": "hello", "label": null}
            ]
        }"#
    }

    #[test]
    fn parse_minimal_document() {
        let doc = parse_document(minimal_doc_json().as_bytes()).unwrap();
        assert_eq!(doc.doc_id, "d1");
        assert_eq!(doc.regions.len(), 1);
        assert_eq!(doc.regions[0].bbox, BBox::new(0.0, 0.0, 10.0, 10.0).unwrap());
    }

    #[test]
    fn duplicate_region_id_names_offender() {
        let json = r#"{
            "doc_id": "d1",
            "pages": [{"index": 0, "width": 100.0, "height": 100.0}],
            "regions": [
                {"id": "r1", "page": 0, "bbox": [0, 0, 10, 10], "text": "a", "label": null},
                {"id": "r1", "page": 0, "bbox": [0, 20, 10, 30], "text": "b", "label": null}
            ]
        }"#;
        let err = parse_document(json.as_bytes()).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("r1"), "message was: {msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn inverted_bbox_rejected() {
        let json = r#"{
            "doc_id": "d1",
            "pages": [{"index": 0, "width": 100.0, "height": 100.0}],
            "regions": [
                {"id": "r1", "page": 0, "bbox": [50, 0, 10, 10], "text": "a", "label": null}
            ]
        }"#;
        assert!(matches!(
            parse_document(json.as_bytes()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn bbox_slightly_out_of_bounds_tolerated() {
        let json = r#"{
            "doc_id": "d1",
            "pages": [{"index": 0, "width": 100.0, "height": 100.0}],
            "regions": [
                {"id": "r1", "page": 0, "bbox": [-0.5, 0, 100.9, 10], "text": "a", "label": null}
            ]
        }"#;
        assert!(parse_document(json.as_bytes()).is_ok());
    }

    #[test]
    fn bbox_far_out_of_bounds_rejected() {
        let json = r#"{
            "doc_id": "d1",
            "pages": [{"index": 0, "width": 100.0, "height": 100.0}],
            "regions": [
                {"id": "r1", "page": 0, "bbox": [0, 0, 150, 10], "text": "a", "label": null}
            ]
        }"#;
        assert!(matches!(
            parse_document(json.as_bytes()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn region_page_out_of_range_rejected() {
        let json = r#"{
            "doc_id": "d1",
            "pages": [{"index": 0, "width": 100.0, "height": 100.0}],
            "regions": [
                {"id": "r9", "page": 3, "bbox": [0, 0, 10, 10], "text": "a", "label": null}
            ]
        }"#;
        let err = parse_document(json.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("r9"));
    }

    #[test]
    fn malformed_json_is_parse_error() {
        let err = parse_document(b"{ not json").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("line"));
    }

    #[test]
    fn document_round_trip() {
        let doc = parse_document(minimal_doc_json().as_bytes()).unwrap();
        let bytes = serialize_document(&doc);
        let back = parse_document(&bytes).unwrap();
        assert_eq!(doc, back);
    }

    #[test]
    fn empty_chunk_set_round_trip() {
        let set = ChunkSet { doc_id: "d1".into(), chunks: vec![] };
        let back = parse_chunks(&serialize_chunks(&set)).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn chunk_order_preserved() {
        let set = ChunkSet {
            doc_id: "d1".into(),
            chunks: vec![Chunk {
                chunk_id: "c0".into(),
                region_ids: vec!["r2".into(), "r1".into()],
                token_count: 2,
                text: "b\na".into(),
            }],
        };
        let back = parse_chunks(&serialize_chunks(&set)).unwrap();
        assert_eq!(back.chunks[0].region_ids, vec!["r2", "r1"]);
        assert_eq!(set, back);
    }

    #[test]
    fn duplicate_region_in_chunk_rejected() {
        let set = ChunkSet {
            doc_id: "d1".into(),
            chunks: vec![Chunk {
                chunk_id: "c0".into(),
                region_ids: vec!["r1".into(), "r1".into()],
                token_count: 1,
                text: "a".into(),
            }],
        };
        assert!(parse_chunks(&serialize_chunks(&set)).is_err());
    }

    #[test]
    fn ground_truth_round_trip_and_validation() {
        let doc = parse_document(minimal_doc_json().as_bytes()).unwrap();
        let mut assignment = BTreeMap::new();
        assignment.insert("r1".to_string(), "intro".to_string());
        let truth = GroundTruth { doc_id: "d1".into(), assignment };
        let back = parse_ground_truth(&serialize_ground_truth(&truth)).unwrap();
        assert_eq!(truth, back);
        assert!(back.validate_against(&doc).is_ok());

        let mut bad = truth.clone();
        bad.assignment.insert("missing".into(), "x".into());
        assert!(bad.validate_against(&doc).is_err());
    }
}
