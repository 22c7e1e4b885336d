//! Page geometry: stacking pages into one global coordinate frame,
//! centroids, normalized pairwise distances, and coordinate-based reading
//! order.
//!
//! Pages are stacked vertically with a gap so cross-page distances stay
//! finite while page breaks are penalized. Reading order is a banded
//! row-major sort: regions are bucketed into horizontal bands and ordered
//! by (page, band, left edge).

use serde::{Deserialize, Serialize};

use crate::doc_model::{Document, Region};
use crate::error::{Error, Result};

/// Geometry knobs. `None` fields are resolved per document:
/// the gap after a page defaults to 10% of that page's height, and the
/// reading-order band height defaults to 1% of the mean page height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub page_gap: Option<f64>,
    pub normalize_distances: bool,
    pub band_height: Option<f64>,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig { page_gap: None, normalize_distances: true, band_height: None }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(gap) = self.page_gap {
            if !gap.is_finite() || gap < 0.0 {
                return Err(Error::Validation(format!("page_gap must be >= 0, got {gap}")));
            }
        }
        if let Some(band) = self.band_height {
            if !band.is_finite() || band <= 0.0 {
                return Err(Error::Validation(format!(
                    "band_height must be > 0, got {band}"
                )));
            }
        }
        Ok(())
    }
}

/// Resolved global coordinate frame for one document.
#[derive(Debug, Clone)]
pub struct PageFrame {
    offsets: Vec<f64>,
    diagonal: f64,
    band_height: f64,
    normalize: bool,
}

impl PageFrame {
    pub fn new(document: &Document, config: &LayoutConfig) -> Result<Self> {
        config.validate()?;
        if document.pages.is_empty() {
            return Err(Error::Validation("document has no pages".into()));
        }
        let mut offsets = Vec::with_capacity(document.pages.len());
        let mut y = 0.0;
        for (i, page) in document.pages.iter().enumerate() {
            offsets.push(y);
            y += page.height;
            if i + 1 < document.pages.len() {
                y += config.page_gap.unwrap_or(0.10 * page.height);
            }
        }
        let width = document
            .pages
            .iter()
            .map(|p| p.width)
            .fold(0.0f64, f64::max);
        let diagonal = width.hypot(y);
        let mean_height =
            document.pages.iter().map(|p| p.height).sum::<f64>() / document.pages.len() as f64;
        let band_height = config.band_height.unwrap_or(0.01 * mean_height);
        Ok(PageFrame {
            offsets,
            diagonal,
            band_height,
            normalize: config.normalize_distances,
        })
    }

    /// Bounding-box midpoint shifted by the stacked offset of its page.
    pub fn global_centroid(&self, region: &Region) -> (f64, f64) {
        let (cx, cy) = region.bbox.centroid();
        (cx, cy + self.offsets[region.page_index])
    }

    /// Euclidean distance between global centroids, divided by the stacked
    /// bounding diagonal when normalization is enabled.
    pub fn distance(&self, a: &Region, b: &Region) -> f64 {
        let (ax, ay) = self.global_centroid(a);
        let (bx, by) = self.global_centroid(b);
        let d = (ax - bx).hypot(ay - by);
        if self.normalize {
            d / self.diagonal
        } else {
            d
        }
    }

    /// Reading-order band of a region: `floor(global_y0 / band_height)`.
    pub fn band(&self, region: &Region) -> i64 {
        let y0 = region.bbox.y0 + self.offsets[region.page_index];
        (y0 / self.band_height).floor() as i64
    }

    /// Diagonal of the stacked-page bounding area.
    pub fn diagonal(&self) -> f64 {
        self.diagonal
    }
}

/// Global centroid of one region.
pub fn global_centroid(
    region: &Region,
    document: &Document,
    config: &LayoutConfig,
) -> Result<(f64, f64)> {
    Ok(PageFrame::new(document, config)?.global_centroid(region))
}

/// Distance between two regions' global centroids.
pub fn pairwise_distance(
    a: &Region,
    b: &Region,
    document: &Document,
    config: &LayoutConfig,
) -> Result<f64> {
    Ok(PageFrame::new(document, config)?.distance(a, b))
}

/// Region ids sorted into reading order: by page, then band, then left
/// edge; ties keep input order (the sort is stable).
pub fn reading_order(
    regions: &[Region],
    document: &Document,
    config: &LayoutConfig,
) -> Result<Vec<String>> {
    let frame = PageFrame::new(document, config)?;
    let mut order: Vec<usize> = (0..regions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = &regions[a];
        let rb = &regions[b];
        ra.page_index
            .cmp(&rb.page_index)
            .then(frame.band(ra).cmp(&frame.band(rb)))
            .then(ra.bbox.x0.total_cmp(&rb.bbox.x0))
    });
    Ok(order.into_iter().map(|i| regions[i].id.clone()).collect())
}

/// Indices of `document.regions` in reading order.
pub fn reading_order_indices(document: &Document, config: &LayoutConfig) -> Result<Vec<usize>> {
    let frame = PageFrame::new(document, config)?;
    let mut order: Vec<usize> = (0..document.regions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = &document.regions[a];
        let rb = &document.regions[b];
        ra.page_index
            .cmp(&rb.page_index)
            .then(frame.band(ra).cmp(&frame.band(rb)))
            .then(ra.bbox.x0.total_cmp(&rb.bbox.x0))
    });
    Ok(order)
}
