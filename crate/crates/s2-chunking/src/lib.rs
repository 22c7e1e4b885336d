//! Layout- and semantics-aware document chunking.
//!
//! Given a document whose regions (paragraphs, titles, figures, tables)
//! carry bounding boxes and text, this crate builds a weighted graph whose
//! edges blend spatial proximity with semantic similarity, spectrally
//! clusters it, and packs each cluster into token-bounded chunks. Three
//! classic chunkers (fixed-size, recursive, semantic-threshold) and four
//! evaluation metrics (cohesion, layout consistency, purity, NMI) are
//! included for side-by-side comparison, along with a synthetic corpus
//! generator so the whole comparison is reproducible offline.
//!
//! Start with the runnable examples (`cargo run --example s2_chunking`) or
//! the `s2chunk` binary (`s2chunk chunk --input doc.json --method s2`).

pub mod baselines;
pub mod cli;
pub mod doc_model;
pub mod embed;
pub mod error;
pub mod graph;
pub mod layout;
pub mod metrics;
pub mod spectral;
pub mod synthetic;
pub mod tokenize;

pub use doc_model::{BBox, Chunk, ChunkSet, Document, GroundTruth, Page, Region};
pub use error::{Error, Result};
pub use graph::{build_graph, DocumentGraph, GraphConfig};
pub use spectral::{s2_chunk, SpectralConfig};
