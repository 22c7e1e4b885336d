//! Seeded synthetic corpus generator with planted ground truth.
//!
//! Every generated document contains a handful of topic groups. A group is
//! a spatial cluster of regions (a vertical slot on one page) whose texts
//! sample a group-specific vocabulary, and each group is one ground-truth
//! chunk. Two design details make the corpora discriminative for chunker
//! comparisons:
//!
//! - group token sums are tuned just under the target chunk budget, so the
//!   budget-derived cluster count equals the number of planted groups;
//! - the two groups facing each other across the first page break share
//!   most of their vocabulary while remaining distinct ground-truth chunks,
//!   so methods that ignore geometry tend to merge them.
//!
//! Profiles vary the intra-group geometry: full-width rows, two text
//! columns, or rows with figure/caption pairs (figures have empty text).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::doc_model::{BBox, Document, GroundTruth, Page, Region};

const PAGE_WIDTH: f64 = 612.0;
const PAGE_HEIGHT: f64 = 792.0;
const MARGIN_X: f64 = 60.0;
/// Vertical slots (two groups per page) with a wide gap between them.
const SLOTS: [(f64, f64); 2] = [(50.0, 340.0), (450.0, 740.0)];
const GROUPS_PER_PAGE: usize = 2;
const POOL_SIZE: usize = 30;
/// Vocabulary overlap between the two groups adjacent across the first
/// page break.
const CONFUSABLE_SHARED: usize = 26;

/// Word pools; each topic group draws from one 30-word slice.
#[rustfmt::skip]
const WORDS: [&str; 180] = [
    // astronomy
    "telescope", "orbit", "nebula", "quasar", "comet", "galaxy", "eclipse", "aurora",
    "parallax", "supernova", "asteroid", "zenith", "lunar", "stellar", "cosmic", "perihelion",
    "magnitude", "spectra", "pulsar", "meteor", "horizon", "celestial", "gravity", "photon",
    "redshift", "transit", "equinox", "corona", "crater", "observatory",
    // cooking
    "saucepan", "simmer", "braise", "julienne", "marinade", "roux", "caramel", "zest",
    "whisk", "knead", "proof", "sear", "garnish", "reduction", "poach", "brine",
    "fillet", "season", "glaze", "crumb", "batter", "dough", "broth", "sauté",
    "render", "temper", "fold", "chiffonade", "deglaze", "confit",
    // geology
    "basalt", "stratum", "sediment", "magma", "erosion", "tectonic", "mineral", "quartz",
    "fossil", "glacier", "fault", "igneous", "bedrock", "alluvial", "karst", "moraine",
    "obsidian", "schist", "gneiss", "delta", "aquifer", "crust", "mantle", "seismic",
    "weathering", "lithosphere", "outcrop", "volcanic", "abrasion", "substrate",
    // music
    "cadence", "arpeggio", "timbre", "sonata", "crescendo", "interval", "legato", "staccato",
    "harmony", "tempo", "fugue", "overture", "chord", "melody", "rhythm", "octave",
    "vibrato", "concerto", "motif", "refrain", "pitch", "resonance", "ensemble", "maestro",
    "libretto", "scale", "downbeat", "syncopation", "aria", "counterpoint",
    // medicine
    "diagnosis", "antibody", "vaccine", "syndrome", "chronic", "lesion", "biopsy", "remission",
    "pathogen", "clinical", "dosage", "infusion", "membrane", "neuron", "plasma", "serum",
    "symptom", "therapy", "trauma", "vascular", "immune", "oncology", "prognosis", "receptor",
    "enzyme", "cardiac", "renal", "hepatic", "suture", "triage",
    // sailing
    "mainsail", "rudder", "keel", "spinnaker", "tack", "jib", "halyard", "bowline",
    "leeward", "windward", "mooring", "regatta", "ballast", "capstan", "fathom", "galley",
    "helm", "hull", "knot", "lanyard", "mast", "anchor", "porthole", "rigging",
    "sextant", "starboard", "tiller", "transom", "wake", "waterline",
];

/// Intra-group geometry of generated documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutProfile {
    SingleColumn,
    TwoColumn,
    FigureCaption,
    /// Cycle through the three concrete profiles per document.
    #[default]
    Mixed,
}

impl LayoutProfile {
    fn concrete(self, doc_index: usize) -> LayoutProfile {
        match self {
            LayoutProfile::Mixed => match doc_index % 3 {
                0 => LayoutProfile::SingleColumn,
                1 => LayoutProfile::TwoColumn,
                _ => LayoutProfile::FigureCaption,
            },
            other => other,
        }
    }
}

impl std::str::FromStr for LayoutProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "single-column" => Ok(LayoutProfile::SingleColumn),
            "two-column" => Ok(LayoutProfile::TwoColumn),
            "figure-caption" => Ok(LayoutProfile::FigureCaption),
            "mixed" => Ok(LayoutProfile::Mixed),
            other => Err(format!(
                "unknown profile '{other}' (expected single-column, two-column, figure-caption, or mixed)"
            )),
        }
    }
}

/// Corpus generation settings.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub n_docs: usize,
    pub profile: LayoutProfile,
    /// Chunk budget the group token sums are tuned against.
    pub target_chunk_tokens: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            seed: 0,
            n_docs: 10,
            profile: LayoutProfile::Mixed,
            target_chunk_tokens: 512,
        }
    }
}

fn pool(theme: usize) -> &'static [&'static str] {
    let start = (theme % 6) * POOL_SIZE;
    &WORDS[start..start + POOL_SIZE]
}

/// Vocabulary of one group: its own pool, except that the group just after
/// the first page break mostly reuses the previous group's pool.
fn group_vocabulary(group: usize) -> Vec<&'static str> {
    if group == GROUPS_PER_PAGE {
        let mut words: Vec<&str> = pool(group - 1)[..CONFUSABLE_SHARED].to_vec();
        words.extend(&pool(group)[..POOL_SIZE - CONFUSABLE_SHARED]);
        words
    } else {
        pool(group).to_vec()
    }
}

fn sample_text(rng: &mut ChaCha8Rng, vocabulary: &[&str], tokens: usize) -> String {
    let mut words = Vec::with_capacity(tokens);
    for _ in 0..tokens {
        words.push(vocabulary[rng.gen_range(0..vocabulary.len())]);
    }
    // sentence-ish punctuation so recursive splitting has boundaries
    let mut text = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            if i % 12 == 0 {
                text.push_str(". ");
            } else {
                text.push(' ');
            }
        }
        text.push_str(w);
    }
    text
}

/// Generate one document and its ground truth. Deterministic in
/// `(seed, index, profile, target_chunk_tokens)`.
pub fn generate_document(
    seed: u64,
    index: usize,
    profile: LayoutProfile,
    target_chunk_tokens: usize,
) -> (Document, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    let profile = profile.concrete(index);

    let n_groups: usize = rng.gen_range(3..=4);
    let n_pages = n_groups.div_ceil(GROUPS_PER_PAGE);

    let mut regions = Vec::new();
    let mut assignment = std::collections::BTreeMap::new();
    let mut region_counter = 0usize;

    for group in 0..n_groups {
        let page = group / GROUPS_PER_PAGE;
        let (slot_top, slot_bottom) = SLOTS[group % GROUPS_PER_PAGE];
        let vocabulary = group_vocabulary(group);
        let label = format!("g{group}");

        // Token budget for the whole group: just under the chunk target so
        // the cluster-count heuristic lands exactly on n_groups.
        let low = (target_chunk_tokens as f64 * 0.89) as usize;
        let high = (target_chunk_tokens as f64 * 0.97) as usize;
        let n_regions = rng.gen_range(5..=7);
        let with_figure = profile == LayoutProfile::FigureCaption && rng.gen_bool(0.8);
        // captions add a few tokens of their own; keep the group under target
        let group_tokens = rng.gen_range(low..=high) - if with_figure { 20 } else { 0 };

        // Split the group budget across its text regions.
        let text_slots = n_regions;
        let mut weights: Vec<f64> = (0..text_slots).map(|_| rng.gen_range(0.7..1.3)).collect();
        let total_weight: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total_weight;
        }
        let mut token_counts: Vec<usize> = weights
            .iter()
            .map(|w| ((w * group_tokens as f64).round() as usize).max(2))
            .collect();
        let diff = group_tokens as i64 - token_counts.iter().sum::<usize>() as i64;
        let last = token_counts.len() - 1;
        token_counts[last] = (token_counts[last] as i64 + diff).max(2) as usize;

        // Stack rows inside the slot; figures take one extra row.
        let rows = n_regions + if with_figure { 2 } else { 0 };
        let row_gap = 6.0;
        let row_height =
            ((slot_bottom - slot_top) - row_gap * (rows as f64 - 1.0)) / rows as f64;
        let figure_row = if with_figure { rng.gen_range(1..n_regions) } else { usize::MAX };

        let mut row = 0usize;
        for (slot, &tokens) in token_counts.iter().enumerate() {
            if slot == figure_row {
                // figure (empty text) and its caption, stacked
                let y0 = slot_top + row as f64 * (row_height + row_gap);
                let fig_id = format!("r{region_counter}");
                region_counter += 1;
                regions.push(Region {
                    id: fig_id.clone(),
                    page_index: page,
                    bbox: BBox::from([
                        MARGIN_X + 80.0,
                        y0,
                        PAGE_WIDTH - MARGIN_X - 80.0,
                        y0 + row_height,
                    ]),
                    text: String::new(),
                    label: Some("figure".into()),
                });
                assignment.insert(fig_id, label.clone());

                let y0 = slot_top + (row + 1) as f64 * (row_height + row_gap);
                let cap_id = format!("r{region_counter}");
                region_counter += 1;
                let caption_tokens = rng.gen_range(8..16);
                regions.push(Region {
                    id: cap_id.clone(),
                    page_index: page,
                    bbox: BBox::from([
                        MARGIN_X + 40.0,
                        y0,
                        PAGE_WIDTH - MARGIN_X - 40.0,
                        y0 + row_height * 0.6,
                    ]),
                    text: sample_text(&mut rng, &vocabulary, caption_tokens),
                    label: Some("caption".into()),
                });
                assignment.insert(cap_id, label.clone());
                row += 2;
            }

            let y0 = slot_top + row as f64 * (row_height + row_gap);
            let (x0, x1) = match profile {
                LayoutProfile::TwoColumn => {
                    // regions alternate between two x-bands
                    let column_width = (PAGE_WIDTH - 2.0 * MARGIN_X - 32.0) / 2.0;
                    if slot % 2 == 0 {
                        (MARGIN_X, MARGIN_X + column_width)
                    } else {
                        (PAGE_WIDTH - MARGIN_X - column_width, PAGE_WIDTH - MARGIN_X)
                    }
                }
                _ => (MARGIN_X, PAGE_WIDTH - MARGIN_X),
            };
            // two-column rows share a band: advance the row every two regions
            let advance = profile != LayoutProfile::TwoColumn || slot % 2 == 1;

            let id = format!("r{region_counter}");
            region_counter += 1;
            regions.push(Region {
                id: id.clone(),
                page_index: page,
                bbox: BBox::from([x0, y0, x1, y0 + row_height]),
                text: sample_text(&mut rng, &vocabulary, tokens),
                label: Some("paragraph".into()),
            });
            assignment.insert(id, label.clone());
            if advance {
                row += 1;
            }
        }
    }

    let document = Document {
        doc_id: format!("synth-{index:04}"),
        pages: (0..n_pages)
            .map(|i| Page { index: i, width: PAGE_WIDTH, height: PAGE_HEIGHT })
            .collect(),
        regions,
    };
    let truth = GroundTruth { doc_id: document.doc_id.clone(), assignment };
    (document, truth)
}

/// Generate a whole corpus.
pub fn generate_corpus(config: &SyntheticConfig) -> Vec<(Document, GroundTruth)> {
    (0..config.n_docs)
        .map(|i| generate_document(config.seed, i, config.profile, config.target_chunk_tokens))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc_model::serialize_document;
    use crate::spectral::calculate_n_clusters;
    use crate::tokenize::count_tokens;

    #[test]
    fn documents_validate_and_truth_covers_regions() {
        for index in 0..6 {
            let (doc, truth) =
                generate_document(1, index, LayoutProfile::Mixed, 512);
            doc.validate().unwrap();
            truth.validate_against(&doc).unwrap();
            assert_eq!(truth.assignment.len(), doc.regions.len());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let (a, _) = generate_document(7, 3, LayoutProfile::Mixed, 512);
        let (b, _) = generate_document(7, 3, LayoutProfile::Mixed, 512);
        assert_eq!(serialize_document(&a), serialize_document(&b));
    }

    #[test]
    fn two_column_profile_uses_two_x_bands() {
        let (doc, _) = generate_document(3, 0, LayoutProfile::TwoColumn, 512);
        let mut lefts = 0;
        let mut rights = 0;
        for r in &doc.regions {
            if r.bbox.x0 == MARGIN_X && r.bbox.x1 < PAGE_WIDTH - MARGIN_X {
                lefts += 1;
            } else if r.bbox.x0 > MARGIN_X {
                rights += 1;
            }
        }
        assert!(lefts > 0 && rights > 0, "lefts={lefts} rights={rights}");
    }

    #[test]
    fn figure_caption_profile_has_empty_text_figures() {
        let mut found = false;
        for index in 0..5 {
            let (doc, _) = generate_document(5, index, LayoutProfile::FigureCaption, 512);
            found |= doc.regions.iter().any(|r| r.text.is_empty());
        }
        assert!(found, "no figure regions generated in five documents");
    }

    #[test]
    fn cluster_count_matches_group_count() {
        for seed in 0..3 {
            for index in 0..8 {
                let (doc, truth) =
                    generate_document(seed, index, LayoutProfile::Mixed, 512);
                let groups: std::collections::BTreeSet<&String> =
                    truth.assignment.values().collect();
                let counts: Vec<usize> =
                    doc.regions.iter().map(|r| count_tokens(&r.text)).collect();
                let k = calculate_n_clusters(&counts, 512);
                assert_eq!(
                    k,
                    groups.len(),
                    "seed {seed} doc {index}: k = {k}, groups = {}",
                    groups.len()
                );
            }
        }
    }
}
