//! Clustering of short texts with the textual-energy distance.
//!
//! Texts are reduced to binary presence vectors over their lexical entities
//! ([`corpus`]), compared with the normalized Hopfield interaction energy or
//! a Hamming baseline ([`distance`]), and grouped by complete-linkage
//! agglomeration cut at a distance threshold ([`hac`]). [`eval`] scores the
//! groups against gold senses over a threshold sweep, and [`patterns`]
//! extracts candidate definitions from raw text.
//!
//! Memory grows with the square of the number of documents: the energy
//! matrix and the pairwise distances are dense.

pub mod corpus;
pub mod distance;
pub mod error;
pub mod eval;
pub mod hac;
pub mod patterns;
pub mod pipeline;
pub mod report;

pub use corpus::{
    ingest, load_corpus, read_corpus, tokenize, vectorize, BinaryDocTermMatrix, CorpusFormat,
    DefType, Document, TermDictionary, Tokenizer,
};
pub use distance::{
    energy_distance_vector, energy_matrix, hamming_distance_vector, DistanceMode, EnergyMatrix,
    PairwiseDistances,
};
pub use error::{Error, Result};
pub use eval::{
    classify_zone, evaluate, identify_intruders, precision, recall, run_sweep, EvalRow,
    GoldAnnotation, SweepGrid, Zone,
};
pub use hac::{
    build_dendrogram, complete_linkage_distance, cut_at_threshold, Clustering, ClusteringRecord,
    Dendrogram, Merge,
};
pub use patterns::{
    candidates_to_corpus, expand_patterns, scan_text, CandidateContext, PatternTemplate,
    SearchPattern,
};
pub use pipeline::{pairwise_distances, prepare, DistanceKind, Prepared};
