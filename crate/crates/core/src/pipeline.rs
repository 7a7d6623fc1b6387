//! End-to-end wiring: documents → binary matrix → pairwise distances →
//! dendrogram.

use std::fmt;
use std::str::FromStr;

use crate::corpus::{ingest, BinaryDocTermMatrix, Document, TermDictionary, Tokenizer};
use crate::distance::{
    energy_distance_vector, energy_matrix, hamming_distance_vector, DistanceMode,
    PairwiseDistances,
};
use crate::error::Result;
use crate::hac::{build_dendrogram, Dendrogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceKind {
    /// Normalized textual energy.
    #[default]
    Energy,
    /// Fraction of differing columns.
    Hamming,
}

impl FromStr for DistanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "energy" => Ok(DistanceKind::Energy),
            "hamming" => Ok(DistanceKind::Hamming),
            other => Err(format!("unknown distance `{other}`")),
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceKind::Energy => "energy",
            DistanceKind::Hamming => "hamming",
        })
    }
}

/// Distances between the rows of `x`. `mode` only applies to energy.
pub fn pairwise_distances(
    x: &BinaryDocTermMatrix,
    kind: DistanceKind,
    mode: DistanceMode,
) -> Result<PairwiseDistances> {
    match kind {
        DistanceKind::Energy => energy_distance_vector(&energy_matrix(x)?, mode),
        DistanceKind::Hamming => hamming_distance_vector(x),
    }
}

/// Everything derived from one collection, ready to be cut at any threshold.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dictionary: TermDictionary,
    pub matrix: BinaryDocTermMatrix,
    pub distances: PairwiseDistances,
    pub dendrogram: Dendrogram,
}

impl Prepared {
    pub fn ids(&self) -> &[String] {
        self.matrix.doc_ids()
    }
}

pub fn prepare(
    docs: &[Document],
    tokenizer: &Tokenizer,
    kind: DistanceKind,
    mode: DistanceMode,
) -> Result<Prepared> {
    let (dictionary, matrix) = ingest(docs, tokenizer)?;
    let distances = pairwise_distances(&matrix, kind, mode)?;
    let dendrogram = build_dendrogram(&distances)?;
    Ok(Prepared {
        dictionary,
        matrix,
        distances,
        dendrogram,
    })
}
