//! Pairwise distances between binary document rows.
//!
//! The textual energy between documents `i` and `j` is the Hopfield
//! interaction `½·(G·G)[i][j]` where `G = X·Xᵀ` counts shared entities. It is
//! kept as the exact integer `(G·G)[i][j]` (twice the energy) until the
//! normalization step, where the factor ½ cancels.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::BinaryDocTermMatrix;
use crate::error::{Error, Result};

/// Symmetric matrix of interaction energy magnitudes `|e_ij|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyMatrix {
    n: usize,
    /// Upper triangle including the diagonal, row-major: `(G·G)[i][j] = 2·|e_ij|`
    /// for `i <= j`.
    doubled: Vec<u64>,
}

impl EnergyMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * self.n - a * a.saturating_sub(1) / 2 - a + b
    }

    /// `2·|e_ij|`, exact.
    pub fn doubled(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.n && j < self.n, "index out of range");
        self.doubled[self.offset(i, j)]
    }

    pub fn energy(&self, i: usize, j: usize) -> f64 {
        self.doubled(i, j) as f64 / 2.0
    }

    /// Largest off-diagonal doubled energy, 0 when `n < 2`.
    pub fn max_off_diagonal(&self) -> u64 {
        let n = self.n;
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.doubled(i, j))
            .max()
            .unwrap_or(0)
    }
}

/// Computes `|E| = ½·(X·Xᵀ)·(X·Xᵀ)` in integer arithmetic.
pub fn energy_matrix(x: &BinaryDocTermMatrix) -> Result<EnergyMatrix> {
    let n = x.rows();
    if n == 0 {
        return Err(Error::EmptyCollection("energy of an empty matrix"));
    }

    let mut gram = vec![0u32; n * n];
    gram.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (k, g) in row.iter_mut().enumerate() {
            *g = x.shared(i, k);
        }
    });

    let mut doubled = vec![0u64; n * (n + 1) / 2];
    let mut rows: Vec<&mut [u64]> = Vec::with_capacity(n);
    let mut rest = doubled.as_mut_slice();
    for i in 0..n {
        let (row, tail) = rest.split_at_mut(n - i);
        rows.push(row);
        rest = tail;
    }
    // G is symmetric, so (G·G)[i][j] is the dot product of rows i and j.
    rows.into_par_iter().enumerate().for_each(|(i, out)| {
        let gi = &gram[i * n..(i + 1) * n];
        for (off, cell) in out.iter_mut().enumerate() {
            let j = i + off;
            let gj = &gram[j * n..(j + 1) * n];
            *cell = gi.iter().zip(gj).map(|(&a, &b)| a as u64 * b as u64).sum();
        }
    });
    Ok(EnergyMatrix { n, doubled })
}

/// How a normalized energy is turned into a distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// `1 − e/max`: documents with the strongest interaction are closest.
    #[default]
    Inverted,
    /// `e/max` as is.
    Raw,
}

impl FromStr for DistanceMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "inverted" => Ok(DistanceMode::Inverted),
            "raw" => Ok(DistanceMode::Raw),
            other => Err(format!("unknown distance mode `{other}`")),
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::Inverted => "inverted",
            DistanceMode::Raw => "raw",
        })
    }
}

/// One distance in `[0, 1]` per unordered pair `i < j`, laid out as
/// `d(0,1), d(0,2), …, d(0,n−1), d(1,2), …, d(n−2,n−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseDistances {
    n: usize,
    values: Vec<f64>,
}

impl PairwiseDistances {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewItems(n));
        }
        if values.len() != n * (n - 1) / 2 {
            return Err(Error::InvalidGrid(format!(
                "{} distances given for {n} items, expected {}",
                values.len(),
                n * (n - 1) / 2
            )));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidDistance { index, value });
        }
        Ok(PairwiseDistances { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Distance between items `i` and `j` (0-based, either order).
    pub fn pair_distance(&self, i: usize, j: usize) -> Result<f64> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::InvalidPair { i, j, n: self.n });
        }
        Ok(self.get(i, j))
    }

    /// Unchecked variant of [`pair_distance`](Self::pair_distance).
    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[condensed_index(self.n, a, b)]
    }

    /// Iterates `(i, j, distance)` in storage order.
    pub fn iter_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
            .zip(self.values.iter())
            .map(|((i, j), &d)| (i, j, d))
    }
}

#[inline]
fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Normalizes the off-diagonal energies by their maximum. When every
/// off-diagonal energy is 0 the result is all 1 (inverted) or all 0 (raw).
pub fn energy_distance_vector(e: &EnergyMatrix, mode: DistanceMode) -> Result<PairwiseDistances> {
    let n = e.n();
    if n < 2 {
        return Err(Error::TooFewItems(n));
    }
    let max = e.max_off_diagonal();
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let norm = if max == 0 {
                0.0
            } else {
                e.doubled(i, j) as f64 / max as f64
            };
            values.push(match mode {
                DistanceMode::Inverted => 1.0 - norm,
                DistanceMode::Raw => norm,
            });
        }
    }
    PairwiseDistances::new(n, values)
}

/// Fraction of columns where two rows differ.
pub fn hamming_distance_vector(x: &BinaryDocTermMatrix) -> Result<PairwiseDistances> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::TooFewItems(n));
    }
    let p = x.cols() as f64;
    let values = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| ((i + 1)..n).map(move |j| x.differing(i, j) as f64 / p))
        .collect();
    PairwiseDistances::new(n, values)
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the energy matrix as CSV with document ids as row and column
/// headers. Cells are `|e_ij|`.
pub fn write_energy_csv<W: Write>(e: &EnergyMatrix, ids: &[String], mut out: W) -> io::Result<()> {
    write!(out, "id")?;
    for id in ids {
        write!(out, ",{}", csv_field(id))?;
    }
    writeln!(out)?;
    for (i, id) in ids.iter().enumerate().take(e.n()) {
        write!(out, "{}", csv_field(id))?;
        for j in 0..e.n() {
            write!(out, ",{}", e.energy(i, j))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes one `id_i,id_j,distance` line per pair, in storage order.
pub fn write_distance_csv<W: Write>(
    d: &PairwiseDistances,
    ids: &[String],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "id_i,id_j,distance")?;
    for (i, j, dist) in d.iter_pairs() {
        writeln!(out, "{},{},{}", csv_field(&ids[i]), csv_field(&ids[j]), dist)?;
    }
    Ok(())
}
