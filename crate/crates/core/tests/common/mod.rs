//! Brute-force references shared by the integration tests. Nothing here calls
//! into the code paths they check.

#![allow(dead_code)]

use defclust_core::{BinaryDocTermMatrix, PairwiseDistances};
use rand::Rng;

/// `Σ_k Σ_a Σ_b x_ia·x_ka·x_kb·x_jb` (twice the interaction energy) on dense rows.
pub fn oracle_doubled_energy(rows: &[Vec<u8>], i: usize, j: usize) -> u64 {
    let p = rows[0].len();
    let mut s = 0u64;
    for xk in rows {
        for a in 0..p {
            if rows[i][a] == 0 || xk[a] == 0 {
                continue;
            }
            for b in 0..p {
                s += (xk[b] * rows[j][b]) as u64;
            }
        }
    }
    s
}

pub fn oracle_hamming(a: &[u8], b: &[u8]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64 / a.len() as f64
}

/// Random binary rows, each with at least one 1.
pub fn random_rows(rng: &mut impl Rng, n: usize, p: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|_| {
            let density = rng.gen_range(0.05..0.6);
            let mut row: Vec<u8> = (0..p).map(|_| rng.gen_bool(density) as u8).collect();
            row[rng.gen_range(0..p)] = 1;
            row
        })
        .collect()
}

pub fn matrix(rows: &[Vec<u8>]) -> BinaryDocTermMatrix {
    BinaryDocTermMatrix::from_unlabeled_rows(rows).unwrap()
}

/// Dense symmetric distance table with values on a coarse grid so that ties
/// and exact threshold hits both occur.
pub fn random_table(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(0..=20) as f64 / 20.0;
            t[i][j] = v;
            t[j][i] = v;
        }
    }
    t
}

pub fn condensed(table: &[Vec<f64>]) -> PairwiseDistances {
    let n = table.len();
    let mut v = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            v.push(table[i][j]);
        }
    }
    PairwiseDistances::new(n, v).unwrap()
}

/// Agglomeration that stops as soon as the closest pair of clusters is
/// farther apart than `alpha`. Closest pair ties go to the pair whose
/// smallest members are lexicographically least. Returns every cluster,
/// each sorted, ordered by first member.
pub fn oracle_stop_early(table: &[Vec<f64>], alpha: f64) -> Vec<Vec<usize>> {
    let n = table.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    loop {
        if clusters.len() < 2 {
            break;
        }
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let mut link = f64::NEG_INFINITY;
                for &x in &clusters[a] {
                    for &y in &clusters[b] {
                        link = link.max(table[x][y]);
                    }
                }
                let key = {
                    let (ma, mb) = (clusters[a][0], clusters[b][0]);
                    (ma.min(mb), ma.max(mb))
                };
                let better = match best {
                    None => true,
                    Some((d, k, _, _)) => link < d || (link == d && key < k),
                };
                if better {
                    best = Some((link, key, a, b));
                }
            }
        }
        let (d, _, a, b) = best.unwrap();
        if d > alpha {
            break;
        }
        let moved = clusters.remove(b);
        clusters[a].extend(moved);
        clusters[a].sort_unstable();
        clusters.sort_by_key(|c| c[0]);
    }
    clusters
}

/// Clusters of `oracle_stop_early` split into (groups, ungrouped) by size.
pub fn oracle_cut(table: &[Vec<f64>], alpha: f64, min_size: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut groups = Vec::new();
    let mut rest = Vec::new();
    for c in oracle_stop_early(table, alpha) {
        if c.len() >= min_size {
            groups.push(c);
        } else {
            rest.extend(c);
        }
    }
    rest.sort_unstable();
    (groups, rest)
}
