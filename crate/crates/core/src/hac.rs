//! Complete-linkage agglomerative clustering and threshold cuts.
//!
//! The full dendrogram is built once; a clustering at threshold `α` replays
//! its merges while the merge distance is `≤ α`. Because complete linkage is
//! monotone this is the same as running the agglomeration and stopping at the
//! first pair of clusters farther apart than `α`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distance::PairwiseDistances;
use crate::error::{Error, Result};

/// Maximum distance between a member of `a` and a member of `b`.
pub fn complete_linkage_distance(a: &[usize], b: &[usize], d: &PairwiseDistances) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCollection("linkage of an empty cluster"));
    }
    if let Some(&shared) = a.iter().find(|x| b.contains(x)) {
        return Err(Error::OverlappingClusters(shared));
    }
    let mut max = 0.0f64;
    for &x in a {
        for &y in b {
            max = max.max(d.pair_distance(x, y)?);
        }
    }
    Ok(max)
}

/// One agglomeration step. Leaves are clusters `0..n`; the merge at step `s`
/// creates cluster `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub new_id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn is_monotone(&self) -> bool {
        self.merges.windows(2).all(|w| w[0].distance <= w[1].distance)
    }

    /// Writes the merge list as `left_id,right_id,distance,new_id` CSV.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "left_id,right_id,distance,new_id")?;
        for m in &self.merges {
            writeln!(out, "{},{},{},{}", m.left, m.right, m.distance, m.new_id)?;
        }
        Ok(())
    }
}

/// Complete-linkage agglomeration down to a single cluster.
///
/// Among pairs at the minimal distance the one whose smallest members are
/// lexicographically least is merged first, so the result depends only on
/// the input values.
pub fn build_dendrogram(d: &PairwiseDistances) -> Result<Dendrogram> {
    let n = d.n();
    if n < 2 {
        return Err(Error::TooFewItems(n));
    }
    // Working distances between clusters, addressed by their smallest member.
    let mut work = d.values().to_vec();
    let idx = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * n - a * (a + 1) / 2 + (b - a - 1)
    };
    let mut alive = vec![true; n];
    let mut cluster_id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut merges = Vec::with_capacity(n - 1);

    // Nearest live partner of each row among the rows after it; ties go to
    // the smallest partner. `None` when no live row follows.
    let nearest = |row: usize, work: &[f64], alive: &[bool]| -> Option<(f64, usize)> {
        let base = row * n - row * (row + 1) / 2;
        let mut best: Option<(f64, usize)> = None;
        for c in (row + 1)..n {
            if alive[c] {
                let v = work[base + (c - row - 1)];
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, c));
                }
            }
        }
        best
    };
    let mut nn: Vec<Option<(f64, usize)>> = (0..n).map(|r| nearest(r, &work, &alive)).collect();

    for step in 0..(n - 1) {
        // Scanning rows in order with a strict comparison keeps the
        // lexicographically least (row, partner) pair among equal minima.
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, cand) in nn.iter().enumerate() {
            if let (true, Some((v, c))) = (alive[r], cand) {
                if best.is_none_or(|(bv, _, _)| *v < bv) {
                    best = Some((*v, r, *c));
                }
            }
        }
        let (dist, a, b) = best.expect("at least two live clusters");

        for c in 0..n {
            if alive[c] && c != a && c != b {
                let (ac, bc) = (idx(a, c), idx(b, c));
                if work[bc] > work[ac] {
                    work[ac] = work[bc];
                }
            }
        }
        alive[b] = false;
        nn[b] = None;

        let new_id = n + step;
        size[a] += size[b];
        merges.push(Merge {
            left: cluster_id[a],
            right: cluster_id[b],
            distance: dist,
            new_id,
            size: size[a],
        });
        cluster_id[a] = new_id;

        // Distances to `a` only grew and `b` is gone: rows whose cached
        // partner was one of them are the only stale ones.
        for r in 0..n {
            if alive[r] && (r == a || matches!(nn[r], Some((_, c)) if c == a || c == b)) {
                nn[r] = nearest(r, &work, &alive);
            }
        }
    }

    let tree = Dendrogram { n, merges };
    debug_assert!(tree.is_monotone());
    Ok(tree)
}

/// A flat partition of the items at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub alpha: f64,
    pub min_size: usize,
    /// Groups of at least `min_size` items, each sorted, ordered by first member.
    pub groups: Vec<Vec<usize>>,
    /// Items outside every reported group, sorted.
    pub ungrouped: Vec<usize>,
}

impl Clustering {
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn grouped_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn total(&self) -> usize {
        self.grouped_count() + self.ungrouped.len()
    }

    /// Serializable form with item indices replaced by document ids.
    pub fn to_record(&self, ids: &[String]) -> ClusteringRecord {
        let name = |&i: &usize| ids[i].clone();
        ClusteringRecord {
            alpha: self.alpha,
            groups: self.groups.iter().map(|g| g.iter().map(name).collect()).collect(),
            ungrouped: self.ungrouped.iter().map(name).collect(),
        }
    }
}

/// JSON shape of a clustering: `{"alpha", "groups", "ungrouped"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringRecord {
    pub alpha: f64,
    pub groups: Vec<Vec<String>>,
    pub ungrouped: Vec<String>,
}

impl ClusteringRecord {
    /// Rebuilds an index-based clustering. Items are numbered groups first,
    /// then ungrouped, in record order; the returned ids follow that numbering.
    pub fn to_clustering(&self) -> Result<(Clustering, Vec<String>)> {
        let mut ids = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut take = |id: &String| -> Result<usize> {
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id.clone()));
            }
            ids.push(id.clone());
            Ok(ids.len() - 1)
        };
        let groups = self
            .groups
            .iter()
            .map(|g| g.iter().map(&mut take).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let ungrouped = self.ungrouped.iter().map(&mut take).collect::<Result<Vec<_>>>()?;
        let min_size = groups.iter().map(Vec::len).min().unwrap_or(1);
        Ok((
            Clustering {
                alpha: self.alpha,
                min_size,
                groups,
                ungrouped,
            },
            ids,
        ))
    }
}

/// Applies every merge at distance `≤ alpha` and stops at the first one above.
/// Clusters with fewer than `min_size` members are reported as ungrouped.
pub fn cut_at_threshold(tree: &Dendrogram, alpha: f64, min_size: usize) -> Result<Clustering> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::ThresholdOutOfRange(alpha));
    }
    if min_size == 0 {
        return Err(Error::InvalidMinSize);
    }
    let n = tree.n;
    let mut parent: Vec<usize> = (0..n).collect();
    // Any leaf of each cluster id; leaves are their own representative.
    let mut leaf_of: Vec<usize> = (0..n).collect();
    leaf_of.reserve(tree.merges.len());

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for m in &tree.merges {
        if m.distance > alpha {
            break;
        }
        let (l, r) = (leaf_of[m.left], leaf_of[m.right]);
        let (rl, rr) = (find(&mut parent, l), find(&mut parent, r));
        parent[rr] = rl;
        leaf_of.push(l);
    }

    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for item in 0..n {
        let root = find(&mut parent, item);
        by_root.entry(root).or_default().push(item);
    }
    let mut groups = Vec::new();
    let mut ungrouped = Vec::new();
    for members in by_root.into_values() {
        if members.len() >= min_size {
            groups.push(members);
        } else {
            ungrouped.extend(members);
        }
    }
    groups.sort_by_key(|g| g[0]);
    ungrouped.sort_unstable();
    Ok(Clustering {
        alpha,
        min_size,
        groups,
        ungrouped,
    })
}
