//! Recall, intruder-based precision and the threshold sweep.
//!
//! Recall is the share of the whole collection that ends up in some reported
//! group. Precision is the share of grouped items that are not intruders,
//! where an intruder is a member whose gold sense differs from the majority
//! sense of its group.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::hac::{cut_at_threshold, Clustering, Dendrogram};

/// Gold sense label of each document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldAnnotation {
    sense_of: HashMap<String, String>,
}

#[derive(Deserialize)]
struct GoldRecord {
    id: String,
    sense: String,
}

impl GoldAnnotation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, sense: impl Into<String>) {
        self.sense_of.insert(id.into(), sense.into());
    }

    pub fn sense(&self, id: &str) -> Option<&str> {
        self.sense_of.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.sense_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sense_of.is_empty()
    }

    /// Collects the `gold_sense` field of every document that has one.
    pub fn from_documents(docs: &[Document]) -> Self {
        let sense_of = docs
            .iter()
            .filter_map(|d| d.gold_sense.as_ref().map(|s| (d.id.clone(), s.clone())))
            .collect();
        GoldAnnotation { sense_of }
    }

    /// Reads `{"id": ..., "sense": ...}` lines.
    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut gold = GoldAnnotation::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<gold>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: GoldRecord =
                serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                    line: idx + 1,
                    reason: e.to_string(),
                })?;
            if gold.sense_of.insert(rec.id.clone(), rec.sense).is_some() {
                return Err(Error::DuplicateId(rec.id));
            }
        }
        Ok(gold)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(io::BufReader::new(file)).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
    }
}

/// Fraction of the `total` items that belong to a reported group.
pub fn recall(c: &Clustering, total: usize) -> Result<f64> {
    if total == 0 {
        return Err(Error::EmptyCollection("recall over zero documents"));
    }
    let grouped = c.grouped_count();
    if grouped > total {
        return Err(Error::InvalidGrid(format!(
            "{grouped} grouped items exceed the total of {total}"
        )));
    }
    Ok(grouped as f64 / total as f64)
}

/// Sense of one group: its most frequent label, ties going to the label of
/// the member with the lowest id (byte order).
fn group_sense<'g>(members: &[usize], ids: &[String], gold: &'g GoldAnnotation) -> Result<&'g str> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &m in members {
        let label = gold
            .sense(&ids[m])
            .ok_or_else(|| Error::MissingGold(ids[m].clone()))?;
        *counts.entry(label).or_default() += 1;
    }
    let top = counts.values().copied().max().unwrap_or(0);
    let mut by_id: Vec<usize> = members.to_vec();
    by_id.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
    let sense = by_id
        .iter()
        .map(|&m| gold.sense(&ids[m]).expect("checked above"))
        .find(|label| counts[label] == top)
        .expect("non-empty group");
    Ok(sense)
}

/// Grouped items whose gold sense differs from their group's sense.
pub fn identify_intruders(
    c: &Clustering,
    gold: &GoldAnnotation,
    ids: &[String],
) -> Result<BTreeSet<usize>> {
    let mut intruders = BTreeSet::new();
    for group in &c.groups {
        let sense = group_sense(group, ids, gold)?;
        intruders.extend(
            group
                .iter()
                .copied()
                .filter(|&m| gold.sense(&ids[m]) != Some(sense)),
        );
    }
    Ok(intruders)
}

/// `(grouped − intruders) / grouped`, 0 when nothing is grouped.
pub fn precision(c: &Clustering, intruders: &BTreeSet<usize>) -> Result<f64> {
    if let Some(&stray) = intruders
        .iter()
        .find(|i| !c.groups.iter().any(|g| g.contains(i)))
    {
        return Err(Error::StrayIntruder(format!("item {stray}")));
    }
    let grouped = c.grouped_count();
    if grouped == 0 {
        return Ok(0.0);
    }
    Ok((grouped - intruders.len()) as f64 / grouped as f64)
}

/// Threshold regimes of the sweep. The boundaries form a partition of
/// `[0, 1]`: zone 1 up to 0.70, zone 2 up to 0.85, zone 3 below 1.00 and the
/// absolute group at exactly 1.00.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Zone {
    Zone1,
    Zone2,
    Zone3,
    Absolute,
}

impl Zone {
    pub fn as_str(self) -> &'static str {
        match self {
            Zone::Zone1 => "zone1",
            Zone::Zone2 => "zone2",
            Zone::Zone3 => "zone3",
            Zone::Absolute => "absolute",
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_zone(alpha: f64) -> Zone {
    if alpha <= 0.70 {
        Zone::Zone1
    } else if alpha <= 0.85 {
        Zone::Zone2
    } else if alpha < 1.0 {
        Zone::Zone3
    } else {
        Zone::Absolute
    }
}

/// Inclusive grid of thresholds in whole hundredths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepGrid {
    start: u32,
    end: u32,
    step: u32,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            start: 1,
            end: 100,
            step: 1,
        }
    }
}

fn to_hundredths(v: f64, what: &str) -> Result<u32> {
    let scaled = v * 100.0;
    let rounded = scaled.round();
    if !scaled.is_finite() || (scaled - rounded).abs() > 1e-6 || rounded < 0.0 {
        return Err(Error::InvalidGrid(format!(
            "{what} {v} is not a whole number of hundredths"
        )));
    }
    Ok(rounded as u32)
}

impl SweepGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        let grid = SweepGrid {
            start: to_hundredths(start, "start")?,
            end: to_hundredths(end, "end")?,
            step: to_hundredths(step, "step")?,
        };
        if grid.start == 0 || grid.start > grid.end || grid.end > 100 || grid.step == 0 {
            return Err(Error::InvalidGrid(format!(
                "need 0 < start <= end <= 1 and step > 0, got {start}:{end}:{step}"
            )));
        }
        Ok(grid)
    }

    /// Thresholds `k/100`, computed from the integer index.
    pub fn alphas(&self) -> Vec<f64> {
        (self.start..=self.end)
            .step_by(self.step as usize)
            .map(|k| k as f64 / 100.0)
            .collect()
    }
}

impl FromStr for SweepGrid {
    type Err = Error;

    /// Parses `START:END:STEP`, e.g. `0.01:1.00:0.01`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(Error::InvalidGrid(format!("expected START:END:STEP, got `{s}`")));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("`{x}` is not a number")))
        };
        SweepGrid::new(num(a)?, num(b)?, num(c)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRow {
    pub alpha: f64,
    pub num_groups: usize,
    pub recall: f64,
    pub precision: f64,
    pub zone: Zone,
}

/// Scores one clustering.
pub fn evaluate(c: &Clustering, total: usize, gold: &GoldAnnotation, ids: &[String]) -> Result<EvalRow> {
    let intruders = identify_intruders(c, gold, ids)?;
    Ok(EvalRow {
        alpha: c.alpha,
        num_groups: c.num_groups(),
        recall: recall(c, total)?,
        precision: precision(c, &intruders)?,
        zone: classify_zone(c.alpha),
    })
}

/// Cuts the dendrogram at every grid threshold (groups of at least two) and
/// scores each cut. Rows come back in grid order.
pub fn run_sweep(
    tree: &Dendrogram,
    total: usize,
    gold: &GoldAnnotation,
    ids: &[String],
    grid: &SweepGrid,
) -> Result<Vec<EvalRow>> {
    grid.alphas()
        .into_par_iter()
        .map(|alpha| {
            let c = cut_at_threshold(tree, alpha, 2)?;
            evaluate(&c, total, gold, ids)
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "alpha,num_groups,precision,recall,zone";

pub fn write_sweep_csv<W: Write>(rows: &[EvalRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{:.2},{},{:.6},{:.6},{}",
            r.alpha, r.num_groups, r.precision, r.recall, r.zone
        )?;
    }
    Ok(())
}

/// Spearman rank correlation with average ranks for ties. `None` when either
/// series is constant or the lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx.sqrt() * vy.sqrt()))
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Mean group count, precision and recall per zone, followed by the zone
/// boundaries in use.
pub fn write_zone_summary<W: Write>(rows: &[EvalRow], mut out: W) -> io::Result<()> {
    let mut acc: BTreeMap<Zone, (usize, f64, f64, f64)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(r.zone).or_default();
        e.0 += 1;
        e.1 += r.num_groups as f64;
        e.2 += r.precision;
        e.3 += r.recall;
    }
    writeln!(out, "zone      rows  mean_groups  mean_precision  mean_recall")?;
    for (zone, (k, g, p, r)) in acc {
        let k = k as f64;
        writeln!(
            out,
            "{:<9} {:>4}  {:>11.2}  {:>14.4}  {:>11.4}",
            zone.as_str(),
            k,
            g / k,
            p / k,
            r / k
        )?;
    }
    writeln!(
        out,
        "zones: zone1 alpha<=0.70, zone2 0.70<alpha<=0.85, zone3 0.85<alpha<1.00, \
         absolute alpha=1.00 (0.70..0.75 assigned to zone2, 0.85 to zone2 only)"
    )
}
