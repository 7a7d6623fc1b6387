//! Plain-text listing of the groups of a clustering.

use std::collections::BTreeSet;
use std::io::{self, Write};

use crate::corpus::Document;
use crate::error::Result;
use crate::eval::{identify_intruders, GoldAnnotation};
use crate::hac::Clustering;

/// Writes every group with its member texts in id order. With gold labels,
/// each group's majority sense is shown and intruders are flagged with `!`.
///
/// `docs[i]` must be item `i` of the clustering.
pub fn write_cluster_report<W: Write>(
    c: &Clustering,
    docs: &[Document],
    gold: Option<&GoldAnnotation>,
    mut out: W,
) -> Result<()> {
    let ids: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
    let intruders = match gold {
        Some(g) => identify_intruders(c, g, &ids)?,
        None => BTreeSet::new(),
    };
    let io = |e: io::Error| crate::error::Error::io("<report>", e);

    writeln!(
        out,
        "alpha = {:.2}, {} groups, {} of {} documents grouped",
        c.alpha,
        c.num_groups(),
        c.grouped_count(),
        c.total()
    )
    .map_err(io)?;
    for (k, group) in c.groups.iter().enumerate() {
        let mut members = group.clone();
        members.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        write!(out, "\n== group {} ({} members)", k + 1, members.len()).map_err(io)?;
        if let Some(g) = gold {
            let senses: Vec<&str> = members
                .iter()
                .filter(|m| !intruders.contains(m))
                .filter_map(|&m| g.sense(&ids[m]))
                .collect();
            if let Some(s) = senses.first() {
                write!(out, " sense: {s}").map_err(io)?;
            }
        }
        writeln!(out).map_err(io)?;
        for m in members {
            let flag = if intruders.contains(&m) { '!' } else { ' ' };
            writeln!(out, "{flag} [{}] {}", docs[m].id, docs[m].text.trim()).map_err(io)?;
        }
    }
    if !c.ungrouped.is_empty() {
        writeln!(out, "\n== ungrouped ({})", c.ungrouped.len()).map_err(io)?;
        let mut rest = c.ungrouped.clone();
        rest.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        for m in rest {
            writeln!(out, "  [{}] {}", docs[m].id, docs[m].text.trim()).map_err(io)?;
        }
    }
    Ok(())
}
