use serde::{Deserialize, Serialize};

use super::condense::CondensedTree;
use crate::partition::{Label, OUTLIER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Excess of mass: the most stable set of non-overlapping clusters.
    #[default]
    Eom,
    /// Every leaf of the condensed tree.
    Leaf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectedClusters {
    /// Per point; `-1` for points outside every selected node. Renumbered by
    /// decreasing size, ties by smallest point index.
    pub labels: Vec<Label>,
    /// Selected condensed-tree nodes, ascending.
    pub nodes: Vec<usize>,
    pub total_stability: f64,
}

/// EOM never selects the root unless it is the only node.
pub fn select_clusters(tree: &CondensedTree, selection: Selection) -> SelectedClusters {
    let count = tree.nodes.len();
    let mut chosen = vec![false; count];
    match selection {
        Selection::Leaf => {
            for i in tree.leaves() {
                chosen[i] = true;
            }
        }
        Selection::Eom => {
            let mut best = vec![0.0; count];
            for i in (0..count).rev() {
                let node = &tree.nodes[i];
                if node.children.is_empty() {
                    chosen[i] = true;
                    best[i] = node.stability;
                    continue;
                }
                let below: f64 = node.children.iter().map(|&c| best[c]).sum();
                if i != 0 && node.stability > below {
                    chosen[i] = true;
                    best[i] = node.stability;
                } else {
                    best[i] = below;
                }
            }
            // keep only the topmost chosen node on every root path
            for i in 0..count {
                if let Some(p) = tree.nodes[i].parent {
                    if chosen[p] || covered(tree, &chosen, p) {
                        chosen[i] = false;
                    }
                }
            }
        }
    }

    let nodes: Vec<usize> = (0..count).filter(|&i| chosen[i]).collect();
    let total_stability = nodes.iter().map(|&i| tree.nodes[i].stability).sum();

    // owner[i]: the selected node at or above i
    let mut owner: Vec<Option<usize>> = vec![None; count];
    for i in 0..count {
        owner[i] = if chosen[i] {
            Some(i)
        } else {
            tree.nodes[i].parent.and_then(|p| owner[p])
        };
    }
    let mut raw = vec![OUTLIER; tree.n_points];
    for (i, node) in tree.nodes.iter().enumerate() {
        if let Some(o) = owner[i] {
            for &(p, _) in &node.points {
                raw[p] = o as Label;
            }
        }
    }
    SelectedClusters {
        labels: renumber(&raw),
        nodes,
        total_stability,
    }
}

fn covered(tree: &CondensedTree, chosen: &[bool], mut node: usize) -> bool {
    while let Some(p) = tree.nodes[node].parent {
        if chosen[p] {
            return true;
        }
        node = p;
    }
    false
}

fn renumber(raw: &[Label]) -> Vec<Label> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<Label, (usize, usize)> = BTreeMap::new();
    for (p, &l) in raw.iter().enumerate() {
        if l != OUTLIER {
            groups.entry(l).or_insert((0, p)).0 += 1;
        }
    }
    let mut order: Vec<(Label, usize, usize)> = groups
        .into_iter()
        .map(|(l, (n, first))| (l, n, first))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    let remap: BTreeMap<Label, Label> = order
        .iter()
        .enumerate()
        .map(|(new, &(old, _, _))| (old, new as Label))
        .collect();
    raw.iter()
        .map(|l| if *l == OUTLIER { OUTLIER } else { remap[l] })
        .collect()
}
