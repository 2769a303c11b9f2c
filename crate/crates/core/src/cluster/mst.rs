//! Minimum spanning tree of the complete mutual-reachability graph (dense Prim).

use std::cmp::Ordering;

use super::distance::mutual_reachability;
use crate::vectorize::EmbeddingMatrix;

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl MstEdge {
    pub fn new(p: usize, q: usize, weight: f64) -> Self {
        Self {
            a: p.min(q),
            b: p.max(q),
            weight,
        }
    }

    /// Total order: weight, then smaller endpoint, then larger endpoint.
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

/// Edges are returned in the order they join the tree.
pub fn build_mst(emb: &EmbeddingMatrix, cores: &[f64]) -> Vec<MstEdge> {
    let n = emb.len();
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<MstEdge>> = vec![None; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = MstEdge::new(current, v, mutual_reachability(emb, cores, current, v));
            if best[v].is_none_or(|b| cand.cmp_key(&b) == Ordering::Less) {
                best[v] = Some(cand);
            }
        }
        let next = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&x, &y| {
                let (ex, ey) = (best[x].unwrap(), best[y].unwrap());
                ex.cmp_key(&ey)
            })
            .expect("a vertex remains outside the tree");
        edges.push(best[next].unwrap());
        in_tree[next] = true;
        current = next;
    }
    edges
}
