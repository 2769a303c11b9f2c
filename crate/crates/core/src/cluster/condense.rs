//! Single-linkage dendrogram and its condensed tree.
//!
//! Walking the dendrogram from the top, a split where one side has fewer than
//! `min_cluster_size` points is not a split: those points fall out of the
//! current cluster at the split's λ and the larger side keeps the cluster's
//! identity. Only when both sides are large enough are two child clusters born.

use super::mst::MstEdge;

/// Distances below this are treated as this value when converting to λ.
pub const MIN_DISTANCE: f64 = 1e-12;

pub fn lambda_of(distance: f64) -> f64 {
    1.0 / distance.max(MIN_DISTANCE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LinkNode {
    left: usize,
    right: usize,
    weight: f64,
    size: usize,
}

/// Binary merge tree over `n` points; node `n + k` is the k-th merge.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<LinkNode>,
}

impl Dendrogram {
    /// Kruskal-style merging of MST edges in (weight, a, b) order.
    pub fn from_mst(n: usize, mst: &[MstEdge]) -> Self {
        let mut edges = mst.to_vec();
        edges.sort_by(MstEdge::cmp_key);
        let mut parent: Vec<usize> = (0..n).collect();
        let mut node_of: Vec<usize> = (0..n).collect();
        let mut size = vec![1; n];
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        for e in edges {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra == rb {
                continue;
            }
            let merged = size[ra] + size[rb];
            merges.push(LinkNode {
                left: node_of[ra],
                right: node_of[rb],
                weight: e.weight,
                size: merged,
            });
            parent[rb] = ra;
            size[ra] = merged;
            node_of[ra] = n + merges.len() - 1;
        }
        Self { n, merges }
    }

    fn is_leaf(&self, node: usize) -> bool {
        node < self.n
    }

    fn size(&self, node: usize) -> usize {
        if self.is_leaf(node) {
            1
        } else {
            self.merges[node - self.n].size
        }
    }

    fn root(&self) -> usize {
        if self.merges.is_empty() {
            0
        } else {
            self.n + self.merges.len() - 1
        }
    }

    fn leaves_under(&self, node: usize, out: &mut Vec<usize>) {
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if self.is_leaf(x) {
                out.push(x);
            } else {
                let m = self.merges[x - self.n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
    }
}

/// A cluster candidate in the condensed tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedNode {
    pub parent: Option<usize>,
    pub birth_lambda: f64,
    /// λ at which the node split into children or lost its last point.
    pub death_lambda: f64,
    /// Points present at birth.
    pub size: usize,
    pub children: Vec<usize>,
    /// Points that fell out of this node directly, with the λ they left at.
    pub points: Vec<(usize, f64)>,
    pub stability: f64,
}

impl CondensedNode {
    pub fn new(parent: Option<usize>, birth_lambda: f64, size: usize) -> Self {
        Self {
            parent,
            birth_lambda,
            death_lambda: birth_lambda,
            size,
            children: Vec::new(),
            points: Vec::new(),
            stability: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensedTree {
    pub n_points: usize,
    /// Node 0 is the root; every child has a larger index than its parent.
    pub nodes: Vec<CondensedNode>,
}

impl CondensedTree {
    /// Assembles a tree from nodes whose `parent`, `children`, `points` and
    /// λ values are set, filling in stabilities.
    pub fn from_nodes(n_points: usize, mut nodes: Vec<CondensedNode>) -> Self {
        for (i, node) in nodes.iter().enumerate() {
            assert!(
                node.children.iter().all(|&c| c > i),
                "children must follow parents"
            );
        }
        for i in 0..nodes.len() {
            nodes[i].stability = stability_of(&nodes, i);
        }
        Self { n_points, nodes }
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.nodes[node].children.is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    /// All points below `node`, sorted.
    pub fn points_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            out.extend(self.nodes[x].points.iter().map(|&(p, _)| p));
            stack.extend(&self.nodes[x].children);
        }
        out.sort_unstable();
        out
    }
}

/// Σ over points (λ_leave − λ_birth), counting points that move into a child
/// cluster as leaving at the child's birth.
fn stability_of(nodes: &[CondensedNode], i: usize) -> f64 {
    let node = &nodes[i];
    let direct: f64 = node
        .points
        .iter()
        .map(|&(_, l)| l - node.birth_lambda)
        .sum();
    let via_children: f64 = node
        .children
        .iter()
        .map(|&c| nodes[c].size as f64 * (nodes[c].birth_lambda - node.birth_lambda))
        .sum();
    (direct + via_children).max(0.0)
}

pub fn condense_tree(n: usize, mst: &[MstEdge], min_cluster_size: usize) -> CondensedTree {
    let dendro = Dendrogram::from_mst(n, mst);
    let mut nodes = vec![CondensedNode::new(None, 0.0, n)];
    if n == 0 {
        return CondensedTree::from_nodes(0, nodes);
    }
    // (dendrogram node, condensed cluster)
    let mut stack = vec![(dendro.root(), 0usize)];
    let mut scratch = Vec::new();
    while let Some((dnode, cluster)) = stack.pop() {
        if dendro.is_leaf(dnode) {
            // only reachable for a single-point input
            let l = nodes[cluster].birth_lambda;
            nodes[cluster].points.push((dnode, l));
            continue;
        }
        let m = dendro.merges[dnode - dendro.n];
        let lambda = lambda_of(m.weight);
        let big = |x: usize| dendro.size(x) >= min_cluster_size;
        let mut fall_out = |x: usize, nodes: &mut Vec<CondensedNode>| {
            scratch.clear();
            dendro.leaves_under(x, &mut scratch);
            nodes[cluster]
                .points
                .extend(scratch.iter().map(|&p| (p, lambda)));
            nodes[cluster].death_lambda = nodes[cluster].death_lambda.max(lambda);
        };
        match (big(m.left), big(m.right)) {
            (true, true) => {
                nodes[cluster].death_lambda = lambda;
                for side in [m.left, m.right] {
                    let id = nodes.len();
                    nodes.push(CondensedNode::new(Some(cluster), lambda, dendro.size(side)));
                    nodes[cluster].children.push(id);
                    stack.push((side, id));
                }
            }
            (true, false) => {
                fall_out(m.right, &mut nodes);
                stack.push((m.left, cluster));
            }
            (false, true) => {
                fall_out(m.left, &mut nodes);
                stack.push((m.right, cluster));
            }
            (false, false) => {
                fall_out(m.left, &mut nodes);
                fall_out(m.right, &mut nodes);
            }
        }
    }
    for node in &mut nodes {
        node.points.sort_by_key(|&(p, _)| p);
    }
    CondensedTree::from_nodes(n, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::distance::core_distances;
    use crate::cluster::mst::build_mst;
    use crate::vectorize::EmbeddingMatrix;

    fn tree_for(xs: &[f64], min_samples: usize, mcs: usize) -> CondensedTree {
        let ids = (0..xs.len()).map(|i| format!("p{i:02}")).collect();
        let e = EmbeddingMatrix::new(ids, 1, xs.to_vec());
        let cores = core_distances(&e, min_samples).unwrap();
        condense_tree(xs.len(), &build_mst(&e, &cores), mcs)
    }

    #[test]
    fn two_blobs_two_leaves() {
        let xs = [0.0, 0.1, 0.2, 0.3, 0.4, 10.0, 10.1, 10.2, 10.3, 10.4];
        let t = tree_for(&xs, 2, 3);
        assert_eq!(t.leaves().len(), 2);
        assert_eq!(t.nodes[0].children.len(), 2);
        assert_eq!(t.points_under(1).len() + t.points_under(2).len(), 10);
    }

    #[test]
    fn tight_blob_is_root_leaf() {
        let xs = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
        let t = tree_for(&xs, 1, 4);
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.points_under(0), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn small_far_group_falls_out() {
        // Hand trace, min_samples=1, mcs=4: cores of the 5-blob are 0.1 and of
        // the 3-group 0.1, so the top merge is the gap at weight 9.6 between
        // {0..0.4} and {10,10.1,10.2}; the 3-group is below mcs and its points
        // leave the root at λ = 1/9.6.
        let xs = [0.0, 0.1, 0.2, 0.3, 0.4, 10.0, 10.1, 10.2];
        let t = tree_for(&xs, 1, 4);
        assert_eq!(t.nodes.len(), 1);
        let far: Vec<_> = t.nodes[0].points.iter().filter(|(p, _)| *p >= 5).collect();
        assert_eq!(far.len(), 3);
        for &&(_, l) in &far {
            assert!((l - 1.0 / 9.6).abs() < 1e-9);
        }
    }

    #[test]
    fn stability_sums_lambda_spans() {
        let mut root = CondensedNode::new(None, 0.0, 3);
        root.points = vec![(0, 1.0), (1, 2.0), (2, 4.0)];
        let t = CondensedTree::from_nodes(3, vec![root]);
        assert_eq!(t.nodes[0].stability, 7.0);
    }

    #[test]
    fn zero_distance_lambda_is_clamped() {
        assert_eq!(lambda_of(0.0), 1e12);
        assert_eq!(lambda_of(0.5), 2.0);
    }
}
