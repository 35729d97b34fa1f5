//! Metric trees, the splitting `Phyl_n ≅ T_n × [0,∞)^{n+1}`, orthants of
//! the tree space and its metric.
//!
//! A metric tree is recorded by its *splits*: for every internal edge, the
//! sorted set of leaves above it (its cluster) and its length. Two trees
//! with the same splits are isomorphic, so the split list is a complete
//! invariant.

mod distance;
mod neighborhood;
mod topology;

use std::collections::BTreeMap;

use thiserror::Error;

pub use distance::{bhv_distance, common_orthant_distance, cone_distance, exact4_distance, DistanceMode};
pub use neighborhood::{neighborhood_contains, BasicOpenSet, Interval};
pub use topology::{
    binary_resolutions, enumerate_binary_topologies, orthant_census, orthant_of, Orthant, OrthantPosition,
    MAX_ENUMERATION_LEAVES,
};

use crate::operad::{OperadError, PhyloTree};
use crate::tree::{PlanarTree, Shape, Source, Target};

/// A sorted set of leaf labels.
pub type Cluster = Vec<usize>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SpaceError {
    #[error("expected a tree with {expected}, got {got} leaves")]
    WrongArity { expected: String, got: usize },
    #[error("enumeration supports at most {max} leaves, got {n}")]
    ArityTooLarge { n: usize, max: usize },
    #[error("trees have {left} and {right} leaves")]
    ArityMismatch { left: usize, right: usize },
    #[error("exact distance is implemented for n ≤ 4, got n = {0}")]
    ExactUnsupported(usize),
    #[error("not a metric tree: {0}")]
    InvalidMetricTree(String),
    #[error("invalid external lengths: {0}")]
    InvalidLengths(String),
    #[error("invalid clusters: {0}")]
    InvalidClusters(String),
    #[error("invalid open set: {0}")]
    InvalidOpenSet(String),
    #[error(transparent)]
    Operad(#[from] OperadError),
}

/// True if the clusters are nested or disjoint.
pub fn compatible(a: &[usize], b: &[usize]) -> bool {
    let sa: std::collections::BTreeSet<_> = a.iter().collect();
    let inter = b.iter().filter(|x| sa.contains(x)).count();
    inter == 0 || inter == a.len() || inter == b.len()
}

/// Leaf set above each edge, indexed by edge id.
pub(crate) fn edge_clusters(t: &PlanarTree) -> Vec<Cluster> {
    let mut below: Vec<Cluster> = vec![Vec::new(); t.edge_count()];
    for e in t.preorder().into_iter().rev() {
        below[e.0] = match t.source(e) {
            Source::Leaf(k) => vec![k],
            Source::Vertex(v) => {
                let mut all: Cluster = t.children(v).iter().flat_map(|c| below[c.0].iter().copied()).collect();
                all.sort_unstable();
                all
            }
        };
    }
    below
}

pub(crate) fn check_clusters(n: usize, clusters: &[Cluster]) -> Result<(), SpaceError> {
    for (i, c) in clusters.iter().enumerate() {
        if c.len() < 2 || c.len() >= n {
            return Err(SpaceError::InvalidClusters(format!("{c:?} is not a proper cluster of size ≥ 2")));
        }
        if c.windows(2).any(|w| w[0] >= w[1]) || c.iter().any(|&k| k == 0 || k > n) {
            return Err(SpaceError::InvalidClusters(format!("{c:?} is not a sorted subset of 1..={n}")));
        }
        for d in &clusters[..i] {
            if d == c {
                return Err(SpaceError::InvalidClusters(format!("{c:?} repeated")));
            }
            if !compatible(c, d) {
                return Err(SpaceError::InvalidClusters(format!("{c:?} and {d:?} overlap")));
            }
        }
    }
    Ok(())
}

/// The tree shape whose internal edges carry exactly the given clusters.
pub fn shape_from_clusters(n: usize, clusters: &[Cluster]) -> Result<Shape, SpaceError> {
    if n == 0 {
        return Err(SpaceError::WrongArity { expected: "n ≥ 1".into(), got: 0 });
    }
    check_clusters(n, clusters)?;
    fn build(set: &[usize], pool: &[&Cluster]) -> Shape {
        if set.len() == 1 {
            return Shape::Leaf(set[0]);
        }
        let maximal: Vec<&Cluster> = pool
            .iter()
            .copied()
            .filter(|c| !pool.iter().any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x))))
            .collect();
        let mut kids = Vec::new();
        let mut covered = std::collections::BTreeSet::new();
        for c in &maximal {
            covered.extend(c.iter().copied());
            let inner: Vec<&Cluster> = pool
                .iter()
                .copied()
                .filter(|d| d.len() < c.len() && d.iter().all(|x| c.contains(x)))
                .collect();
            kids.push(build(c, &inner));
        }
        kids.extend(set.iter().filter(|k| !covered.contains(k)).map(|&k| Shape::Leaf(k)));
        Shape::Node(kids)
    }
    let all: Vec<usize> = (1..=n).collect();
    let pool: Vec<&Cluster> = clusters.iter().collect();
    Ok(build(&all, &pool))
}

/// Builds a phylogenetic tree from internal splits and external lengths
/// (index 0 is the root edge, index `k` the edge at leaf `k`).
pub fn tree_from_splits(n: usize, splits: &[(Cluster, f64)], external: &[f64]) -> Result<PhyloTree, SpaceError> {
    let expected = if n == 1 { 1 } else { n + 1 };
    if external.len() != expected {
        return Err(SpaceError::InvalidLengths(format!("need {expected} external lengths, got {}", external.len())));
    }
    let clusters: Vec<Cluster> = splits.iter().map(|(c, _)| c.clone()).collect();
    let shape = shape_from_clusters(n, &clusters)?;
    let t = PlanarTree::from_shape(&shape).map_err(OperadError::from)?;
    let lookup: BTreeMap<&Cluster, f64> = splits.iter().map(|(c, l)| (c, *l)).collect();
    let below = edge_clusters(&t);
    let lengths = t
        .rooted()
        .edges()
        .map(|e| {
            if t.target(e) == Target::Root {
                external[0]
            } else if let Source::Leaf(k) = t.source(e) {
                external[k]
            } else {
                lookup[&below[e.0]]
            }
        })
        .collect();
    Ok(PhyloTree::from_lengths(t, lengths)?)
}

/// A phylogenetic tree whose external edges all have length 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTree {
    tree: PhyloTree,
    splits: Vec<(Cluster, f64)>,
}

impl MetricTree {
    pub fn new(tree: PhyloTree) -> Result<Self, SpaceError> {
        for e in tree.external_edges() {
            if *tree.length(e) != 0.0 {
                return Err(SpaceError::InvalidMetricTree(format!(
                    "external edge of length {}",
                    tree.length(e)
                )));
            }
        }
        let mut splits: Vec<(Cluster, f64)> = tree.internal_clusters().into_iter().map(|(c, l)| (c, *l)).collect();
        splits.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(MetricTree { tree, splits })
    }

    /// The metric tree with the given internal splits.
    pub fn from_splits(n: usize, mut splits: Vec<(Cluster, f64)>) -> Result<Self, SpaceError> {
        splits.sort_by(|a, b| a.0.cmp(&b.0));
        let external = vec![0.0; if n == 1 { 1 } else { n + 1 }];
        Self::new(tree_from_splits(n, &splits, &external)?)
    }

    /// The only metric 1-tree: one edge of length 0.
    pub fn unit() -> Self {
        MetricTree {
            tree: PhyloTree::identity(),
            splits: Vec::new(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    /// Internal splits sorted by cluster.
    pub fn splits(&self) -> &[(Cluster, f64)] {
        &self.splits
    }

    pub fn clusters(&self) -> Vec<Cluster> {
        self.splits.iter().map(|(c, _)| c.clone()).collect()
    }

    pub fn phylo(&self) -> &PhyloTree {
        &self.tree
    }

    pub fn is_binary(&self) -> bool {
        let n = self.leaf_count();
        n < 2 || self.splits.len() == n - 2
    }

    /// Euclidean norm of the internal lengths, i.e. distance to the star tree.
    pub fn norm(&self) -> f64 {
        self.splits.iter().map(|(_, l)| l * l).sum::<f64>().sqrt()
    }
}

/// Lengths of the external edges: index 0 the root edge, index `k` leaf `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalLengths(pub Vec<f64>);

impl ExternalLengths {
    pub fn new(values: Vec<f64>) -> Result<Self, SpaceError> {
        if let Some(x) = values.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(SpaceError::InvalidLengths(format!("{x} is not a finite nonnegative length")));
        }
        Ok(ExternalLengths(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Splits a tree with `n ≥ 2` leaves into its metric tree and external
/// lengths.
pub fn decompose(t: &PhyloTree) -> Result<(MetricTree, ExternalLengths), SpaceError> {
    let n = t.leaf_count();
    if n < 2 {
        return Err(SpaceError::WrongArity { expected: "n ≥ 2".into(), got: n });
    }
    let mut ext = vec![0.0; n + 1];
    let tr = t.tree();
    for e in t.external_edges() {
        let slot = match (tr.target(e), tr.source(e)) {
            (Target::Root, _) => 0,
            (_, Source::Leaf(k)) => k,
            _ => unreachable!("external edges end at the root or start at a leaf"),
        };
        ext[slot] = *t.length(e);
    }
    let m = t.map_lengths(|e, l| if t.tree().rooted().is_internal(e) { *l } else { 0.0 })?;
    Ok((MetricTree::new(m)?, ExternalLengths(ext)))
}

/// The `n = 1` case: the unit metric tree and the single edge length.
pub fn decompose1(t: &PhyloTree) -> Result<(MetricTree, f64), SpaceError> {
    if t.leaf_count() != 1 {
        return Err(SpaceError::WrongArity { expected: "n = 1".into(), got: t.leaf_count() });
    }
    Ok((MetricTree::unit(), *t.root_length()))
}

/// Inverse of [`decompose`].
pub fn recompose(m: &MetricTree, ext: &ExternalLengths) -> Result<PhyloTree, SpaceError> {
    let n = m.leaf_count();
    if n < 2 {
        return Err(SpaceError::WrongArity { expected: "n ≥ 2".into(), got: n });
    }
    if ext.0.len() != n + 1 {
        return Err(SpaceError::InvalidLengths(format!("need {} external lengths, got {}", n + 1, ext.0.len())));
    }
    ExternalLengths::new(ext.0.clone())?;
    let t = m.phylo();
    Ok(t.map_lengths(|e, l| match (t.tree().target(e), t.tree().source(e)) {
        (Target::Root, _) => ext.0[0],
        (_, Source::Leaf(k)) => ext.0[k],
        _ => *l,
    })?)
}

/// Inverse of [`decompose1`].
pub fn recompose1(length: f64) -> Result<PhyloTree, SpaceError> {
    Ok(PhyloTree::edge(length)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_round_trip_through_shapes() {
        let splits = vec![(vec![1, 2], 0.5), (vec![1, 2, 3], 1.5)];
        let m = MetricTree::from_splits(5, splits.clone()).unwrap();
        assert_eq!(m.splits(), &splits[..]);
        assert!(!m.is_binary());
        assert!(MetricTree::from_splits(4, vec![(vec![1, 2], 1.0), (vec![2, 3], 1.0)]).is_err());
        assert!(MetricTree::from_splits(4, vec![(vec![1, 2, 3, 4], 1.0)]).is_err());
        assert!(MetricTree::from_splits(4, vec![(vec![1, 2], 0.0)]).is_err());
    }

    #[test]
    fn decompose_extracts_external_lengths() {
        let t = tree_from_splits(3, &[(vec![1, 3], 2.0)], &[0.5, 1.0, 0.0, 0.25]).unwrap();
        let (m, ext) = decompose(&t).unwrap();
        assert_eq!(ext.values(), &[0.5, 1.0, 0.0, 0.25]);
        assert_eq!(m.splits(), &[(vec![1, 3], 2.0)]);
        assert_eq!(recompose(&m, &ext).unwrap(), t);
        assert!(matches!(decompose(&PhyloTree::identity()), Err(SpaceError::WrongArity { .. })));
    }

    #[test]
    fn one_leaf_trees() {
        let t = PhyloTree::edge(2.5).unwrap();
        let (m, l) = decompose1(&t).unwrap();
        assert_eq!(m, MetricTree::unit());
        assert_eq!(l, 2.5);
        assert_eq!(recompose1(l).unwrap(), t);
    }
}
