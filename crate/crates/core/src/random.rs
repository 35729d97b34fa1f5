//! Random generators for trees and models, used by tests, the acceptance
//! suite and the CLI.
//!
//! Lengths drawn by [`dyadic_length`] are multiples of 1/8 below 4, so sums
//! of a few of them are exact in binary floating point. That keeps the
//! operad laws checkable with exact equality.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::operad::{MixedNode, MixedTree, PhyloTree};
use crate::tree::{PlanarTree, Shape};

/// A multiple of 1/8 in `[lo/8, hi/8]`.
pub fn dyadic_length<R: Rng + ?Sized>(rng: &mut R, lo: u32, hi: u32) -> f64 {
    rng.random_range(lo..=hi) as f64 / 8.0
}

/// A random planar shape on leaves `1..=n` with every vertex of arity
/// between 2 and `max_arity`. For `n = 1` this is a bare leaf.
pub fn random_shape<R: Rng + ?Sized>(rng: &mut R, n: usize, max_arity: usize) -> Shape {
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    split(rng, &labels, max_arity.max(2))
}

fn split<R: Rng + ?Sized>(rng: &mut R, labels: &[usize], max_arity: usize) -> Shape {
    if labels.len() == 1 {
        return Shape::Leaf(labels[0]);
    }
    let k = rng.random_range(2..=max_arity.min(labels.len()));
    let mut cuts: Vec<usize> = (1..labels.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut kids = Vec::with_capacity(k);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(labels.len())) {
        kids.push(split(rng, &labels[start..c], max_arity));
        start = c;
    }
    Shape::Node(kids)
}

/// A random binary shape on leaves `1..=n`.
pub fn random_binary_shape<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Shape {
    random_shape(rng, n, 2)
}

/// A random phylogenetic tree with `n ≥ 1` leaves and dyadic lengths.
/// External edges have length 0 with probability `zero_external`.
pub fn random_phylo<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_external: f64) -> PhyloTree {
    let shape = random_shape(rng, n, 4);
    phylo_on_shape(rng, &shape, zero_external)
}

/// Dyadic lengths on a given shape.
pub fn phylo_on_shape<R: Rng + ?Sized>(rng: &mut R, shape: &Shape, zero_external: f64) -> PhyloTree {
    let t = PlanarTree::from_shape(shape).expect("generated shapes are valid");
    let lengths = t
        .rooted()
        .edges()
        .map(|e| {
            if t.rooted().is_internal(e) {
                dyadic_length(rng, 1, 24)
            } else if rng.random_bool(zero_external) {
                0.0
            } else {
                dyadic_length(rng, 1, 24)
            }
        })
        .collect();
    PhyloTree::from_lengths(t, lengths).expect("generated lengths are valid")
}

/// A random binary phylogenetic tree whose external lengths are all 0.
pub fn random_metric_binary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PhyloTree {
    let shape = random_binary_shape(rng, n);
    phylo_on_shape(rng, &shape, 1.0)
}

/// A random `Com ⊔ [0,∞)` tree on `n` leaves with unary `Com` vertices,
/// chains of length vertices (some of length 0) and `Com`–`Com` edges.
/// Lengths are arbitrary floats, not only dyadic ones.
pub fn random_mixed<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MixedTree {
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    mixed_node(rng, &labels)
        .to_tree()
        .expect("generated mixed trees are valid")
}

fn mixed_length<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.random_range(0..4) {
        0 => 0.0,
        1 => dyadic_length(rng, 1, 16),
        _ => rng.random_range(0.0..3.0),
    }
}

fn mixed_node<R: Rng + ?Sized>(rng: &mut R, labels: &[usize]) -> MixedNode {
    let mut node = if labels.len() == 1 {
        MixedNode::Leaf(labels[0])
    } else {
        let k = rng.random_range(1..=3.min(labels.len()));
        let k = if k == 1 { 2 } else { k };
        let mut cuts: Vec<usize> = (1..labels.len()).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
        cuts.sort_unstable();
        let mut kids = Vec::with_capacity(k);
        let mut start = 0;
        for c in cuts.into_iter().chain(std::iter::once(labels.len())) {
            kids.push(mixed_node(rng, &labels[start..c]));
            start = c;
        }
        MixedNode::Com(kids)
    };
    for _ in 0..rng.random_range(0..4) {
        node = if rng.random_bool(0.3) {
            MixedNode::Com(vec![node])
        } else {
            MixedNode::len(mixed_length(rng), node)
        };
    }
    node
}
