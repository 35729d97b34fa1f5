//! Normal forms of trees labelled by `Com ⊔ [0,∞)`.
//!
//! A mixed tree has two kinds of vertex: `Com` vertices of any positive
//! arity and unary `Len(ℓ)` vertices. Four moves shrink it, each removing
//! one vertex:
//!
//! * `MergeCom`: contract an edge between two `Com` vertices;
//! * `MergeLen`: contract an edge between two `Len` vertices, adding lengths;
//! * `DropUnaryCom`: remove a unary `Com` vertex (the identity of `Com`);
//! * `DropZeroLen`: remove a `Len(0)` vertex (the identity of `[0,∞)`).
//!
//! A tree with no redex corresponds to exactly one phylogenetic tree: `Com`
//! vertices are its vertices and a `Len` vertex on an edge gives that edge
//! its length (no `Len` vertex means length 0).
//!
//! Lengths are carried as multisets of summands and totalled with a
//! correctly rounded sum, so the normal form does not depend on the order
//! in which `MergeLen` moves happen.

use rand::seq::IndexedRandom;
use rand::RngCore;

use super::phylo::PhyloTree;
use super::OperadError;
use crate::length::EdgeLength;
use crate::numeric::{encode_f64, fsum};
use crate::tree::{CanonicalForm, EdgeId, LabelledTree, Mode, PlanarTree, Shape, Source, Target, VertexId};

#[derive(Debug, Clone, PartialEq)]
pub enum MixedLabel {
    Com,
    Len(f64),
}

pub type MixedTree = LabelledTree<MixedLabel, ()>;

/// Nested description of a mixed tree.
#[derive(Debug, Clone, PartialEq)]
pub enum MixedNode {
    Leaf(usize),
    Com(Vec<MixedNode>),
    Len(f64, Box<MixedNode>),
}

impl MixedNode {
    pub fn len(length: f64, child: MixedNode) -> Self {
        MixedNode::Len(length, Box::new(child))
    }

    pub fn to_tree(&self) -> Result<MixedTree, OperadError> {
        let mut labels = Vec::new();
        let shape = self.shape(&mut labels);
        let t = PlanarTree::from_shape(&shape)?;
        let ec = t.edge_count();
        Ok(LabelledTree::new(t, labels, vec![(); ec])?)
    }

    // Vertices of `from_shape` are numbered in preorder, matching `labels`.
    fn shape(&self, labels: &mut Vec<MixedLabel>) -> Shape {
        match self {
            MixedNode::Leaf(k) => Shape::Leaf(*k),
            MixedNode::Com(kids) => {
                labels.push(MixedLabel::Com);
                Shape::Node(kids.iter().map(|k| k.shape(labels)).collect())
            }
            MixedNode::Len(l, kid) => {
                labels.push(MixedLabel::Len(*l));
                Shape::Node(vec![kid.shape(labels)])
            }
        }
    }

    pub fn from_tree(t: &MixedTree) -> Self {
        Self::from_edge(t, t.tree().root_edge())
    }

    fn from_edge(t: &MixedTree, e: EdgeId) -> Self {
        match t.tree().source(e) {
            Source::Leaf(k) => MixedNode::Leaf(k),
            Source::Vertex(v) => {
                let kids = t.tree().children(v);
                match t.vlabel(v) {
                    MixedLabel::Com => MixedNode::Com(kids.iter().map(|&c| Self::from_edge(t, c)).collect()),
                    MixedLabel::Len(l) => MixedNode::len(*l, Self::from_edge(t, kids[0])),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    MergeCom,
    MergeLen,
    DropUnaryCom,
    DropZeroLen,
}

/// How the next redex is chosen.
pub enum MoveOrder<'a> {
    /// The first redex met scanning edges from the leaves towards the root.
    BottomUp,
    /// A uniformly random redex.
    Random(&'a mut dyn RngCore),
}

#[derive(Debug, Clone)]
pub struct Reduction {
    /// The normal form, as its canonical unordered representative.
    pub tree: MixedTree,
    pub moves: Vec<MoveKind>,
}

#[derive(Debug, Clone, PartialEq)]
enum Work {
    Com,
    Len(Vec<f64>),
}

#[derive(Debug, Clone, Copy)]
enum Redex {
    Contract(EdgeId, MoveKind),
    Dissolve(VertexId, MoveKind),
}

fn check_mixed(t: &MixedTree) -> Result<(), OperadError> {
    for v in t.tree().rooted().vertices() {
        let k = t.tree().arity(v)?;
        match t.vlabel(v) {
            MixedLabel::Com if k == 0 => {
                return Err(OperadError::MalformedLabelling(format!(
                    "Com vertex {} has arity 0",
                    v.0
                )))
            }
            MixedLabel::Com => {}
            MixedLabel::Len(l) => {
                if k != 1 {
                    return Err(OperadError::MalformedLabelling(format!(
                        "length vertex {} has arity {k}",
                        v.0
                    )));
                }
                l.check().map_err(OperadError::MalformedLabelling)?;
            }
        }
    }
    Ok(())
}

fn redexes(t: &LabelledTree<Work, ()>, first_only: bool) -> Vec<Redex> {
    let tree = t.tree();
    let mut out = Vec::new();
    for e in tree.preorder().into_iter().rev() {
        let Source::Vertex(v) = tree.source(e) else {
            continue;
        };
        let unary = tree.children(v).len() == 1;
        match t.vlabel(v) {
            Work::Com if unary => out.push(Redex::Dissolve(v, MoveKind::DropUnaryCom)),
            Work::Len(s) if fsum(s.iter().copied()) == 0.0 => out.push(Redex::Dissolve(v, MoveKind::DropZeroLen)),
            _ => {}
        }
        if let Target::Vertex(p) = tree.target(e) {
            match (t.vlabel(p), t.vlabel(v)) {
                (Work::Com, Work::Com) => out.push(Redex::Contract(e, MoveKind::MergeCom)),
                (Work::Len(_), Work::Len(_)) => out.push(Redex::Contract(e, MoveKind::MergeLen)),
                _ => {}
            }
        }
        if first_only && !out.is_empty() {
            break;
        }
    }
    out
}

fn apply(t: &LabelledTree<Work, ()>, r: Redex) -> Result<LabelledTree<Work, ()>, OperadError> {
    Ok(match r {
        Redex::Contract(e, _) => {
            t.contract_edge(e, |p, _, c| match (p, c) {
                (Work::Len(a), Work::Len(b)) => {
                    let mut s = a.clone();
                    s.extend(b.iter().copied());
                    Work::Len(s)
                }
                _ => Work::Com,
            })?
            .0
        }
        Redex::Dissolve(v, _) => t.dissolve_unary(v, |_, _| ())?.0,
    })
}

fn kind(r: &Redex) -> MoveKind {
    match r {
        Redex::Contract(_, k) | Redex::Dissolve(_, k) => *k,
    }
}

/// Reduces with the default bottom-up strategy.
pub fn reduce_coproduct_tree(t: &MixedTree) -> Result<Reduction, OperadError> {
    reduce_with_order(t, MoveOrder::BottomUp)
}

/// Reduces choosing redexes as `order` dictates. Every move removes a
/// vertex, so at most `|V|` moves are made.
pub fn reduce_with_order(t: &MixedTree, mut order: MoveOrder<'_>) -> Result<Reduction, OperadError> {
    check_mixed(t)?;
    let bound = t.tree().vertex_count();
    let mut work = t.map(
        |l| match l {
            MixedLabel::Com => Work::Com,
            MixedLabel::Len(x) => Work::Len(vec![x.normalized()]),
        },
        |_| (),
    );
    let mut moves = Vec::new();
    loop {
        let next = match &mut order {
            MoveOrder::BottomUp => redexes(&work, true).first().copied(),
            MoveOrder::Random(rng) => redexes(&work, false).choose(rng).copied(),
        };
        let Some(r) = next else { break };
        let before = work.tree().vertex_count();
        work = apply(&work, r)?;
        assert_eq!(work.tree().vertex_count() + 1, before, "each move removes one vertex");
        moves.push(kind(&r));
        assert!(moves.len() <= bound, "reduction exceeded its step bound");
    }
    let tree = work.map(
        |l| match l {
            Work::Com => MixedLabel::Com,
            Work::Len(s) => MixedLabel::Len(fsum(s.iter().copied())),
        },
        |_| (),
    );
    Ok(Reduction {
        tree: canonical_mixed(&tree),
        moves,
    })
}

fn encode_label(l: &MixedLabel) -> String {
    match l {
        MixedLabel::Com => "C".into(),
        MixedLabel::Len(x) => format!("L{}", encode_f64(*x)),
    }
}

fn canonical_mixed(t: &MixedTree) -> MixedTree {
    t.representative(Mode::Unordered, encode_label, |_| String::new())
}

/// Canonical form of a mixed tree up to isomorphism.
pub fn mixed_form(t: &MixedTree) -> CanonicalForm {
    t.canonical_form(Mode::Unordered, encode_label, |_| String::new())
}

/// Converts a reduced mixed tree to the phylogenetic tree it encodes.
pub fn to_phylo(t: &MixedTree) -> Result<PhyloTree, OperadError> {
    check_mixed(t)?;
    let work = t.map(
        |l| match l {
            MixedLabel::Com => Work::Com,
            MixedLabel::Len(x) => Work::Len(vec![*x]),
        },
        |_| (),
    );
    if let Some(r) = redexes(&work, true).first() {
        return Err(OperadError::NotReduced(format!("{:?} applies", kind(r))));
    }
    let mut lengths: LabelledTree<Option<f64>, f64> = t.map(
        |l| match l {
            MixedLabel::Com => None,
            MixedLabel::Len(x) => Some(*x),
        },
        |_| 0.0,
    );
    for v in lengths.tree().rooted().vertices() {
        if let Some(x) = lengths.vlabel(v) {
            let e = lengths.tree().rooted().out_edge(v);
            lengths.set_elabel(e, *x);
        }
    }
    while let Some(v) = lengths.tree().rooted().vertices().find(|&v| lengths.vlabel(v).is_some()) {
        lengths = lengths.dissolve_unary(v, |below, above| below + above)?.0;
    }
    PhyloTree::new(lengths.map(|_| (), |l| *l))
}

/// The reduced mixed tree encoding `p`.
pub fn from_phylo(p: &PhyloTree) -> Result<MixedTree, OperadError> {
    let mut t: MixedTree = p.labelled().map(|_| MixedLabel::Com, |_| ());
    for e in p.tree().rooted().edges() {
        let l = *p.length(e);
        if l != 0.0 {
            t = t.subdivide_edge(e, MixedLabel::Len(l), |_| ((), ()))?.0;
        }
    }
    Ok(canonical_mixed(&t))
}
