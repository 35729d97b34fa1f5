//! Phylogenetic trees as operations of `Phyl = Com + [0,∞)`.

use super::{check_index, check_perm, Operad, OperadError};
use crate::length::{EdgeLength, ExtendedLength};
use crate::perm::Permutation;
use crate::tree::{CanonicalForm, EdgeId, LabelledTree, Mode, PlanarTree, Source, Target, VertexId};

/// An isomorphism class of phylogenetic `n`-trees: no vertex of arity 0 or
/// 1, every internal edge of nonzero length. The stored tree is the
/// canonical unordered representative, so `==` is equality in `Phyl_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree<L = f64> {
    tree: LabelledTree<(), L>,
}

/// Phylogenetic trees whose lengths may be `∞`, i.e. operations of
/// `Com + [0,∞]`.
pub type ExtendedPhyloTree = PhyloTree<ExtendedLength>;

impl<L: EdgeLength> PhyloTree<L> {
    /// Validates and canonicalizes.
    pub fn new(tree: LabelledTree<(), L>) -> Result<Self, OperadError> {
        let t = tree.tree();
        for v in t.rooted().vertices() {
            let k = t.arity(v)?;
            if k < 2 {
                return Err(OperadError::PhyloInvariant(format!("vertex of arity {k}")));
            }
        }
        for e in t.rooted().edges() {
            let l = tree.elabel(e);
            l.check().map_err(OperadError::PhyloInvariant)?;
            if t.rooted().is_internal(e) && l.is_zero() {
                return Err(OperadError::PhyloInvariant("internal edge of length 0".into()));
            }
        }
        let normalized = tree.map(|_| (), |l| l.normalized());
        Ok(PhyloTree {
            tree: normalized.representative(Mode::Unordered, |_| String::new(), |l| l.encode()),
        })
    }

    /// Builds from a planar tree and edge lengths indexed by edge id.
    pub fn from_lengths(tree: PlanarTree, lengths: Vec<L>) -> Result<Self, OperadError> {
        let vc = tree.vertex_count();
        Self::new(LabelledTree::new(tree, vec![(); vc], lengths)?)
    }

    /// The single-edge 1-tree of the given length.
    pub fn edge(length: L) -> Result<Self, OperadError> {
        Self::from_lengths(PlanarTree::unit(), vec![length])
    }

    /// The identity operation: one edge of length 0.
    pub fn identity() -> Self {
        Self::edge(L::zero()).expect("zero is a valid length")
    }

    /// The `n`-corolla with the given root length and leaf lengths `1..=n`.
    pub fn corolla(root: L, leaves: Vec<L>) -> Result<Self, OperadError> {
        let n = leaves.len();
        let mut lengths = leaves;
        lengths.push(root);
        Self::from_lengths(PlanarTree::corolla(n), lengths)
    }

    pub fn labelled(&self) -> &LabelledTree<(), L> {
        &self.tree
    }

    pub fn tree(&self) -> &PlanarTree {
        self.tree.tree()
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    pub fn length(&self, e: EdgeId) -> &L {
        self.tree.elabel(e)
    }

    pub fn root_length(&self) -> &L {
        self.tree.root_edge_label()
    }

    /// Length of the edge at leaf `k` (one-based).
    pub fn leaf_length(&self, k: usize) -> Result<&L, OperadError> {
        let e = self.tree().rooted().leaf_edge(k)?;
        Ok(self.tree.elabel(e))
    }

    pub fn internal_edges(&self) -> Vec<EdgeId> {
        self.tree().rooted().internal_edges()
    }

    pub fn is_identity(&self) -> bool {
        self.tree().vertex_count() == 0 && self.root_length().is_zero()
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.tree
            .canonical_form(Mode::Unordered, |_| String::new(), |l| l.encode())
    }

    /// `self ∘_i inner`: graft, add the two lengths on the identified edge,
    /// and merge its endpoints if it became an internal edge of length 0.
    pub fn compose(&self, i: usize, inner: &Self) -> Result<Self, OperadError> {
        check_index(i, self.leaf_count())?;
        let (g, map) = self.tree.graft(i, &inner.tree, |a, b| a.combine(b))?;
        let x = map.identified;
        let g = if g.tree().rooted().is_internal(x) && g.elabel(x).is_zero() {
            g.contract_edge(x, |_, _, _| ())?.0
        } else {
            g
        };
        Self::new(g)
    }

    /// Right action: leaf `k` is relabelled `σ⁻¹(k)`.
    pub fn act(&self, sigma: &Permutation) -> Result<Self, OperadError> {
        check_perm(self.leaf_count(), sigma)?;
        Self::new(self.tree.permute_leaves(sigma)?)
    }

    /// Applies `f` to every edge length, keeping the shape.
    pub fn map_lengths<M: EdgeLength>(&self, mut f: impl FnMut(EdgeId, &L) -> M) -> Result<PhyloTree<M>, OperadError> {
        let t: Result<LabelledTree<(), M>, OperadError> = self.tree.try_map(|_, _| Ok(()), |e, l| Ok(f(e, l)));
        PhyloTree::new(t?)
    }

    /// Vertices in preorder, with the edge each one sits on.
    pub fn vertices_with_out_edge(&self) -> Vec<(VertexId, EdgeId)> {
        self.tree()
            .preorder()
            .into_iter()
            .filter_map(|e| match self.tree().source(e) {
                Source::Vertex(v) => Some((v, e)),
                Source::Leaf(_) => None,
            })
            .collect()
    }

    /// Sets of leaves above each internal edge, one per internal edge.
    pub fn internal_clusters(&self) -> Vec<(Vec<usize>, &L)> {
        let t = self.tree();
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); t.edge_count()];
        for e in t.preorder().into_iter().rev() {
            let leaves = match t.source(e) {
                Source::Leaf(k) => vec![k],
                Source::Vertex(v) => {
                    let mut all: Vec<usize> = t.children(v).iter().flat_map(|c| below[c.0].clone()).collect();
                    all.sort_unstable();
                    all
                }
            };
            below[e.0] = leaves;
        }
        t.rooted()
            .internal_edges()
            .into_iter()
            .map(|e| (below[e.0].clone(), self.tree.elabel(e)))
            .collect()
    }

    /// Edges whose target is the root or whose source is a leaf.
    pub fn external_edges(&self) -> Vec<EdgeId> {
        self.tree()
            .rooted()
            .edges()
            .filter(|&e| {
                self.tree().target(e) == Target::Root || matches!(self.tree().source(e), Source::Leaf(_))
            })
            .collect()
    }
}

/// The phylogenetic operad.
#[derive(Debug, Clone, Copy, Default)]
pub struct Phyl;

impl Operad for Phyl {
    type Op = PhyloTree<f64>;

    fn arity(&self, f: &PhyloTree) -> usize {
        f.leaf_count()
    }

    fn identity(&self) -> PhyloTree {
        PhyloTree::identity()
    }

    fn compose(&self, f: &PhyloTree, i: usize, g: &PhyloTree) -> Result<PhyloTree, OperadError> {
        f.compose(i, g)
    }

    fn act(&self, f: &PhyloTree, sigma: &Permutation) -> Result<PhyloTree, OperadError> {
        f.act(sigma)
    }

    fn encode(&self, f: &PhyloTree) -> String {
        f.canonical_form().encoding
    }
}
