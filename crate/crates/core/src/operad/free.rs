//! The free operad on a collection: operations are `C`-trees, composition
//! is grafting, and the counit evaluates a `U(O)`-tree in `O`.

use std::fmt::Debug;

use super::{check_index, check_perm, Operad, OperadError};
use crate::perm::Permutation;
use crate::tree::{EdgeId, LabelledTree, Mode, PlanarTree, Source, VertexId};

/// Arity-graded sets of operation labels with decidable equality.
pub trait Collection {
    type Label: Clone + PartialEq + Debug;

    fn arity(&self, label: &Self::Label) -> usize;
    fn encode(&self, label: &Self::Label) -> String;
}

/// A named generator of a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// The collection of all [`Symbol`]s.
#[derive(Debug, Clone, Copy, Default)]
pub struct Symbols;

impl Collection for Symbols {
    type Label = Symbol;

    fn arity(&self, label: &Symbol) -> usize {
        label.arity
    }

    fn encode(&self, label: &Symbol) -> String {
        format!("{}/{}", label.name, label.arity)
    }
}

/// The underlying collection `U(O)` of an operad.
#[derive(Debug, Clone, Copy, Default)]
pub struct Underlying<O>(pub O);

impl<O: Operad> Collection for Underlying<O> {
    type Label = O::Op;

    fn arity(&self, label: &O::Op) -> usize {
        self.0.arity(label)
    }

    fn encode(&self, label: &O::Op) -> String {
        self.0.encode(label)
    }
}

/// An isomorphism class of `C`-labelled planar trees, stored as its
/// canonical planar representative.
#[derive(Debug, Clone, PartialEq)]
pub struct CTree<L> {
    tree: LabelledTree<L, ()>,
}

impl<L: Clone + PartialEq + Debug> CTree<L> {
    pub fn new<C: Collection<Label = L>>(c: &C, tree: LabelledTree<L, ()>) -> Result<Self, OperadError> {
        for v in tree.tree().rooted().vertices() {
            let vertex_arity = tree.tree().arity(v)?;
            let label_arity = c.arity(tree.vlabel(v));
            if vertex_arity != label_arity {
                return Err(OperadError::ArityLabelMismatch {
                    vertex: v.0,
                    vertex_arity,
                    label_arity,
                });
            }
        }
        Ok(CTree {
            tree: tree.representative(Mode::Planar, |l| c.encode(l), |_| String::new()),
        })
    }

    /// The tree with no vertices.
    pub fn identity() -> Self {
        CTree {
            tree: LabelledTree::from_fn(PlanarTree::unit(), |_| unreachable!(), |_| ()),
        }
    }

    /// The corolla labelled `label`, leaves in order `1..=k`.
    pub fn corolla<C: Collection<Label = L>>(c: &C, label: L) -> Self {
        let k = c.arity(&label);
        let t = LabelledTree::from_fn(PlanarTree::corolla(k), |_| label.clone(), |_| ());
        CTree {
            tree: t.representative(Mode::Planar, |l| c.encode(l), |_| String::new()),
        }
    }

    pub fn labelled(&self) -> &LabelledTree<L, ()> {
        &self.tree
    }

    pub fn tree(&self) -> &PlanarTree {
        self.tree.tree()
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    pub fn compose<C: Collection<Label = L>>(&self, c: &C, i: usize, inner: &Self) -> Result<Self, OperadError> {
        check_index(i, self.leaf_count())?;
        let (g, _) = self.tree.graft(i, &inner.tree, |_, _| ())?;
        Ok(CTree {
            tree: g.representative(Mode::Planar, |l| c.encode(l), |_| String::new()),
        })
    }

    pub fn act<C: Collection<Label = L>>(&self, c: &C, sigma: &Permutation) -> Result<Self, OperadError> {
        check_perm(self.leaf_count(), sigma)?;
        Ok(CTree {
            tree: self
                .tree
                .permute_leaves(sigma)?
                .representative(Mode::Planar, |l| c.encode(l), |_| String::new()),
        })
    }

    pub fn encode<C: Collection<Label = L>>(&self, c: &C) -> String {
        self.tree
            .canonical_form(Mode::Planar, |l| c.encode(l), |_| String::new())
            .encoding
    }
}

/// The free operad `F(C)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeOperad<C> {
    pub collection: C,
}

impl<C: Collection> Operad for FreeOperad<C> {
    type Op = CTree<C::Label>;

    fn arity(&self, f: &Self::Op) -> usize {
        f.leaf_count()
    }

    fn identity(&self) -> Self::Op {
        CTree::identity()
    }

    fn compose(&self, f: &Self::Op, i: usize, g: &Self::Op) -> Result<Self::Op, OperadError> {
        f.compose(&self.collection, i, g)
    }

    fn act(&self, f: &Self::Op, sigma: &Permutation) -> Result<Self::Op, OperadError> {
        f.act(&self.collection, sigma)
    }

    fn encode(&self, f: &Self::Op) -> String {
        f.encode(&self.collection)
    }
}

/// Evaluates a `U(O)`-tree by contracting its internal edges top-down.
pub fn counit_eval<O: Operad>(o: &O, t: &CTree<O::Op>) -> Result<O::Op, OperadError> {
    let order: Vec<EdgeId> = t
        .tree()
        .preorder()
        .into_iter()
        .filter(|&e| t.tree().rooted().is_internal(e))
        .collect();
    counit_eval_in_order(o, t, &order)
}

/// Evaluates a `U(O)`-tree contracting internal edges in the given order
/// (edge ids of `t`, each internal edge exactly once).
pub fn counit_eval_in_order<O: Operad>(o: &O, t: &CTree<O::Op>, order: &[EdgeId]) -> Result<O::Op, OperadError> {
    let lt = t.labelled();
    for v in lt.tree().rooted().vertices() {
        let vertex_arity = lt.tree().arity(v)?;
        let label_arity = o.arity(lt.vlabel(v));
        if vertex_arity != label_arity {
            return Err(OperadError::ArityLabelMismatch {
                vertex: v.0,
                vertex_arity,
                label_arity,
            });
        }
    }
    let mut want = lt.tree().rooted().internal_edges();
    let mut got = order.to_vec();
    want.sort();
    got.sort();
    if want != got {
        return Err(OperadError::MalformedLabelling(
            "contraction order must list every internal edge once".into(),
        ));
    }
    let mut failure = None;
    let contracted = lt.contract_edges(order, |f, i, g| match o.compose(f, i, g) {
        Ok(h) => h,
        Err(err) => {
            failure.get_or_insert(err);
            f.clone()
        }
    })?;
    if let Some(err) = failure {
        return Err(err);
    }
    let tree = contracted.tree();
    if tree.vertex_count() == 0 {
        return Ok(o.identity());
    }
    let h = contracted.vlabel(VertexId(0));
    // A corolla whose leaves read (k_1, …, k_n) left to right is the standard
    // corolla acted on by σ with σ(k_p) = p.
    let mut images = vec![0; tree.leaf_count()];
    for (p, &e) in tree.children(VertexId(0)).iter().enumerate() {
        match tree.source(e) {
            Source::Leaf(k) => images[k - 1] = p + 1,
            Source::Vertex(_) => unreachable!("all internal edges were contracted"),
        }
    }
    let sigma = Permutation::from_images(images).expect("leaf labels form a permutation");
    o.act(h, &sigma)
}

/// Whether two `U(O)`-trees have the same counit value.
pub fn counit_equivalent<O: Operad>(o: &O, a: &CTree<O::Op>, b: &CTree<O::Op>) -> Result<bool, OperadError> {
    if a.leaf_count() != b.leaf_count() {
        return Ok(false);
    }
    Ok(counit_eval(o, a)? == counit_eval(o, b)?)
}

#[cfg(test)]
mod tests {
    use super::super::{Assoc, Com, HalfLine};
    use super::*;
    use crate::tree::Shape;

    fn leaf(k: usize) -> Shape {
        Shape::Leaf(k)
    }

    fn assoc_tree(shape: &Shape) -> CTree<Vec<usize>> {
        let t = PlanarTree::from_shape(shape).unwrap();
        let lt = LabelledTree::from_fn(
            t.clone(),
            |v| (1..=t.arity(v).unwrap()).collect(),
            |_| (),
        );
        CTree::new(&Underlying(Assoc), lt).unwrap()
    }

    #[test]
    fn corolla_maps_to_its_label() {
        let c = Underlying(Com::default());
        assert_eq!(counit_eval(&Com::default(), &CTree::corolla(&c, 4)).unwrap(), 4);
        let w = vec![3, 1, 2];
        assert_eq!(counit_eval(&Assoc, &CTree::corolla(&Underlying(Assoc), w.clone())).unwrap(), w);
        assert_eq!(counit_eval(&Assoc, &CTree::identity()).unwrap(), vec![1]);
    }

    #[test]
    fn assoc_counit_reads_leaf_order() {
        let shape = Shape::node([
            Shape::node([leaf(4), leaf(2)]),
            leaf(1),
            Shape::node([leaf(5), Shape::node([leaf(3), leaf(6)])]),
        ]);
        let t = assoc_tree(&shape);
        assert_eq!(counit_eval(&Assoc, &t).unwrap(), t.tree().leaf_order());
    }

    #[test]
    fn unary_path_in_half_line_sums() {
        let t = PlanarTree::from_shape(&Shape::node([Shape::node([leaf(1)])])).unwrap();
        let mut labels = vec![1.5, 2.5].into_iter();
        let lt = LabelledTree::from_fn(t, |_| labels.next().unwrap(), |_| ());
        let ct = CTree::new(&Underlying(HalfLine::new()), lt).unwrap();
        assert_eq!(counit_eval(&HalfLine::new(), &ct).unwrap(), 4.0);
    }

    #[test]
    fn three_level_tree_evaluates_to_full_composite() {
        // root f with children g1, g2, g3 each of arity 2, in Assoc.
        let f = vec![2, 3, 1];
        let g = [vec![1, 2], vec![2, 1], vec![1, 2]];
        let t = PlanarTree::from_shape(&Shape::node([
            Shape::node([leaf(1), leaf(2)]),
            Shape::node([leaf(3), leaf(4)]),
            Shape::node([leaf(5), leaf(6)]),
        ]))
        .unwrap();
        let mut labels = vec![f.clone(), g[0].clone(), g[1].clone(), g[2].clone()].into_iter();
        let lt = LabelledTree::from_fn(t, |_| labels.next().unwrap(), |_| ());
        let ct = CTree::new(&Underlying(Assoc), lt).unwrap();
        // f ∘ (g1, g2, g3) = ((f ∘_3 g3) ∘_2 g2) ∘_1 g1
        let mut expected = Assoc.compose(&f, 3, &g[2]).unwrap();
        expected = Assoc.compose(&expected, 2, &g[1]).unwrap();
        expected = Assoc.compose(&expected, 1, &g[0]).unwrap();
        assert_eq!(counit_eval(&Assoc, &ct).unwrap(), expected);
        // Free composition keeps all three levels.
        let free = FreeOperad { collection: Underlying(Assoc) };
        let mut composed = CTree::corolla(&free.collection, f.clone());
        for (i, gi) in g.iter().enumerate().rev() {
            composed = free
                .compose(&composed, i + 1, &CTree::corolla(&free.collection, gi.clone()))
                .unwrap();
        }
        assert_eq!(composed, ct);
        assert_eq!(composed.tree().vertex_count(), 4);
    }

    #[test]
    fn arity_mismatch_rejected() {
        let lt = LabelledTree::from_fn(PlanarTree::corolla(3), |_| 2usize, |_| ());
        assert!(matches!(
            CTree::new(&Underlying(Com::default()), lt),
            Err(OperadError::ArityLabelMismatch { .. })
        ));
    }

    #[test]
    fn identity_vertex_and_symmetry_moves_preserve_value() {
        let shape = Shape::node([Shape::node([leaf(3), leaf(1)]), leaf(2)]);
        let t = assoc_tree(&shape);
        // insert an identity-labelled unary vertex on every edge in turn
        for e in 0..t.tree().edge_count() {
            let (s, _) = t.labelled().subdivide_edge(EdgeId(e), vec![1], |_| ((), ())).unwrap();
            let s = CTree::new(&Underlying(Assoc), s).unwrap();
            assert!(counit_equivalent(&Assoc, &t, &s).unwrap());
        }
        // relabel the root vertex by f·σ and permute its children by σ
        let sigma = Permutation::from_images(vec![2, 1]).unwrap();
        let root = VertexId(0);
        let f = t.labelled().vlabel(root).clone();
        let mut moved = t.labelled().permute_children(root, &sigma).unwrap();
        let fs = Assoc.act(&f, &sigma).unwrap();
        moved.set_vlabel(root, fs);
        let moved = CTree::new(&Underlying(Assoc), moved).unwrap();
        assert_ne!(moved, t);
        assert!(counit_equivalent(&Assoc, &t, &moved).unwrap());
    }
}
