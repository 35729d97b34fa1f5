use std::collections::BTreeSet;

use super::labelled::LabelledTree;
use super::{EdgeId, PlanarTree, Source, Target, TreeError, VertexId};

/// A subtree of a planar tree: a connected set of vertices `V_S` together
/// with every edge ending in `V_S` and the single edge `e₀` leaving it.
///
/// The closure condition is `e ∈ E_S ⟺ t(e) ∈ V_S or e = e₀ ⟺ s(e) ∈ V_S ⊔ in_S`.
/// When `V_S` is empty the subtree is a single edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subtree {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<EdgeId>,
    inputs: Vec<Source>,
    root: Target,
    root_edge: EdgeId,
}

impl Subtree {
    /// The subtree determined by a nonempty connected vertex set.
    pub fn spanned_by(tree: &PlanarTree, vertices: &[VertexId]) -> Result<Self, TreeError> {
        if vertices.is_empty() {
            return Err(TreeError::InvalidSubtree("empty vertex set".into()));
        }
        let set: BTreeSet<VertexId> = vertices.iter().copied().collect();
        for v in &set {
            if v.0 >= tree.vertex_count() {
                return Err(TreeError::UnknownVertex(v.0));
            }
        }
        let tops: Vec<VertexId> = set
            .iter()
            .copied()
            .filter(|&v| match tree.target(tree.rooted().out_edge(v)) {
                Target::Vertex(p) => !set.contains(&p),
                Target::Root => true,
            })
            .collect();
        if tops.len() != 1 {
            return Err(TreeError::InvalidSubtree(format!(
                "vertex set has {} top vertices",
                tops.len()
            )));
        }
        let root_edge = tree.rooted().out_edge(tops[0]);
        let mut edges = BTreeSet::new();
        edges.insert(root_edge);
        let mut inputs = Vec::new();
        for &v in &set {
            for &c in tree.children(v) {
                edges.insert(c);
                match tree.source(c) {
                    Source::Vertex(u) if set.contains(&u) => {}
                    s => inputs.push(s),
                }
            }
        }
        Ok(Subtree {
            vertices: set,
            edges,
            inputs,
            root: tree.target(root_edge),
            root_edge,
        })
    }

    /// The trivial subtree consisting of the edge `e` alone.
    pub fn edge(tree: &PlanarTree, e: EdgeId) -> Result<Self, TreeError> {
        if e.0 >= tree.edge_count() {
            return Err(TreeError::UnknownEdge(e.0));
        }
        Ok(Subtree {
            vertices: BTreeSet::new(),
            edges: [e].into_iter().collect(),
            inputs: vec![tree.source(e)],
            root: tree.target(e),
            root_edge: e,
        })
    }

    /// The subtree consisting of all vertices above `e` (the full subtree
    /// ending in `e`); a leaf edge gives the trivial subtree.
    pub fn above(tree: &PlanarTree, e: EdgeId) -> Result<Self, TreeError> {
        if e.0 >= tree.edge_count() {
            return Err(TreeError::UnknownEdge(e.0));
        }
        let mut vertices = Vec::new();
        let mut stack = vec![e];
        while let Some(f) = stack.pop() {
            if let Source::Vertex(v) = tree.source(f) {
                vertices.push(v);
                stack.extend(tree.children(v));
            }
        }
        if vertices.is_empty() {
            Self::edge(tree, e)
        } else {
            Self::spanned_by(tree, &vertices)
        }
    }

    /// Checks explicit subtree data against `tree`.
    pub fn from_parts(
        tree: &PlanarTree,
        vertices: BTreeSet<VertexId>,
        edges: BTreeSet<EdgeId>,
        inputs: Vec<Source>,
        root: Target,
    ) -> Result<Self, TreeError> {
        let into_root: Vec<EdgeId> = edges.iter().copied().filter(|&e| tree.target(e) == root).collect();
        if into_root.len() != 1 {
            return Err(TreeError::InvalidSubtree(format!(
                "{} edges of the subtree end at its root",
                into_root.len()
            )));
        }
        if let Target::Vertex(r) = root {
            if vertices.contains(&r) {
                return Err(TreeError::InvalidSubtree("root lies in V_S".into()));
            }
        }
        let root_edge = into_root[0];
        let input_set: BTreeSet<Source> = inputs.iter().copied().collect();
        for s in &input_set {
            if let Source::Vertex(v) = s {
                if vertices.contains(v) {
                    return Err(TreeError::InvalidSubtree("in_S meets V_S".into()));
                }
            }
        }
        for e in (0..tree.edge_count()).map(EdgeId) {
            let by_target = match tree.target(e) {
                Target::Vertex(v) => vertices.contains(&v),
                Target::Root => false,
            } || e == root_edge;
            let by_source = match tree.source(e) {
                Source::Vertex(v) => vertices.contains(&v),
                Source::Leaf(_) => false,
            } || input_set.contains(&tree.source(e));
            let member = edges.contains(&e);
            if member != by_target || member != by_source {
                return Err(TreeError::InvalidSubtree(format!(
                    "closure condition fails at edge {}",
                    e.0
                )));
            }
        }
        Ok(Subtree {
            vertices,
            edges,
            inputs,
            root,
            root_edge,
        })
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<EdgeId> {
        &self.edges
    }

    pub fn inputs(&self) -> &[Source] {
        &self.inputs
    }

    pub fn root(&self) -> Target {
        self.root
    }

    pub fn root_edge(&self) -> EdgeId {
        self.root_edge
    }

    /// Edges of `S` whose endpoints both lie in `V_S`.
    pub fn internal_edges(&self, tree: &PlanarTree) -> Vec<EdgeId> {
        self.edges
            .iter()
            .copied()
            .filter(|&e| {
                matches!((tree.source(e), tree.target(e)),
                    (Source::Vertex(a), Target::Vertex(b))
                        if self.vertices.contains(&a) && self.vertices.contains(&b))
            })
            .collect()
    }

    fn check_host(&self, tree: &PlanarTree) -> Result<(), TreeError> {
        let again = Self::from_parts(
            tree,
            self.vertices.clone(),
            self.edges.clone(),
            self.inputs.clone(),
            self.root,
        )?;
        debug_assert_eq!(again.root_edge, self.root_edge);
        Ok(())
    }
}

impl PlanarTree {
    /// Contracts every edge internal to `s`.
    pub fn contract_subtree(&self, s: &Subtree) -> Result<PlanarTree, TreeError> {
        let lt = LabelledTree::from_fn(self.clone(), |_| (), |_| ());
        Ok(lt.contract_subtree(s, |_, _, _| ())?.into_parts().0)
    }
}

impl<V: Clone, E: Clone> LabelledTree<V, E> {
    /// Contracts every edge internal to `s`, top-down in preorder.
    pub fn contract_subtree<F>(&self, s: &Subtree, compose: F) -> Result<Self, TreeError>
    where
        F: FnMut(&V, usize, &V) -> V,
    {
        s.check_host(self.tree())?;
        let internal: BTreeSet<EdgeId> = s.internal_edges(self.tree()).into_iter().collect();
        let order: Vec<EdgeId> = self
            .tree()
            .preorder()
            .into_iter()
            .filter(|e| internal.contains(e))
            .collect();
        self.contract_edges(&order, compose)
    }

    /// Contracts the edges internal to `s` in a caller-chosen order, which
    /// must be a permutation of the internal edges.
    pub fn contract_subtree_in_order<F>(
        &self,
        s: &Subtree,
        order: &[EdgeId],
        compose: F,
    ) -> Result<Self, TreeError>
    where
        F: FnMut(&V, usize, &V) -> V,
    {
        s.check_host(self.tree())?;
        let mut want = s.internal_edges(self.tree());
        let mut got = order.to_vec();
        want.sort();
        got.sort();
        if want != got {
            return Err(TreeError::InvalidSubtree(
                "order is not a permutation of the internal edges".into(),
            ));
        }
        self.contract_edges(order, compose)
    }
}
