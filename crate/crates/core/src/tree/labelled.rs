use super::canonical::{CanonicalForm, Mode};
use super::ops::{Contraction, EditMap, GraftMap};
use super::{EdgeId, PlanarTree, Source, TreeError, VertexId};
use crate::perm::Permutation;

/// A planar tree with a label on every vertex and every edge. Use `()` for
/// either label type when it is not needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelledTree<V, E> {
    tree: PlanarTree,
    vlabels: Vec<V>,
    elabels: Vec<E>,
}

impl<V, E> LabelledTree<V, E> {
    pub fn new(tree: PlanarTree, vlabels: Vec<V>, elabels: Vec<E>) -> Result<Self, TreeError> {
        if vlabels.len() != tree.vertex_count() {
            return Err(TreeError::LabelCount(format!(
                "{} vertex labels for {} vertices",
                vlabels.len(),
                tree.vertex_count()
            )));
        }
        if elabels.len() != tree.edge_count() {
            return Err(TreeError::LabelCount(format!(
                "{} edge labels for {} edges",
                elabels.len(),
                tree.edge_count()
            )));
        }
        Ok(LabelledTree {
            tree,
            vlabels,
            elabels,
        })
    }

    pub fn from_fn(
        tree: PlanarTree,
        mut vlabel: impl FnMut(VertexId) -> V,
        mut elabel: impl FnMut(EdgeId) -> E,
    ) -> Self {
        let vlabels = (0..tree.vertex_count()).map(|v| vlabel(VertexId(v))).collect();
        let elabels = (0..tree.edge_count()).map(|e| elabel(EdgeId(e))).collect();
        LabelledTree {
            tree,
            vlabels,
            elabels,
        }
    }

    pub fn tree(&self) -> &PlanarTree {
        &self.tree
    }

    pub fn vlabel(&self, v: VertexId) -> &V {
        &self.vlabels[v.0]
    }

    pub fn elabel(&self, e: EdgeId) -> &E {
        &self.elabels[e.0]
    }

    pub fn vlabels(&self) -> &[V] {
        &self.vlabels
    }

    pub fn elabels(&self) -> &[E] {
        &self.elabels
    }

    pub fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    pub fn set_vlabel(&mut self, v: VertexId, label: V) {
        self.vlabels[v.0] = label;
    }

    pub fn set_elabel(&mut self, e: EdgeId, label: E) {
        self.elabels[e.0] = label;
    }

    pub fn into_parts(self) -> (PlanarTree, Vec<V>, Vec<E>) {
        (self.tree, self.vlabels, self.elabels)
    }

    pub fn map<V2, E2>(
        &self,
        mut fv: impl FnMut(&V) -> V2,
        mut fe: impl FnMut(&E) -> E2,
    ) -> LabelledTree<V2, E2> {
        LabelledTree {
            tree: self.tree.clone(),
            vlabels: self.vlabels.iter().map(&mut fv).collect(),
            elabels: self.elabels.iter().map(&mut fe).collect(),
        }
    }

    pub fn try_map<V2, E2, Err>(
        &self,
        mut fv: impl FnMut(VertexId, &V) -> Result<V2, Err>,
        mut fe: impl FnMut(EdgeId, &E) -> Result<E2, Err>,
    ) -> Result<LabelledTree<V2, E2>, Err> {
        Ok(LabelledTree {
            tree: self.tree.clone(),
            vlabels: self
                .vlabels
                .iter()
                .enumerate()
                .map(|(i, l)| fv(VertexId(i), l))
                .collect::<Result<_, _>>()?,
            elabels: self
                .elabels
                .iter()
                .enumerate()
                .map(|(i, l)| fe(EdgeId(i), l))
                .collect::<Result<_, _>>()?,
        })
    }
}

impl<V: Clone, E: Clone> LabelledTree<V, E> {
    /// Grafting of labelled trees. Labels are inherited; the identified edge
    /// gets `combine(outer leaf-edge label, inner root-edge label)`.
    pub fn graft(
        &self,
        i: usize,
        inner: &Self,
        combine: impl FnOnce(&E, &E) -> E,
    ) -> Result<(Self, GraftMap), TreeError> {
        let (tree, map) = self.tree.graft(i, &inner.tree)?;
        let mut vlabels = self.vlabels.clone();
        vlabels.extend(inner.vlabels.iter().cloned());
        let mut elabels: Vec<Option<E>> = vec![None; tree.edge_count()];
        for (old, new) in map.outer_edge.iter().enumerate() {
            if *new != map.identified {
                elabels[new.0] = Some(self.elabels[old].clone());
            }
        }
        for (old, new) in map.inner_edge.iter().enumerate() {
            if *new != map.identified {
                elabels[new.0] = Some(inner.elabels[old].clone());
            }
        }
        let ei = self.tree.rooted().leaf_edge(i)?;
        elabels[map.identified.0] = Some(combine(
            &self.elabels[ei.0],
            &inner.elabels[inner.tree.root_edge().0],
        ));
        let elabels = elabels.into_iter().map(Option::unwrap).collect();
        Ok((
            LabelledTree {
                tree,
                vlabels,
                elabels,
            },
            map,
        ))
    }

    /// Relabels leaf `k` as `σ⁻¹(k)`; labels stay on their vertices and edges.
    pub fn permute_leaves(&self, sigma: &Permutation) -> Result<Self, TreeError> {
        Ok(LabelledTree {
            tree: self.tree.permute_leaves(sigma)?,
            vlabels: self.vlabels.clone(),
            elabels: self.elabels.clone(),
        })
    }

    pub fn permute_children(&self, v: VertexId, sigma: &Permutation) -> Result<Self, TreeError> {
        Ok(LabelledTree {
            tree: self.tree.permute_children(v, sigma)?,
            vlabels: self.vlabels.clone(),
            elabels: self.elabels.clone(),
        })
    }

    /// Contracts the internal edge `e`. The merged vertex is labelled
    /// `compose(label of t(e), position of e, label of s(e))`.
    pub fn contract_edge(
        &self,
        e: EdgeId,
        compose: impl FnOnce(&V, usize, &V) -> V,
    ) -> Result<(Self, Contraction), TreeError> {
        let (tree, c) = self.tree.contract_edge(e)?;
        let merged_label = compose(
            &self.vlabels[c.parent.0],
            c.position,
            &self.vlabels[c.child.0],
        );
        let (vlabels, elabels) = remap(&c.map, tree.vertex_count(), tree.edge_count(), self);
        let mut vlabels: Vec<Option<V>> = vlabels;
        vlabels[c.merged.0] = Some(merged_label);
        Ok((
            LabelledTree {
                tree,
                vlabels: vlabels.into_iter().map(Option::unwrap).collect(),
                elabels: elabels.into_iter().map(Option::unwrap).collect(),
            },
            c,
        ))
    }

    /// Contracts the given internal edges one after another, in the order
    /// listed. Edge ids refer to `self`.
    pub fn contract_edges<F>(&self, edges: &[EdgeId], mut compose: F) -> Result<Self, TreeError>
    where
        F: FnMut(&V, usize, &V) -> V,
    {
        let mut current = self.clone();
        let mut to_current: Vec<Option<EdgeId>> = (0..self.tree.edge_count()).map(|e| Some(EdgeId(e))).collect();
        for &e in edges {
            let ce = to_current
                .get(e.0)
                .copied()
                .flatten()
                .ok_or(TreeError::UnknownEdge(e.0))?;
            let (next, c) = current.contract_edge(ce, &mut compose)?;
            for slot in to_current.iter_mut() {
                *slot = slot.and_then(|x| c.map.edge[x.0]);
            }
            current = next;
        }
        Ok(current)
    }

    /// Inserts a unary vertex labelled `vlabel` in the middle of `e`; the two
    /// halves are labelled `split(label of e) = (lower, upper)`.
    pub fn subdivide_edge(
        &self,
        e: EdgeId,
        vlabel: V,
        split: impl FnOnce(&E) -> (E, E),
    ) -> Result<(Self, VertexId), TreeError> {
        let (tree, w, lower, upper) = self.tree.subdivide_edge(e)?;
        let (lo, up) = split(&self.elabels[e.0]);
        let mut vlabels = self.vlabels.clone();
        vlabels.push(vlabel);
        let mut elabels = self.elabels.clone();
        elabels.push(up);
        debug_assert_eq!(upper.0, elabels.len() - 1);
        elabels[lower.0] = lo;
        Ok((
            LabelledTree {
                tree,
                vlabels,
                elabels,
            },
            w,
        ))
    }

    /// Removes the unary vertex `v`; the joined edge is labelled
    /// `join(label below v, label above v)`.
    pub fn dissolve_unary(
        &self,
        v: VertexId,
        join: impl FnOnce(&E, &E) -> E,
    ) -> Result<(Self, EditMap), TreeError> {
        let (tree, map) = self.tree.dissolve_unary(v)?;
        let below = self.tree.rooted().out_edge(v);
        let above = self.tree.children(v)[0];
        let joined = join(&self.elabels[below.0], &self.elabels[above.0]);
        let (vlabels, mut elabels) = remap(&map, tree.vertex_count(), tree.edge_count(), self);
        elabels[map.edge[below.0].unwrap().0] = Some(joined);
        Ok((
            LabelledTree {
                tree,
                vlabels: vlabels.into_iter().map(Option::unwrap).collect(),
                elabels: elabels.into_iter().map(Option::unwrap).collect(),
            },
            map,
        ))
    }

    /// Canonical form with labels folded into the encoding.
    pub fn canonical_form(
        &self,
        mode: Mode,
        venc: impl Fn(&V) -> String,
        eenc: impl Fn(&E) -> String,
    ) -> CanonicalForm {
        self.tree.canonical_form_with(
            mode,
            &|v| venc(&self.vlabels[v.0]),
            &|e| eenc(&self.elabels[e.0]),
        )
    }

    /// Canonical representative: children sorted by labelled encoding (in
    /// unordered mode), ids renumbered in preorder, labels carried along.
    pub fn representative(
        &self,
        mode: Mode,
        venc: impl Fn(&V) -> String,
        eenc: impl Fn(&E) -> String,
    ) -> Self {
        let (tree, old_edges, old_vertices) = self.tree.representative_with(
            mode,
            &|v| venc(&self.vlabels[v.0]),
            &|e| eenc(&self.elabels[e.0]),
        );
        LabelledTree {
            tree,
            vlabels: old_vertices.iter().map(|v| self.vlabels[v.0].clone()).collect(),
            elabels: old_edges.iter().map(|e| self.elabels[e.0].clone()).collect(),
        }
    }

    /// Labels of the leaf edges, indexed by leaf label minus one.
    pub fn leaf_edge_labels(&self) -> Vec<&E> {
        (1..=self.leaf_count())
            .map(|k| &self.elabels[self.tree.rooted().leaf_edge(k).unwrap().0])
            .collect()
    }

    pub fn root_edge_label(&self) -> &E {
        &self.elabels[self.tree.root_edge().0]
    }

    /// Whether `e` starts at a leaf or ends at the root.
    pub fn is_external(&self, e: EdgeId) -> bool {
        !self.tree.rooted().is_internal(e)
    }

    pub fn is_leaf_edge(&self, e: EdgeId) -> bool {
        matches!(self.tree.source(e), Source::Leaf(_))
    }
}

type Remapped<V, E> = (Vec<Option<V>>, Vec<Option<E>>);

fn remap<V: Clone, E: Clone>(
    map: &EditMap,
    vcount: usize,
    ecount: usize,
    old: &LabelledTree<V, E>,
) -> Remapped<V, E> {
    let mut vlabels = vec![None; vcount];
    for (o, n) in map.vertex.iter().enumerate() {
        if let Some(n) = n {
            vlabels[n.0] = Some(old.vlabels[o].clone());
        }
    }
    let mut elabels = vec![None; ecount];
    for (o, n) in map.edge.iter().enumerate() {
        if let Some(n) = n {
            if elabels[n.0].is_none() {
                elabels[n.0] = Some(old.elabels[o].clone());
            }
        }
    }
    (vlabels, elabels)
}
