//! AHU-style canonical encodings and canonical representatives.
//!
//! Each edge is encoded bottom-up from its own label and the encoding of the
//! subtree above it. In [`Mode::Unordered`] child encodings are sorted, so two
//! trees get the same encoding exactly when they are isomorphic as labelled
//! `n`-trees; in [`Mode::Planar`] children keep their planar order. Leaf
//! labels are part of the encoding, so only label-preserving isomorphisms
//! are detected.

use sha2::{Digest, Sha256};

use super::{EdgeId, PlanarTree, Source, Target, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Planar,
    Unordered,
}

/// Canonical encoding of an isomorphism class, plus a stable 64-bit digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub encoding: String,
    pub hash: u64,
}

impl CanonicalForm {
    fn new(encoding: String) -> Self {
        let digest = Sha256::digest(encoding.as_bytes());
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        CanonicalForm {
            encoding,
            hash: u64::from_be_bytes(bytes),
        }
    }
}

fn prefixed(s: &str) -> String {
    format!("{}:{}", s.len(), s)
}

impl PlanarTree {
    /// Encoding of the subtree sitting on each edge, indexed by edge id.
    pub(crate) fn subtree_encodings(
        &self,
        mode: Mode,
        vertex_label: &dyn Fn(VertexId) -> String,
        edge_label: &dyn Fn(EdgeId) -> String,
    ) -> Vec<String> {
        let mut enc = vec![String::new(); self.edge_count()];
        for e in self.preorder().into_iter().rev() {
            let body = match self.source(e) {
                Source::Leaf(k) => format!("L{k}"),
                Source::Vertex(v) => {
                    let mut kids: Vec<&str> =
                        self.children(v).iter().map(|c| enc[c.0].as_str()).collect();
                    if mode == Mode::Unordered {
                        kids.sort_unstable();
                    }
                    format!("V{}[{}]", prefixed(&vertex_label(v)), kids.join(","))
                }
            };
            enc[e.0] = format!("{}{}", prefixed(&edge_label(e)), body);
        }
        enc
    }

    pub(crate) fn canonical_form_with(
        &self,
        mode: Mode,
        vertex_label: &dyn Fn(VertexId) -> String,
        edge_label: &dyn Fn(EdgeId) -> String,
    ) -> CanonicalForm {
        let enc = self.subtree_encodings(mode, vertex_label, edge_label);
        CanonicalForm::new(format!(
            "n{}|{}",
            self.leaf_count(),
            enc[self.root_edge().0]
        ))
    }

    /// Canonical encoding of the unlabelled tree.
    pub fn canonical_form(&self, mode: Mode) -> CanonicalForm {
        self.canonical_form_with(mode, &|_| String::new(), &|_| String::new())
    }

    /// Reorders children (sorted by encoding in unordered mode) and renumbers
    /// edges and vertices in depth-first preorder. Returns the new tree and
    /// the old ids of each new edge and vertex.
    pub(crate) fn representative_with(
        &self,
        mode: Mode,
        vertex_label: &dyn Fn(VertexId) -> String,
        edge_label: &dyn Fn(EdgeId) -> String,
    ) -> (PlanarTree, Vec<EdgeId>, Vec<VertexId>) {
        let order: Vec<Vec<EdgeId>> = match mode {
            Mode::Planar => (0..self.vertex_count())
                .map(|v| self.children(VertexId(v)).to_vec())
                .collect(),
            Mode::Unordered => {
                let enc = self.subtree_encodings(mode, vertex_label, edge_label);
                (0..self.vertex_count())
                    .map(|v| {
                        let mut kids = self.children(VertexId(v)).to_vec();
                        kids.sort_by(|a, b| enc[a.0].cmp(&enc[b.0]));
                        kids
                    })
                    .collect()
            }
        };
        let mut old_edges = Vec::with_capacity(self.edge_count());
        let mut old_vertices = Vec::with_capacity(self.vertex_count());
        let mut new_edge = vec![EdgeId(0); self.edge_count()];
        let mut new_vertex = vec![VertexId(0); self.vertex_count()];
        let mut stack = vec![self.root_edge()];
        while let Some(e) = stack.pop() {
            new_edge[e.0] = EdgeId(old_edges.len());
            old_edges.push(e);
            if let Source::Vertex(v) = self.source(e) {
                new_vertex[v.0] = VertexId(old_vertices.len());
                old_vertices.push(v);
                stack.extend(order[v.0].iter().rev());
            }
        }
        let source = old_edges
            .iter()
            .map(|&e| match self.source(e) {
                Source::Vertex(v) => Source::Vertex(new_vertex[v.0]),
                s => s,
            })
            .collect();
        let target = old_edges
            .iter()
            .map(|&e| match self.target(e) {
                Target::Vertex(v) => Target::Vertex(new_vertex[v.0]),
                Target::Root => Target::Root,
            })
            .collect();
        let children = old_vertices
            .iter()
            .map(|&v| order[v.0].iter().map(|c| new_edge[c.0]).collect())
            .collect();
        let tree = PlanarTree::from_parts_ordered(
            self.leaf_count(),
            self.vertex_count(),
            source,
            target,
            children,
        )
        .expect("renumbering preserves validity");
        (tree, old_edges, old_vertices)
    }

    /// The canonical representative of the isomorphism class.
    pub fn representative(&self, mode: Mode) -> PlanarTree {
        self.representative_with(mode, &|_| String::new(), &|_| String::new())
            .0
    }
}

#[cfg(test)]
mod tests {
    use super::super::{RawEdge, RawEnd, RawTree, RootedTree, Shape};
    use super::*;

    fn leaf(k: usize) -> Shape {
        Shape::Leaf(k)
    }

    #[test]
    fn planar_versus_unordered() {
        // Same 3-tree drawn with the cherry on the left or on the right.
        let a = PlanarTree::from_shape(&Shape::node([Shape::node([leaf(1), leaf(2)]), leaf(3)])).unwrap();
        let b = PlanarTree::from_shape(&Shape::node([leaf(3), Shape::node([leaf(1), leaf(2)])])).unwrap();
        assert_eq!(a.canonical_form(Mode::Unordered), b.canonical_form(Mode::Unordered));
        assert_ne!(a.canonical_form(Mode::Planar), b.canonical_form(Mode::Planar));
    }

    #[test]
    fn five_leaf_redrawing_is_the_same_tree() {
        // Root vertex with leaves 3, 1 and an inner vertex over 4, 5, 2; the
        // second drawing swaps the first two leaves.
        let a = PlanarTree::from_shape(&Shape::node([
            leaf(3),
            leaf(1),
            Shape::node([leaf(4), leaf(5), leaf(2)]),
        ]))
        .unwrap();
        let b = PlanarTree::from_shape(&Shape::node([
            leaf(1),
            leaf(3),
            Shape::node([leaf(4), leaf(5), leaf(2)]),
        ]))
        .unwrap();
        assert_eq!(a.canonical_form(Mode::Unordered), b.canonical_form(Mode::Unordered));
        assert_eq!(a.representative(Mode::Unordered), b.representative(Mode::Unordered));
    }

    #[test]
    fn renaming_ids_does_not_change_forms() {
        let raw = |ids: [u64; 5], vids: [u64; 2]| RawTree {
            leaves: 3,
            vertices: vec![vids[0], vids[1]],
            edges: vec![
                RawEdge { id: ids[0], source: RawEnd::Leaf(1), target: RawEnd::Vertex(vids[1]) },
                RawEdge { id: ids[1], source: RawEnd::Leaf(2), target: RawEnd::Vertex(vids[1]) },
                RawEdge { id: ids[2], source: RawEnd::Vertex(vids[1]), target: RawEnd::Vertex(vids[0]) },
                RawEdge { id: ids[3], source: RawEnd::Leaf(3), target: RawEnd::Vertex(vids[0]) },
                RawEdge { id: ids[4], source: RawEnd::Vertex(vids[0]), target: RawEnd::Root },
            ],
        };
        let a = PlanarTree::from_rooted(RootedTree::validate(&raw([1, 2, 3, 4, 5], [10, 11])).unwrap());
        let mut r = raw([50, 40, 30, 20, 10], [7, 3]);
        r.edges.reverse();
        r.vertices.reverse();
        let b = PlanarTree::from_rooted(RootedTree::validate(&r).unwrap());
        assert_eq!(a.canonical_form(Mode::Unordered), b.canonical_form(Mode::Unordered));
        // Child order in `b` comes from the reversed edge list, so compare the
        // planar form after restoring the same drawing.
        let b_planar = b.representative(Mode::Unordered);
        let a_planar = a.representative(Mode::Unordered);
        assert_eq!(a_planar.canonical_form(Mode::Planar), b_planar.canonical_form(Mode::Planar));
    }

    #[test]
    fn representative_is_idempotent() {
        let a = PlanarTree::from_shape(&Shape::node([
            leaf(2),
            Shape::node([leaf(4), leaf(1)]),
            Shape::node([]),
            leaf(3),
        ]))
        .unwrap();
        let r = a.representative(Mode::Unordered);
        assert_eq!(r.representative(Mode::Unordered), r);
        let p = a.representative(Mode::Planar);
        assert_eq!(p.canonical_form(Mode::Planar), a.canonical_form(Mode::Planar));
    }
}
