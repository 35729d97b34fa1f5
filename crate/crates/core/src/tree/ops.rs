use super::{EdgeId, PlanarTree, Source, Target, TreeError, VertexId};
use crate::perm::Permutation;

/// Where the vertices and edges of the two grafted trees ended up.
#[derive(Debug, Clone)]
pub struct GraftMap {
    pub outer_vertex: Vec<VertexId>,
    pub inner_vertex: Vec<VertexId>,
    /// New id of each outer edge; the `i`-th leaf edge maps to `identified`.
    pub outer_edge: Vec<EdgeId>,
    /// New id of each inner edge; the root edge maps to `identified`.
    pub inner_edge: Vec<EdgeId>,
    pub identified: EdgeId,
}

/// Old-to-new id tables for edits that delete or merge items.
#[derive(Debug, Clone)]
pub struct EditMap {
    pub vertex: Vec<Option<VertexId>>,
    pub edge: Vec<Option<EdgeId>>,
}

/// Result of contracting one internal edge `e`.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub map: EditMap,
    /// The vertex formed from `t(e)` and `s(e)`.
    pub merged: VertexId,
    /// Old `t(e)` and `s(e)`.
    pub parent: VertexId,
    pub child: VertexId,
    /// One-based position of `e` among the children of `t(e)`.
    pub position: usize,
}

impl PlanarTree {
    /// Grafts `inner` onto leaf `i` of `self`: the root edge of `inner` and
    /// the `i`-th leaf edge of `self` become one edge. Outer leaves below `i`
    /// keep their labels, inner leaves shift by `i-1`, outer leaves above `i`
    /// shift by `n-1` where `n` is the leaf count of `inner`.
    pub fn graft(&self, i: usize, inner: &PlanarTree) -> Result<(PlanarTree, GraftMap), TreeError> {
        let m = self.leaf_count();
        let n = inner.leaf_count();
        let ei = self.rooted().leaf_edge(i)?;
        let e0 = inner.root_edge();
        let nv_outer = self.vertex_count();

        let outer_vertex: Vec<VertexId> = (0..nv_outer).map(VertexId).collect();
        let inner_vertex: Vec<VertexId> =
            (0..inner.vertex_count()).map(|v| VertexId(v + nv_outer)).collect();

        let mut outer_edge = vec![EdgeId(usize::MAX); self.edge_count()];
        let mut inner_edge = vec![EdgeId(usize::MAX); inner.edge_count()];
        let mut next = 0;
        for e in 0..self.edge_count() {
            if EdgeId(e) != ei {
                outer_edge[e] = EdgeId(next);
                next += 1;
            }
        }
        for e in 0..inner.edge_count() {
            if EdgeId(e) != e0 {
                inner_edge[e] = EdgeId(next);
                next += 1;
            }
        }
        let x = EdgeId(next);
        outer_edge[ei.0] = x;
        inner_edge[e0.0] = x;

        let total = next + 1;
        let mut source = vec![Source::Leaf(0); total];
        let mut target = vec![Target::Root; total];

        let relabel_outer = |k: usize| if k < i { k } else { k + n - 1 };
        for e in 0..self.edge_count() {
            if EdgeId(e) == ei {
                continue;
            }
            let ne = outer_edge[e].0;
            source[ne] = match self.source(EdgeId(e)) {
                Source::Vertex(v) => Source::Vertex(v),
                Source::Leaf(k) => Source::Leaf(relabel_outer(k)),
            };
            target[ne] = self.target(EdgeId(e));
        }
        let shift_inner = |s: Source| match s {
            Source::Vertex(v) => Source::Vertex(inner_vertex[v.0]),
            Source::Leaf(k) => Source::Leaf(k + i - 1),
        };
        for e in 0..inner.edge_count() {
            if EdgeId(e) == e0 {
                continue;
            }
            let ne = inner_edge[e].0;
            source[ne] = shift_inner(inner.source(EdgeId(e)));
            target[ne] = match inner.target(EdgeId(e)) {
                Target::Vertex(v) => Target::Vertex(inner_vertex[v.0]),
                Target::Root => Target::Root,
            };
        }
        source[x.0] = shift_inner(inner.source(e0));
        target[x.0] = self.target(ei);

        let mut children = Vec::with_capacity(nv_outer + inner.vertex_count());
        for v in 0..nv_outer {
            children.push(
                self.children(VertexId(v))
                    .iter()
                    .map(|e| outer_edge[e.0])
                    .collect(),
            );
        }
        for v in 0..inner.vertex_count() {
            children.push(
                inner
                    .children(VertexId(v))
                    .iter()
                    .map(|e| inner_edge[e.0])
                    .collect(),
            );
        }
        let tree = PlanarTree::from_parts_ordered(
            n + m - 1,
            nv_outer + inner.vertex_count(),
            source,
            target,
            children,
        )?;
        Ok((
            tree,
            GraftMap {
                outer_vertex,
                inner_vertex,
                outer_edge,
                inner_edge,
                identified: x,
            },
        ))
    }

    /// Right action of `S_n` on leaf labels: a leaf labelled `k` is
    /// relabelled `σ⁻¹(k)`. Vertices, edges and orders are unchanged.
    pub fn permute_leaves(&self, sigma: &Permutation) -> Result<PlanarTree, TreeError> {
        let n = self.leaf_count();
        if sigma.len() != n {
            return Err(TreeError::PermutationSizeMismatch {
                expected: n,
                got: sigma.len(),
            });
        }
        let inv = sigma.inverse();
        let source = (0..self.edge_count())
            .map(|e| match self.source(EdgeId(e)) {
                Source::Leaf(k) => Source::Leaf(inv.apply(k)),
                s => s,
            })
            .collect();
        let target = (0..self.edge_count()).map(|e| self.target(EdgeId(e))).collect();
        PlanarTree::from_parts_ordered(
            n,
            self.vertex_count(),
            source,
            target,
            self.children.clone(),
        )
    }

    /// Contracts the internal edge `e`, merging `t(e)` and `s(e)` into a
    /// new vertex whose children are those of `t(e)` with `e` replaced, in
    /// place, by the children of `s(e)`.
    pub fn contract_edge(&self, e: EdgeId) -> Result<(PlanarTree, Contraction), TreeError> {
        if e.0 >= self.edge_count() {
            return Err(TreeError::UnknownEdge(e.0));
        }
        let (child, parent) = match (self.source(e), self.target(e)) {
            (Source::Vertex(c), Target::Vertex(p)) => (c, p),
            _ => return Err(TreeError::NotInternalEdge(e.0)),
        };
        let position = self.child_position(e).expect("internal edge has a target vertex");

        let mut vertex = vec![None; self.vertex_count()];
        let mut next = 0;
        for v in 0..self.vertex_count() {
            if v != child.0 && v != parent.0 {
                vertex[v] = Some(VertexId(next));
                next += 1;
            }
        }
        let merged = VertexId(next);
        let vcount = next + 1;
        let mut edge = vec![None; self.edge_count()];
        let mut next = 0;
        for f in 0..self.edge_count() {
            if f != e.0 {
                edge[f] = Some(EdgeId(next));
                next += 1;
            }
        }
        let map_v = |v: VertexId| {
            if v == child || v == parent {
                merged
            } else {
                vertex[v.0].unwrap()
            }
        };
        let mut source = Vec::with_capacity(next);
        let mut target = Vec::with_capacity(next);
        for f in 0..self.edge_count() {
            if f == e.0 {
                continue;
            }
            source.push(match self.source(EdgeId(f)) {
                Source::Vertex(v) => Source::Vertex(map_v(v)),
                s => s,
            });
            target.push(match self.target(EdgeId(f)) {
                Target::Vertex(v) => Target::Vertex(map_v(v)),
                Target::Root => Target::Root,
            });
        }
        let map_e = |f: &EdgeId| edge[f.0].unwrap();
        let mut children = vec![Vec::new(); vcount];
        for v in 0..self.vertex_count() {
            if let Some(nv) = vertex[v] {
                children[nv.0] = self.children(VertexId(v)).iter().map(map_e).collect();
            }
        }
        let mut spliced = Vec::new();
        for f in self.children(parent) {
            if *f == e {
                spliced.extend(self.children(child).iter().map(map_e));
            } else {
                spliced.push(map_e(f));
            }
        }
        children[merged.0] = spliced;
        let tree = PlanarTree::from_parts_ordered(
            self.leaf_count(),
            vcount,
            source,
            target,
            children,
        )?;
        Ok((
            tree,
            Contraction {
                map: EditMap { vertex, edge },
                merged,
                parent,
                child,
                position,
            },
        ))
    }

    /// Inserts a new unary vertex in the middle of `e`. The lower half keeps
    /// the id of `e`'s position in the child list; the new vertex is last.
    /// Returns the tree, the new vertex, and the (lower, upper) halves.
    pub fn subdivide_edge(&self, e: EdgeId) -> Result<(PlanarTree, VertexId, EdgeId, EdgeId), TreeError> {
        if e.0 >= self.edge_count() {
            return Err(TreeError::UnknownEdge(e.0));
        }
        let w = VertexId(self.vertex_count());
        let upper = EdgeId(self.edge_count());
        let mut source: Vec<Source> = (0..self.edge_count()).map(|f| self.source(EdgeId(f))).collect();
        let mut target: Vec<Target> = (0..self.edge_count()).map(|f| self.target(EdgeId(f))).collect();
        // `e` becomes the lower half (w → old target); `upper` runs old source → w.
        source.push(source[e.0]);
        target.push(Target::Vertex(w));
        source[e.0] = Source::Vertex(w);
        let mut children = self.children.clone();
        children.push(vec![upper]);
        let tree = PlanarTree::from_parts_ordered(
            self.leaf_count(),
            self.vertex_count() + 1,
            source,
            target,
            children,
        )?;
        Ok((tree, w, e, upper))
    }

    /// Removes a unary vertex `v`, joining its incoming and outgoing edges.
    pub fn dissolve_unary(&self, v: VertexId) -> Result<(PlanarTree, EditMap), TreeError> {
        if self.arity(v)? != 1 {
            return Err(TreeError::NotUnary(v.0));
        }
        let below = self.rooted().out_edge(v);
        let above = self.children(v)[0];
        let mut vertex = vec![None; self.vertex_count()];
        let mut next = 0;
        for u in 0..self.vertex_count() {
            if u != v.0 {
                vertex[u] = Some(VertexId(next));
                next += 1;
            }
        }
        let vcount = next;
        // The joined edge keeps the slot of `below` in its parent's child list.
        let mut edge = vec![None; self.edge_count()];
        let mut next = 0;
        for f in 0..self.edge_count() {
            if f != above.0 {
                edge[f] = Some(EdgeId(next));
                next += 1;
            }
        }
        let map_v = |u: VertexId| vertex[u.0].unwrap();
        let mut source = Vec::with_capacity(next);
        let mut target = Vec::with_capacity(next);
        for f in 0..self.edge_count() {
            if f == above.0 {
                continue;
            }
            let s = if f == below.0 { self.source(above) } else { self.source(EdgeId(f)) };
            source.push(match s {
                Source::Vertex(u) => Source::Vertex(map_v(u)),
                s => s,
            });
            target.push(match self.target(EdgeId(f)) {
                Target::Vertex(u) => Target::Vertex(map_v(u)),
                Target::Root => Target::Root,
            });
        }
        let mut children = vec![Vec::new(); vcount];
        for u in 0..self.vertex_count() {
            if let Some(nu) = vertex[u] {
                children[nu.0] = self
                    .children(VertexId(u))
                    .iter()
                    .map(|f| edge[f.0].unwrap())
                    .collect();
            }
        }
        let tree = PlanarTree::from_parts_ordered(self.leaf_count(), vcount, source, target, children)?;
        edge[above.0] = edge[below.0];
        Ok((tree, EditMap { vertex, edge }))
    }

    /// Reorders the children of `v`: the child at position `p` moves to
    /// position `σ⁻¹(p)`.
    pub fn permute_children(&self, v: VertexId, sigma: &Permutation) -> Result<PlanarTree, TreeError> {
        let k = self.arity(v)?;
        if sigma.len() != k {
            return Err(TreeError::PermutationSizeMismatch {
                expected: k,
                got: sigma.len(),
            });
        }
        let old = &self.children[v.0];
        let mut new = old.clone();
        for p in 1..=k {
            new[sigma.inverse().apply(p) - 1] = old[p - 1];
        }
        let mut children = self.children.clone();
        children[v.0] = new;
        PlanarTree::with_order(self.base.clone(), children)
    }
}
