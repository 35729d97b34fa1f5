//! Rooted `n`-trees as `(V, E, s, t)` quadruples.
//!
//! Edges point towards the root. Every vertex and every leaf `1..=n` is the
//! source of exactly one edge, and exactly one edge ends at the root `0`.
//! Vertex and edge ids are dense indices local to one tree value; they carry
//! no meaning across operations; only the isomorphism class does.

mod canonical;
mod labelled;
mod ops;
mod subtree;

use std::collections::HashMap;

use thiserror::Error;

pub use canonical::{CanonicalForm, Mode};
pub use labelled::LabelledTree;
pub use ops::GraftMap;
pub use subtree::Subtree;

use crate::perm::PermutationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// Where an edge starts: an internal vertex or a leaf `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Vertex(VertexId),
    Leaf(usize),
}

/// Where an edge ends: an internal vertex or the root `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Vertex(VertexId),
    Root,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TreeError {
    #[error("a tree needs at least one edge")]
    EmptyEdgeSet,
    #[error("source map is not a bijection onto V ⊔ {{1..n}}: {0}")]
    SourceNotBijective(String),
    #[error("no edge targets the root")]
    NoRootEdge,
    #[error("{0} edges target the root")]
    MultipleRootEdges(usize),
    #[error("vertex {0} cannot reach the root")]
    UnreachableRoot(usize),
    #[error("duplicate id {0}")]
    DuplicateId(u64),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("malformed edge endpoint: {0}")]
    BadEndpoint(String),
    #[error("leaf index {index} out of range 1..={leaves}")]
    LeafIndexOutOfRange { index: usize, leaves: usize },
    #[error("permutation has size {got}, tree has {expected} leaves")]
    PermutationSizeMismatch { expected: usize, got: usize },
    #[error("edge {0} is not internal")]
    NotInternalEdge(usize),
    #[error("vertex {0} is not unary")]
    NotUnary(usize),
    #[error("invalid child order at vertex {0}")]
    InvalidChildOrder(usize),
    #[error("invalid subtree: {0}")]
    InvalidSubtree(String),
    #[error("label count mismatch: {0}")]
    LabelCount(String),
    #[error(transparent)]
    Permutation(#[from] PermutationError),
}

/// One end of an edge in an unchecked tree description, using caller ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawEnd {
    Vertex(u64),
    Leaf(usize),
    Root,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdge {
    pub id: u64,
    pub source: RawEnd,
    pub target: RawEnd,
}

/// Unchecked tree data with arbitrary opaque ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawTree {
    pub leaves: usize,
    pub vertices: Vec<u64>,
    pub edges: Vec<RawEdge>,
}

/// A validated rooted `n`-tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedTree {
    leaves: usize,
    source: Vec<Source>,
    target: Vec<Target>,
    out_edge: Vec<EdgeId>,
    leaf_edge: Vec<EdgeId>,
    root_edge: EdgeId,
}

impl RootedTree {
    /// Checks the three tree axioms and renumbers ids densely in the order
    /// they appear in `raw`.
    pub fn validate(raw: &RawTree) -> Result<Self, TreeError> {
        if raw.edges.is_empty() {
            return Err(TreeError::EmptyEdgeSet);
        }
        let mut vindex = HashMap::new();
        for (i, &v) in raw.vertices.iter().enumerate() {
            if vindex.insert(v, i).is_some() {
                return Err(TreeError::DuplicateId(v));
            }
        }
        let mut eids = HashMap::new();
        let mut source = Vec::with_capacity(raw.edges.len());
        let mut target = Vec::with_capacity(raw.edges.len());
        for e in &raw.edges {
            if eids.insert(e.id, ()).is_some() {
                return Err(TreeError::DuplicateId(e.id));
            }
            source.push(match e.source {
                RawEnd::Vertex(v) => Source::Vertex(VertexId(
                    *vindex.get(&v).ok_or(TreeError::UnknownVertex(v as usize))?,
                )),
                RawEnd::Leaf(k) => Source::Leaf(k),
                RawEnd::Root => {
                    return Err(TreeError::BadEndpoint(format!(
                        "edge {} starts at the root",
                        e.id
                    )))
                }
            });
            target.push(match e.target {
                RawEnd::Vertex(v) => Target::Vertex(VertexId(
                    *vindex.get(&v).ok_or(TreeError::UnknownVertex(v as usize))?,
                )),
                RawEnd::Root => Target::Root,
                RawEnd::Leaf(_) => {
                    return Err(TreeError::BadEndpoint(format!(
                        "edge {} ends at a leaf",
                        e.id
                    )))
                }
            });
        }
        Self::from_parts(raw.leaves, raw.vertices.len(), source, target)
    }

    /// Builds and validates a tree from dense source/target tables.
    pub(crate) fn from_parts(
        leaves: usize,
        vertex_count: usize,
        source: Vec<Source>,
        target: Vec<Target>,
    ) -> Result<Self, TreeError> {
        if source.is_empty() {
            return Err(TreeError::EmptyEdgeSet);
        }
        let mut out_edge = vec![None; vertex_count];
        let mut leaf_edge = vec![None; leaves];
        for (i, s) in source.iter().enumerate() {
            let slot = match *s {
                Source::Vertex(VertexId(v)) => {
                    if v >= vertex_count {
                        return Err(TreeError::UnknownVertex(v));
                    }
                    &mut out_edge[v]
                }
                Source::Leaf(k) => {
                    if k == 0 || k > leaves {
                        return Err(TreeError::SourceNotBijective(format!(
                            "leaf {k} outside 1..={leaves}"
                        )));
                    }
                    &mut leaf_edge[k - 1]
                }
            };
            if slot.is_some() {
                return Err(TreeError::SourceNotBijective(format!(
                    "{s:?} is the source of two edges"
                )));
            }
            *slot = Some(EdgeId(i));
        }
        if let Some(v) = out_edge.iter().position(Option::is_none) {
            return Err(TreeError::SourceNotBijective(format!(
                "vertex {v} is not the source of any edge"
            )));
        }
        if let Some(k) = leaf_edge.iter().position(Option::is_none) {
            return Err(TreeError::SourceNotBijective(format!(
                "leaf {} is not the source of any edge",
                k + 1
            )));
        }
        let roots: Vec<usize> = target
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == Target::Root)
            .map(|(i, _)| i)
            .collect();
        let root_edge = match roots.len() {
            0 => return Err(TreeError::NoRootEdge),
            1 => EdgeId(roots[0]),
            k => return Err(TreeError::MultipleRootEdges(k)),
        };
        for t in &target {
            if let Target::Vertex(VertexId(v)) = *t {
                if v >= vertex_count {
                    return Err(TreeError::UnknownVertex(v));
                }
            }
        }
        let out_edge: Vec<EdgeId> = out_edge.into_iter().map(Option::unwrap).collect();
        // Walk towards the root from every vertex; a walk longer than |V|
        // steps has revisited a vertex.
        let mut reaches = vec![false; vertex_count];
        for start in 0..vertex_count {
            let mut path = Vec::new();
            let mut v = start;
            loop {
                if reaches[v] {
                    break;
                }
                path.push(v);
                if path.len() > vertex_count {
                    return Err(TreeError::UnreachableRoot(start));
                }
                match target[out_edge[v].0] {
                    Target::Root => break,
                    Target::Vertex(VertexId(w)) => v = w,
                }
            }
            for p in path {
                reaches[p] = true;
            }
        }
        Ok(RootedTree {
            leaves,
            source,
            target,
            out_edge,
            leaf_edge: leaf_edge.into_iter().map(Option::unwrap).collect(),
            root_edge,
        })
    }

    /// The tree with a single edge from leaf 1 to the root and no vertices.
    pub fn unit() -> Self {
        Self::from_parts(1, 0, vec![Source::Leaf(1)], vec![Target::Root]).unwrap()
    }

    /// The `n`-corolla: one vertex, leaves attached in order `1..=n`.
    pub fn corolla(n: usize) -> Self {
        let mut source: Vec<Source> = (1..=n).map(Source::Leaf).collect();
        let mut target = vec![Target::Vertex(VertexId(0)); n];
        source.push(Source::Vertex(VertexId(0)));
        target.push(Target::Root);
        Self::from_parts(n, 1, source, target).unwrap()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn vertex_count(&self) -> usize {
        self.out_edge.len()
    }

    pub fn edge_count(&self) -> usize {
        self.source.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn source(&self, e: EdgeId) -> Source {
        self.source[e.0]
    }

    pub fn target(&self, e: EdgeId) -> Target {
        self.target[e.0]
    }

    pub fn root_edge(&self) -> EdgeId {
        self.root_edge
    }

    /// The edge whose source is `v`.
    pub fn out_edge(&self, v: VertexId) -> EdgeId {
        self.out_edge[v.0]
    }

    /// The edge whose source is leaf `k` (one-based).
    pub fn leaf_edge(&self, k: usize) -> Result<EdgeId, TreeError> {
        if k == 0 || k > self.leaves {
            return Err(TreeError::LeafIndexOutOfRange {
                index: k,
                leaves: self.leaves,
            });
        }
        Ok(self.leaf_edge[k - 1])
    }

    /// `in(v)`, ordered by edge id.
    pub fn in_edges(&self, v: VertexId) -> Vec<EdgeId> {
        self.edges()
            .filter(|&e| self.target(e) == Target::Vertex(v))
            .collect()
    }

    /// `|t⁻¹(v)|`.
    pub fn arity(&self, v: VertexId) -> Result<usize, TreeError> {
        if v.0 >= self.vertex_count() {
            return Err(TreeError::UnknownVertex(v.0));
        }
        Ok(self
            .target
            .iter()
            .filter(|&&t| t == Target::Vertex(v))
            .count())
    }

    pub fn is_internal(&self, e: EdgeId) -> bool {
        matches!(
            (self.source(e), self.target(e)),
            (Source::Vertex(_), Target::Vertex(_))
        )
    }

    pub fn internal_edges(&self) -> Vec<EdgeId> {
        self.edges().filter(|&e| self.is_internal(e)).collect()
    }
}

/// A rooted tree together with a linear order on the children of each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanarTree {
    base: RootedTree,
    children: Vec<Vec<EdgeId>>,
}

impl PlanarTree {
    /// Orders the children of every vertex by edge id.
    pub fn from_rooted(base: RootedTree) -> Self {
        let mut children = vec![Vec::new(); base.vertex_count()];
        for e in base.edges() {
            if let Target::Vertex(v) = base.target(e) {
                children[v.0].push(e);
            }
        }
        PlanarTree { base, children }
    }

    /// Uses the given child order, which must list exactly `in(v)` for each `v`.
    pub fn with_order(base: RootedTree, children: Vec<Vec<EdgeId>>) -> Result<Self, TreeError> {
        if children.len() != base.vertex_count() {
            return Err(TreeError::InvalidChildOrder(children.len()));
        }
        for (v, kids) in children.iter().enumerate() {
            let mut sorted = kids.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != kids.len() || sorted != base.in_edges(VertexId(v)) {
                return Err(TreeError::InvalidChildOrder(v));
            }
        }
        Ok(PlanarTree { base, children })
    }

    pub fn unit() -> Self {
        Self::from_rooted(RootedTree::unit())
    }

    pub fn corolla(n: usize) -> Self {
        Self::from_rooted(RootedTree::corolla(n))
    }

    /// Builds a planar tree from a nested description. Children appear in
    /// the order given.
    pub fn from_shape(shape: &Shape) -> Result<Self, TreeError> {
        let mut b = Builder::default();
        let top = b.add(shape);
        let leaves = b.leaf_max;
        b.finish(top, leaves)
    }

    pub fn rooted(&self) -> &RootedTree {
        &self.base
    }

    /// Children of `v` in planar order.
    pub fn children(&self, v: VertexId) -> &[EdgeId] {
        &self.children[v.0]
    }

    pub fn leaf_count(&self) -> usize {
        self.base.leaf_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.base.edge_count()
    }

    pub fn source(&self, e: EdgeId) -> Source {
        self.base.source(e)
    }

    pub fn target(&self, e: EdgeId) -> Target {
        self.base.target(e)
    }

    pub fn root_edge(&self) -> EdgeId {
        self.base.root_edge()
    }

    pub fn arity(&self, v: VertexId) -> Result<usize, TreeError> {
        if v.0 >= self.vertex_count() {
            return Err(TreeError::UnknownVertex(v.0));
        }
        Ok(self.children[v.0].len())
    }

    /// Position (one-based) of `e` among the children of its target.
    pub fn child_position(&self, e: EdgeId) -> Option<usize> {
        match self.target(e) {
            Target::Root => None,
            Target::Vertex(v) => self.children[v.0].iter().position(|&c| c == e).map(|p| p + 1),
        }
    }

    /// Leaf labels in planar (left-to-right) order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.leaf_count());
        let mut stack = vec![self.root_edge()];
        while let Some(e) = stack.pop() {
            match self.source(e) {
                Source::Leaf(k) => out.push(k),
                Source::Vertex(v) => stack.extend(self.children(v).iter().rev()),
            }
        }
        out
    }

    /// Edges in depth-first preorder from the root edge, children in planar order.
    pub fn preorder(&self) -> Vec<EdgeId> {
        let mut out = Vec::with_capacity(self.edge_count());
        let mut stack = vec![self.root_edge()];
        while let Some(e) = stack.pop() {
            out.push(e);
            if let Source::Vertex(v) = self.source(e) {
                stack.extend(self.children(v).iter().rev());
            }
        }
        out
    }

    pub(crate) fn from_parts_ordered(
        leaves: usize,
        vertex_count: usize,
        source: Vec<Source>,
        target: Vec<Target>,
        children: Vec<Vec<EdgeId>>,
    ) -> Result<Self, TreeError> {
        let base = RootedTree::from_parts(leaves, vertex_count, source, target)?;
        Self::with_order(base, children)
    }
}

/// Nested description of a planar tree used by constructors and tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Leaf(usize),
    Node(Vec<Shape>),
}

impl Shape {
    pub fn node(children: impl IntoIterator<Item = Shape>) -> Self {
        Shape::Node(children.into_iter().collect())
    }
}

#[derive(Default)]
struct Builder {
    source: Vec<Source>,
    target: Vec<Option<Target>>,
    children: Vec<Vec<EdgeId>>,
    leaf_max: usize,
}

impl Builder {
    fn add(&mut self, shape: &Shape) -> EdgeId {
        let e = EdgeId(self.source.len());
        match shape {
            Shape::Leaf(k) => {
                self.leaf_max = self.leaf_max.max(*k);
                self.source.push(Source::Leaf(*k));
                self.target.push(None);
            }
            Shape::Node(kids) => {
                let v = VertexId(self.children.len());
                self.children.push(Vec::new());
                self.source.push(Source::Vertex(v));
                self.target.push(None);
                for k in kids {
                    let c = self.add(k);
                    self.target[c.0] = Some(Target::Vertex(v));
                    self.children[v.0].push(c);
                }
            }
        }
        e
    }

    fn finish(mut self, top: EdgeId, leaves: usize) -> Result<PlanarTree, TreeError> {
        self.target[top.0] = Some(Target::Root);
        let target = self.target.into_iter().map(Option::unwrap).collect();
        let vc = self.children.len();
        PlanarTree::from_parts_ordered(leaves, vc, self.source, target, self.children)
    }
}
