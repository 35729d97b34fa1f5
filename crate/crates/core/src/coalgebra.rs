//! `ℝ^X` as a coalgebra of `Phyl` and of `Com + [0,∞]`: a tree acts as a
//! linear map `ℝ^X → ℝ^{X^n}` built from the semigroup `α(t) = exp(tH)` on
//! edges and the diagonal maps `Δ_k` at vertices.
//!
//! Tensors are stored densely, row-major, with leaf 1 the outermost index.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::length::{EdgeLength, ExtendedLength};
use crate::markov::{expm, limit_operator, Distribution, MarkovError, MarkovGenerator, StateSpace};
use crate::operad::{ExtendedPhyloTree, OperadError, PhyloTree};
use crate::tree::Source;

/// Largest dense tensor that will be built.
pub const TENSOR_CAP: usize = 1_000_000;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CoalgebraError {
    #[error("state spaces differ")]
    StateSpaceMismatch,
    #[error("tensor would have {entries} entries, cap is {cap}")]
    TooLarge { entries: f64, cap: usize },
    #[error("arity must be at least 1")]
    BadArity,
    #[error("leaf {index} out of range 1..={leaves}")]
    IndexOutOfRange { index: usize, leaves: usize },
    #[error("{0} is outside the domain")]
    DomainError(f64),
    #[error("homotopy parameter {0} is outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Operad(#[from] OperadError),
}

fn dense_size(k: usize, n: usize) -> Result<usize, CoalgebraError> {
    let entries = (k as f64).powi(n as i32);
    if entries > TENSOR_CAP as f64 {
        return Err(CoalgebraError::TooLarge { entries, cap: TENSOR_CAP });
    }
    Ok(k.pow(n as u32))
}

/// An element of `(ℝ^X)^{⊗n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafTensor {
    states: StateSpace,
    n: usize,
    data: Vec<f64>,
}

impl LeafTensor {
    pub fn new(states: StateSpace, n: usize, data: Vec<f64>) -> Result<Self, CoalgebraError> {
        let size = dense_size(states.size(), n)?;
        if data.len() != size {
            return Err(CoalgebraError::InvalidTensor(format!("{} entries, expected {size}", data.len())));
        }
        Ok(LeafTensor { states, n, data })
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn leaf_count(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.states.size(); self.n]
    }

    /// Flat index of a leaf-state tuple.
    pub fn index(&self, tuple: &[usize]) -> usize {
        let k = self.states.size();
        tuple.iter().fold(0, |acc, &x| acc * k + x)
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.data[self.index(tuple)]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// `Δ_k f`: `f(x)` on the diagonal `(x, …, x)`, 0 elsewhere.
pub fn duplicate(k: usize, states: &StateSpace, f: &DVector<f64>) -> Result<LeafTensor, CoalgebraError> {
    if k == 0 {
        return Err(CoalgebraError::BadArity);
    }
    if f.len() != states.size() {
        return Err(CoalgebraError::StateSpaceMismatch);
    }
    let s = states.size();
    let size = dense_size(s, k)?;
    let mut data = vec![0.0; size];
    let step: usize = (0..k).map(|j| s.pow(j as u32)).sum();
    for x in 0..s {
        data[x * step] = f[x];
    }
    LeafTensor::new(states.clone(), k, data)
}

/// `Δ_k` as a `|X|^k × |X|` matrix.
pub fn duplication_matrix(k: usize, states: &StateSpace) -> Result<DMatrix<f64>, CoalgebraError> {
    let s = states.size();
    let mut m = DMatrix::zeros(dense_size(s, k)?, s);
    for x in 0..s {
        let t = duplicate(k, states, &DVector::from_fn(s, |i, _| if i == x { 1.0 } else { 0.0 }))?;
        m.set_column(x, &DVector::from_vec(t.data));
    }
    Ok(m)
}

/// Row-major `rows × k` block mapping a state at the bottom of an edge to
/// the leaves above it, rows ordered by sorted leaf labels.
struct Block {
    leaves: Vec<usize>,
    data: Vec<f64>,
}

fn product_of(values: &mut [f64]) -> f64 {
    // sorting first makes the rounding independent of child order
    if values.len() > 2 {
        values.sort_by(|a, b| a.total_cmp(b));
    }
    values.iter().fold(1.0, |acc, v| acc * v)
}

fn combine_children(children: &[&Block], k: usize) -> Block {
    let mut leaves: Vec<usize> = children.iter().flat_map(|c| c.leaves.iter().copied()).collect();
    leaves.sort_unstable();
    let positions: Vec<Vec<usize>> = children
        .iter()
        .map(|c| c.leaves.iter().map(|l| leaves.binary_search(l).expect("leaf present")).collect())
        .collect();
    let rows = k.pow(leaves.len() as u32);
    let mut data = vec![0.0; rows * k];
    let mut digits = vec![0usize; leaves.len()];
    let mut child_rows = vec![0usize; children.len()];
    let mut values = vec![0.0; children.len()];
    for r in 0..rows {
        let mut rem = r;
        for d in digits.iter_mut().rev() {
            *d = rem % k;
            rem /= k;
        }
        for (i, pos) in positions.iter().enumerate() {
            child_rows[i] = pos.iter().fold(0, |acc, &p| acc * k + digits[p]);
        }
        for x in 0..k {
            for (i, c) in children.iter().enumerate() {
                values[i] = c.data[child_rows[i] * k + x];
            }
            data[r * k + x] = product_of(&mut values);
        }
    }
    Block { leaves, data }
}

fn then_edge(block: Block, alpha: &DMatrix<f64>, k: usize) -> Block {
    let rows = block.data.len() / k;
    let mut data = vec![0.0; rows * k];
    for r in 0..rows {
        let row = &block.data[r * k..(r + 1) * k];
        for y in 0..k {
            let mut acc = 0.0;
            for (x, v) in row.iter().enumerate() {
                acc += v * alpha[(x, y)];
            }
            data[r * k + y] = acc;
        }
    }
    Block { leaves: block.leaves, data }
}

fn operator_with<L: EdgeLength>(
    tree: &PhyloTree<L>,
    k: usize,
    mut alpha: impl FnMut(&L) -> Result<DMatrix<f64>, CoalgebraError>,
) -> Result<DMatrix<f64>, CoalgebraError> {
    let n = tree.leaf_count();
    let rows = dense_size(k, n)?;
    let t = tree.tree();
    let mut blocks: Vec<Option<Block>> = (0..t.edge_count()).map(|_| None).collect();
    for e in t.preorder().into_iter().rev() {
        let above = match t.source(e) {
            Source::Leaf(l) => Block {
                leaves: vec![l],
                data: (0..k * k).map(|i| if i / k == i % k { 1.0 } else { 0.0 }).collect(),
            },
            Source::Vertex(v) => {
                let kids: Vec<Block> = t
                    .children(v)
                    .iter()
                    .map(|c| blocks[c.0].take().expect("children come first in post-order"))
                    .collect();
                let refs: Vec<&Block> = kids.iter().collect();
                combine_children(&refs, k)
            }
        };
        blocks[e.0] = Some(then_edge(above, &alpha(tree.length(e))?, k));
    }
    let top = blocks[t.root_edge().0].take().expect("root edge evaluated");
    Ok(DMatrix::from_row_slice(rows, k, &top.data))
}

/// Evaluates trees against one generator, caching `α(∞)` and `α(t)` per
/// distinct length.
pub struct Coalgebra {
    generator: MarkovGenerator,
    limit: OnceLock<Result<DMatrix<f64>, MarkovError>>,
}

impl Coalgebra {
    pub fn new(generator: MarkovGenerator) -> Self {
        Coalgebra {
            generator,
            limit: OnceLock::new(),
        }
    }

    pub fn generator(&self) -> &MarkovGenerator {
        &self.generator
    }

    pub fn states(&self) -> &StateSpace {
        self.generator.states()
    }

    /// `α(∞)`, computed on first use.
    pub fn limit(&self) -> Result<&DMatrix<f64>, CoalgebraError> {
        self.limit
            .get_or_init(|| limit_operator(&self.generator).map(|p| p.matrix().clone()))
            .as_ref()
            .map_err(|e| e.clone().into())
    }

    fn alpha_cached(&self, cache: &mut HashMap<u64, DMatrix<f64>>, t: f64) -> Result<DMatrix<f64>, CoalgebraError> {
        if let Some(m) = cache.get(&t.to_bits()) {
            return Ok(m.clone());
        }
        let m = expm(&self.generator, t)?.matrix().clone();
        cache.insert(t.to_bits(), m.clone());
        Ok(m)
    }

    /// The `|X|^n × |X|` matrix of a tree.
    pub fn operator(&self, tree: &PhyloTree) -> Result<DMatrix<f64>, CoalgebraError> {
        let mut cache = HashMap::new();
        operator_with(tree, self.states().size(), |l| self.alpha_cached(&mut cache, *l))
    }

    /// The matrix of a tree whose lengths may be `∞`.
    pub fn operator_extended(&self, tree: &ExtendedPhyloTree) -> Result<DMatrix<f64>, CoalgebraError> {
        let mut cache = HashMap::new();
        operator_with(tree, self.states().size(), |l| match l {
            ExtendedLength::Finite(t) => self.alpha_cached(&mut cache, *t),
            ExtendedLength::Infinite => self.limit().cloned(),
        })
    }

    fn apply(&self, m: DMatrix<f64>, n: usize, f: &Distribution) -> Result<LeafTensor, CoalgebraError> {
        if f.states() != self.states() {
            return Err(CoalgebraError::StateSpaceMismatch);
        }
        let out = m * f.vector();
        LeafTensor::new(self.states().clone(), n, out.iter().copied().collect())
    }

    pub fn evaluate(&self, tree: &PhyloTree, f: &Distribution) -> Result<LeafTensor, CoalgebraError> {
        if f.states() != self.states() {
            return Err(CoalgebraError::StateSpaceMismatch);
        }
        self.apply(self.operator(tree)?, tree.leaf_count(), f)
    }

    pub fn evaluate_extended(&self, tree: &ExtendedPhyloTree, f: &Distribution) -> Result<LeafTensor, CoalgebraError> {
        if f.states() != self.states() {
            return Err(CoalgebraError::StateSpaceMismatch);
        }
        self.apply(self.operator_extended(tree)?, tree.leaf_count(), f)
    }
}

/// The joint leaf distribution produced from `f` at the root.
pub fn evaluate(tree: &PhyloTree, g: &MarkovGenerator, f: &Distribution) -> Result<LeafTensor, CoalgebraError> {
    Coalgebra::new(g.clone()).evaluate(tree, f)
}

/// The tree as a linear map `ℝ^X → ℝ^{X^n}`.
pub fn evaluate_operator(tree: &PhyloTree, g: &MarkovGenerator) -> Result<DMatrix<f64>, CoalgebraError> {
    Coalgebra::new(g.clone()).operator(tree)
}

/// As [`evaluate`], with `α(∞)` the limit operator.
pub fn evaluate_extended(
    tree: &ExtendedPhyloTree,
    g: &MarkovGenerator,
    f: &Distribution,
) -> Result<LeafTensor, CoalgebraError> {
    Coalgebra::new(g.clone()).evaluate_extended(tree, f)
}

/// Sum over every leaf except `leaf` (one-based).
pub fn marginal(t: &LeafTensor, leaf: usize) -> Result<DVector<f64>, CoalgebraError> {
    if leaf == 0 || leaf > t.n {
        return Err(CoalgebraError::IndexOutOfRange { index: leaf, leaves: t.n });
    }
    let k = t.states.size();
    let inner = k.pow((t.n - leaf) as u32);
    let mut out = DVector::zeros(k);
    for (i, v) in t.data.iter().enumerate() {
        out[(i / inner) % k] += v;
    }
    Ok(out)
}

/// True when the root edge and every leaf edge have length `∞`.
pub fn w_membership(tree: &ExtendedPhyloTree) -> bool {
    tree.external_edges().into_iter().all(|e| tree.length(e).is_infinite())
}

/// `ψ(t) = 1 − e^{−t}`, carrying `([0,∞], +)` to `([0,1], ⋆)`.
pub fn monoid_iso(t: ExtendedLength) -> Result<f64, CoalgebraError> {
    match t {
        ExtendedLength::Infinite => Ok(1.0),
        ExtendedLength::Finite(x) if x >= 0.0 && x.is_finite() => Ok(-(-x).exp_m1()),
        ExtendedLength::Finite(x) => Err(CoalgebraError::DomainError(x)),
    }
}

/// `ψ⁻¹(u) = −ln(1 − u)`, with `ψ⁻¹(1) = ∞`.
pub fn monoid_iso_inv(u: f64) -> Result<ExtendedLength, CoalgebraError> {
    if !(0.0..=1.0).contains(&u) {
        return Err(CoalgebraError::DomainError(u));
    }
    if u == 1.0 {
        return Ok(ExtendedLength::Infinite);
    }
    Ok(ExtendedLength::Finite(-(-u).ln_1p()))
}

/// `x ⋆ y = x + y − xy` on `[0,1]`.
pub fn star(x: f64, y: f64) -> f64 {
    x + y - x * y
}

/// `l̂_t(e) = ψ⁻¹((1 − t)·ψ(l(e)) + t)` on external edges, internal
/// lengths unchanged. `t = 0` returns the tree itself; `t = 1` sends every
/// external length to `∞`.
pub fn homotopy_retract(tree: &ExtendedPhyloTree, t: f64) -> Result<ExtendedPhyloTree, CoalgebraError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(CoalgebraError::ParameterOutOfRange(t));
    }
    if t == 0.0 {
        return Ok(tree.clone());
    }
    let external = tree.external_edges();
    let mut failure = None;
    let out = tree.map_lengths(|e, l| {
        if !external.contains(&e) {
            return *l;
        }
        if t == 1.0 {
            return ExtendedLength::Infinite;
        }
        let moved = monoid_iso(*l).and_then(|u| monoid_iso_inv(((1.0 - t) * u + t).min(1.0)));
        moved.unwrap_or_else(|e| {
            failure = Some(e);
            *l
        })
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::validate_generator;

    fn flip() -> MarkovGenerator {
        validate_generator(StateSpace::indexed(2), DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0])).unwrap()
    }

    #[test]
    fn duplication() {
        let s = StateSpace::indexed(2);
        let d = duplicate(2, &s, &DVector::from_vec(vec![0.3, 0.7])).unwrap();
        assert_eq!(d.data(), &[0.3, 0.0, 0.0, 0.7]);
        let one = duplicate(1, &s, &DVector::from_vec(vec![0.3, 0.7])).unwrap();
        assert_eq!(one.data(), &[0.3, 0.7]);
        assert!(matches!(duplicate(0, &s, &DVector::zeros(2)), Err(CoalgebraError::BadArity)));
        let e = duplicate(3, &StateSpace::indexed(3), &DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
        assert_eq!(e.get(&[1, 1, 1]), 1.0);
        assert_eq!(e.sum(), 1.0);
    }

    #[test]
    fn zero_corolla_is_duplication() {
        let g = flip();
        let t = PhyloTree::corolla(0.0, vec![0.0, 0.0]).unwrap();
        let m = evaluate_operator(&t, &g).unwrap();
        assert_eq!(m, duplication_matrix(2, g.states()).unwrap());
        let id = evaluate_operator(&PhyloTree::identity(), &g).unwrap();
        assert_eq!(id, DMatrix::identity(2, 2));
    }

    #[test]
    fn monoid_iso_values() {
        assert_eq!(monoid_iso(ExtendedLength::Finite(0.0)).unwrap(), 0.0);
        assert_eq!(monoid_iso(ExtendedLength::Infinite).unwrap(), 1.0);
        assert!((monoid_iso(ExtendedLength::Finite(2f64.ln())).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(monoid_iso_inv(1.0).unwrap(), ExtendedLength::Infinite);
        assert!(monoid_iso_inv(1.5).is_err());
        assert!(monoid_iso(ExtendedLength::Finite(-1.0)).is_err());
    }

    #[test]
    fn w_members() {
        let inf = ExtendedLength::Infinite;
        let t = ExtendedPhyloTree::corolla(inf, vec![inf, inf]).unwrap();
        assert!(w_membership(&t));
        assert!(!w_membership(&ExtendedPhyloTree::identity()));
        let c = t.compose(1, &t).unwrap();
        assert!(w_membership(&c));
        assert_eq!(c.internal_edges().len(), 1);
    }

    #[test]
    fn retraction_endpoints() {
        let t = ExtendedPhyloTree::corolla(ExtendedLength::Finite(0.5), vec![ExtendedLength::Finite(0.0), ExtendedLength::Finite(2.0)])
            .unwrap();
        assert_eq!(homotopy_retract(&t, 0.0).unwrap(), t);
        assert!(w_membership(&homotopy_retract(&t, 1.0).unwrap()));
        assert!(!w_membership(&homotopy_retract(&t, 0.5).unwrap()));
        assert!(homotopy_retract(&t, 1.5).is_err());
    }
}
