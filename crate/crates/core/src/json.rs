//! JSON forms shared by the command-line tool.
//!
//! - matrix: `{"states": [..], "rows": [[..], ..]}`; `rows[y][x]` is the
//!   entry in row `y`, column `x`. Matrices are column-stochastic, so a
//!   generator's `rows[y][x]` is the rate from state `x` to state `y`.
//! - distribution: `{"states": [..], "p": [..]}`
//! - tensor: `{"states": [..], "n": n, "data": [..]}`, flat, row-major,
//!   leaf 1 outermost.
//! - mixed tree: `{"leaf": k}`, `{"com": [child, ..]}` or
//!   `{"len": {"length": x, "child": node}}`.
//! - decomposition: `{"n": n, "splits": [{"cluster": [..], "length": x}],
//!   "external": [..]}`, `external[0]` the root edge.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::coalgebra::{CoalgebraError, LeafTensor};
use crate::markov::{validate_generator, Distribution, MarkovError, MarkovGenerator, StateSpace};
use crate::operad::{MixedNode, MixedTree, OperadError, PhyloTree};
use crate::space::{recompose, recompose1, Cluster, ExternalLengths, MetricTree, SpaceError};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, JsonError> {
    serde_json::from_str(text).map_err(|e| JsonError::Parse(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    states: Vec<String>,
    rows: Vec<Vec<f64>>,
}

pub fn matrix_to_json(states: &StateSpace, m: &DMatrix<f64>) -> Value {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    json!({ "states": states.labels(), "rows": rows })
}

pub fn matrix_from_json(text: &str) -> Result<(StateSpace, DMatrix<f64>), JsonError> {
    let m: MatrixJson = parse(text)?;
    let k = m.rows.len();
    if m.rows.iter().any(|r| r.len() != k) {
        return Err(JsonError::Shape("matrix rows must all have one entry per row".into()));
    }
    let states = StateSpace::new(m.states)?;
    let flat: Vec<f64> = m.rows.into_iter().flatten().collect();
    Ok((states, DMatrix::from_row_slice(k, k, &flat)))
}

pub fn generator_from_json(text: &str) -> Result<MarkovGenerator, JsonError> {
    let (s, m) = matrix_from_json(text)?;
    Ok(validate_generator(s, m)?)
}

pub fn generator_to_json(g: &MarkovGenerator) -> Value {
    matrix_to_json(g.states(), g.matrix())
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    states: Vec<String>,
    p: Vec<f64>,
}

pub fn distribution_from_json(text: &str) -> Result<Distribution, JsonError> {
    let d: DistributionJson = parse(text)?;
    Ok(Distribution::new(StateSpace::new(d.states)?, DVector::from_vec(d.p))?)
}

pub fn distribution_to_json(d: &Distribution) -> Value {
    json!({ "states": d.states().labels(), "p": d.vector().iter().collect::<Vec<_>>() })
}

pub fn tensor_to_json(t: &LeafTensor) -> Value {
    json!({ "states": t.states().labels(), "n": t.leaf_count(), "data": t.data() })
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    states: Vec<String>,
    n: usize,
    data: Vec<f64>,
}

pub fn tensor_from_json(text: &str) -> Result<LeafTensor, JsonError> {
    let t: TensorJson = parse(text)?;
    Ok(LeafTensor::new(StateSpace::new(t.states)?, t.n, t.data)?)
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum NodeJson {
    Leaf(usize),
    Com(Vec<NodeJson>),
    Len { length: f64, child: Box<NodeJson> },
}

impl From<&MixedNode> for NodeJson {
    fn from(n: &MixedNode) -> Self {
        match n {
            MixedNode::Leaf(k) => NodeJson::Leaf(*k),
            MixedNode::Com(kids) => NodeJson::Com(kids.iter().map(NodeJson::from).collect()),
            MixedNode::Len(l, kid) => NodeJson::Len {
                length: *l,
                child: Box::new(NodeJson::from(kid.as_ref())),
            },
        }
    }
}

impl From<NodeJson> for MixedNode {
    fn from(n: NodeJson) -> Self {
        match n {
            NodeJson::Leaf(k) => MixedNode::Leaf(k),
            NodeJson::Com(kids) => MixedNode::Com(kids.into_iter().map(MixedNode::from).collect()),
            NodeJson::Len { length, child } => MixedNode::len(length, MixedNode::from(*child)),
        }
    }
}

pub fn mixed_from_json(text: &str) -> Result<MixedTree, JsonError> {
    let n: NodeJson = parse(text)?;
    Ok(MixedNode::from(n).to_tree()?)
}

pub fn mixed_to_json(t: &MixedTree) -> Value {
    serde_json::to_value(NodeJson::from(&MixedNode::from_tree(t))).expect("plain data serializes")
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SplitJson {
    pub cluster: Cluster,
    pub length: f64,
}

/// A metric tree with its external lengths.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DecompositionJson {
    pub n: usize,
    pub splits: Vec<SplitJson>,
    pub external: Vec<f64>,
}

impl DecompositionJson {
    pub fn from_parts(m: &MetricTree, external: Vec<f64>) -> Self {
        DecompositionJson {
            n: m.leaf_count(),
            splits: m
                .splits()
                .iter()
                .map(|(c, l)| SplitJson {
                    cluster: c.clone(),
                    length: *l,
                })
                .collect(),
            external,
        }
    }

    /// Rebuilds the phylogenetic tree.
    pub fn recompose(&self) -> Result<PhyloTree, JsonError> {
        if self.n == 1 {
            if !self.splits.is_empty() || self.external.len() != 1 {
                return Err(JsonError::Shape("a 1-tree has no splits and one length".into()));
            }
            return Ok(recompose1(self.external[0])?);
        }
        let splits = self.splits.iter().map(|s| (s.cluster.clone(), s.length)).collect();
        let m = MetricTree::from_splits(self.n, splits)?;
        Ok(recompose(&m, &ExternalLengths::new(self.external.clone())?)?)
    }
}

pub fn decomposition_from_json(text: &str) -> Result<DecompositionJson, JsonError> {
    parse(text)
}
