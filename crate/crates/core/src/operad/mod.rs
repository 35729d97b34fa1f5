//! Operads given by partial composition, and the instances used for
//! phylogenetic trees.
//!
//! An [`Operad`] supplies `f ∘_i g`, the identity `1 ∈ O_1` and the right
//! action of `S_n` on `O_n`. Leaf and input indices are one-based.

mod free;
mod laws;
mod phylo;
mod reduce;

use std::fmt::Debug;

use thiserror::Error;

use crate::length::{EdgeLength, ExtendedLength};
use crate::perm::Permutation;
use crate::tree::TreeError;

pub use free::{counit_equivalent, counit_eval, counit_eval_in_order, CTree, Collection, FreeOperad, Symbol, Symbols, Underlying};
pub use laws::{operad_law_suite, LawReport, LawResult};
pub use phylo::{ExtendedPhyloTree, Phyl, PhyloTree};
pub use reduce::{
    from_phylo, mixed_form, reduce_coproduct_tree, reduce_with_order, to_phylo, MixedLabel, MixedNode, MixedTree, MoveKind,
    MoveOrder, Reduction,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum OperadError {
    #[error("input index {index} out of range 1..={arity}")]
    LeafIndexOutOfRange { index: usize, arity: usize },
    #[error("vertex {vertex} has arity {vertex_arity} but its label has arity {label_arity}")]
    ArityLabelMismatch {
        vertex: usize,
        vertex_arity: usize,
        label_arity: usize,
    },
    #[error("permutation has size {got}, operation has arity {expected}")]
    PermutationSizeMismatch { expected: usize, got: usize },
    #[error("operation is not in this operad: {0}")]
    NotAnOperation(String),
    #[error("malformed labelling: {0}")]
    MalformedLabelling(String),
    #[error("tree is not reduced: {0}")]
    NotReduced(String),
    #[error("phylogenetic tree invariant violated: {0}")]
    PhyloInvariant(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

pub trait Operad {
    type Op: Clone + PartialEq + Debug;

    fn arity(&self, f: &Self::Op) -> usize;
    fn identity(&self) -> Self::Op;
    fn compose(&self, f: &Self::Op, i: usize, g: &Self::Op) -> Result<Self::Op, OperadError>;
    fn act(&self, f: &Self::Op, sigma: &Permutation) -> Result<Self::Op, OperadError>;
    /// Text form that is equal exactly for equal operations.
    fn encode(&self, f: &Self::Op) -> String;
}

fn check_index(i: usize, arity: usize) -> Result<(), OperadError> {
    if i == 0 || i > arity {
        Err(OperadError::LeafIndexOutOfRange { index: i, arity })
    } else {
        Ok(())
    }
}

fn check_perm(arity: usize, sigma: &Permutation) -> Result<(), OperadError> {
    if sigma.len() != arity {
        Err(OperadError::PermutationSizeMismatch {
            expected: arity,
            got: sigma.len(),
        })
    } else {
        Ok(())
    }
}

/// The commutative operad: one operation per arity `n ≥ 1`, represented by
/// its arity. With `nullary` set it also has the 0-ary operation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Com {
    pub nullary: bool,
}

impl Com {
    pub fn plus() -> Self {
        Com { nullary: true }
    }
}

impl Operad for Com {
    type Op = usize;

    fn arity(&self, f: &usize) -> usize {
        *f
    }

    fn identity(&self) -> usize {
        1
    }

    fn compose(&self, f: &usize, i: usize, g: &usize) -> Result<usize, OperadError> {
        check_index(i, *f)?;
        if *g == 0 && !self.nullary {
            return Err(OperadError::NotAnOperation("Com has no 0-ary operation".into()));
        }
        Ok(f + g - 1)
    }

    fn act(&self, f: &usize, sigma: &Permutation) -> Result<usize, OperadError> {
        check_perm(*f, sigma)?;
        Ok(*f)
    }

    fn encode(&self, f: &usize) -> String {
        f.to_string()
    }
}

/// A monoid viewed as an operad with only unary operations.
#[derive(Debug, Clone, Copy, Default)]
pub struct LengthMonoid<L> {
    _marker: std::marker::PhantomData<L>,
}

impl<L> LengthMonoid<L> {
    pub fn new() -> Self {
        LengthMonoid {
            _marker: std::marker::PhantomData,
        }
    }
}

/// `[0, ∞)` under addition.
pub type HalfLine = LengthMonoid<f64>;
/// `[0, ∞]` under addition.
pub type ExtendedHalfLine = LengthMonoid<ExtendedLength>;

impl<L: EdgeLength> Operad for LengthMonoid<L> {
    type Op = L;

    fn arity(&self, _: &L) -> usize {
        1
    }

    fn identity(&self) -> L {
        L::zero()
    }

    fn compose(&self, f: &L, i: usize, g: &L) -> Result<L, OperadError> {
        check_index(i, 1)?;
        f.check().map_err(OperadError::NotAnOperation)?;
        g.check().map_err(OperadError::NotAnOperation)?;
        Ok(f.combine(g).normalized())
    }

    fn act(&self, f: &L, sigma: &Permutation) -> Result<L, OperadError> {
        check_perm(1, sigma)?;
        Ok(f.clone())
    }

    fn encode(&self, f: &L) -> String {
        f.encode()
    }
}

/// The associative operad: an operation of arity `n` is a word listing
/// `1..=n` once each, read as the left-to-right order of the inputs.
/// It has a free symmetric action and serves as a check on the
/// equivariance bookkeeping.
#[derive(Debug, Clone, Copy, Default)]
pub struct Assoc;

impl Operad for Assoc {
    type Op = Vec<usize>;

    fn arity(&self, f: &Vec<usize>) -> usize {
        f.len()
    }

    fn identity(&self) -> Vec<usize> {
        vec![1]
    }

    fn compose(&self, f: &Vec<usize>, i: usize, g: &Vec<usize>) -> Result<Vec<usize>, OperadError> {
        check_index(i, f.len())?;
        let n = g.len();
        let mut out = Vec::with_capacity(f.len() + n - 1);
        for &k in f {
            if k == i {
                out.extend(g.iter().map(|&j| j + i - 1));
            } else if k < i {
                out.push(k);
            } else {
                out.push(k + n - 1);
            }
        }
        Ok(out)
    }

    fn act(&self, f: &Vec<usize>, sigma: &Permutation) -> Result<Vec<usize>, OperadError> {
        check_perm(f.len(), sigma)?;
        let inv = sigma.inverse();
        Ok(f.iter().map(|&k| inv.apply(k)).collect())
    }

    fn encode(&self, f: &Vec<usize>) -> String {
        format!("{f:?}")
    }
}
