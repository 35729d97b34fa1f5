//! Continuous-time Markov chains on finite state spaces.
//!
//! Matrices are column-stochastic: they act on column vectors of
//! probabilities, and `H[y][x]` is the rate of jumping from `x` to `y`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use thiserror::Error;

use crate::operad::PhyloTree;
use crate::tree::{Source, Target};

/// Tolerance on generator column sums, relative to the column's scale.
pub const GENERATOR_TOL: f64 = 1e-12;
/// Tolerance on stochastic column sums.
pub const STOCHASTIC_TOL: f64 = 1e-10;
/// Negative entries above this are roundoff and are clamped to 0.
pub const CLAMP_TOL: f64 = 1e-12;
/// Tolerance on distribution sums.
pub const DISTRIBUTION_TOL: f64 = 1e-12;
/// Largest state space `site_product` will build.
pub const SITE_PRODUCT_CAP: usize = 64;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MarkovError {
    #[error("entry ({row}, {col}) is {value}; off-diagonal rates must be nonnegative")]
    NegativeOffDiagonal { row: usize, col: usize, value: f64 },
    #[error("column {col} sums to {sum}, expected 0")]
    ColumnSumNonzero { col: usize, sum: f64 },
    #[error("expected a {expected}×{expected} matrix, got {rows}×{cols}")]
    ShapeMismatch { expected: usize, rows: usize, cols: usize },
    #[error("time {0} is negative")]
    NegativeTime(f64),
    #[error("time {0} is not finite; use the limit operator for t = ∞")]
    NonFiniteTime(f64),
    #[error("no convergence after {doublings} doublings, residual {residual:e}")]
    NoConvergence { doublings: usize, residual: f64 },
    #[error("rate {0} must be positive and finite")]
    BadRate(f64),
    #[error("alphabet size {0} must be at least 2")]
    BadAlphabet(usize),
    #[error("state space of size {size} exceeds the cap {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("not a stochastic matrix: {0}")]
    InvalidStochastic(String),
    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid state space: {0}")]
    InvalidStates(String),
    #[error("state spaces differ")]
    StateMismatch,
    #[error("need at least one sample")]
    NoSamples,
}

/// An ordered finite set of state names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new(labels: Vec<String>) -> Result<Self, MarkovError> {
        if labels.is_empty() {
            return Err(MarkovError::InvalidStates("no states".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(MarkovError::InvalidStates("duplicate labels".into()));
        }
        Ok(StateSpace { labels })
    }

    /// States named `0..k`.
    pub fn indexed(k: usize) -> Self {
        StateSpace {
            labels: (0..k).map(|i| i.to_string()).collect(),
        }
    }

    /// `A, T, C, G`.
    pub fn dna() -> Self {
        StateSpace {
            labels: ["A", "T", "C", "G"].iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `X^N` with words ordered lexicographically, first site outermost.
    /// Labels are joined with `.` unless every label is one character.
    pub fn power(&self, sites: usize) -> Self {
        let sep = if self.labels.iter().all(|l| l.chars().count() == 1) { "" } else { "." };
        let mut words = vec![String::new()];
        for site in 0..sites {
            words = words
                .iter()
                .flat_map(|w| {
                    self.labels.iter().map(move |l| if site == 0 { l.clone() } else { format!("{w}{sep}{l}") })
                })
                .collect();
        }
        StateSpace { labels: words }
    }
}

fn check_square(states: &StateSpace, m: &DMatrix<f64>) -> Result<(), MarkovError> {
    let k = states.size();
    if m.nrows() != k || m.ncols() != k {
        return Err(MarkovError::ShapeMismatch {
            expected: k,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Largest absolute column sum.
pub fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// A rate matrix: nonnegative off-diagonal entries, columns summing to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovGenerator {
    states: StateSpace,
    h: DMatrix<f64>,
}

/// Checks a raw rate matrix.
pub fn validate_generator(states: StateSpace, h: DMatrix<f64>) -> Result<MarkovGenerator, MarkovError> {
    check_square(&states, &h)?;
    for (col, c) in h.column_iter().enumerate() {
        for (row, &x) in c.iter().enumerate() {
            if !x.is_finite() {
                return Err(MarkovError::InvalidStochastic(format!("entry ({row}, {col}) is {x}")));
            }
            if row != col && x < 0.0 {
                return Err(MarkovError::NegativeOffDiagonal { row, col, value: x });
            }
        }
    }
    for (col, c) in h.column_iter().enumerate() {
        let sum: f64 = c.iter().sum();
        let scale: f64 = c.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        if sum.abs() > GENERATOR_TOL * scale {
            return Err(MarkovError::ColumnSumNonzero { col, sum });
        }
    }
    Ok(MarkovGenerator { states, h })
}

impl MarkovGenerator {
    pub fn new(states: StateSpace, h: DMatrix<f64>) -> Result<Self, MarkovError> {
        validate_generator(states, h)
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn size(&self) -> usize {
        self.states.size()
    }
}

/// Every state flips to each other state at rate `mu`. States are
/// `A, T, C, G` for `k = 4`, otherwise `0..k`.
pub fn jukes_cantor(mu: f64, k: usize) -> Result<MarkovGenerator, MarkovError> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(MarkovError::BadRate(mu));
    }
    if k < 2 {
        return Err(MarkovError::BadAlphabet(k));
    }
    let states = if k == 4 { StateSpace::dna() } else { StateSpace::indexed(k) };
    let h = DMatrix::from_fn(k, k, |i, j| if i == j { -((k - 1) as f64) * mu } else { mu });
    validate_generator(states, h)
}

/// The generator of `N` independent copies running at once:
/// `Σ_j I ⊗ … ⊗ H ⊗ … ⊗ I`.
pub fn site_product(g: &MarkovGenerator, sites: usize) -> Result<MarkovGenerator, MarkovError> {
    let k = g.size();
    let size = (0..sites).try_fold(1usize, |acc, _| acc.checked_mul(k)).unwrap_or(usize::MAX);
    if sites == 0 || size > SITE_PRODUCT_CAP {
        return Err(MarkovError::SizeCap { size, cap: SITE_PRODUCT_CAP });
    }
    let eye = DMatrix::<f64>::identity(k, k);
    let mut total = DMatrix::<f64>::zeros(size, size);
    for j in 0..sites {
        let mut term = DMatrix::<f64>::identity(1, 1);
        for site in 0..sites {
            term = term.kronecker(if site == j { &g.h } else { &eye });
        }
        total += term;
    }
    validate_generator(g.states.power(sites), total)
}

/// A column-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    states: StateSpace,
    m: DMatrix<f64>,
}

impl StochasticMatrix {
    /// Validates, clamping roundoff negatives to 0.
    pub fn new(states: StateSpace, mut m: DMatrix<f64>) -> Result<Self, MarkovError> {
        check_square(&states, &m)?;
        for x in m.iter_mut() {
            if !x.is_finite() || *x < -CLAMP_TOL {
                return Err(MarkovError::InvalidStochastic(format!("entry {x}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        for (col, c) in m.column_iter().enumerate() {
            let s: f64 = c.iter().sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(MarkovError::InvalidStochastic(format!("column {col} sums to {s}")));
            }
        }
        Ok(StochasticMatrix { states, m })
    }

    pub fn identity(states: StateSpace) -> Self {
        let k = states.size();
        StochasticMatrix {
            states,
            m: DMatrix::identity(k, k),
        }
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn apply(&self, f: &Distribution) -> Result<Distribution, MarkovError> {
        if f.states != self.states {
            return Err(MarkovError::StateMismatch);
        }
        Distribution::new(self.states.clone(), &self.m * &f.p)
    }
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    states: StateSpace,
    p: DVector<f64>,
}

impl Distribution {
    /// Validates, clamping roundoff negatives to 0.
    pub fn new(states: StateSpace, mut p: DVector<f64>) -> Result<Self, MarkovError> {
        if p.len() != states.size() {
            return Err(MarkovError::InvalidDistribution(format!(
                "{} entries for {} states",
                p.len(),
                states.size()
            )));
        }
        for x in p.iter_mut() {
            if !x.is_finite() || *x < -CLAMP_TOL {
                return Err(MarkovError::InvalidDistribution(format!("entry {x}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > DISTRIBUTION_TOL.max(STOCHASTIC_TOL * p.len() as f64) {
            return Err(MarkovError::InvalidDistribution(format!("sums to {s}")));
        }
        Ok(Distribution { states, p })
    }

    pub fn uniform(states: StateSpace) -> Self {
        let k = states.size();
        Distribution {
            states,
            p: DVector::from_element(k, 1.0 / k as f64),
        }
    }

    /// All mass on state `i`.
    pub fn point(states: StateSpace, i: usize) -> Self {
        let p = DVector::from_fn(states.size(), |j, _| if i == j { 1.0 } else { 0.0 });
        Distribution { states, p }
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.p
    }
}

/// `exp(tH)` for a raw square matrix, by scaling and squaring around a
/// Taylor series that stops once a term no longer changes the sum.
pub fn expm_raw(h: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let k = h.nrows();
    let a = h * t;
    let norm = norm1(&a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let x = a / 2f64.powi(squarings);
    let mut sum = DMatrix::<f64>::identity(k, k);
    let mut term = DMatrix::<f64>::identity(k, k);
    for j in 1..40 {
        term = &term * &x / j as f64;
        sum += &term;
        if max_abs(&term) <= f64::EPSILON * max_abs(&sum) * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `α(t) = exp(tH)` for finite `t ≥ 0`.
pub fn expm(g: &MarkovGenerator, t: f64) -> Result<StochasticMatrix, MarkovError> {
    if t.is_nan() || t.is_infinite() {
        return Err(MarkovError::NonFiniteTime(t));
    }
    if t < 0.0 {
        return Err(MarkovError::NegativeTime(t));
    }
    StochasticMatrix::new(g.states.clone(), expm_raw(&g.h, t))
}

pub const LIMIT_STEP_TOL: f64 = 1e-10;
pub const LIMIT_IDEMPOTENCE_TOL: f64 = 1e-8;
pub const MAX_DOUBLINGS: usize = 64;

/// `P = lim_{t→∞} exp(tH)`, by squaring `exp(H)` until successive powers
/// agree.
pub fn limit_operator(g: &MarkovGenerator) -> Result<StochasticMatrix, MarkovError> {
    let mut p = expm_raw(&g.h, 1.0);
    let mut step = f64::INFINITY;
    let mut doublings = 0;
    while doublings < MAX_DOUBLINGS {
        let q = &p * &p;
        step = max_abs(&(&q - &p));
        p = q;
        doublings += 1;
        if step < LIMIT_STEP_TOL {
            break;
        }
    }
    let residual = max_abs(&(&p * &p - &p));
    if step >= LIMIT_STEP_TOL || residual >= LIMIT_IDEMPOTENCE_TOL {
        return Err(MarkovError::NoConvergence {
            doublings,
            residual: residual.max(step),
        });
    }
    StochasticMatrix::new(g.states.clone(), p)
}

/// The one-parameter semigroup `t ↦ exp(tH)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Semigroup {
    pub generator: MarkovGenerator,
}

impl Semigroup {
    pub fn at(&self, t: f64) -> Result<StochasticMatrix, MarkovError> {
        expm(&self.generator, t)
    }

    pub fn limit(&self) -> Result<StochasticMatrix, MarkovError> {
        limit_operator(&self.generator)
    }
}

/// Leaf-state tuples (leaf order `1..=n`, state indices) and how often
/// each was seen.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalJoint {
    pub leaves: usize,
    pub states: StateSpace,
    pub samples: u64,
    pub counts: BTreeMap<Vec<usize>, u64>,
}

impl EmpiricalJoint {
    pub fn frequency(&self, tuple: &[usize]) -> f64 {
        self.counts.get(tuple).copied().unwrap_or(0) as f64 / self.samples as f64
    }
}

struct JumpChain {
    exits: Vec<Option<(Exp<f64>, WeightedIndex<f64>, Vec<usize>)>>,
}

impl JumpChain {
    fn new(g: &MarkovGenerator) -> Self {
        let k = g.size();
        let exits = (0..k)
            .map(|x| {
                let rate = -g.h[(x, x)];
                let targets: Vec<usize> = (0..k).filter(|&y| y != x && g.h[(y, x)] > 0.0).collect();
                if rate <= 0.0 || targets.is_empty() {
                    return None;
                }
                let w = WeightedIndex::new(targets.iter().map(|&y| g.h[(y, x)])).ok()?;
                Some((Exp::new(rate).ok()?, w, targets))
            })
            .collect();
        JumpChain { exits }
    }

    fn evolve<R: Rng>(&self, rng: &mut R, mut x: usize, length: f64) -> usize {
        let mut clock = 0.0;
        while let Some((hold, jump, targets)) = &self.exits[x] {
            clock += hold.sample(rng);
            if clock > length {
                break;
            }
            x = targets[jump.sample(rng)];
        }
        x
    }
}

/// Samples leaf states: draw the root state, run the chain along every
/// edge for its length, copy the state into each child at every vertex.
/// Deterministic for a given seed.
pub fn simulate_branching(
    tree: &PhyloTree,
    g: &MarkovGenerator,
    root: &Distribution,
    seed: u64,
    samples: u64,
) -> Result<EmpiricalJoint, MarkovError> {
    if root.states != g.states {
        return Err(MarkovError::StateMismatch);
    }
    if samples == 0 {
        return Err(MarkovError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chain = JumpChain::new(g);
    let root_draw = WeightedIndex::new(root.p.iter().copied())
        .map_err(|e| MarkovError::InvalidDistribution(e.to_string()))?;
    let t = tree.tree();
    let order = t.preorder();
    let n = tree.leaf_count();
    let mut at_vertex = vec![0usize; t.vertex_count()];
    let mut leaves = vec![0usize; n];
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        let start = root_draw.sample(&mut rng);
        for &e in &order {
            let input = match t.target(e) {
                Target::Root => start,
                Target::Vertex(v) => at_vertex[v.0],
            };
            let out = chain.evolve(&mut rng, input, *tree.length(e));
            match t.source(e) {
                Source::Vertex(v) => at_vertex[v.0] = out,
                Source::Leaf(k) => leaves[k - 1] = out,
            }
        }
        *counts.entry(leaves.clone()).or_insert(0) += 1;
    }
    Ok(EmpiricalJoint {
        leaves: n,
        states: g.states.clone(),
        samples,
        counts,
    })
}
