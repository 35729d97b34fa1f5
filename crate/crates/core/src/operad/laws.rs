//! Randomized checks of the operad axioms in partial-composition form.

use std::fmt;

use rand::{Rng, RngCore};

use super::{Operad, OperadError};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// The first failing instance, if any.
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub laws: Vec<LawResult>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.laws.iter().all(|l| l.failed == 0 && l.passed > 0)
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.name == name)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.laws {
            writeln!(
                f,
                "{:<16} {} passed, {} failed",
                l.name, l.passed, l.failed
            )?;
            if let Some(c) = &l.counterexample {
                writeln!(f, "  counterexample: {c}")?;
            }
        }
        Ok(())
    }
}

pub const ASSOCIATIVITY: &str = "associativity";
pub const LEFT_UNIT: &str = "left unit";
pub const RIGHT_UNIT: &str = "right unit";
pub const EQUIVARIANCE_OUTER: &str = "equivariance-1";
pub const EQUIVARIANCE_INNER: &str = "equivariance-2";

struct Tally {
    result: LawResult,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            result: LawResult {
                name,
                passed: 0,
                failed: 0,
                counterexample: None,
            },
        }
    }

    fn record(&mut self, outcome: Result<bool, OperadError>, describe: impl FnOnce() -> String) {
        match outcome {
            Ok(true) => self.result.passed += 1,
            Ok(false) => {
                self.result.failed += 1;
                self.result.counterexample.get_or_insert_with(describe);
            }
            Err(e) => {
                self.result.failed += 1;
                self.result
                    .counterexample
                    .get_or_insert_with(|| format!("{} (error: {e})", describe()));
            }
        }
    }
}

/// `(f ∘_i g) ∘_j h` rewritten with `h` inserted first or into `g`.
fn associativity<O: Operad>(o: &O, f: &O::Op, g: &O::Op, h: &O::Op, i: usize, j: usize) -> Result<bool, OperadError> {
    let n = o.arity(g);
    let l = o.arity(h);
    let lhs = o.compose(&o.compose(f, i, g)?, j, h)?;
    let rhs = if j < i {
        o.compose(&o.compose(f, j, h)?, i + l - 1, g)?
    } else if j < i + n {
        o.compose(f, i, &o.compose(g, j - i + 1, h)?)?
    } else {
        o.compose(&o.compose(f, j - n + 1, h)?, i, g)?
    };
    Ok(lhs == rhs)
}

/// `(f·σ) ∘_i g = (f ∘_{σ(i)} g)·(σ ∘_i id_n)`.
fn equivariance_outer<O: Operad>(o: &O, f: &O::Op, g: &O::Op, i: usize, sigma: &Permutation) -> Result<bool, OperadError> {
    let n = o.arity(g);
    let lhs = o.compose(&o.act(f, sigma)?, i, g)?;
    let rhs = o.act(&o.compose(f, sigma.apply(i), g)?, &sigma.block_substitute(i, n))?;
    Ok(lhs == rhs)
}

/// `f ∘_i (g·τ) = (f ∘_i g)·(id_m ∘_i τ)`.
fn equivariance_inner<O: Operad>(o: &O, f: &O::Op, g: &O::Op, i: usize, tau: &Permutation) -> Result<bool, OperadError> {
    let m = o.arity(f);
    let lhs = o.compose(f, i, &o.act(g, tau)?)?;
    let rhs = o.act(&o.compose(f, i, g)?, &Permutation::embed_at(m, i, tau))?;
    Ok(lhs == rhs)
}

/// Runs each law on `samples` random instances drawn with `sample`.
/// Instances needing an operation of positive arity redraw until one is
/// found.
pub fn operad_law_suite<O, R, S>(o: &O, rng: &mut R, samples: usize, mut sample: S) -> LawReport
where
    O: Operad,
    R: RngCore,
    S: FnMut(&mut R) -> O::Op,
{
    fn positive<O: Operad, R>(o: &O, rng: &mut R, sample: &mut impl FnMut(&mut R) -> O::Op) -> O::Op {
        loop {
            let f = sample(rng);
            if o.arity(&f) > 0 {
                return f;
            }
        }
    }
    let show = |x: &O::Op| o.encode(x);

    let mut assoc = Tally::new(ASSOCIATIVITY);
    let mut left = Tally::new(LEFT_UNIT);
    let mut right = Tally::new(RIGHT_UNIT);
    let mut eq1 = Tally::new(EQUIVARIANCE_OUTER);
    let mut eq2 = Tally::new(EQUIVARIANCE_INNER);
    let id = o.identity();

    for _ in 0..samples {
        let f = positive(o, rng, &mut sample);
        let g = sample(rng);
        let h = sample(rng);
        let m = o.arity(&f);
        let n = o.arity(&g);
        let i = rng.random_range(1..=m);
        let total = m + n - 1;
        if total > 0 {
            let j = rng.random_range(1..=total);
            assoc.record(associativity(o, &f, &g, &h, i, j), || {
                format!("f={} i={i} g={} j={j} h={}", show(&f), show(&g), show(&h))
            });
        } else {
            // f ∘_i g has no inputs left; use a positive-arity g instead.
            let g = positive(o, rng, &mut sample);
            let j = rng.random_range(1..=m + o.arity(&g) - 1);
            assoc.record(associativity(o, &f, &g, &h, i, j), || {
                format!("f={} i={i} g={} j={j} h={}", show(&f), show(&g), show(&h))
            });
        }

        left.record(o.compose(&id, 1, &f).map(|x| x == f), || format!("f={}", show(&f)));
        right.record(o.compose(&f, i, &id).map(|x| x == f), || format!("f={} i={i}", show(&f)));

        let sigma = Permutation::random(m, rng);
        eq1.record(equivariance_outer(o, &f, &g, i, &sigma), || {
            format!("f={} σ={sigma:?} i={i} g={}", show(&f), show(&g))
        });
        let tau = Permutation::random(n, rng);
        eq2.record(equivariance_inner(o, &f, &g, i, &tau), || {
            format!("f={} i={i} g={} τ={tau:?}", show(&f), show(&g))
        });
    }
    LawReport {
        laws: vec![assoc.result, left.result, right.result, eq1.result, eq2.result],
    }
}
