//! Basic open sets of `Phyl_n`.

use super::{check_clusters, decompose, decompose1, Cluster, SpaceError};
use crate::operad::PhyloTree;

/// The open interval `(lo, hi)`. Intersected with `[0,∞)`, a negative `lo`
/// gives the half-open `[0, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// `(x − r, x + r)`.
    pub fn around(x: f64, r: f64) -> Self {
        Interval { lo: x - r, hi: x + r }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// `U_T`: a box around a base topology `T` together with the binary
/// refinements of `T` whose extra edges are shorter than the resolution
/// radii.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicOpenSet {
    n: usize,
    base: Vec<Cluster>,
    internal: Vec<Interval>,
    external: Vec<Interval>,
    radii: Vec<f64>,
}

impl BasicOpenSet {
    /// `base` lists the internal clusters of `T`; `internal[i]` constrains
    /// the length at `base[i]` after sorting. `external[0]` constrains the
    /// root edge and `external[k]` leaf `k` (a single interval when
    /// `n = 1`). `radii` has one entry per edge a binary refinement adds,
    /// applied to the added clusters in sorted order.
    pub fn new(
        n: usize,
        base: Vec<Cluster>,
        internal: Vec<Interval>,
        external: Vec<Interval>,
        radii: Vec<f64>,
    ) -> Result<Self, SpaceError> {
        if n == 0 {
            return Err(SpaceError::WrongArity { expected: "n ≥ 1".into(), got: 0 });
        }
        check_clusters(n, &base)?;
        let mut order: Vec<usize> = (0..base.len()).collect();
        order.sort_by(|&a, &b| base[a].cmp(&base[b]));
        if internal.len() != base.len() {
            return Err(SpaceError::InvalidOpenSet(format!(
                "{} internal intervals for {} internal edges",
                internal.len(),
                base.len()
            )));
        }
        let ext_len = if n == 1 { 1 } else { n + 1 };
        if external.len() != ext_len {
            return Err(SpaceError::InvalidOpenSet(format!(
                "need {ext_len} external intervals, got {}",
                external.len()
            )));
        }
        let missing = if n >= 2 { n - 2 - base.len() } else { 0 };
        if radii.len() != missing {
            return Err(SpaceError::InvalidOpenSet(format!("need {missing} radii, got {}", radii.len())));
        }
        for iv in internal.iter().chain(&external) {
            if !(iv.lo < iv.hi) || iv.hi <= 0.0 {
                return Err(SpaceError::InvalidOpenSet(format!("empty interval ({}, {})", iv.lo, iv.hi)));
            }
        }
        if internal.iter().any(|iv| iv.lo < 0.0) {
            return Err(SpaceError::InvalidOpenSet("internal intervals must lie in (0,∞)".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0)) {
            return Err(SpaceError::InvalidOpenSet("radii must be positive".into()));
        }
        Ok(BasicOpenSet {
            n,
            base: order.iter().map(|&i| base[i].clone()).collect(),
            internal: order.iter().map(|&i| internal[i]).collect(),
            external,
            radii,
        })
    }

    /// The set centred on `t`: every coordinate within `delta`, every added
    /// edge shorter than `radius`.
    pub fn around(t: &PhyloTree, delta: f64, radius: f64) -> Result<Self, SpaceError> {
        let n = t.leaf_count();
        if n == 1 {
            return Self::new(1, vec![], vec![], vec![Interval::around(*t.root_length(), delta)], vec![]);
        }
        let (m, ext) = decompose(t)?;
        let internal = m
            .splits()
            .iter()
            .map(|(_, l)| Interval::new((l - delta).max(0.0), l + delta))
            .collect();
        let external = ext.values().iter().map(|&x| Interval::around(x, delta)).collect();
        let radii = vec![radius; n - 2 - m.splits().len()];
        Self::new(n, m.clusters(), internal, external, radii)
    }

    pub fn leaf_count(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &[Cluster] {
        &self.base
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Whether `z` lies in `u`.
pub fn neighborhood_contains(u: &BasicOpenSet, z: &PhyloTree) -> Result<bool, SpaceError> {
    let n = z.leaf_count();
    if n != u.n {
        return Err(SpaceError::ArityMismatch { left: u.n, right: n });
    }
    if n == 1 {
        let (_, l) = decompose1(z)?;
        return Ok(u.external[0].contains(l));
    }
    let (m, ext) = decompose(z)?;
    if !ext.values().iter().zip(&u.external).all(|(&x, iv)| iv.contains(x)) {
        return Ok(false);
    }
    let splits = m.splits();
    let base_lengths: Option<Vec<f64>> = u
        .base
        .iter()
        .map(|c| splits.iter().find(|(d, _)| d == c).map(|(_, l)| *l))
        .collect();
    let Some(base_lengths) = base_lengths else {
        return Ok(false);
    };
    if !base_lengths.iter().zip(&u.internal).all(|(&x, iv)| iv.contains(x)) {
        return Ok(false);
    }
    if splits.len() == u.base.len() {
        return Ok(true);
    }
    if !m.is_binary() {
        return Ok(false);
    }
    let extra = splits.iter().filter(|(c, _)| !u.base.contains(c)).map(|(_, l)| *l);
    Ok(extra.zip(&u.radii).all(|(x, &r)| x < r))
}
