//! The tree-space metric.
//!
//! `T_4` is the cone over the Petersen graph: vertices are the ten
//! clusters, edges the fifteen binary topologies, each edge an arc of
//! angle π/2. For a Euclidean cone over a metric graph the distance between
//! `r·p` and `s·q` is `sqrt(r² + s² − 2rs·cos(min(π, d(p, q))))`, where `d`
//! is the path length in the graph. This is what unfolding the quadrants
//! along the shortest edge path computes, and it covers `n ≤ 3` as well
//! (for `n = 3` the graph has three isolated vertices).

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};

use super::{compatible, Cluster, MetricTree, SpaceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Exact geodesic distance, `n ≤ 4` only.
    Exact4,
    /// `min(common-orthant distance, ‖x‖ + ‖y‖)`: an upper bound for any `n`.
    Cone,
    /// `Exact4` when `n ≤ 4`, otherwise `Cone`.
    #[default]
    Auto,
}

fn split_key(m: &MetricTree) -> Vec<(Cluster, u64)> {
    m.splits().iter().map(|(c, l)| (c.clone(), l.to_bits())).collect()
}

/// Tree-space distance between two metric trees with the same leaves.
pub fn bhv_distance(x: &MetricTree, y: &MetricTree, mode: DistanceMode) -> Result<f64, SpaceError> {
    let n = x.leaf_count();
    if n != y.leaf_count() {
        return Err(SpaceError::ArityMismatch { left: n, right: y.leaf_count() });
    }
    if x == y {
        return Ok(0.0);
    }
    // a fixed argument order makes the result exactly symmetric
    let (x, y) = if split_key(x) <= split_key(y) { (x, y) } else { (y, x) };
    match mode {
        DistanceMode::Exact4 => exact4_distance(x, y),
        DistanceMode::Cone => Ok(cone_distance(x, y)),
        DistanceMode::Auto if n <= 4 => exact4_distance(x, y),
        DistanceMode::Auto => Ok(cone_distance(x, y)),
    }
}

/// Euclidean distance inside a shared orthant closure, if the two split
/// sets are compatible.
pub fn common_orthant_distance(x: &MetricTree, y: &MetricTree) -> Option<f64> {
    for (a, _) in x.splits() {
        for (b, _) in y.splits() {
            if a != b && !compatible(a, b) {
                return None;
            }
        }
    }
    let mut coords: BTreeMap<&Cluster, (f64, f64)> = BTreeMap::new();
    for (c, l) in x.splits() {
        coords.entry(c).or_default().0 = *l;
    }
    for (c, l) in y.splits() {
        coords.entry(c).or_default().1 = *l;
    }
    Some(coords.values().map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// Upper bound valid for every `n`.
pub fn cone_distance(x: &MetricTree, y: &MetricTree) -> f64 {
    let through_origin = x.norm() + y.norm();
    common_orthant_distance(x, y).map_or(through_origin, |d| d.min(through_origin))
}

enum LinkPoint {
    Vertex(usize),
    /// On the arc from vertex `a` to vertex `b`, at angle `theta` from `a`.
    Arc { a: usize, b: usize, theta: f64 },
    Origin,
}

struct Link {
    index: BTreeMap<Cluster, usize>,
    /// Graph distance in arcs; `usize::MAX` when disconnected.
    hops: Vec<Vec<usize>>,
}

impl Link {
    fn new(n: usize) -> Self {
        let clusters: Vec<Cluster> = (1u32..(1 << n) - 1)
            .filter(|m| m.count_ones() >= 2)
            .map(|m| (1..=n).filter(|k| m & (1 << (k - 1)) != 0).collect())
            .collect();
        let v = clusters.len();
        let mut hops = vec![vec![usize::MAX; v]; v];
        for s in 0..v {
            hops[s][s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for w in 0..v {
                    if hops[s][w] == usize::MAX && w != u && compatible(&clusters[u], &clusters[w]) {
                        hops[s][w] = hops[s][u] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        Link {
            index: clusters.into_iter().enumerate().map(|(i, c)| (c, i)).collect(),
            hops,
        }
    }

    fn arc(&self, u: usize, w: usize) -> f64 {
        match self.hops[u][w] {
            usize::MAX => f64::INFINITY,
            h => h as f64 * FRAC_PI_2,
        }
    }

    fn locate(&self, m: &MetricTree) -> (LinkPoint, f64) {
        let s = m.splits();
        match s.len() {
            0 => (LinkPoint::Origin, 0.0),
            1 => (LinkPoint::Vertex(self.index[&s[0].0]), s[0].1),
            _ => {
                let (x, y) = (s[0].1, s[1].1);
                (
                    LinkPoint::Arc {
                        a: self.index[&s[0].0],
                        b: self.index[&s[1].0],
                        theta: y.atan2(x),
                    },
                    x.hypot(y),
                )
            }
        }
    }

    /// Ends of a point with the angle needed to reach each.
    fn ends(p: &LinkPoint) -> Vec<(usize, f64)> {
        match *p {
            LinkPoint::Vertex(u) => vec![(u, 0.0)],
            LinkPoint::Arc { a, b, theta } => vec![(a, theta), (b, FRAC_PI_2 - theta)],
            LinkPoint::Origin => Vec::new(),
        }
    }

    fn angle(&self, p: &LinkPoint, q: &LinkPoint) -> f64 {
        let mut best = f64::INFINITY;
        if let (LinkPoint::Arc { a, b, theta }, LinkPoint::Arc { a: c, b: d, theta: phi }) = (p, q) {
            if a == c && b == d {
                best = (theta - phi).abs();
            }
        }
        for (u, du) in Self::ends(p) {
            for &(w, dw) in &Self::ends(q) {
                best = best.min(du + self.arc(u, w) + dw);
            }
        }
        best
    }
}

/// Exact geodesic distance for `n ≤ 4`.
pub fn exact4_distance(x: &MetricTree, y: &MetricTree) -> Result<f64, SpaceError> {
    let n = x.leaf_count();
    if n != y.leaf_count() {
        return Err(SpaceError::ArityMismatch { left: n, right: y.leaf_count() });
    }
    if n > 4 {
        return Err(SpaceError::ExactUnsupported(n));
    }
    if n <= 2 {
        return Ok(0.0);
    }
    // a shared orthant is convex, so the straight segment is the geodesic
    if let Some(d) = common_orthant_distance(x, y) {
        return Ok(d);
    }
    // fixed argument order makes the result exactly symmetric
    let key = |m: &MetricTree| m.splits().iter().map(|(c, l)| (c.clone(), l.to_bits())).collect::<Vec<_>>();
    let (x, y) = if key(x) <= key(y) { (x, y) } else { (y, x) };
    let link = Link::new(n);
    let (p, r) = link.locate(x);
    let (q, s) = link.locate(y);
    if matches!(p, LinkPoint::Origin) {
        return Ok(s);
    }
    if matches!(q, LinkPoint::Origin) {
        return Ok(r);
    }
    let angle = link.angle(&p, &q).min(PI);
    Ok((r * r + s * s - 2.0 * r * s * angle.cos()).max(0.0).sqrt())
}
