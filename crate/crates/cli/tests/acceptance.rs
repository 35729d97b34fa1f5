//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p phylo-cli --test acceptance`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use phylo_core::coalgebra::{
    duplicate, evaluate, evaluate_extended, evaluate_operator, marginal, monoid_iso, star, LeafTensor,
};
use phylo_core::length::ExtendedLength;
use phylo_core::markov::{
    expm, jukes_cantor, limit_operator, simulate_branching, Distribution, MarkovGenerator, StateSpace,
};
use phylo_core::operad::{
    mixed_form, operad_law_suite, reduce_coproduct_tree, reduce_with_order, MoveOrder, Phyl, PhyloTree,
};
use phylo_core::perm::Permutation;
use phylo_core::random::{random_metric_binary, random_mixed, random_phylo};
use phylo_core::space::{
    compatible, cone_distance, decompose, decompose1, enumerate_binary_topologies, exact4_distance,
    neighborhood_contains, orthant_census, recompose, recompose1, BasicOpenSet, Cluster, MetricTree,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > budget => Err(format!("{detail}; over the {budget:?} budget")),
        o => o,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("{tag} {id:>2} {name} [{:.3}s] {detail}", elapsed.as_secs_f64());
    outcome.is_ok()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- oracles

/// Binary topologies by inserting leaf `k` on every edge of each topology
/// on `k − 1` leaves, deduplicated by a sorted nested-set key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Nested {
    Leaf(usize),
    Pair(Box<Nested>, Box<Nested>),
}

fn normalize(t: Nested) -> Nested {
    match t {
        Nested::Leaf(_) => t,
        Nested::Pair(a, b) => {
            let (a, b) = (normalize(*a), normalize(*b));
            if a <= b {
                Nested::Pair(Box::new(a), Box::new(b))
            } else {
                Nested::Pair(Box::new(b), Box::new(a))
            }
        }
    }
}

fn insertions(t: &Nested, k: usize) -> Vec<Nested> {
    let mut out = vec![Nested::Pair(Box::new(t.clone()), Box::new(Nested::Leaf(k)))];
    if let Nested::Pair(a, b) = t {
        for a2 in insertions(a, k) {
            out.push(Nested::Pair(Box::new(a2), b.clone()));
        }
        for b2 in insertions(b, k) {
            out.push(Nested::Pair(a.clone(), Box::new(b2)));
        }
    }
    out
}

fn insertion_count(n: usize) -> usize {
    let mut set: BTreeSet<Nested> = BTreeSet::from([Nested::Leaf(1)]);
    for k in 2..=n {
        set = set.iter().flat_map(|t| insertions(t, k)).map(normalize).collect();
    }
    set.len()
}

fn taylor30(h: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let k = h.nrows();
    let a = h * t;
    let mut term = DMatrix::<f64>::identity(k, k);
    let mut sum = term.clone();
    for j in 1..30 {
        term = &term * &a / j as f64;
        sum += &term;
    }
    sum
}

fn random_generator(r: &mut ChaCha8Rng, k: usize, max_rate: f64) -> MarkovGenerator {
    let mut h = DMatrix::<f64>::zeros(k, k);
    for x in 0..k {
        for y in 0..k {
            if x != y {
                h[(y, x)] = r.random_range(0.0..max_rate);
            }
        }
        let s: f64 = (0..k).filter(|&y| y != x).map(|y| h[(y, x)]).sum();
        h[(x, x)] = -s;
    }
    MarkovGenerator::new(StateSpace::indexed(k), h).expect("valid generator")
}

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Applies `b` in tensor slot `i` (one-based) of the output of `a`:
/// `(I_{k^{i−1}} ⊗ B ⊗ I_{k^{n−i}})·A`.
fn slot_compose(a: &DMatrix<f64>, n: usize, i: usize, b: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let left = DMatrix::<f64>::identity(k.pow((i - 1) as u32), k.pow((i - 1) as u32));
    let right = DMatrix::<f64>::identity(k.pow((n - i) as u32), k.pow((n - i) as u32));
    left.kronecker(b).kronecker(&right) * a
}

fn tuple_of(mut index: usize, n: usize, k: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in (0..n).rev() {
        t[slot] = index % k;
        index /= k;
    }
    t
}

/// Root-to-leaf path length, both external edges included.
fn path_length(t: &PhyloTree, leaf: usize) -> f64 {
    let tr = t.tree();
    let mut e = tr.rooted().leaf_edge(leaf).expect("leaf exists");
    let mut total = *t.length(e);
    while let phylo_core::tree::Target::Vertex(v) = tr.target(e) {
        e = tr.rooted().out_edge(v);
        total += *t.length(e);
    }
    total
}

/// Shortest paths in `𝒯₄` through a mesh of points on the ten boundary
/// rays. Two mesh points are joined when some quadrant closure holds both,
/// at their Euclidean distance there.
struct RayGrid {
    quadrants: Vec<[Cluster; 2]>,
}

#[derive(Clone)]
struct GridPoint(BTreeMap<Cluster, f64>);

#[derive(PartialEq)]
struct Entry(f64, usize);
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}

impl RayGrid {
    fn new() -> Self {
        let mut rays: Vec<Cluster> = Vec::new();
        for mask in 1u32..15 {
            let c: Cluster = (1..=4).filter(|&k| mask & (1 << (k - 1)) != 0).collect();
            if (2..=3).contains(&c.len()) {
                rays.push(c);
            }
        }
        let mut quadrants = Vec::new();
        for a in 0..rays.len() {
            for b in a + 1..rays.len() {
                let (x, y) = (&rays[a], &rays[b]);
                let nested = x.iter().all(|v| y.contains(v)) || y.iter().all(|v| x.contains(v));
                let disjoint = x.iter().all(|v| !y.contains(v));
                if nested || disjoint {
                    quadrants.push([x.clone(), y.clone()]);
                }
            }
        }
        RayGrid { quadrants }
    }

    fn rays(&self) -> BTreeSet<Cluster> {
        self.quadrants.iter().flat_map(|q| q.iter().cloned()).collect()
    }

    fn coords(&self, q: &[Cluster; 2], p: &GridPoint) -> Option<(f64, f64)> {
        if p.0.keys().any(|c| !q.contains(c)) {
            return None;
        }
        Some((*p.0.get(&q[0]).unwrap_or(&0.0), *p.0.get(&q[1]).unwrap_or(&0.0)))
    }

    fn distance(&self, x: &MetricTree, y: &MetricTree, step: f64) -> f64 {
        let point = |m: &MetricTree| GridPoint(m.splits().iter().cloned().collect());
        let reach = x.norm().max(y.norm());
        let mut nodes = vec![point(x), point(y), GridPoint(BTreeMap::new())];
        for ray in self.rays() {
            let mut s = step;
            while s <= reach + step {
                nodes.push(GridPoint(BTreeMap::from([(ray.clone(), s)])));
                s += step;
            }
        }
        let members: Vec<Vec<(usize, (f64, f64))>> = self
            .quadrants
            .iter()
            .map(|q| {
                nodes
                    .iter()
                    .enumerate()
                    .filter_map(|(i, p)| self.coords(q, p).map(|c| (i, c)))
                    .collect()
            })
            .collect();
        let mut of_node: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (qi, m) in members.iter().enumerate() {
            for &(i, _) in m {
                of_node[i].push(qi);
            }
        }
        let mut dist = vec![f64::INFINITY; nodes.len()];
        let mut done = vec![false; nodes.len()];
        dist[0] = 0.0;
        let mut heap = BinaryHeap::from([Entry(0.0, 0)]);
        while let Some(Entry(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == 1 {
                return d;
            }
            for &qi in &of_node[u] {
                let cu = members[qi].iter().find(|(i, _)| *i == u).expect("member").1;
                for &(v, cv) in &members[qi] {
                    let nd = d + (cu.0 - cv.0).hypot(cu.1 - cv.1);
                    if !done[v] && nd < dist[v] {
                        dist[v] = nd;
                        heap.push(Entry(nd, v));
                    }
                }
            }
        }
        dist[1]
    }
}

fn random_metric4(r: &mut ChaCha8Rng) -> MetricTree {
    let t = random_metric_binary(r, 4);
    let (m, _) = decompose(&t).expect("metric tree");
    let splits = m
        .splits()
        .iter()
        .map(|(c, _)| (c.clone(), r.random_range(0.05..2.0)))
        .collect();
    MetricTree::from_splits(4, splits).expect("valid splits")
}

// -------------------------------------------------------------- criteria

fn topology_census() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_phylo"))
        .args(["topologies", "--n", "4"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit {:?}", out.status.code()))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let cli4 = v["count"].as_u64().unwrap_or(0);
    let listed = v["topologies"].as_array().map_or(0, Vec::len);
    let lib5 = enumerate_binary_topologies(5).map_err(|e| e.to_string())?.len();
    let oracle4 = insertion_count(4);
    let oracle5 = insertion_count(5);
    ensure(cli4 == 15 && listed == 15 && oracle4 == 15, || format!("n=4: cli {cli4}, listed {listed}, oracle {oracle4}"))?;
    ensure(lib5 == 105 && oracle5 == 105, || format!("n=5: library {lib5}, oracle {oracle5}"))?;
    Ok("n=4 → 15, n=5 → 105 (insertion oracle agrees)".into())
}

fn orthant_structure() -> Outcome {
    let census = orthant_census(4).map_err(|e| e.to_string())?;
    let rays: Vec<Cluster> = RayGrid::new().rays().into_iter().collect();
    let pairs = (0..rays.len())
        .flat_map(|a| (a + 1..rays.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| compatible(&rays[a], &rays[b]))
        .count();
    ensure(census == vec![1, 10, 15], || format!("census {census:?}"))?;
    ensure(rays.len() == 10 && pairs == 15, || format!("enumeration: {} rays, {pairs} quadrants", rays.len()))?;
    Ok("1 cone point, 10 rays, 15 quadrants".into())
}

fn homeomorphism_factors() -> Outcome {
    let mut r = rng(3);
    for n in 1..=6 {
        for i in 0..1000 {
            let t = random_phylo(&mut r, n, 0.3);
            let back = if n == 1 {
                let (_, l) = decompose1(&t).map_err(|e| e.to_string())?;
                recompose1(l).map_err(|e| e.to_string())?
            } else {
                let (m, ext) = decompose(&t).map_err(|e| e.to_string())?;
                recompose(&m, &ext).map_err(|e| e.to_string())?
            };
            ensure(back == t, || format!("n={n} sample {i}: {:?}", t.canonical_form().encoding))?;
        }
    }
    Ok("6000 exact round trips".into())
}

fn operad_laws() -> Outcome {
    let mut r = rng(4);
    let report = operad_law_suite(&Phyl, &mut r, 500, |r| {
        let n = r.random_range(1..=4);
        random_phylo(r, n, 0.3)
    });
    for law in &report.laws {
        ensure(law.failed == 0 && law.passed >= 500, || {
            format!("{}: {} failed, first {:?}", law.name, law.failed, law.counterexample)
        })?;
    }
    Ok(format!("{} laws × 500 instances", report.laws.len()))
}

fn confluence() -> Outcome {
    let mut r = rng(5);
    for i in 0..200 {
        let n = r.random_range(1..=5);
        let t = random_mixed(&mut r, n);
        let reference = reduce_coproduct_tree(&t).map_err(|e| e.to_string())?;
        let form = mixed_form(&reference.tree);
        for order in 0..20u64 {
            let mut order_rng = rng(1000 * i + order);
            let other = reduce_with_order(&t, MoveOrder::Random(&mut order_rng)).map_err(|e| e.to_string())?;
            ensure(mixed_form(&other.tree) == form, || format!("tree {i}, order {order}: normal forms differ"))?;
        }
    }
    Ok("200 trees × 20 orders, one normal form each".into())
}

fn markov_analytics() -> Outcome {
    let mut r = rng(6);
    let mut worst_semigroup: f64 = 0.0;
    for _ in 0..100 {
        let g = random_generator(&mut r, 4, 2.0);
        let (s, t) = (r.random_range(0.0..3.0), r.random_range(0.0..3.0));
        let lhs = expm(&g, s + t).map_err(|e| e.to_string())?;
        let rhs = expm(&g, s).map_err(|e| e.to_string())?.matrix() * expm(&g, t).map_err(|e| e.to_string())?.matrix();
        worst_semigroup = worst_semigroup.max(max_diff(lhs.matrix(), &rhs));
    }
    ensure(worst_semigroup <= 1e-10, || format!("semigroup error {worst_semigroup:e}"))?;

    let mut worst_taylor: f64 = 0.0;
    for _ in 0..100 {
        let g = random_generator(&mut r, 4, 1.0);
        let norm = g.matrix().column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
        let t = r.random_range(0.0..=2.0) / norm;
        let e = expm(&g, t).map_err(|e| e.to_string())?;
        worst_taylor = worst_taylor.max(max_diff(e.matrix(), &taylor30(g.matrix(), t)));
    }
    ensure(worst_taylor <= 1e-12, || format!("Taylor error {worst_taylor:e}"))?;

    let jc = jukes_cantor(1.0, 4).map_err(|e| e.to_string())?;
    let p = limit_operator(&jc).map_err(|e| e.to_string())?;
    let p = p.matrix();
    let off = p.iter().map(|x| (x - 0.25).abs()).fold(0.0, f64::max);
    let idem = (p * p - p).abs().row_sum().max();
    ensure(off <= 1e-8 && idem < 1e-8, || format!("limit off by {off:e}, ‖P²−P‖ {idem:e}"))?;
    Ok(format!("semigroup {worst_semigroup:.1e}, Taylor {worst_taylor:.1e}, limit {off:.1e}"))
}

fn coalgebra_laws() -> Outcome {
    let mut r = rng(7);
    let k = 2;
    let mut worst_comp: f64 = 0.0;
    let mut worst_marginal: f64 = 0.0;
    for _ in 0..100 {
        let g = random_generator(&mut r, k, 2.0);
        let (n, m) = (r.random_range(1..=4), r.random_range(1..=4));
        let a = random_phylo(&mut r, n, 0.3);
        let b = random_phylo(&mut r, m, 0.3);
        let i = r.random_range(1..=n);
        let composite = a.compose(i, &b).map_err(|e| e.to_string())?;
        let lhs = evaluate_operator(&composite, &g).map_err(|e| e.to_string())?;
        let oa = evaluate_operator(&a, &g).map_err(|e| e.to_string())?;
        let ob = evaluate_operator(&b, &g).map_err(|e| e.to_string())?;
        let rhs = slot_compose(&oa, n, i, &ob, k);
        // Leaves of b take slots i..i+m−1 in the composite.
        worst_comp = worst_comp.max(max_diff(&lhs, &rhs));

        let sigma = Permutation::random(n, &mut r);
        let acted = evaluate_operator(&a.act(&sigma).map_err(|e| e.to_string())?, &g).map_err(|e| e.to_string())?;
        for row in 0..acted.nrows() {
            let x = tuple_of(row, n, k);
            let mut y = vec![0; n];
            for j in 1..=n {
                y[sigma.apply(j) - 1] = x[j - 1];
            }
            let src = y.iter().fold(0, |acc, &s| acc * k + s);
            ensure(acted.row(row) == oa.row(src), || format!("equivariance differs at row {row} for σ={:?}", sigma.images()))?;
        }

        let f = Distribution::new(StateSpace::indexed(k), {
            let p0 = r.random_range(0.0..1.0);
            DVector::from_vec(vec![p0, 1.0 - p0])
        })
        .map_err(|e| e.to_string())?;
        let tensor = evaluate(&a, &g, &f).map_err(|e| e.to_string())?;
        for leaf in 1..=n {
            let got = marginal(&tensor, leaf).map_err(|e| e.to_string())?;
            let want = expm(&g, path_length(&a, leaf)).map_err(|e| e.to_string())?.matrix() * f.vector();
            worst_marginal = worst_marginal.max((got - want).abs().max());
        }
    }
    ensure(worst_comp <= 1e-10, || format!("composition error {worst_comp:e}"))?;
    ensure(worst_marginal <= 1e-10, || format!("marginal error {worst_marginal:e}"))?;
    Ok(format!("composition {worst_comp:.1e}, equivariance exact, marginals {worst_marginal:.1e}"))
}

fn simulation_vs_analysis() -> Outcome {
    let states = StateSpace::indexed(2);
    let g = MarkovGenerator::new(states.clone(), DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]))
        .map_err(|e| e.to_string())?;
    let tree = PhyloTree::corolla(0.2, vec![1.0, 0.5]).map_err(|e| e.to_string())?;
    let f = Distribution::uniform(states);
    let exact = evaluate(&tree, &g, &f).map_err(|e| e.to_string())?;
    let emp = simulate_branching(&tree, &g, &f, 2024, 100_000).map_err(|e| e.to_string())?;
    let tv = 0.5
        * (0..4)
            .map(|i| {
                let t = tuple_of(i, 2, 2);
                (emp.frequency(&t) - exact.get(&t)).abs()
            })
            .sum::<f64>();
    ensure(tv <= 0.02, || format!("total variation {tv}"))?;
    Ok(format!("total variation {tv:.4}"))
}

fn extension_to_infinity() -> Outcome {
    let mut r = rng(9);
    let k = 4;
    let jc = jukes_cantor(1.0, k).map_err(|e| e.to_string())?;
    let p = limit_operator(&jc).map_err(|e| e.to_string())?.matrix().clone();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = r.random_range(1..=4);
        let base = random_phylo(&mut r, n, 0.0);
        let external = base.external_edges();
        let t = base
            .map_lengths(|e, l| if external.contains(&e) { ExtendedLength::Infinite } else { ExtendedLength::Finite(*l) })
            .map_err(|e| e.to_string())?;
        let w: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        let f = Distribution::new(jc.states().clone(), DVector::from_iterator(k, w.iter().map(|x| x / total)))
            .map_err(|e| e.to_string())?;
        let got = evaluate_extended(&t, &jc, &f).map_err(|e| e.to_string())?;
        let want = project_slots(&duplicate(n, f.states(), &(&p * f.vector())).map_err(|e| e.to_string())?, &p);
        let err = got.data().iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    ensure(worst <= 1e-8, || format!("all-∞ tensor error {worst:e}"))?;

    let mut absorb: f64 = 0.0;
    for _ in 0..50 {
        let g = random_generator(&mut r, k, 2.0);
        let lim = limit_operator(&g).map_err(|e| e.to_string())?.matrix().clone();
        let s = r.random_range(0.0..5.0);
        let a = expm(&g, s).map_err(|e| e.to_string())?.matrix().clone();
        absorb = absorb.max(max_diff(&(&a * &lim), &lim)).max(max_diff(&(&lim * &a), &lim));
    }
    ensure(absorb <= 1e-8, || format!("α(s)·α(∞) error {absorb:e}"))?;
    Ok(format!("tensor {worst:.1e}, absorption {absorb:.1e}"))
}

/// `P` applied independently in every slot of a tensor.
fn project_slots(t: &LeafTensor, p: &DMatrix<f64>) -> Vec<f64> {
    let k = p.nrows();
    let n = t.leaf_count();
    let mut data = t.data().to_vec();
    for slot in 0..n {
        let mut next = vec![0.0; data.len()];
        for (idx, &v) in data.iter().enumerate() {
            let x = tuple_of(idx, n, k);
            for y in 0..k {
                let mut z = x.clone();
                z[slot] = y;
                next[z.iter().fold(0, |a, &s| a * k + s)] += p[(y, x[slot])] * v;
            }
        }
        data = next;
    }
    data
}

fn monoid_isomorphism() -> Outcome {
    let mut r = rng(10);
    let draw = |r: &mut ChaCha8Rng| {
        if r.random_bool(0.1) {
            ExtendedLength::Infinite
        } else {
            ExtendedLength::Finite(r.random_range(0.0..20.0))
        }
    };
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (s, t) = (draw(&mut r), draw(&mut r));
        let sum = match (s, t) {
            (ExtendedLength::Finite(a), ExtendedLength::Finite(b)) => ExtendedLength::Finite(a + b),
            _ => ExtendedLength::Infinite,
        };
        let lhs = monoid_iso(sum).map_err(|e| e.to_string())?;
        let rhs = star(monoid_iso(s).map_err(|e| e.to_string())?, monoid_iso(t).map_err(|e| e.to_string())?);
        worst = worst.max((lhs - rhs).abs());
    }
    ensure(worst < 1e-12, || format!("error {worst:e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

const GRID_PAIRS: usize = 200;

fn bhv_metric() -> Outcome {
    let mut r = rng(11);
    let grid = RayGrid::new();
    let d = |a: &MetricTree, b: &MetricTree| exact4_distance(a, b).map_err(|e| e.to_string());
    let mut worst_triangle: f64 = 0.0;
    let mut worst_grid: f64 = 0.0;
    for i in 0..200 {
        let (x, y, z) = (random_metric4(&mut r), random_metric4(&mut r), random_metric4(&mut r));
        let (xy, yx, yz, xz) = (d(&x, &y)?, d(&y, &x)?, d(&y, &z)?, d(&x, &z)?);
        ensure(xy == yx, || format!("triple {i}: d(x,y)={xy} but d(y,x)={yx}"))?;
        worst_triangle = worst_triangle.max(xz - xy - yz);
        ensure(xy <= cone_distance(&x, &y) + 1e-12 && xy <= x.norm() + y.norm() + 1e-12, || {
            format!("triple {i}: {xy} exceeds the cone path")
        })?;
        if i < GRID_PAIRS {
            worst_grid = worst_grid.max((grid.distance(&x, &y, 0.01) - xy).abs());
        }
    }
    ensure(worst_triangle <= 1e-9, || format!("triangle violated by {worst_triangle:e}"))?;
    ensure(worst_grid <= 0.02, || format!("grid oracle differs by {worst_grid}"))?;
    Ok(format!("triangle slack {worst_triangle:.1e}, grid error {worst_grid:.2e} on {GRID_PAIRS} pairs"))
}

fn neighborhood_consistency() -> Outcome {
    // Internal edge {1,2} shrinks to zero inside ((1,2),3),4 with {1,2,3}
    // held at 1.0 and external edges 0.3.
    let external = vec![0.3; 5];
    let family = |s: f64| -> Result<PhyloTree, String> {
        let mut splits = vec![(vec![1, 2, 3], 1.0)];
        if s > 0.0 {
            splits.push((vec![1, 2], s));
        }
        let m = MetricTree::from_splits(4, splits).map_err(|e| e.to_string())?;
        recompose(&m, &phylo_core::space::ExternalLengths::new(external.clone()).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())
    };
    let limit = family(0.0)?;
    let (limit_metric, _) = decompose(&limit).map_err(|e| e.to_string())?;
    let mut prev = f64::INFINITY;
    let mut s = 0.5;
    let mut steps = 0;
    while s > 1e-6 {
        let t = family(s)?;
        for radius in [0.01, 0.05, 0.1, 0.2, 0.4, 0.6, 1.0] {
            for delta in [0.05, 0.5] {
                let u = BasicOpenSet::around(&limit, delta, radius).map_err(|e| e.to_string())?;
                let inside = neighborhood_contains(&u, &t).map_err(|e| e.to_string())?;
                ensure(inside == (radius > s), || format!("s={s}, radius={radius}: contains={inside}"))?;
            }
        }
        let (m, _) = decompose(&t).map_err(|e| e.to_string())?;
        let dist = exact4_distance(&m, &limit_metric).map_err(|e| e.to_string())?;
        ensure(dist < prev, || format!("distance not decreasing at s={s}: {dist} ≥ {prev}"))?;
        ensure((dist - s).abs() <= 1e-12, || format!("distance {dist} at s={s}"))?;
        prev = dist;
        s *= 0.7;
        steps += 1;
    }
    ensure(prev < 1e-5, || format!("distance stalls at {prev}"))?;
    Ok(format!("{steps} steps from 0.5, final distance {prev:.1e}"))
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        run(1, "topology census", s(1), topology_census),
        run(2, "T4 orthant structure", s(1), orthant_structure),
        run(3, "homeomorphism factors", s(5), homeomorphism_factors),
        run(4, "operad laws", s(10), operad_laws),
        run(5, "rewriting confluence", s(10), confluence),
        run(6, "Markov analytics", s(5), markov_analytics),
        run(7, "coalgebra laws", s(30), coalgebra_laws),
        run(8, "simulation vs analysis", s(10), simulation_vs_analysis),
        run(9, "extension to infinity", s(60), extension_to_infinity),
        run(10, "monoid isomorphism", s(60), monoid_isomorphism),
        run(11, "tree-space metric", s(60), bhv_metric),
        run(12, "neighborhood/limit consistency", s(60), neighborhood_consistency),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
