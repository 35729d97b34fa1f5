//! Binary topologies (maximal orthants) and the faces between them.

use std::collections::{BTreeMap, BTreeSet};

use super::{edge_clusters, Cluster, MetricTree, SpaceError};
use crate::tree::{CanonicalForm, Mode, PlanarTree, Shape};

pub const MAX_ENUMERATION_LEAVES: usize = 7;

/// A maximal orthant of `T_n`: one binary topology. Its coordinate axes are
/// the internal clusters in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Orthant {
    n: usize,
    axes: Vec<Cluster>,
}

impl Orthant {
    pub fn leaf_count(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Cluster] {
        &self.axes
    }

    /// Canonical form of the unlabelled binary shape.
    pub fn shape(&self) -> CanonicalForm {
        let s = super::shape_from_clusters(self.n, &self.axes).expect("orthant axes are compatible");
        PlanarTree::from_shape(&s)
            .expect("valid shape")
            .canonical_form(Mode::Unordered)
    }
}

/// Where a metric tree sits in the orthant complex.
#[derive(Debug, Clone, PartialEq)]
pub enum OrthantPosition {
    /// A binary tree: its orthant and coordinates along the axes.
    Interior { orthant: Orthant, coordinates: Vec<f64> },
    /// A tree with multifurcations: the face it lies on, its coordinates
    /// there, and every maximal orthant whose closure contains that face.
    Boundary {
        face: Vec<Cluster>,
        coordinates: Vec<f64>,
        adjacent: Vec<Orthant>,
    },
}

/// Every rooted binary shape on `leaves`, the first leaf always in the
/// first block so no split is produced twice.
fn binary_shapes(leaves: &[usize]) -> Vec<Shape> {
    if leaves.len() == 1 {
        return vec![Shape::Leaf(leaves[0])];
    }
    let rest = &leaves[1..];
    let mut out = Vec::new();
    // masks over `rest` choose the companions of leaves[0]; the full mask
    // would leave the second block empty
    for mask in 0..(1u32 << rest.len()) - 1 {
        let mut a = vec![leaves[0]];
        let mut b = Vec::new();
        for (j, &x) in rest.iter().enumerate() {
            if mask & (1 << j) != 0 {
                a.push(x);
            } else {
                b.push(x);
            }
        }
        for sa in binary_shapes(&a) {
            for sb in binary_shapes(&b) {
                out.push(Shape::Node(vec![sa.clone(), sb]));
            }
        }
    }
    out
}

fn internal_clusters_of(t: &PlanarTree) -> Vec<Cluster> {
    let below = edge_clusters(t);
    let mut cs: Vec<Cluster> = t.rooted().internal_edges().into_iter().map(|e| below[e.0].clone()).collect();
    cs.sort();
    cs
}

fn binary_topologies_unchecked(n: usize) -> Vec<Orthant> {
    let leaves: Vec<usize> = (1..=n).collect();
    let mut seen: BTreeMap<String, Orthant> = BTreeMap::new();
    for s in binary_shapes(&leaves) {
        let t = PlanarTree::from_shape(&s).expect("generated shapes are valid");
        let key = t.canonical_form(Mode::Unordered).encoding;
        seen.entry(key).or_insert_with(|| Orthant {
            n,
            axes: internal_clusters_of(&t),
        });
    }
    let mut out: Vec<Orthant> = seen.into_values().collect();
    out.sort();
    out
}

/// All rooted binary topologies on `2 ≤ n ≤ 7` leaves, sorted by axes.
pub fn enumerate_binary_topologies(n: usize) -> Result<Vec<Orthant>, SpaceError> {
    if n < 2 {
        return Err(SpaceError::WrongArity { expected: "n ≥ 2".into(), got: n });
    }
    if n > MAX_ENUMERATION_LEAVES {
        return Err(SpaceError::ArityTooLarge { n, max: MAX_ENUMERATION_LEAVES });
    }
    Ok(binary_topologies_unchecked(n))
}

/// Number of faces of `T_n` of each dimension `0..=n-2`.
pub fn orthant_census(n: usize) -> Result<Vec<usize>, SpaceError> {
    let tops = enumerate_binary_topologies(n)?;
    let mut faces: BTreeSet<Vec<Cluster>> = BTreeSet::new();
    for o in &tops {
        let k = o.axes.len();
        for mask in 0..(1u32 << k) {
            faces.insert((0..k).filter(|j| mask & (1 << j) != 0).map(|j| o.axes[j].clone()).collect());
        }
    }
    let mut counts = vec![0; n - 1];
    for f in faces {
        counts[f.len()] += 1;
    }
    Ok(counts)
}

/// Binary orthants whose closure contains the face of `m`, found by
/// resolving each multifurcating vertex independently.
pub fn binary_resolutions(m: &MetricTree) -> Vec<Orthant> {
    let n = m.leaf_count();
    if n < 2 {
        return Vec::new();
    }
    let t = m.phylo().tree();
    let below = edge_clusters(t);
    let mut choices: Vec<Vec<Vec<Cluster>>> = Vec::new();
    for v in t.rooted().vertices() {
        let kids = t.children(v);
        if kids.len() < 3 {
            continue;
        }
        let groups: Vec<&Cluster> = kids.iter().map(|c| &below[c.0]).collect();
        let options = binary_topologies_unchecked(kids.len())
            .into_iter()
            .map(|o| {
                o.axes
                    .iter()
                    .map(|c| {
                        let mut u: Cluster = c.iter().flat_map(|&g| groups[g - 1].iter().copied()).collect();
                        u.sort_unstable();
                        u
                    })
                    .collect()
            })
            .collect();
        choices.push(options);
    }
    let mut acc: Vec<Vec<Cluster>> = vec![m.clusters()];
    for opts in choices {
        acc = acc
            .into_iter()
            .flat_map(|base| {
                opts.iter().map(move |extra: &Vec<Cluster>| {
                    let mut all = base.clone();
                    all.extend(extra.iter().cloned());
                    all
                })
            })
            .collect();
    }
    let mut out: Vec<Orthant> = acc
        .into_iter()
        .map(|mut axes| {
            axes.sort();
            Orthant { n, axes }
        })
        .collect();
    out.sort();
    out
}

/// Locates a metric tree in the orthant complex.
pub fn orthant_of(m: &MetricTree) -> OrthantPosition {
    let coordinates: Vec<f64> = m.splits().iter().map(|(_, l)| *l).collect();
    if m.is_binary() {
        OrthantPosition::Interior {
            orthant: Orthant {
                n: m.leaf_count(),
                axes: m.clusters(),
            },
            coordinates,
        }
    } else {
        OrthantPosition::Boundary {
            face: m.clusters(),
            coordinates,
            adjacent: binary_resolutions(m),
        }
    }
}
