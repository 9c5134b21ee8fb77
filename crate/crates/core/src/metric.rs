//! The standard path metric and the diam/rad/mesh/comesh quantities.
//!
//! Inside one simplex the metric is the Euclidean metric of the standard
//! embedding, so distances between points with a common carrier are exact.
//! Across simplices the oracle returns the length of a shortest path in a
//! Steiner graph: nodes are lattice points of resolution `1..=refinement` on
//! every maximal simplex (which include all vertices) plus every barycentre,
//! and any two nodes in a common maximal simplex are joined by a straight
//! segment. The node set only grows with `refinement`, so the bound is
//! non-increasing in it.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use num_integer::Integer;

use crate::complex::{Point, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::map::SimplicialMap;

/// Default number of lattice resolutions used by [`DistanceOracle`].
pub const DEFAULT_REFINEMENT: usize = 4;

/// Diameter and radius of a simplex, measured through a control map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricReport {
    pub diam: f64,
    pub rad: f64,
}

/// All points `Σ (c_i / k) v_i` with non-negative integers `c_i` summing to `k`.
pub fn lattice_points(s: &Simplex, k: usize) -> Vec<Point> {
    let n = s.len();
    let mut out = Vec::new();
    let mut comp = vec![0usize; n];
    fn rec(i: usize, left: usize, comp: &mut [usize], s: &Simplex, k: usize, out: &mut Vec<Point>) {
        if i + 1 == comp.len() {
            comp[i] = left;
            out.push(Point::from_weights(
                s.vertices().iter().zip(comp.iter()).map(|(&v, &c)| (v, c as f64 / k as f64)),
            ));
            return;
        }
        for c in (0..=left).rev() {
            comp[i] = c;
            rec(i + 1, left - c, comp, s, k, out);
        }
    }
    rec(0, k, &mut comp, s, k, &mut out);
    out
}

type NodeKey = Vec<(usize, u64, u64)>;

fn rational_key(s: &Simplex, counts: &[u64], den: u64) -> NodeKey {
    s.vertices()
        .iter()
        .zip(counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&v, &c)| {
            let g = c.gcd(&den);
            (v, c / g, den / g)
        })
        .collect()
}

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
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

/// Upper-bound oracle for the standard path metric of a complex.
#[derive(Clone, Debug)]
pub struct DistanceOracle {
    complex: Arc<SimplicialComplex>,
    refinement: usize,
    nodes: Vec<Point>,
    /// Node indices per maximal simplex (in `maximal` order).
    members: Vec<Vec<usize>>,
    maximal: Vec<Simplex>,
    adj: Vec<Vec<(usize, f64)>>,
    component: Vec<usize>,
}

impl DistanceOracle {
    pub fn new(complex: Arc<SimplicialComplex>, refinement: usize) -> Result<Self> {
        if refinement == 0 {
            return Err(Error::OutOfRange("refinement must be positive".into()));
        }
        let maximal: Vec<Simplex> = complex.maximal_simplices().cloned().collect();
        let mut key_to_node: HashMap<NodeKey, usize> = HashMap::new();
        let mut nodes = Vec::new();
        let mut members = Vec::with_capacity(maximal.len());
        for m in &maximal {
            let mut mine = Vec::new();
            let mut add = |key: NodeKey, nodes: &mut Vec<Point>| {
                let id = *key_to_node.entry(key.clone()).or_insert_with(|| {
                    nodes.push(Point::from_weights(
                        key.iter().map(|&(v, a, b)| (v, a as f64 / b as f64)),
                    ));
                    nodes.len() - 1
                });
                mine.push(id);
            };
            for k in 1..=refinement {
                for p in lattice_points(m, k) {
                    let counts: Vec<u64> = m
                        .vertices()
                        .iter()
                        .map(|&v| (p.coord(v) * k as f64).round() as u64)
                        .collect();
                    add(rational_key(m, &counts, k as u64), &mut nodes);
                }
            }
            for f in m.faces() {
                let counts: Vec<u64> = m.vertices().iter().map(|&v| f.contains(v) as u64).collect();
                add(rational_key(m, &counts, f.len() as u64), &mut nodes);
            }
            mine.sort_unstable();
            mine.dedup();
            members.push(mine);
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for mine in &members {
            for (i, &a) in mine.iter().enumerate() {
                for &b in &mine[i + 1..] {
                    let w = nodes[a].l2(&nodes[b]);
                    adj[a].push((b, w));
                    adj[b].push((a, w));
                }
            }
        }
        let component = complex.components();
        Ok(DistanceOracle { complex, refinement, nodes, members, maximal, adj, component })
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn refinement(&self) -> usize {
        self.refinement
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// The Steiner nodes; every vertex and barycentre is among them.
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    fn star_nodes(&self, p: &Point) -> Vec<usize> {
        let c = p.carrier();
        let mut out: Vec<usize> = self
            .maximal
            .iter()
            .zip(&self.members)
            .filter(|(m, _)| c.is_face_of(m))
            .flat_map(|(_, mem)| mem.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distance in the standard metric: exact when `p` and `q` share a
    /// simplex, otherwise a Steiner-graph upper bound; `+∞` across components.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        p.check_in(&self.complex)?;
        q.check_in(&self.complex)?;
        Ok(self.distance_unchecked(p, q))
    }

    pub(crate) fn distance_unchecked(&self, p: &Point, q: &Point) -> f64 {
        // Fixed search direction keeps the result bitwise symmetric.
        let key = |x: &Point| x.iter().collect::<Vec<(usize, f64)>>();
        let (kp, kq) = (key(p), key(q));
        let swap = kp.len().cmp(&kq.len()).then_with(|| {
            kp.iter()
                .zip(&kq)
                .map(|(a, b)| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let (p, q) = if swap.is_gt() { (q, p) } else { (p, q) };
        if self.component[p.support()[0]] != self.component[q.support()[0]] {
            return f64::INFINITY;
        }
        let joint = p.carrier().union(&q.carrier());
        if self.complex.contains(&joint) {
            return p.l2(q);
        }
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for a in self.star_nodes(p) {
            let d = p.l2(&self.nodes[a]);
            if d < dist[a] {
                dist[a] = d;
                heap.push(Entry(d, a));
            }
        }
        let targets = self.star_nodes(q);
        let mut is_target = vec![false; n];
        for &b in &targets {
            is_target[b] = true;
        }
        let mut best = f64::INFINITY;
        while let Some(Entry(d, a)) = heap.pop() {
            if d > dist[a] || d >= best {
                continue;
            }
            if is_target[a] {
                best = best.min(d + self.nodes[a].l2(q));
            }
            for &(b, w) in &self.adj[a] {
                let nd = d + w;
                if nd < dist[b] {
                    dist[b] = nd;
                    heap.push(Entry(nd, b));
                }
            }
        }
        best
    }
}

/// `diam` and `rad` of `sigma`, measured in the target of `control` (or in
/// the complex itself when `control` is `None`).
///
/// Both quantities are evaluated inside the image simplex, where the metric is
/// Euclidean: `diam` is the largest vertex-pair distance (the supremum of a
/// convex function on a simplex) and `rad` the least distance from the image
/// of the barycentre to boundary samples (facet barycentres and lattice
/// points of resolution 8).
pub fn simplex_metrics(
    k: &SimplicialComplex,
    sigma: &Simplex,
    control: Option<&SimplicialMap>,
) -> Result<MetricReport> {
    k.require(sigma)?;
    let image = |p: &Point| -> Point {
        match control {
            Some(f) => f.evaluate_unchecked(p),
            None => p.clone(),
        }
    };
    let vs: Vec<Point> = sigma.vertices().iter().map(|&v| image(&Point::vertex(v))).collect();
    let mut diam: f64 = 0.0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            diam = diam.max(vs[i].l2(&vs[j]));
        }
    }
    let centre = image(&Point::barycenter(sigma));
    let mut rad = f64::INFINITY;
    for facet in sigma.facets() {
        rad = rad.min(centre.l2(&image(&Point::barycenter(&facet))));
        for p in lattice_points(&facet, 8) {
            rad = rad.min(centre.l2(&image(&p)));
        }
    }
    Ok(MetricReport { diam, rad })
}

/// `(mesh, comesh)`: supremum of diameters and infimum of radii over
/// positive-dimensional simplices. The comesh of a complex with no edges is
/// `+∞`.
pub fn mesh_comesh(k: &SimplicialComplex, control: Option<&SimplicialMap>) -> Result<(f64, f64)> {
    let mut mesh: f64 = 0.0;
    let mut comesh = f64::INFINITY;
    for s in k.simplices() {
        let r = simplex_metrics(k, s, control)?;
        mesh = mesh.max(r.diam);
        if s.dim() > 0 {
            comesh = comesh.min(r.rad);
        }
    }
    Ok((mesh, comesh))
}

/// Closed form for the identity control map: `1/√(n(n+1))` for an
/// `n`-dimensional complex, `+∞` when there are no edges.
pub fn standard_comesh(k: &SimplicialComplex) -> f64 {
    let n = k.dim() as f64;
    if k.dim() == 0 {
        f64::INFINITY
    } else {
        1.0 / (n * (n + 1.0)).sqrt()
    }
}
