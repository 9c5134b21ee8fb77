//! Finite abstract simplicial complexes, points given in barycentric
//! coordinates, stars and barycentric subdivision.
//!
//! Vertices are identified by their index in first-appearance order; the
//! string labels are kept alongside for I/O. A [`Simplex`] is a sorted,
//! duplicate-free vertex list, so the derived `Ord` is lexicographic on
//! vertex indices and every enumeration in the crate is deterministic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Default absolute tolerance for metric comparisons.
pub const TOL: f64 = 1e-9;

/// Coordinates at or below this magnitude are treated as zero when a point is
/// canonicalised.
pub const ZERO_COORD: f64 = 1e-14;

/// A non-empty, strictly increasing list of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Builds a simplex from vertices in any order. Duplicates are rejected.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Malformed("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Malformed(format!(
                "duplicate vertex in simplex {vertices:?}"
            )));
        }
        Ok(Simplex(vertices))
    }

    /// Builds a simplex from a vertex list that may contain repeats (as an
    /// image under a degenerate map does).
    pub fn from_image(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        assert!(!vertices.is_empty(), "image of a simplex is never empty");
        Simplex(vertices)
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Dimension `|σ|`, i.e. number of vertices minus one.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// `self ⩽ other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// `self < other`.
    pub fn is_proper_face_of(&self, other: &Simplex) -> bool {
        self.0.len() < other.0.len() && self.is_face_of(other)
    }

    /// Every non-empty face, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let mut out = Vec::with_capacity((1usize << n) - 1);
        for mask in 1u64..(1u64 << n) {
            let vs = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.0[i])
                .collect();
            out.push(Simplex(vs));
        }
        out.sort();
        out
    }

    /// Codimension-one faces; empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut vs = self.0.clone();
                vs.remove(i);
                Simplex(vs)
            })
            .collect()
    }

    /// Vertex set union (the join when the union is a simplex of the complex).
    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut vs: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        vs.sort_unstable();
        vs.dedup();
        Simplex(vs)
    }

    /// Vertices of `self` not in `other`, if any remain.
    pub fn difference(&self, other: &Simplex) -> Option<Simplex> {
        let vs: Vec<usize> = self.0.iter().copied().filter(|v| !other.contains(*v)).collect();
        if vs.is_empty() {
            None
        } else {
            Some(Simplex(vs))
        }
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A finite simplicial complex closed under taking faces.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    simplices: Vec<Simplex>,
    lookup: HashMap<Simplex, usize>,
    cofaces: Vec<Vec<usize>>,
    maximal: Vec<usize>,
}

impl SimplicialComplex {
    /// Closes `generators` (given as vertex-index lists into `labels`) under
    /// faces. Vertices that appear in no generator become isolated vertices.
    pub fn from_generators(labels: Vec<String>, generators: &[Vec<usize>]) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate vertex label {l:?}")));
            }
        }
        let mut set = BTreeSet::new();
        for v in 0..labels.len() {
            set.insert(Simplex::vertex(v));
        }
        for g in generators {
            if let Some(bad) = g.iter().find(|&&v| v >= labels.len()) {
                return Err(Error::Malformed(format!("vertex index {bad} out of range")));
            }
            let s = Simplex::new(g.clone())?;
            if s.len() > 20 {
                return Err(Error::Malformed("simplex dimension above 19".into()));
            }
            if set.contains(&s) {
                continue;
            }
            set.extend(s.faces());
        }
        Ok(Self::from_closed_set(labels, index, set))
    }

    /// Builds from labelled generators, creating vertices in first-appearance
    /// order.
    pub fn from_labelled<S: AsRef<str>>(generators: &[Vec<S>]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let mut ids = Vec::with_capacity(g.len());
            for l in g {
                let l = l.as_ref();
                let id = *index.entry(l.to_string()).or_insert_with(|| {
                    labels.push(l.to_string());
                    labels.len() - 1
                });
                ids.push(id);
            }
            gens.push(ids);
        }
        Self::from_generators(labels, &gens)
    }

    fn from_closed_set(labels: Vec<String>, index: HashMap<String, usize>, set: BTreeSet<Simplex>) -> Self {
        let simplices: Vec<Simplex> = set.into_iter().collect();
        let lookup: HashMap<Simplex, usize> =
            simplices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut cofaces = vec![Vec::new(); simplices.len()];
        for (i, s) in simplices.iter().enumerate() {
            for f in s.facets() {
                cofaces[lookup[&f]].push(i);
            }
        }
        let maximal = (0..simplices.len()).filter(|&i| cofaces[i].is_empty()).collect();
        SimplicialComplex { labels, index, simplices, lookup, cofaces, maximal }
    }

    /// The complex with no simplices.
    pub fn empty() -> Self {
        Self::from_closed_set(Vec::new(), HashMap::new(), BTreeSet::new())
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Parses a list of labels into a simplex of this complex.
    pub fn simplex_by_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Simplex> {
        let ids = labels
            .iter()
            .map(|l| {
                self.vertex_id(l.as_ref())
                    .ok_or_else(|| Error::NotFound(format!("vertex {:?}", l.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Simplex::new(ids)?;
        self.require(&s)?;
        Ok(s)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Maximum simplex dimension; zero for the empty complex.
    pub fn dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.lookup.contains_key(s)
    }

    pub fn require(&self, s: &Simplex) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::NotFound(format!("simplex {} not in complex", self.fmt_simplex(s))))
        }
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.lookup.get(s).copied()
    }

    pub fn simplices_of_dim(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dim() == d)
    }

    /// Counts of simplices by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; if self.is_empty() { 0 } else { self.dim() + 1 }];
        for s in &self.simplices {
            f[s.dim()] += 1;
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Maximal simplices in lexicographic order.
    pub fn maximal_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.maximal.iter().map(|&i| &self.simplices[i])
    }

    /// Simplices having `s` as a facet.
    pub fn immediate_cofaces(&self, s: &Simplex) -> impl Iterator<Item = &Simplex> {
        let i = self.lookup.get(s).copied();
        i.into_iter()
            .flat_map(move |i| self.cofaces[i].iter().map(move |&j| &self.simplices[j]))
    }

    /// The open star `st(σ)`, returned as the set of cofaces `τ ⩾ σ`.
    pub fn star(&self, sigma: &Simplex) -> Result<Vec<Simplex>> {
        self.require(sigma)?;
        Ok(self.simplices.iter().filter(|t| sigma.is_face_of(t)).cloned().collect())
    }

    /// Maximal simplices containing `sigma`.
    pub fn maximal_cofaces(&self, sigma: &Simplex) -> Vec<&Simplex> {
        self.maximal_simplices().filter(|m| sigma.is_face_of(m)).collect()
    }

    /// Component label for every vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for s in self.simplices_of_dim(1) {
            let (a, b) = (find(&mut parent, s.0[0]), find(&mut parent, s.0[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    pub fn num_components(&self) -> usize {
        let mut c = self.components();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn fmt_simplex(&self, s: &Simplex) -> String {
        let names: Vec<&str> = s
            .vertices()
            .iter()
            .map(|&v| self.labels.get(v).map(String::as_str).unwrap_or("?"))
            .collect();
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            format!("[{}]", names.join(","))
        }
    }

    /// Cone on this complex with a new apex vertex.
    pub fn cone(&self, apex: &str) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.push(apex.to_string());
        let a = labels.len() - 1;
        let mut gens: Vec<Vec<usize>> = self
            .maximal_simplices()
            .map(|m| {
                let mut v = m.vertices().to_vec();
                v.push(a);
                v
            })
            .collect();
        if gens.is_empty() {
            gens.push(vec![a]);
        }
        Self::from_generators(labels, &gens)
    }

    /// The barycentric subdivision together with the position of each new
    /// vertex (the barycentre σ̂ of the simplex it stands for).
    pub fn barycentric_subdivision(&self) -> (SimplicialComplex, Vec<Point>) {
        let labels: Vec<String> = self
            .simplices
            .iter()
            .map(|s| {
                let names: Vec<&str> = s.vertices().iter().map(|&v| self.label(v)).collect();
                format!("[{}]", names.join(","))
            })
            .collect();
        let positions = self.simplices.iter().map(Point::barycenter).collect();
        let mut gens = Vec::new();
        for m in self.maximal_simplices() {
            // Every ordering of the vertices of a maximal simplex gives one
            // maximal chain of faces.
            let mut perm = m.vertices().to_vec();
            permutations(&mut perm, 0, &mut |p| {
                let mut chain = Vec::with_capacity(p.len());
                for k in 1..=p.len() {
                    let face = Simplex::from_image(p[..k].to_vec());
                    chain.push(self.lookup[&face]);
                }
                gens.push(chain);
            });
        }
        let sd = SimplicialComplex::from_generators(labels, &gens)
            .expect("chains of distinct faces are valid simplices");
        (sd, positions)
    }
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        out(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// A point of a complex: the carrier simplex together with strictly positive
/// barycentric coordinates summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    verts: Vec<usize>,
    coords: Vec<f64>,
}

impl Point {
    /// Validating constructor. Coordinates must be non-negative and sum to one
    /// within [`TOL`]; zero coordinates are dropped.
    pub fn new(carrier: &Simplex, coords: &[f64]) -> Result<Self> {
        if coords.len() != carrier.len() {
            return Err(Error::Malformed(format!(
                "{} coordinates for a simplex with {} vertices",
                coords.len(),
                carrier.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite() || *c < -TOL) {
            return Err(Error::Malformed(format!("negative or non-finite coordinate in {coords:?}")));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::Malformed(format!("coordinates sum to {sum}, not 1")));
        }
        Ok(Self::from_weights(carrier.vertices().iter().copied().zip(coords.iter().copied())))
    }

    /// Canonicalising constructor: merges repeated vertices, drops tiny or
    /// negative weights and renormalises.
    pub fn from_weights<I: IntoIterator<Item = (usize, f64)>>(weights: I) -> Self {
        let mut w: Vec<(usize, f64)> = weights.into_iter().collect();
        w.sort_by_key(|e| e.0);
        let mut verts = Vec::with_capacity(w.len());
        let mut coords: Vec<f64> = Vec::with_capacity(w.len());
        for (v, c) in w {
            if verts.last() == Some(&v) {
                *coords.last_mut().unwrap() += c;
            } else {
                verts.push(v);
                coords.push(c);
            }
        }
        let mut i = 0;
        while i < verts.len() {
            if coords[i] <= ZERO_COORD {
                verts.remove(i);
                coords.remove(i);
            } else {
                i += 1;
            }
        }
        assert!(!verts.is_empty(), "point with no positive coordinate");
        let sum: f64 = coords.iter().sum();
        for c in &mut coords {
            *c /= sum;
        }
        Point { verts, coords }
    }

    pub fn vertex(v: usize) -> Self {
        Point { verts: vec![v], coords: vec![1.0] }
    }

    /// The barycentre σ̂.
    pub fn barycenter(s: &Simplex) -> Self {
        let c = 1.0 / s.len() as f64;
        Point { verts: s.vertices().to_vec(), coords: vec![c; s.len()] }
    }

    /// The unique simplex containing the point in its interior.
    pub fn carrier(&self) -> Simplex {
        Simplex::from_sorted(self.verts.clone())
    }

    pub fn support(&self) -> &[usize] {
        &self.verts
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.verts.iter().copied().zip(self.coords.iter().copied())
    }

    /// Coordinate of vertex `v` (zero off the carrier).
    pub fn coord(&self, v: usize) -> f64 {
        match self.verts.binary_search(&v) {
            Ok(i) => self.coords[i],
            Err(_) => 0.0,
        }
    }

    /// Euclidean distance of coordinate vectors in the standard embedding.
    /// Only meaningful as a path distance when both points lie in a common
    /// simplex.
    pub fn l2(&self, other: &Point) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.verts.len() || j < other.verts.len() {
            let a = self.verts.get(i).copied().unwrap_or(usize::MAX);
            let b = other.verts.get(j).copied().unwrap_or(usize::MAX);
            let d = if a == b {
                i += 1;
                j += 1;
                self.coords[i - 1] - other.coords[j - 1]
            } else if a < b {
                i += 1;
                self.coords[i - 1]
            } else {
                j += 1;
                -other.coords[j - 1]
            };
            acc += d * d;
        }
        acc.sqrt()
    }

    /// `(1 − t)·self + t·other`; both must lie in a common simplex for the
    /// result to be a point of the complex.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::from_weights(
            self.iter()
                .map(|(v, c)| (v, (1.0 - t) * c))
                .chain(other.iter().map(|(v, c)| (v, t * c))),
        )
    }

    pub fn to_labelled(&self, k: &SimplicialComplex) -> Vec<(String, f64)> {
        self.iter().map(|(v, c)| (k.label(v).to_string(), c)).collect()
    }

    /// Checks the carrier is a simplex of `k`.
    pub fn check_in(&self, k: &SimplicialComplex) -> Result<()> {
        k.require(&self.carrier())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(v, c)| format!("{v}:{c:.6}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Convenience: closure of labelled generators. Panics on malformed input;
/// meant for fixtures and tests.
pub fn closure_complex<S: AsRef<str>>(generators: &[Vec<S>]) -> Result<SimplicialComplex> {
    if generators.is_empty() {
        return Err(Error::EmptyInput);
    }
    SimplicialComplex::from_labelled(generators)
}
