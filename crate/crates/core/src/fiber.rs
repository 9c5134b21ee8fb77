//! Point inverses of a simplicial map in join coordinates.
//!
//! A simplex σ of the target is the join of its vertices, and every source
//! simplex τ with `f(τ) = σ` is the join of the pieces `τ_w = τ ∩ f⁻¹(w)`.
//! A point x with `f(x) = y ∈ σ̊` is therefore a pair `(φ, y)` where the
//! *fiber point* φ assigns to every vertex `u` over σ a weight `φ_u`, with
//! `Σ_{f(u)=w} φ_u = 1` for each `w ∈ σ`, and `x = Σ_u y_{f(u)} φ_u u`.
//! The fiber `f⁻¹(σ̂)` is the set of such φ: a union of products of simplices
//! `∏_w τ_w`, triangulated here by the staircase triangulation.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{Point, Simplex, SimplicialComplex, ZERO_COORD};
use crate::contractibility::{contractibility_verdict, contraction_from_collapse, CollapseContraction, Verdict};
use crate::error::{Error, Result};
use crate::homotopy::{random_point_in, Homotopy};
use crate::map::SimplicialMap;

/// Fiber coordinates over some target simplex: sorted `(source vertex, weight)`
/// pairs with positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberPoint {
    weights: Vec<(usize, f64)>,
}

impl FiberPoint {
    /// Merges repeated vertices and drops non-positive weights; no
    /// normalisation is applied.
    pub fn from_weights<I: IntoIterator<Item = (usize, f64)>>(weights: I) -> Self {
        let mut w: Vec<(usize, f64)> = weights.into_iter().collect();
        w.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(w.len());
        for (u, c) in w {
            match out.last_mut() {
                Some(last) if last.0 == u => last.1 += c,
                _ => out.push((u, c)),
            }
        }
        out.retain(|e| e.1 > ZERO_COORD);
        FiberPoint { weights: out }
    }

    /// The fiber vertex with weight one on each listed source vertex.
    pub fn indicator(tuple: &[usize]) -> Self {
        Self::from_weights(tuple.iter().map(|&u| (u, 1.0)))
    }

    pub fn weights(&self) -> &[(usize, f64)] {
        &self.weights
    }

    pub fn weight(&self, u: usize) -> f64 {
        match self.weights.binary_search_by_key(&u, |e| e.0) {
            Ok(i) => self.weights[i].1,
            Err(_) => 0.0,
        }
    }

    /// Source simplex spanned by the support.
    pub fn support(&self) -> Simplex {
        Simplex::from_image(self.weights.iter().map(|e| e.0).collect())
    }

    /// Restriction `Φ_{τ,σ}` to the vertices over a face τ.
    pub fn restrict(&self, f: &SimplicialMap, tau: &Simplex) -> FiberPoint {
        FiberPoint {
            weights: self
                .weights
                .iter()
                .copied()
                .filter(|&(u, _)| tau.contains(f.vertex_image(u)))
                .collect(),
        }
    }

    /// The source point `Σ_u y_{f(u)} φ_u u`. Vertices over coordinates of y
    /// that vanish drop out, which realises the closure of `f⁻¹(σ̊)`.
    pub fn combine(&self, f: &SimplicialMap, y: &Point) -> Result<Point> {
        let w: Vec<(usize, f64)> = self
            .weights
            .iter()
            .map(|&(u, c)| (u, y.coord(f.vertex_image(u)) * c))
            .filter(|e| e.1 > 0.0)
            .collect();
        if w.is_empty() {
            return Err(Error::Geometry(format!("fiber point does not lie over {y}")));
        }
        Ok(Point::from_weights(w))
    }

    /// Fiber coordinates of a source point together with its image.
    pub fn of_point(f: &SimplicialMap, x: &Point) -> (FiberPoint, Point) {
        let y = f.evaluate_unchecked(x);
        let phi = FiberPoint::from_weights(x.iter().map(|(u, c)| (u, c / y.coord(f.vertex_image(u)))));
        (phi, y)
    }

    /// Largest deviation of a per-vertex weight sum from one, over `sigma`.
    pub fn normalisation_error(&self, f: &SimplicialMap, sigma: &Simplex) -> f64 {
        sigma
            .vertices()
            .iter()
            .map(|&w| {
                let s: f64 =
                    self.weights.iter().filter(|e| f.vertex_image(e.0) == w).map(|e| e.1).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest weight difference.
    pub fn distance_sup(&self, other: &FiberPoint) -> f64 {
        let mut keys: BTreeSet<usize> = self.weights.iter().map(|e| e.0).collect();
        keys.extend(other.weights.iter().map(|e| e.0));
        keys.into_iter()
            .map(|u| (self.weight(u) - other.weight(u)).abs())
            .fold(0.0, f64::max)
    }
}

/// The fiber over a barycentre, with its staircase triangulation.
#[derive(Clone, Debug)]
pub struct FiberComplex {
    pub sigma: Simplex,
    /// Source simplices τ with `f(τ) = σ`; each contributes the product cell
    /// `∏_w τ_w`.
    pub cells: Vec<Simplex>,
    /// Triangulation; vertex `i` is the fiber vertex `tuples[i]`.
    pub triangulation: Arc<SimplicialComplex>,
    /// One source vertex per vertex of σ (in σ's order) for every
    /// triangulation vertex.
    pub tuples: Vec<Vec<usize>>,
    tuple_index: HashMap<Vec<usize>, usize>,
}

/// The pieces `τ_w` of τ over each vertex of σ, in σ's vertex order.
pub fn join_factors(f: &SimplicialMap, tau: &Simplex, sigma: &Simplex) -> Vec<Vec<usize>> {
    sigma
        .vertices()
        .iter()
        .map(|&w| tau.vertices().iter().copied().filter(|&u| f.vertex_image(u) == w).collect())
        .collect()
}

fn staircase_paths(factors: &[Vec<usize>], out: &mut Vec<Vec<Vec<usize>>>) {
    let mut idx = vec![0usize; factors.len()];
    let mut path = vec![idx.iter().zip(factors).map(|(&i, fa)| fa[i]).collect::<Vec<_>>()];
    fn rec(
        factors: &[Vec<usize>],
        idx: &mut Vec<usize>,
        path: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        let mut moved = false;
        for k in 0..factors.len() {
            if idx[k] + 1 < factors[k].len() {
                moved = true;
                idx[k] += 1;
                path.push(idx.iter().zip(factors).map(|(&i, fa)| fa[i]).collect());
                rec(factors, idx, path, out);
                path.pop();
                idx[k] -= 1;
            }
        }
        if !moved {
            out.push(path.clone());
        }
    }
    rec(factors, &mut idx, &mut path, out);
}

/// `f⁻¹(σ̂)`, empty when σ̊ misses the image.
pub fn fiber_over_barycenter(f: &SimplicialMap, sigma: &Simplex) -> Result<FiberComplex> {
    f.target().require(sigma)?;
    let cells: Vec<Simplex> = f.simplices_onto(sigma).to_vec();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut tuple_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for tau in &cells {
        let factors = join_factors(f, tau, sigma);
        let mut paths = Vec::new();
        staircase_paths(&factors, &mut paths);
        for p in paths {
            let ids = p
                .into_iter()
                .map(|t| {
                    *tuple_index.entry(t.clone()).or_insert_with(|| {
                        tuples.push(t);
                        tuples.len() - 1
                    })
                })
                .collect();
            gens.push(ids);
        }
    }
    let src = f.source();
    let labels: Vec<String> = tuples
        .iter()
        .map(|t| t.iter().map(|&u| src.label(u)).collect::<Vec<_>>().join("·"))
        .collect();
    let triangulation = if labels.is_empty() {
        SimplicialComplex::empty()
    } else {
        SimplicialComplex::from_generators(labels, &gens)?
    };
    Ok(FiberComplex {
        sigma: sigma.clone(),
        cells,
        triangulation: Arc::new(triangulation),
        tuples,
        tuple_index,
    })
}

impl FiberComplex {
    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple_id(&self, tuple: &[usize]) -> Option<usize> {
        self.tuple_index.get(tuple).copied()
    }

    /// Position of a triangulation vertex in the source: weight `1/(|σ|+1)`
    /// on each of its join factors.
    pub fn embed_vertex(&self, v: usize) -> Point {
        Point::from_weights(self.tuples[v].iter().map(|&u| (u, 1.0)))
    }

    /// Fiber coordinates of a triangulation point (its marginals).
    pub fn to_fiber_point(&self, p: &Point) -> FiberPoint {
        FiberPoint::from_weights(
            p.iter().flat_map(|(v, c)| self.tuples[v].iter().map(move |&u| (u, c))),
        )
    }

    /// Triangulation point with the given marginals. Each factor's weights are
    /// laid out along `[0, 1]` in vertex order; the union of breakpoints cuts
    /// `[0, 1]` into intervals, each naming one fiber vertex.
    pub fn from_fiber_point(&self, f: &SimplicialMap, phi: &FiberPoint) -> Result<Point> {
        let mut cums: Vec<Vec<(f64, usize)>> = Vec::with_capacity(self.sigma.len());
        let mut cuts: Vec<f64> = vec![0.0, 1.0];
        for &w in self.sigma.vertices() {
            let part: Vec<(usize, f64)> =
                phi.weights().iter().copied().filter(|e| f.vertex_image(e.0) == w).collect();
            let total: f64 = part.iter().map(|e| e.1).sum();
            if total <= 0.0 {
                return Err(Error::Geometry(format!(
                    "fiber point has no weight over {}",
                    f.target().label(w)
                )));
            }
            let mut acc = 0.0;
            let mut cum = Vec::with_capacity(part.len());
            for (u, c) in part {
                acc += c / total;
                cum.push((acc, u));
                cuts.push(acc.min(1.0));
            }
            cum.last_mut().unwrap().0 = 1.0;
            cums.push(cum);
        }
        cuts.sort_by(f64::total_cmp);
        let mut weights = Vec::new();
        for win in cuts.windows(2) {
            let len = win[1] - win[0];
            if len <= ZERO_COORD {
                continue;
            }
            let mid = 0.5 * (win[0] + win[1]);
            let tuple: Vec<usize> = cums
                .iter()
                .map(|cum| cum.iter().find(|e| e.0 > mid).unwrap_or(cum.last().unwrap()).1)
                .collect();
            let id = self.tuple_id(&tuple).ok_or_else(|| {
                Error::Geometry(format!("fiber vertex {tuple:?} is not a source simplex"))
            })?;
            weights.push((id, len));
        }
        let p = Point::from_weights(weights);
        p.check_in(&self.triangulation)?;
        Ok(p)
    }

    /// Contractibility of the fiber.
    pub fn verdict(&self) -> Verdict {
        contractibility_verdict(&self.triangulation)
    }

    /// The collapse-derived contraction, acting on fiber points.
    pub fn contraction(&self) -> Result<FiberContraction> {
        match self.verdict() {
            Verdict::Contractible(seq) => Ok(FiberContraction {
                fiber: self.clone(),
                inner: contraction_from_collapse(self.triangulation.clone(), &seq)?,
            }),
            v => Err(Error::NotContractible(v.reason())),
        }
    }
}

/// A contraction of `f⁻¹(σ̂)` transported to fiber coordinates.
#[derive(Clone, Debug)]
pub struct FiberContraction {
    fiber: FiberComplex,
    inner: CollapseContraction,
}

impl FiberContraction {
    pub fn fiber(&self) -> &FiberComplex {
        &self.fiber
    }

    /// Fiber point at the end of the contraction.
    pub fn basepoint(&self) -> FiberPoint {
        FiberPoint::indicator(&self.fiber.tuples[self.inner.basepoint()])
    }

    pub fn at(&self, f: &SimplicialMap, phi: &FiberPoint, t: f64) -> Result<FiberPoint> {
        if t >= 1.0 {
            return Ok(self.basepoint());
        }
        let p = self.fiber.from_fiber_point(f, phi)?;
        let q = self.inner.at(&p, t)?;
        Ok(self.fiber.to_fiber_point(&q))
    }
}

/// Cell data identifying `f⁻¹(σ̊)` with `f⁻¹(σ̂) × σ̊`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellPairing {
    /// Open source simplex with `f(τ) = σ`.
    pub source: Simplex,
    /// Its join factors `τ_w`; the fiber cell is their product and the
    /// identification is `x ↦ (φ(x), f(x))` with inverse `(φ, y) ↦ Σ y_{f(u)} φ_u u`.
    pub factors: Vec<Vec<usize>>,
    pub fiber_cell_dim: usize,
}

#[derive(Clone, Debug)]
pub struct IsoCertificate {
    pub sigma: Simplex,
    pub pairs: Vec<CellPairing>,
    /// Interior points of σ whose fiber was compared with the fiber over σ̂.
    pub sampled_points: usize,
}

/// The fiber over an arbitrary point of σ̊, as a polytopal complex: vertices
/// `Σ_w x_w u_w` and one cell per τ onto σ, given by its vertex set.
#[derive(Clone, Debug)]
pub struct FiberPolytopes {
    pub vertices: Vec<Point>,
    pub cells: Vec<BTreeSet<usize>>,
}

/// Computes `f⁻¹(x)` for `x` in the interior of `σ` directly from the source
/// simplices.
pub fn fiber_polytopes(f: &SimplicialMap, sigma: &Simplex, x: &Point) -> FiberPolytopes {
    let mut vertices: Vec<Point> = Vec::new();
    let mut key_of: HashMap<Vec<(usize, i64)>, usize> = HashMap::new();
    let mut cells = Vec::new();
    for tau in f.simplices_onto(sigma) {
        let factors = join_factors(f, tau, sigma);
        let mut cell = BTreeSet::new();
        let mut choice = vec![0usize; factors.len()];
        loop {
            let p = Point::from_weights(
                sigma.vertices().iter().zip(&factors).zip(&choice).map(|((&w, fa), &i)| (fa[i], x.coord(w))),
            );
            let key: Vec<(usize, i64)> = p.iter().map(|(u, c)| (u, (c * 1e12).round() as i64)).collect();
            let id = *key_of.entry(key).or_insert_with(|| {
                vertices.push(p);
                vertices.len() - 1
            });
            cell.insert(id);
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < factors[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
        cells.push(cell);
    }
    FiberPolytopes { vertices, cells }
}

/// Backtracking search for a vertex bijection carrying the cells of `a`
/// exactly onto the cells of `b`.
pub fn polytopes_isomorphic(a: &FiberPolytopes, b: &FiberPolytopes) -> bool {
    if a.vertices.len() != b.vertices.len() || a.cells.len() != b.cells.len() {
        return false;
    }
    let profile = |p: &FiberPolytopes, v: usize| -> Vec<usize> {
        let mut s: Vec<usize> = p.cells.iter().filter(|c| c.contains(&v)).map(BTreeSet::len).collect();
        s.sort_unstable();
        s
    };
    let pa: Vec<Vec<usize>> = (0..a.vertices.len()).map(|v| profile(a, v)).collect();
    let pb: Vec<Vec<usize>> = (0..b.vertices.len()).map(|v| profile(b, v)).collect();
    let target: BTreeSet<BTreeSet<usize>> = b.cells.iter().cloned().collect();
    let mut assign = vec![usize::MAX; a.vertices.len()];
    let mut used = vec![false; b.vertices.len()];

    fn consistent(a: &FiberPolytopes, assign: &[usize], target: &BTreeSet<BTreeSet<usize>>) -> bool {
        // Every fully assigned cell must land on a cell of b.
        a.cells.iter().all(|c| {
            if c.iter().any(|&v| assign[v] == usize::MAX) {
                return true;
            }
            target.contains(&c.iter().map(|&v| assign[v]).collect::<BTreeSet<_>>())
        })
    }

    fn rec(
        v: usize,
        a: &FiberPolytopes,
        pa: &[Vec<usize>],
        pb: &[Vec<usize>],
        target: &BTreeSet<BTreeSet<usize>>,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if v == assign.len() {
            let image: BTreeSet<BTreeSet<usize>> =
                a.cells.iter().map(|c| c.iter().map(|&x| assign[x]).collect()).collect();
            return &image == target;
        }
        for w in 0..used.len() {
            if used[w] || pa[v] != pb[w] {
                continue;
            }
            assign[v] = w;
            used[w] = true;
            if consistent(a, assign, target) && rec(v + 1, a, pa, pb, target, assign, used) {
                return true;
            }
            used[w] = false;
            assign[v] = usize::MAX;
        }
        false
    }
    rec(0, a, &pa, &pb, &target, &mut assign, &mut used)
}

/// Builds and checks the identification `f⁻¹(σ̊) ≅ f⁻¹(σ̂) × σ̊`.
///
/// The cell bijection pairs each τ onto σ with the product of its join
/// factors; dimensions must satisfy `dim τ = dim ∏τ_w + |σ|` and faces must
/// correspond. Then `samples` random interior points of σ get their fibers
/// computed directly and compared with the fiber over σ̂.
pub fn verify_product_decomposition(
    f: &SimplicialMap,
    sigma: &Simplex,
    samples: usize,
    seed: u64,
) -> Result<IsoCertificate> {
    f.target().require(sigma)?;
    let mut pairs = Vec::new();
    for tau in f.simplices_onto(sigma) {
        let factors = join_factors(f, tau, sigma);
        let fiber_cell_dim: usize = factors.iter().map(|fa| fa.len() - 1).sum();
        if factors.iter().any(Vec::is_empty) || fiber_cell_dim + sigma.dim() != tau.dim() {
            return Err(Error::Internal(format!(
                "cell {} does not split as a product",
                f.source().fmt_simplex(tau)
            )));
        }
        pairs.push(CellPairing { source: tau.clone(), factors, fiber_cell_dim });
    }
    for p in &pairs {
        for q in &pairs {
            let src_face = p.source.is_face_of(&q.source);
            let prod_face = p
                .factors
                .iter()
                .zip(&q.factors)
                .all(|(a, b)| a.iter().all(|u| b.contains(u)));
            if src_face != prod_face {
                return Err(Error::Internal("face relations disagree".into()));
            }
        }
    }
    let centre = fiber_polytopes(f, sigma, &Point::barycenter(sigma));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_point_in(sigma.vertices(), &mut rng);
        let here = fiber_polytopes(f, sigma, &x);
        if !polytopes_isomorphic(&here, &centre) {
            return Err(Error::Internal(format!("fiber over {x} differs from the fiber over the barycentre")));
        }
    }
    Ok(IsoCertificate { sigma: sigma.clone(), pairs, sampled_points: samples })
}

/// Deformation retraction of `f⁻¹(st σ)` onto `f⁻¹(σ̊)`.
///
/// Writing `x = (1 − t)·x_σ + t·x_C` with `x_σ` the normalised part over the
/// vertices of σ, the track lowers `t` at unit speed until it reaches zero.
#[derive(Clone, Debug)]
pub struct StarRetraction {
    map: Arc<SimplicialMap>,
    sigma: Simplex,
}

impl StarRetraction {
    pub fn sigma(&self) -> &Simplex {
        &self.sigma
    }

    /// Whether `f(x)` lies in the open star of σ.
    pub fn in_domain(&self, x: &Point) -> bool {
        let y = self.map.evaluate_unchecked(x);
        self.sigma.is_face_of(&y.carrier())
    }
}

impl Homotopy for StarRetraction {
    fn at(&self, x: &Point, u: f64) -> Result<Point> {
        x.check_in(self.map.source())?;
        if !self.in_domain(x) {
            return Err(Error::OutOfRange(format!(
                "point {x} does not lie over the open star of {}",
                self.map.target().fmt_simplex(&self.sigma)
            )));
        }
        let (inner, outer): (Vec<(usize, f64)>, Vec<(usize, f64)>) =
            x.iter().partition(|&(v, _)| self.sigma.contains(self.map.vertex_image(v)));
        let t: f64 = outer.iter().map(|e| e.1).sum();
        if t <= 0.0 {
            return Ok(x.clone());
        }
        let t_new = (t - u.clamp(0.0, 1.0)).max(0.0);
        let a = (1.0 - t_new) / (1.0 - t);
        let b = if t_new > 0.0 { t_new / t } else { 0.0 };
        Ok(Point::from_weights(
            inner.into_iter().map(|(v, c)| (v, c * a)).chain(outer.into_iter().map(|(v, c)| (v, c * b))),
        ))
    }
}

pub fn build_star_retraction(f: Arc<SimplicialMap>, sigma: &Simplex) -> Result<StarRetraction> {
    f.target().require(sigma)?;
    if f.simplices_onto(sigma).is_empty() {
        return Err(Error::VacuousRetraction(f.target().fmt_simplex(sigma)));
    }
    Ok(StarRetraction { map: f, sigma: sigma.clone() })
}
