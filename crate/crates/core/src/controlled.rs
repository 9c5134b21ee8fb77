//! The controlled homotopy inverse of a simplicial map with contractible
//! point inverses.
//!
//! `γ: χ(Y) → X` is built by induction on flag length. On the cell of a flag
//! `σ ⩽ σ₀ < … < σ_m` it has the form `γ(s, t) = Σ_u s_{f(u)} F(t)_u · u`
//! where `F(t)` is a fiber point over `σ₀`: a chosen base point for `m = 0`,
//! and otherwise the cone extension of the boundary values through the
//! contraction of `f⁻¹(σ̂₀)`. Because γ only ever combines a fiber point with
//! the base coordinates `s`, `f∘γ` is the projection `(s, t) ↦ s` exactly.
//!
//! From γ:
//! * `g_ε = γ ∘ Γ_ε⁻¹`;
//! * `h′(x, t) = (φ(x), h₂,ε(f(x), t))` in join coordinates, so that
//!   `f∘h′ = h₂,ε∘f`;
//! * `h″` runs in the fiber only, from `h′(·, 1)` to `g_ε∘f`, by a second cone
//!   extension over `Δ^m × I`;
//! * `h₁,ε` is `h′` on `[0, ½]` followed by `h″` on `[½, 1]`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::cellulation::{build_cellulation, CellCoords, Cellulation, Flag, StraightLineHomotopy};
use crate::complex::{Point, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::fiber::{build_star_retraction, fiber_over_barycenter, FiberContraction, FiberPoint};
use crate::homotopy::{measure_homotopy_control, Concat, ControlReport, Homotopy, PointMap, TIME_STEPS};
use crate::map::SimplicialMap;
use crate::metric::{standard_comesh, DistanceOracle};

/// Gauge tolerance below which a cone point is treated as the apex or as
/// lying on a boundary face.
const CONE_TOL: f64 = 1e-12;

/// Explicit fiber values for one chain, overriding the cone extension.
pub type ChainOverride = Arc<dyn Fn(&[f64]) -> Result<FiberPoint> + Send + Sync>;

/// γ on every cell of χ(Y), stored as base fiber points, fiber contractions
/// and optional per-chain overrides.
#[derive(Clone)]
pub struct FlagMap {
    map: Arc<SimplicialMap>,
    contractions: HashMap<Simplex, FiberContraction>,
    base: HashMap<Simplex, FiberPoint>,
    overrides: HashMap<Vec<Simplex>, ChainOverride>,
}

impl std::fmt::Debug for FlagMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FlagMap")
            .field("fibers", &self.contractions.len())
            .field("overrides", &self.overrides.len())
            .finish()
    }
}

/// Builds γ. Every fiber must be certified contractible; `base_choices`
/// replaces the default base point (the collapse basepoint) per simplex.
pub fn build_gamma_map(
    f: Arc<SimplicialMap>,
    base_choices: Option<HashMap<Simplex, FiberPoint>>,
) -> Result<FlagMap> {
    let y = f.target().clone();
    let mut contractions = HashMap::new();
    let mut base = HashMap::new();
    for sigma in y.simplices() {
        let fiber = fiber_over_barycenter(&f, sigma)?;
        let c = fiber.contraction().map_err(|e| Error::CannotConstruct {
            simplex: y.fmt_simplex(sigma),
            reason: match e {
                Error::NotContractible(r) => format!("fiber is not certified contractible ({r})"),
                other => other.to_string(),
            },
        })?;
        base.insert(sigma.clone(), c.basepoint());
        contractions.insert(sigma.clone(), c);
    }
    if let Some(choices) = base_choices {
        for (sigma, phi) in choices {
            let c = contractions.get(&sigma).ok_or_else(|| {
                Error::NotFound(format!("base choice for a simplex {sigma} not in the target"))
            })?;
            c.fiber().from_fiber_point(&f, &phi).map_err(|e| Error::CannotConstruct {
                simplex: y.fmt_simplex(&sigma),
                reason: format!("base choice is not a point of the fiber: {e}"),
            })?;
            if phi.normalisation_error(&f, &sigma) > 1e-9 {
                return Err(Error::CannotConstruct {
                    simplex: y.fmt_simplex(&sigma),
                    reason: "base choice weights do not sum to one over each vertex".into(),
                });
            }
            base.insert(sigma, phi);
        }
    }
    Ok(FlagMap { map: f, contractions, base, overrides: HashMap::new() })
}

fn drop_index(v: &[f64], j: usize) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        for x in &mut out {
            *x /= s;
        }
    }
    out
}

fn drop_chain(chain: &[Simplex], j: usize) -> Vec<Simplex> {
    chain.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, s)| s.clone()).collect()
}

/// Radial projection of `t ∈ Δ^m` from the barycentre: the gauge
/// `1 − (m+1)·min t_j` and the boundary point `ĉ + (t − ĉ)/λ`.
fn simplex_gauge(t: &[f64]) -> (f64, Vec<f64>) {
    let n = t.len() as f64;
    let min = t.iter().copied().fold(f64::INFINITY, f64::min);
    let lam = (1.0 - n * min).clamp(0.0, 1.0);
    let c = 1.0 / n;
    let u = if lam > CONE_TOL {
        t.iter().map(|&x| (c + (x - c) / lam).max(0.0)).collect()
    } else {
        t.to_vec()
    };
    (lam, u)
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap()
}

impl FlagMap {
    pub fn map(&self) -> &Arc<SimplicialMap> {
        &self.map
    }

    pub fn base_choice(&self, sigma: &Simplex) -> Option<&FiberPoint> {
        self.base.get(sigma)
    }

    pub fn contraction(&self, sigma: &Simplex) -> Option<&FiberContraction> {
        self.contractions.get(sigma)
    }

    /// Replaces the fiber values on cells with this chain.
    pub fn set_override(&mut self, chain: Vec<Simplex>, value: ChainOverride) {
        self.overrides.insert(chain, value);
    }

    fn contraction_of(&self, sigma: &Simplex) -> Result<&FiberContraction> {
        self.contractions
            .get(sigma)
            .ok_or_else(|| Error::NotFound(format!("no fiber over {}", self.map.target().fmt_simplex(sigma))))
    }

    /// `Φ_{τ,σ}`: restriction of fiber coordinates to the vertices over τ.
    pub fn transition(&self, phi: &FiberPoint, tau: &Simplex) -> FiberPoint {
        phi.restrict(&self.map, tau)
    }

    /// `γ_{σ̂₀…σ̂_m × σ̊₀}(t)`: fiber point over `σ₀`.
    pub fn fiber_value(&self, chain: &[Simplex], t: &[f64]) -> Result<FiberPoint> {
        if chain.len() != t.len() || chain.is_empty() {
            return Err(Error::Malformed("chain and coordinates differ in length".into()));
        }
        if let Some(o) = self.overrides.get(chain) {
            return o(t);
        }
        let s0 = &chain[0];
        if chain.len() == 1 {
            return self
                .base
                .get(s0)
                .cloned()
                .ok_or_else(|| Error::NotFound(format!("no base choice over {}", self.map.target().fmt_simplex(s0))));
        }
        let c = self.contraction_of(s0)?;
        let (lam, u) = simplex_gauge(t);
        if lam <= CONE_TOL {
            return Ok(c.basepoint());
        }
        let j = argmin(&u);
        let rest = drop_index(&u, j);
        let sub = drop_chain(chain, j);
        let boundary = if j == 0 {
            self.transition(&self.fiber_value(&sub, &rest)?, s0)
        } else {
            self.fiber_value(&sub, &rest)?
        };
        c.at(&self.map, &boundary, 1.0 - lam)
    }

    /// γ on the cell of `flag`.
    pub fn eval(&self, flag: &Flag, coords: &CellCoords) -> Result<Point> {
        let phi = self.fiber_value(&flag.chain, &coords.t)?;
        phi.combine(&self.map, &coords.base_point(flag))
    }

    /// The fiber homotopy `K(φ, t, u)` over `σ₀` from `Φ_{σ₀σ_m}φ` (u = 0) to
    /// `F(t)` (u = 1), for φ a fiber point over the top of the chain.
    pub fn fiber_homotopy(&self, chain: &[Simplex], phi: &FiberPoint, t: &[f64], u: f64) -> Result<FiberPoint> {
        let s0 = &chain[0];
        let m = chain.len() - 1;
        let (lt, tb) = simplex_gauge(t);
        let lu = (2.0 * u - 1.0).abs();
        let lam = lt.max(lu);
        let c = self.contraction_of(s0)?;
        if lam <= CONE_TOL {
            return Ok(c.basepoint());
        }
        // Boundary point of Δ^m × I on the ray from the centre; the I faces
        // take priority where faces meet.
        let boundary = if lu >= lt {
            let tn: Vec<f64> = t.iter().map(|&x| {
                let cc = 1.0 / t.len() as f64;
                (cc + (x - cc) / lam).max(0.0)
            }).collect();
            if u < 0.5 {
                self.transition(phi, s0)
            } else {
                let s: f64 = tn.iter().sum();
                self.fiber_value(chain, &tn.iter().map(|x| x / s).collect::<Vec<_>>())?
            }
        } else {
            let ub = 0.5 + (u - 0.5) / lam;
            let j = argmin(&tb);
            let rest = drop_index(&tb, j);
            let sub = drop_chain(chain, j);
            if j == 0 {
                self.transition(&self.fiber_homotopy(&sub, phi, &rest, ub)?, s0)
            } else if j == m {
                let below = &chain[m - 1];
                self.fiber_homotopy(&sub, &self.transition(phi, below), &rest, ub)?
            } else {
                self.fiber_homotopy(&sub, phi, &rest, ub)?
            }
        };
        c.at(&self.map, &boundary, 1.0 - lam)
    }
}

/// The controlled family `{g_ε, h₁,ε, h₂,ε}` attached to a flag map.
#[derive(Clone, Debug)]
pub struct ControlledFamily {
    gamma: Arc<FlagMap>,
}

/// `g_ε = γ ∘ Γ_ε⁻¹ : Y → X`.
#[derive(Clone, Debug)]
pub struct InverseMap {
    gamma: Arc<FlagMap>,
    cells: Arc<Cellulation>,
}

impl InverseMap {
    pub fn epsilon(&self) -> f64 {
        self.cells.epsilon()
    }

    pub fn cellulation(&self) -> &Arc<Cellulation> {
        &self.cells
    }
}

impl PointMap for InverseMap {
    fn apply(&self, y: &Point) -> Result<Point> {
        let (c, coords) = self.cells.invert(y)?;
        self.gamma.eval(&self.cells.flags()[c], &coords)
    }
}

pub fn build_inverse(gamma: Arc<FlagMap>, eps: f64) -> Result<InverseMap> {
    let cells = Arc::new(build_cellulation(gamma.map.target().clone(), eps)?);
    Ok(InverseMap { gamma, cells })
}

/// `h′₁,ε`: the fiber coordinate is kept, the base follows `h₂,ε`.
#[derive(Clone, Debug)]
pub struct H1Prime {
    map: Arc<SimplicialMap>,
    h2: StraightLineHomotopy,
}

impl Homotopy for H1Prime {
    fn at(&self, x: &Point, t: f64) -> Result<Point> {
        x.check_in(self.map.source())?;
        let (phi, y) = FiberPoint::of_point(&self.map, x);
        phi.combine(&self.map, &self.h2.at(&y, t)?)
    }
}

/// `h″₁,ε`: moves only in the fiber, from `h′₁,ε(·, 1)` to `g_ε∘f`.
#[derive(Clone, Debug)]
pub struct H1Second {
    gamma: Arc<FlagMap>,
    cells: Arc<Cellulation>,
}

impl Homotopy for H1Second {
    fn at(&self, x: &Point, u: f64) -> Result<Point> {
        let f = &self.gamma.map;
        x.check_in(f.source())?;
        let (phi, y) = FiberPoint::of_point(f, x);
        let (c, coords) = self.cells.invert(&y)?;
        let flag = &self.cells.flags()[c];
        let k = self.gamma.fiber_homotopy(&flag.chain, &phi, &coords.t, u.clamp(0.0, 1.0))?;
        k.combine(f, &coords.base_point(flag))
    }
}

/// `h₁,ε = h″₁,ε ∗ h′₁,ε`, with `h′` on the first half of the interval.
pub type H1 = Concat<H1Prime, H1Second>;

impl ControlledFamily {
    pub fn new(gamma: FlagMap) -> Self {
        ControlledFamily { gamma: Arc::new(gamma) }
    }

    /// Builds γ with default base choices and wraps it.
    pub fn from_map(f: Arc<SimplicialMap>) -> Result<Self> {
        Ok(Self::new(build_gamma_map(f, None)?))
    }

    pub fn gamma(&self) -> &Arc<FlagMap> {
        &self.gamma
    }

    pub fn map(&self) -> &Arc<SimplicialMap> {
        &self.gamma.map
    }

    /// Largest ε accepted: the comesh of Y.
    pub fn epsilon_bound(&self) -> f64 {
        standard_comesh(self.gamma.map.target())
    }

    pub fn g(&self, eps: f64) -> Result<InverseMap> {
        build_inverse(self.gamma.clone(), eps)
    }

    pub fn h2(&self, eps: f64) -> Result<StraightLineHomotopy> {
        Ok(self.g(eps)?.cells.straightline())
    }

    pub fn h1_prime(&self, eps: f64) -> Result<H1Prime> {
        Ok(H1Prime { map: self.gamma.map.clone(), h2: self.h2(eps)? })
    }

    pub fn h1_second(&self, eps: f64) -> Result<H1Second> {
        Ok(H1Second { gamma: self.gamma.clone(), cells: self.g(eps)?.cells })
    }

    pub fn h1(&self, eps: f64) -> Result<H1> {
        let g = self.g(eps)?;
        Ok(Concat {
            first: H1Prime { map: self.gamma.map.clone(), h2: g.cells.straightline() },
            second: H1Second { gamma: self.gamma.clone(), cells: g.cells.clone() },
            split: 0.5,
        })
    }
}

/// Family laws measured at one ε.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FamilyControl {
    pub epsilon: f64,
    /// `d(y, f g_ε(y))` over Y samples.
    pub fg: ControlReport,
    /// `d(f(x), f h₁,ε(x, t))` over X samples.
    pub h1: ControlReport,
    /// `d(y, h₂,ε(y, t))` over Y samples.
    pub h2: ControlReport,
}

/// Measures the three control laws of the family at `eps` on the given
/// sample sets.
pub fn measure_family(
    family: &ControlledFamily,
    oracle_y: &DistanceOracle,
    samples_x: &[Point],
    samples_y: &[Point],
    eps: f64,
) -> Result<FamilyControl> {
    let f = family.map().clone();
    let g = family.g(eps)?;
    let h2 = g.cellulation().straightline();
    let h1 = family.h1(eps)?;
    let fg = crate::homotopy::measure_map_control(oracle_y, samples_y, eps, |y| {
        Ok((y.clone(), f.evaluate(&g.apply(y)?)?))
    })?;
    let h2r = measure_homotopy_control(oracle_y, samples_y, eps, TIME_STEPS, |y, t| {
        Ok((y.clone(), h2.at(y, t)?))
    })?;
    let h1r = measure_homotopy_control(oracle_y, samples_x, eps, TIME_STEPS, |x, t| {
        Ok((f.evaluate(x)?, f.evaluate(&h1.at(x, t)?)?))
    })?;
    Ok(FamilyControl { epsilon: eps, fg, h1: h1r, h2: h2r })
}

/// `H̃_ε`: an ε-lift of a homotopy `H: Z × I → Y` starting at a lift `h` of
/// `H(·, 0)`. On `[0, t*]` it follows `h₁,δ(h(z), ·)` from `h(z)` to
/// `g_δ H(z, 0)`, then `g_δ ∘ H` reparametrised to `[t*, 1]`, with `δ = ε/2`
/// and `t* = min(½, ε / (4 L))` for a speed bound `L` of H.
pub struct ApproximateLift<Hy, Hx> {
    homotopy: Hy,
    start: Hx,
    g: InverseMap,
    h1: H1,
    pub epsilon: f64,
    pub switch_time: f64,
}

impl<Hy: Homotopy, Hx: PointMap> Homotopy for ApproximateLift<Hy, Hx> {
    fn at(&self, z: &Point, t: f64) -> Result<Point> {
        let t = t.clamp(0.0, 1.0);
        if t <= self.switch_time {
            let x = self.start.apply(z)?;
            self.h1.at(&x, t / self.switch_time)
        } else {
            let s = (t - self.switch_time) / (1.0 - self.switch_time);
            self.g.apply(&self.homotopy.at(z, s)?)
        }
    }
}

/// Largest observed speed `d(H(z, t_k), H(z, t_{k+1})) / Δt` over samples.
pub fn estimate_speed<H: Homotopy>(oracle_y: &DistanceOracle, homotopy: &H, samples: &[Point]) -> Result<f64> {
    let steps = 64;
    let mut speed: f64 = 0.0;
    for z in samples {
        let mut prev = homotopy.at(z, 0.0)?;
        for k in 1..=steps {
            let cur = homotopy.at(z, k as f64 / steps as f64)?;
            speed = speed.max(oracle_y.distance(&prev, &cur)? * steps as f64);
            prev = cur;
        }
    }
    Ok(speed)
}

/// Builds `H̃_ε`; checks `f∘h = H(·, 0)` on `samples` to 1e-9 and estimates
/// the speed of H there (doubled for safety).
pub fn approximate_lift<Hy: Homotopy, Hx: PointMap>(
    family: &ControlledFamily,
    homotopy: Hy,
    start: Hx,
    eps: f64,
    samples: &[Point],
) -> Result<ApproximateLift<Hy, Hx>> {
    let f = family.map();
    let oracle = DistanceOracle::new(f.target().clone(), 2)?;
    for z in samples {
        let a = f.evaluate(&start.apply(z)?)?;
        let b = homotopy.at(z, 0.0)?;
        let d = oracle.distance(&a, &b)?;
        if d > 1e-9 {
            return Err(Error::Mismatch(format!("f∘h and H(·,0) differ by {d:.3e} at {z}")));
        }
    }
    let speed = 2.0 * estimate_speed(&oracle, &homotopy, samples)?;
    let delta = eps / 2.0;
    let switch_time = if speed > 0.0 { (eps / (4.0 * speed)).min(0.5) } else { 0.5 };
    Ok(ApproximateLift {
        homotopy,
        start,
        g: family.g(delta)?,
        h1: family.h1(delta)?,
        epsilon: eps,
        switch_time,
    })
}

/// Contraction of `f⁻¹(y)` assembled from `h₁,ε′`, the star retraction onto
/// `f⁻¹(σ̊)` and the projection `f⁻¹(σ̊) ≅ f⁻¹(σ̂) × σ̊ → f⁻¹(σ̂) × {y}`.
#[derive(Clone, Debug)]
pub struct DerivedContraction {
    map: Arc<SimplicialMap>,
    y: Point,
    h1: Arc<H1>,
    retraction: crate::fiber::StarRetraction,
    pub epsilon: f64,
}

impl DerivedContraction {
    pub fn point(&self) -> &Point {
        &self.y
    }
}

impl Homotopy for DerivedContraction {
    fn at(&self, x: &Point, u: f64) -> Result<Point> {
        let a = self.h1.at(x, u)?;
        let r = self.retraction.at(&a, 1.0)?;
        let (phi, _) = FiberPoint::of_point(&self.map, &r);
        phi.combine(&self.map, &self.y)
    }
}

/// Chooses `ε′ = min(min_w y_w, comesh(Y)) / 2`, so that `B_ε′(y)` lies in the
/// open star of the carrier of y, and assembles the contraction.
pub fn derive_contraction(family: &ControlledFamily, y: &Point) -> Result<DerivedContraction> {
    let f = family.map().clone();
    y.check_in(f.target())?;
    let sigma = y.carrier();
    let min_coord = y.coords().iter().copied().fold(f64::INFINITY, f64::min);
    let eps = 0.5 * min_coord.min(family.epsilon_bound());
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Geometry(format!("no admissible radius around {y}")));
    }
    Ok(DerivedContraction {
        y: y.clone(),
        h1: Arc::new(family.h1(eps)?),
        retraction: build_star_retraction(f.clone(), &sigma)?,
        map: f,
        epsilon: eps,
    })
}

/// Points of `f⁻¹(y)` obtained by combining `y` with lattice points of every
/// product cell of the fiber over the carrier of y.
pub fn fiber_samples(f: &SimplicialMap, y: &Point, resolution: usize) -> Result<Vec<Point>> {
    let sigma = y.carrier();
    let fiber = fiber_over_barycenter(f, &sigma)?;
    let mut out = Vec::new();
    for m in fiber.triangulation.maximal_simplices() {
        for p in crate::metric::lattice_points(m, resolution.max(1)) {
            out.push(fiber.to_fiber_point(&p).combine(f, y)?);
        }
    }
    Ok(out)
}

/// Largest distance, in `complex`, from `points` to their first element.
pub fn dispersion(complex: &Arc<SimplicialComplex>, points: &[Point]) -> Result<f64> {
    let oracle = DistanceOracle::new(complex.clone(), 2)?;
    let mut d: f64 = 0.0;
    if let Some(first) = points.first() {
        for p in points {
            d = d.max(oracle.distance(first, p)?);
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::closure_complex;

    fn k(gens: &[&str]) -> Arc<SimplicialComplex> {
        let g: Vec<Vec<String>> =
            gens.iter().map(|s| s.chars().map(|c| c.to_string()).collect()).collect();
        Arc::new(closure_complex(&g).unwrap())
    }

    fn collapse() -> Arc<SimplicialMap> {
        Arc::new(
            SimplicialMap::from_labels(k(&["abc"]), k(&["ab"]), &[("a", "a"), ("b", "b"), ("c", "b")])
                .unwrap(),
        )
    }

    #[test]
    fn identity_inverse_is_collapse_of_cellulation() {
        let d2 = k(&["abc"]);
        let fam = ControlledFamily::from_map(Arc::new(SimplicialMap::identity(d2.clone()))).unwrap();
        let g = fam.g(0.1).unwrap();
        let y = Point::from_weights([(0, 0.2), (1, 0.3), (2, 0.5)]);
        let expect = g.cellulation().collapse(&y).unwrap();
        assert!(g.apply(&y).unwrap().l2(&expect) < 1e-12);
    }

    #[test]
    fn gamma_projects_exactly() {
        let f = collapse();
        let fam = ControlledFamily::from_map(f.clone()).unwrap();
        let g = fam.g(0.2).unwrap();
        for y in [
            Point::vertex(0),
            Point::from_weights([(0, 0.5), (1, 0.5)]),
            Point::from_weights([(0, 0.9), (1, 0.1)]),
        ] {
            let x = g.apply(&y).unwrap();
            let fx = f.evaluate(&x).unwrap();
            let proj = g.cellulation().collapse(&y).unwrap();
            assert!(fx.l2(&proj) < 1e-12);
        }
    }

    #[test]
    fn h1_endpoints() {
        let f = collapse();
        let fam = ControlledFamily::from_map(f.clone()).unwrap();
        let h1 = fam.h1(0.05).unwrap();
        let g = fam.g(0.05).unwrap();
        let x = Point::from_weights([(0, 0.3), (1, 0.3), (2, 0.4)]);
        assert!(h1.at(&x, 0.0).unwrap().l2(&x) < 1e-9);
        let end = h1.at(&x, 1.0).unwrap();
        let gf = g.apply(&f.evaluate(&x).unwrap()).unwrap();
        assert!(end.l2(&gf) < 1e-9);
        for v in 0..3 {
            assert!(h1.at(&Point::vertex(v), 0.0).unwrap().l2(&Point::vertex(v)) < 1e-12);
        }
    }

    #[test]
    fn not_contractible_fibers_are_refused() {
        let bd2 = k(&["ab", "bc", "ca"]);
        let d1 = k(&["ab"]);
        let bad = SimplicialMap::from_labels(bd2, d1, &[("a", "a"), ("b", "b"), ("c", "a")]).unwrap();
        match build_gamma_map(Arc::new(bad), None) {
            Err(Error::CannotConstruct { simplex, .. }) => assert_eq!(simplex, "ab"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
