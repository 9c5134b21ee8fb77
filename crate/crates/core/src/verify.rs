//! The end-to-end check of a map: fibers, product structure, the controlled
//! family and its laws, the bounded assembly over `X × ℝ`, and slices of it.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cellulation::Cellulation;
use crate::complex::Point;
use crate::cone::{assemble_bounded_equivalence, default_heights, slice_equivalence, HeightRow};
use crate::contractibility::VerdictSummary;
use crate::controlled::{
    approximate_lift, fiber_samples, measure_family, ControlledFamily, FamilyControl,
};
use crate::error::{Error, Result};
use crate::fiber::{fiber_over_barycenter, verify_product_decomposition, FiberPoint};
use crate::homotopy::{sample_points, Homotopy, PointMap, DEFAULT_SEED};
use crate::map::SimplicialMap;
use crate::metric::{standard_comesh, DistanceOracle, DEFAULT_REFINEMENT};

/// Overall outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OverallVerdict {
    /// Every fiber is contractible and every measured law holds.
    TheoremConsistent,
    /// Fibers are contractible but a measured law failed.
    CounterexampleToImplementation,
    /// Some fiber is not contractible; no controlled family is built.
    FibersNotContractible,
    /// Some fiber could not be decided.
    Unknown,
}

impl OverallVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            OverallVerdict::TheoremConsistent => 0,
            OverallVerdict::CounterexampleToImplementation | OverallVerdict::FibersNotContractible => 1,
            OverallVerdict::Unknown => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// ε values; `None` means `comesh/2, …, comesh/32`.
    pub schedule: Option<Vec<f64>>,
    pub seed: u64,
    /// Relative tolerance on control rows.
    pub tol: f64,
    pub lattice: usize,
    pub random_samples: usize,
    /// Random samples per height for the bounded assembly.
    pub bound_samples: usize,
    /// Heights for the bound; `None` means [`default_heights`].
    pub heights: Option<Vec<f64>>,
    /// Slice heights as multiples of `1/comesh`.
    pub slice_multiples: Vec<f64>,
    /// Relative tolerance on the bound and on slices.
    pub bound_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            schedule: None,
            seed: DEFAULT_SEED,
            tol: 1e-4,
            lattice: 4,
            random_samples: 300,
            bound_samples: 40,
            heights: None,
            slice_multiples: vec![2.0, 4.0, 8.0],
            bound_tol: 1e-3,
        }
    }
}

/// `comesh/2, comesh/4, …, comesh/2^k`.
pub fn dyadic_schedule(comesh: f64, k: usize) -> Vec<f64> {
    (1..=k).map(|i| comesh / (1u64 << i) as f64).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberRow {
    pub simplex: String,
    pub verdict: VerdictSummary,
    pub fiber_f_vector: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductRow {
    pub simplex: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlRow {
    pub control: FamilyControl,
    pub within: bool,
}

/// Largest sampled violations of the identities tying γ, g, h₁ and h₂ to f.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IdentityErrors {
    /// `f∘γ` against the projection `(s, t) ↦ s`.
    pub f_gamma: f64,
    /// `f∘g_ε` against `h₂,ε(·, 1)`.
    pub fg_h2: f64,
    /// `f∘h′₁,ε` against `h₂,ε∘(f × id)`.
    pub h1_prime: f64,
    /// Variation of `f∘h″₁,ε` in time.
    pub h1_second: f64,
}

impl IdentityErrors {
    pub fn worst(&self) -> f64 {
        self.f_gamma.max(self.fg_h2).max(self.h1_prime).max(self.h1_second)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRow {
    pub epsilon: f64,
    pub errors: IdentityErrors,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub bound: f64,
    pub within: bool,
    pub heights: Vec<HeightRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceRow {
    pub height: f64,
    pub epsilon: f64,
    pub target: f64,
    pub measured: f64,
    pub within: bool,
}

/// Evidence recorded when a fiber is not contractible.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionRow {
    pub simplex: String,
    pub reason: String,
    /// Path components of the fiber over the barycentre.
    pub fiber_components: usize,
    /// Largest distance in X between two sampled points of that fiber: any
    /// `h₁,ε` would have to join them while moving their images less than ε.
    pub fiber_spread: f64,
    /// What the construction of the controlled family reported.
    pub construction: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub source_simplices: usize,
    pub target_simplices: usize,
    pub comesh: f64,
    pub surjective: bool,
    pub missed_simplices: Vec<String>,
    pub fibers: Vec<FiberRow>,
    pub products: Vec<ProductRow>,
    pub controls: Vec<ControlRow>,
    pub identities: Vec<IdentityRow>,
    pub bound: Option<BoundRow>,
    pub slices: Vec<SliceRow>,
    pub obstructions: Vec<ObstructionRow>,
    pub failures: Vec<String>,
    pub verdict: OverallVerdict,
}

/// Samples `f∘γ`, `f∘g`, `f∘h′` and `f∘h″` against their expected values.
pub fn proof_identities(
    family: &ControlledFamily,
    eps: f64,
    samples_x: &[Point],
    samples_y: &[Point],
) -> Result<IdentityErrors> {
    let f = family.map().clone();
    let g = family.g(eps)?;
    let cells: &Arc<Cellulation> = g.cellulation();
    let h2 = cells.straightline();
    let h1p = family.h1_prime(eps)?;
    let h1s = family.h1_second(eps)?;
    let gamma = family.gamma();
    let times: Vec<f64> = (0..=8).map(|k| k as f64 / 8.0).collect();

    let ys: Vec<(f64, f64)> = samples_y
        .par_iter()
        .map(|y| {
            let (c, coords) = cells.invert(y)?;
            let flag = &cells.flags()[c];
            let a = f.evaluate(&gamma.eval(flag, &coords)?)?.l2(&coords.base_point(flag));
            let b = f.evaluate(&g.apply(y)?)?.l2(&h2.at(y, 1.0)?);
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<(f64, f64)> = samples_x
        .par_iter()
        .map(|x| {
            let fx = f.evaluate(x)?;
            let mut p: f64 = 0.0;
            let mut s: f64 = 0.0;
            let s0 = f.evaluate(&h1s.at(x, 0.0)?)?;
            for &t in &times {
                p = p.max(f.evaluate(&h1p.at(x, t)?)?.l2(&h2.at(&fx, t)?));
                s = s.max(f.evaluate(&h1s.at(x, t)?)?.l2(&s0));
            }
            Ok((p, s))
        })
        .collect::<Result<_>>()?;
    let max = |v: &[(f64, f64)], i: usize| {
        v.iter().map(|r| if i == 0 { r.0 } else { r.1 }).fold(0.0, f64::max)
    };
    Ok(IdentityErrors {
        f_gamma: max(&ys, 0),
        fg_h2: max(&ys, 1),
        h1_prime: max(&xs, 0),
        h1_second: max(&xs, 1),
    })
}

/// Tolerance on the sampled identities.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Runs the pipeline with the default γ of `f`.
pub fn run_verify(f: Arc<SimplicialMap>, opts: &VerifyOptions) -> Result<VerificationReport> {
    run_verify_with(f, None, opts)
}

/// Runs the pipeline; `family` replaces the default γ when given.
pub fn run_verify_with(
    f: Arc<SimplicialMap>,
    family: Option<ControlledFamily>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let x = f.source().clone();
    let y = f.target().clone();
    let comesh = standard_comesh(&y);
    let surj = f.surjectivity_check();
    let mut failures = Vec::new();

    let mut fibers = Vec::new();
    let mut bad = Vec::new();
    let mut unknown = false;
    for sigma in y.simplices() {
        let fiber = fiber_over_barycenter(&f, sigma)?;
        let v = fiber.verdict();
        if matches!(v, crate::contractibility::Verdict::Unknown(_)) {
            unknown = true;
        }
        if matches!(v, crate::contractibility::Verdict::NotContractible(_)) {
            bad.push((sigma.clone(), v.reason(), fiber));
        }
        fibers.push(FiberRow {
            simplex: y.fmt_simplex(sigma),
            verdict: (&v).into(),
            fiber_f_vector: fibers_f_vector(&f, sigma)?,
        });
    }

    let products: Vec<ProductRow> = y
        .simplices()
        .iter()
        .map(|sigma| match verify_product_decomposition(&f, sigma, 8, opts.seed) {
            Ok(c) => ProductRow {
                simplex: y.fmt_simplex(sigma),
                ok: true,
                detail: format!("{} cells paired, {} points compared", c.pairs.len(), c.sampled_points),
            },
            Err(e) => ProductRow { simplex: y.fmt_simplex(sigma), ok: false, detail: e.to_string() },
        })
        .collect();
    for p in products.iter().filter(|p| !p.ok) {
        failures.push(format!("product structure over {}: {}", p.simplex, p.detail));
    }

    let mut report = VerificationReport {
        source_simplices: x.len(),
        target_simplices: y.len(),
        comesh,
        surjective: surj.is_surjective(),
        missed_simplices: surj.missed.iter().map(|s| y.fmt_simplex(s)).collect(),
        fibers,
        products,
        controls: Vec::new(),
        identities: Vec::new(),
        bound: None,
        slices: Vec::new(),
        obstructions: Vec::new(),
        failures,
        verdict: OverallVerdict::Unknown,
    };

    if !bad.is_empty() {
        let construction = match ControlledFamily::from_map(f.clone()) {
            Ok(_) => "constructed (unexpected)".to_string(),
            Err(e) => e.to_string(),
        };
        for (sigma, reason, fiber) in bad {
            let y0 = Point::barycenter(&sigma);
            let pts = if fiber.is_empty() { Vec::new() } else { fiber_samples(&f, &y0, 2)? };
            let mut spread: f64 = 0.0;
            if !pts.is_empty() {
                let oracle = DistanceOracle::new(x.clone(), 2)?;
                for a in &pts {
                    for b in &pts {
                        spread = spread.max(oracle.distance(a, b)?);
                    }
                }
            }
            report.obstructions.push(ObstructionRow {
                simplex: y.fmt_simplex(&sigma),
                reason,
                fiber_components: fiber.triangulation.num_components(),
                fiber_spread: spread,
                construction: construction.clone(),
            });
        }
        report.verdict =
            if unknown { OverallVerdict::Unknown } else { OverallVerdict::FibersNotContractible };
        return Ok(report);
    }
    if unknown {
        report.verdict = OverallVerdict::Unknown;
        return Ok(report);
    }

    let family = match family {
        Some(fam) => fam,
        None => ControlledFamily::from_map(f.clone())?,
    };
    let family = Arc::new(family);
    let schedule = opts.schedule.clone().unwrap_or_else(|| dyadic_schedule(comesh, 5));
    let oracle_y = DistanceOracle::new(y.clone(), DEFAULT_REFINEMENT)?;
    let samples_y = sample_points(&y, opts.lattice, opts.random_samples, opts.seed);
    let samples_x = sample_points(&x, opts.lattice, opts.random_samples, opts.seed.wrapping_add(1));

    for &eps in &schedule {
        if !(eps > 0.0 && eps < comesh) {
            return Err(Error::OutOfRange(format!("ε = {eps} outside (0, {comesh})")));
        }
        let mut ys = samples_y.clone();
        ys.extend(vertex_images(family.g(eps)?.cellulation()));
        let control = measure_family(&family, &oracle_y, &samples_x, &ys, eps)?;
        let within = control.fg.within(opts.tol) && control.h1.within(opts.tol) && control.h2.within(opts.tol);
        if !within {
            report.failures.push(format!("control at ε = {eps} exceeds tolerance"));
        }
        report.controls.push(ControlRow { control, within });
        let errors = proof_identities(&family, eps, &samples_x, &ys)?;
        if errors.worst() > IDENTITY_TOL {
            report.failures.push(format!("identity error {:.3e} at ε = {eps}", errors.worst()));
        }
        report.identities.push(IdentityRow { epsilon: eps, errors });
    }

    let heights = opts.heights.clone().unwrap_or_else(|| default_heights(comesh));
    let bsx = sample_points(&x, 2, opts.bound_samples, opts.seed.wrapping_add(2));
    let bsy = sample_points(&y, 2, opts.bound_samples, opts.seed.wrapping_add(3));
    let eq = assemble_bounded_equivalence(family.clone(), &oracle_y, &bsx, &bsy, &heights)?;
    let b = eq.bound();
    let bound_ok = b <= 1.0 + opts.bound_tol;
    if !bound_ok {
        report.failures.push(format!("assembled bound {b} exceeds 1"));
    }
    report.bound = Some(BoundRow { bound: b, within: bound_ok, heights: eq.rows().to_vec() });

    for &m in &opts.slice_multiples {
        let t = m / comesh;
        let s = slice_equivalence(&eq, t)?;
        let c = s.measure(&f, &oracle_y, &bsx, &bsy)?;
        let within = c.worst() <= s.target * (1.0 + opts.bound_tol);
        if !within {
            report.failures.push(format!("slice at t = {t} exceeds B/t"));
        }
        report.slices.push(SliceRow {
            height: t,
            epsilon: s.slice.epsilon,
            target: s.target,
            measured: c.worst(),
            within,
        });
    }

    report.verdict = if report.failures.is_empty() {
        OverallVerdict::TheoremConsistent
    } else {
        OverallVerdict::CounterexampleToImplementation
    };
    Ok(report)
}

fn fibers_f_vector(f: &SimplicialMap, sigma: &crate::complex::Simplex) -> Result<Vec<usize>> {
    Ok(fiber_over_barycenter(f, sigma)?.triangulation.f_vector())
}

/// Distinct `Γ_ε` images of cell vertices: the points where `h₂,ε` moves
/// furthest.
pub fn vertex_images(cells: &Cellulation) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for c in 0..cells.len() {
        for p in cells.vertex_images(c).iter().flatten() {
            if !out.iter().any(|q| q.l2(p) <= 1e-12) {
                out.push(p.clone());
            }
        }
    }
    out
}

/// A piecewise linear homotopy `Z × I → Y` given by one path per point
/// `z = vertex(i)`; each segment takes equal time.
#[derive(Clone, Debug)]
pub struct PathHomotopy {
    pub paths: Vec<Vec<Point>>,
}

impl Homotopy for PathHomotopy {
    fn at(&self, z: &Point, t: f64) -> Result<Point> {
        let i = *z.support().first().ok_or_else(|| Error::Malformed("empty path index".into()))?;
        let path = self.paths.get(i).ok_or_else(|| Error::NotFound(format!("path {i}")))?;
        if path.len() == 1 {
            return Ok(path[0].clone());
        }
        let n = (path.len() - 1) as f64;
        let s = t.clamp(0.0, 1.0) * n;
        let k = (s.floor() as usize).min(path.len() - 2);
        Ok(path[k].lerp(&path[k + 1], s - k as f64))
    }
}

/// Lifts `y` exactly using γ's base choice over its carrier.
pub struct BaseLift {
    family: Arc<ControlledFamily>,
    paths: Arc<Vec<Vec<Point>>>,
}

impl PointMap for BaseLift {
    fn apply(&self, z: &Point) -> Result<Point> {
        let i = z.support()[0];
        let y = &self.paths[i][0];
        let phi: &FiberPoint = self
            .family
            .gamma()
            .base_choice(&y.carrier())
            .ok_or_else(|| Error::NotFound(format!("no base choice over the carrier of {y}")))?;
        phi.combine(self.family.map(), y)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftTrack {
    /// Lifted points at evenly spaced times, as labelled weights in X.
    pub points: Vec<Vec<(String, f64)>>,
    /// `sup_t d(f H̃(z, t), H(z, t))`.
    pub discrepancy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub epsilon: f64,
    pub switch_time: f64,
    pub tracks: Vec<LiftTrack>,
    pub within: bool,
}

/// ε-lifts every path, starting from the exact lift of its first point.
pub fn lift_paths(family: Arc<ControlledFamily>, paths: Vec<Vec<Point>>, eps: f64, steps: usize) -> Result<LiftReport> {
    let f = family.map().clone();
    let paths = Arc::new(paths);
    let zs: Vec<Point> = (0..paths.len()).map(Point::vertex).collect();
    let h = PathHomotopy { paths: (*paths).clone() };
    let start = BaseLift { family: family.clone(), paths: paths.clone() };
    let lift = approximate_lift(&family, h.clone(), start, eps, &zs)?;
    let oracle = DistanceOracle::new(f.target().clone(), DEFAULT_REFINEMENT)?;
    let steps = steps.max(1);
    let tracks: Vec<LiftTrack> = zs
        .par_iter()
        .map(|z| {
            let mut pts = Vec::with_capacity(steps + 1);
            let mut d: f64 = 0.0;
            for k in 0..=steps {
                let t = k as f64 / steps as f64;
                let p = lift.at(z, t)?;
                d = d.max(oracle.distance(&f.evaluate(&p)?, &h.at(z, t)?)?);
                pts.push(p.to_labelled(f.source()));
            }
            Ok(LiftTrack { points: pts, discrepancy: d })
        })
        .collect::<Result<_>>()?;
    let within = tracks.iter().all(|t| t.discrepancy <= eps);
    Ok(LiftReport { epsilon: eps, switch_time: lift.switch_time, tracks, within })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn bad_map_names_the_edge() {
        let r = run_verify(fixtures::map_bad(), &VerifyOptions::default()).unwrap();
        assert_eq!(r.verdict, OverallVerdict::FibersNotContractible);
        assert_eq!(r.verdict.exit_code(), 1);
        assert!(r.obstructions.iter().any(|o| o.simplex == "ab"));
    }

    #[test]
    fn path_homotopy_is_piecewise_linear() {
        let h = PathHomotopy { paths: vec![vec![Point::vertex(0), Point::vertex(1), Point::vertex(2)]] };
        let z = Point::vertex(0);
        assert_eq!(h.at(&z, 0.5).unwrap(), Point::vertex(1));
        assert_eq!(h.at(&z, 1.0).unwrap(), Point::vertex(2));
    }
}
