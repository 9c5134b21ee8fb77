//! Point maps and homotopies as composable evaluators, plus sampling-based
//! control measurement.
//!
//! Nothing here is globally triangulated: a map is anything that can evaluate
//! a point, and control claims are certified on a dense sample set (lattice
//! points of every maximal simplex plus seeded random points, and 33 time
//! steps for homotopies).

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Point, SimplicialComplex};
use crate::error::{Error, Result};
use crate::metric::{lattice_points, DistanceOracle};

/// Default seed for every sampled check.
pub const DEFAULT_SEED: u64 = 0x5eed_2011;

/// Number of time samples per homotopy track.
pub const TIME_STEPS: usize = 33;

/// A map of points between complexes.
pub trait PointMap: Send + Sync {
    fn apply(&self, p: &Point) -> Result<Point>;
}

/// A homotopy `Z × I → W`.
pub trait Homotopy: Send + Sync {
    fn at(&self, p: &Point, t: f64) -> Result<Point>;
}

impl<T: PointMap + ?Sized> PointMap for Arc<T> {
    fn apply(&self, p: &Point) -> Result<Point> {
        (**self).apply(p)
    }
}

impl<T: Homotopy + ?Sized> Homotopy for Arc<T> {
    fn at(&self, p: &Point, t: f64) -> Result<Point> {
        (**self).at(p, t)
    }
}

/// Wraps a closure as a [`PointMap`].
pub struct FnMap<F>(pub F);

impl<F: Fn(&Point) -> Result<Point> + Send + Sync> PointMap for FnMap<F> {
    fn apply(&self, p: &Point) -> Result<Point> {
        (self.0)(p)
    }
}

/// Wraps a closure as a [`Homotopy`].
pub struct FnHomotopy<F>(pub F);

impl<F: Fn(&Point, f64) -> Result<Point> + Send + Sync> Homotopy for FnHomotopy<F> {
    fn at(&self, p: &Point, t: f64) -> Result<Point> {
        (self.0)(p, t)
    }
}

/// The homotopy that never moves.
pub struct Stationary;

impl Homotopy for Stationary {
    fn at(&self, p: &Point, _t: f64) -> Result<Point> {
        Ok(p.clone())
    }
}

/// Runs `first` on `[0, split]` and `second` on `[split, 1]`, each
/// reparametrised linearly. Endpoints must agree: `first(·,1) = second(·,0)`.
#[derive(Clone, Debug)]
pub struct Concat<A, B> {
    pub first: A,
    pub second: B,
    pub split: f64,
}

impl<A: Homotopy, B: Homotopy> Homotopy for Concat<A, B> {
    fn at(&self, p: &Point, t: f64) -> Result<Point> {
        if t <= self.split {
            self.first.at(p, if self.split > 0.0 { t / self.split } else { 1.0 })
        } else {
            self.second.at(p, (t - self.split) / (1.0 - self.split))
        }
    }
}

/// Time reversal.
#[derive(Clone, Debug)]
pub struct Reverse<H>(pub H);

impl<H: Homotopy> Homotopy for Reverse<H> {
    fn at(&self, p: &Point, t: f64) -> Result<Point> {
        self.0.at(p, 1.0 - t)
    }
}

/// Result of a control measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ControlReport {
    pub epsilon_target: f64,
    pub measured_control: f64,
    pub samples: usize,
    /// Largest change of the measured displacement between neighbouring
    /// samples (adjacent time steps, or a point and a nearby companion); a
    /// bound on what the sampling could have missed for a well-behaved map.
    pub lipschitz_margin: f64,
}

impl ControlReport {
    /// `measured ≤ ε·(1 + rel_tol)`.
    pub fn within(&self, rel_tol: f64) -> bool {
        self.measured_control <= self.epsilon_target * (1.0 + rel_tol)
    }
}

/// Uniform point of the simplex spanned by `verts` (flat Dirichlet).
pub fn random_point_in(verts: &[usize], rng: &mut impl Rng) -> Point {
    let w: Vec<f64> = verts.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    Point::from_weights(verts.iter().copied().zip(w.into_iter().map(|x| x / s)))
}

/// Sample set over a complex: lattice points of resolution `lattice` on every
/// maximal simplex (deduplicated), followed by `random` seeded uniform points
/// in maximal simplices chosen uniformly.
pub fn sample_points(k: &SimplicialComplex, lattice: usize, random: usize, seed: u64) -> Vec<Point> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let maximal: Vec<_> = k.maximal_simplices().cloned().collect();
    for m in &maximal {
        for r in 1..=lattice.max(1) {
            for p in lattice_points(m, r) {
                let key: Vec<(usize, i64)> =
                    p.iter().map(|(v, c)| (v, (c * 1e9).round() as i64)).collect();
                if seen.insert(key) {
                    out.push(p);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let m = &maximal[rng.gen_range(0..maximal.len())];
        out.push(random_point_in(m.vertices(), &mut rng));
    }
    out
}

fn companion(p: &Point) -> Point {
    p.lerp(&Point::barycenter(&p.carrier()), 1e-3)
}

/// Control of a map: `sup_z d(p(z), q(u(z)))` where `pair` returns
/// `(p(z), q(u(z)))`, both points of the complex behind `oracle`.
pub fn measure_map_control<F>(
    oracle: &DistanceOracle,
    samples: &[Point],
    epsilon_target: f64,
    pair: F,
) -> Result<ControlReport>
where
    F: Fn(&Point) -> Result<(Point, Point)> + Sync,
{
    let rows: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|z| {
            let (a, b) = pair(z)?;
            let d = oracle.distance(&a, &b)?;
            let (a2, b2) = pair(&companion(z))?;
            let d2 = oracle.distance(&a2, &b2)?;
            Ok((d, (d - d2).abs()))
        })
        .collect::<Result<_>>()?;
    Ok(ControlReport {
        epsilon_target,
        measured_control: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        samples: samples.len(),
        lipschitz_margin: rows.iter().map(|r| r.1).fold(0.0, f64::max),
    })
}

/// Control of a homotopy over `time_steps` evenly spaced times in `[0, 1]`.
pub fn measure_homotopy_control<F>(
    oracle: &DistanceOracle,
    samples: &[Point],
    epsilon_target: f64,
    time_steps: usize,
    pair: F,
) -> Result<ControlReport>
where
    F: Fn(&Point, f64) -> Result<(Point, Point)> + Sync,
{
    if time_steps < 2 {
        return Err(Error::OutOfRange("need at least two time steps".into()));
    }
    let rows: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|z| {
            let mut sup: f64 = 0.0;
            let mut margin: f64 = 0.0;
            let mut prev: Option<f64> = None;
            for k in 0..time_steps {
                let t = k as f64 / (time_steps - 1) as f64;
                let (a, b) = pair(z, t)?;
                let d = oracle.distance(&a, &b)?;
                sup = sup.max(d);
                if let Some(p) = prev {
                    margin = margin.max((d - p).abs());
                }
                prev = Some(d);
            }
            Ok((sup, margin))
        })
        .collect::<Result<_>>()?;
    Ok(ControlReport {
        epsilon_target,
        measured_control: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        samples: samples.len() * time_steps,
        lipschitz_margin: rows.iter().map(|r| r.1).fold(0.0, f64::max),
    })
}
