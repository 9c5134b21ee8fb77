//! The open cone `O(M₊)`, the α-schedule, and the passage between a controlled
//! family `{g_ε, h₁,ε, h₂,ε}` and a bounded equivalence over `X × ℝ`.
//!
//! Heights `t ≤ 0` all collapse to the cone point. The slice at height
//! `t > 0` carries `t` times the base metric, so a family with control `α(t)`
//! at height `t` has bound `sup t·α(t) = 1` in the cone.

use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::complex::Point;
use crate::controlled::ControlledFamily;
use crate::error::{Error, Result};
use crate::homotopy::{
    measure_homotopy_control, measure_map_control, ControlReport, FnMap, Homotopy, PointMap,
    Stationary, TIME_STEPS,
};
use crate::map::SimplicialMap;
use crate::metric::{standard_comesh, DistanceOracle};

/// A point of `O(M₊)`. `base` is `None` exactly when `height ≤ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint {
    base: Option<Point>,
    height: f64,
}

impl ConePoint {
    pub fn base(&self) -> Option<&Point> {
        self.base.as_ref()
    }

    pub fn height(&self) -> f64 {
        self.height
    }
}

/// The coning map `j: M × ℝ → O(M₊)`.
pub fn coning_map(p: &Point, t: f64) -> ConePoint {
    ConePoint { base: (t > 0.0).then(|| p.clone()), height: t }
}

/// `max{min{t, s}, 0}·d + |t − s|`, where a zero height factor kills an
/// infinite base distance.
pub fn cone_formula(base_distance: f64, t: f64, s: f64) -> f64 {
    let scale = t.min(s).max(0.0);
    let horizontal = if scale == 0.0 { 0.0 } else { scale * base_distance };
    horizontal + (t - s).abs()
}

/// Distance in `O(M₊)` with the base metric given by `oracle`.
pub fn cone_distance(oracle: &DistanceOracle, a: &ConePoint, b: &ConePoint) -> Result<f64> {
    let d = match (&a.base, &b.base) {
        (Some(p), Some(q)) => oracle.distance(p, q)?,
        _ => 0.0,
    };
    Ok(cone_formula(d, a.height, b.height))
}

/// `α(t) = comesh` for `t ≤ 1/comesh`, else `1/t`.
pub fn alpha_schedule(comesh: f64, t: f64) -> f64 {
    if t <= 1.0 / comesh {
        comesh
    } else {
        1.0 / t
    }
}

/// A point of `M × ℝ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinePoint {
    pub point: Point,
    pub height: f64,
}

impl LinePoint {
    pub fn new(point: Point, height: f64) -> Self {
        LinePoint { point, height }
    }

    pub fn cone(&self) -> ConePoint {
        coning_map(&self.point, self.height)
    }
}

/// `f × id_ℝ`.
pub fn product_map(f: &SimplicialMap, p: &LinePoint) -> Result<LinePoint> {
    Ok(LinePoint::new(f.evaluate(&p.point)?, p.height))
}

/// The height projection `p_t`: forget the height and sit at `t`.
pub fn project_height(p: &LinePoint, t: f64) -> LinePoint {
    LinePoint::new(p.point.clone(), t)
}

/// One member of a controlled family: `g_ε`, `h₁,ε`, `h₂,ε` and the points
/// of Y where control is expected to be extremal.
#[derive(Clone)]
pub struct Slice {
    pub epsilon: f64,
    pub g: Arc<dyn PointMap>,
    pub h1: Arc<dyn Homotopy>,
    pub h2: Arc<dyn Homotopy>,
    pub extremal_y: Vec<Point>,
}

impl std::fmt::Debug for Slice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Slice")
            .field("epsilon", &self.epsilon)
            .field("extremal_y", &self.extremal_y.len())
            .finish()
    }
}

/// Anything that produces a controlled family member for each admissible ε.
pub trait SliceFamily: Send + Sync {
    fn map(&self) -> &Arc<SimplicialMap>;
    /// Largest ε accepted (exclusive).
    fn epsilon_bound(&self) -> f64;
    fn slice(&self, eps: f64) -> Result<Slice>;
}

impl SliceFamily for ControlledFamily {
    fn map(&self) -> &Arc<SimplicialMap> {
        ControlledFamily::map(self)
    }

    fn epsilon_bound(&self) -> f64 {
        ControlledFamily::epsilon_bound(self)
    }

    fn slice(&self, eps: f64) -> Result<Slice> {
        let g = self.g(eps)?;
        let cells = g.cellulation().clone();
        let mut seen = HashSet::new();
        let mut extremal_y = Vec::new();
        for c in 0..cells.len() {
            for p in cells.vertex_images(c).iter().flatten() {
                if seen.insert(format!("{p}")) {
                    extremal_y.push(p.clone());
                }
            }
        }
        Ok(Slice {
            epsilon: eps,
            h2: Arc::new(cells.straightline()),
            h1: Arc::new(self.h1(eps)?),
            g: Arc::new(g),
            extremal_y,
        })
    }
}

/// The identity of a complex viewed as a family with zero control.
pub struct IdentityFamily {
    map: Arc<SimplicialMap>,
}

impl IdentityFamily {
    pub fn new(map: Arc<SimplicialMap>) -> Self {
        IdentityFamily { map }
    }
}

impl SliceFamily for IdentityFamily {
    fn map(&self) -> &Arc<SimplicialMap> {
        &self.map
    }

    fn epsilon_bound(&self) -> f64 {
        standard_comesh(self.map.target())
    }

    fn slice(&self, eps: f64) -> Result<Slice> {
        Ok(Slice {
            epsilon: eps,
            g: Arc::new(FnMap(|p: &Point| Ok(p.clone()))),
            h1: Arc::new(Stationary),
            h2: Arc::new(Stationary),
            extremal_y: Vec::new(),
        })
    }
}

/// Control of one slice, all reports measured in Y.
#[derive(Clone, Debug, Serialize)]
pub struct SliceControl {
    /// `d(y, f g(y))`.
    pub fg: ControlReport,
    /// `d(f x, f h₁(x, s))`.
    pub h1: ControlReport,
    /// `d(y, h₂(y, s))`.
    pub h2: ControlReport,
}

impl SliceControl {
    pub fn worst(&self) -> f64 {
        self.fg.measured_control.max(self.h1.measured_control).max(self.h2.measured_control)
    }

    pub fn within(&self, rel_tol: f64) -> bool {
        self.fg.within(rel_tol) && self.h1.within(rel_tol) && self.h2.within(rel_tol)
    }
}

/// Measures the three laws of `slice` against the target `target`.
pub fn measure_slice(
    f: &SimplicialMap,
    slice: &Slice,
    oracle_y: &DistanceOracle,
    samples_x: &[Point],
    samples_y: &[Point],
    target: f64,
) -> Result<SliceControl> {
    let mut ys = samples_y.to_vec();
    ys.extend(slice.extremal_y.iter().cloned());
    let fg = measure_map_control(oracle_y, &ys, target, |y| {
        Ok((y.clone(), f.evaluate(&slice.g.apply(y)?)?))
    })?;
    let h2 = measure_homotopy_control(oracle_y, &ys, target, TIME_STEPS, |y, s| {
        Ok((y.clone(), slice.h2.at(y, s)?))
    })?;
    let h1 = measure_homotopy_control(oracle_y, samples_x, target, TIME_STEPS, |x, s| {
        Ok((f.evaluate(x)?, f.evaluate(&slice.h1.at(x, s)?)?))
    })?;
    Ok(SliceControl { fg, h1, h2 })
}

/// Contribution of one height to the assembled bound.
#[derive(Clone, Debug, Serialize)]
pub struct HeightRow {
    pub height: f64,
    pub epsilon: f64,
    /// `max(t, 0)` times the worst slice control: the cone distance between
    /// corresponding track points at that height.
    pub cone_bound: f64,
}

/// `g(y, t) = g_{α(t)}(y)` together with `h₁`, `h₂`, evaluated slice-wise.
pub struct BoundedEquivalence {
    family: Arc<dyn SliceFamily>,
    comesh: f64,
    cache: Mutex<BTreeMap<u64, Arc<Slice>>>,
    bound: f64,
    rows: Vec<HeightRow>,
}

impl std::fmt::Debug for BoundedEquivalence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundedEquivalence")
            .field("comesh", &self.comesh)
            .field("bound", &self.bound)
            .finish()
    }
}

/// Relative shrink keeping the α-schedule strictly below the comesh, where
/// the ε-subdivision cellulation is defined.
pub const COMESH_SHRINK: f64 = 1e-9;

/// Default sampling heights: the window `[−5, 10/comesh]`, the switch of α and
/// its dyadic multiples, and a few large heights.
pub fn default_heights(comesh: f64) -> Vec<f64> {
    let c = 1.0 / comesh;
    let mut h = vec![-5.0, -1.0, 0.0, 0.25, 0.5, 1.0, 0.5 * c, c, 1.5 * c, 2.0 * c, 3.0 * c];
    h.extend([4.0 * c, 6.0 * c, 8.0 * c, 10.0 * c, 20.0, 35.0, 50.0]);
    h.sort_by(f64::total_cmp);
    h.dedup();
    h
}

impl BoundedEquivalence {
    /// ε actually used at height `t`: `α(t)`, pulled strictly below the comesh.
    pub fn epsilon_at(&self, t: f64) -> f64 {
        alpha_schedule(self.comesh, t).min(self.comesh * (1.0 - COMESH_SHRINK))
    }

    pub fn comesh(&self) -> f64 {
        self.comesh
    }

    /// The measured bound `B`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn rows(&self) -> &[HeightRow] {
        &self.rows
    }

    pub fn map(&self) -> &Arc<SimplicialMap> {
        self.family.map()
    }

    /// The family member used at height `t` (cached by ε).
    pub fn slice_at(&self, t: f64) -> Result<Arc<Slice>> {
        let eps = self.epsilon_at(t);
        let key = eps.to_bits();
        if let Some(s) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.family.slice(eps)?);
        self.cache.lock().expect("cache lock").insert(key, s.clone());
        Ok(s)
    }

    /// `g: Y × ℝ → X × ℝ`.
    pub fn g(&self, y: &LinePoint) -> Result<LinePoint> {
        let s = self.slice_at(y.height)?;
        Ok(LinePoint::new(s.g.apply(&y.point)?, y.height))
    }

    /// `h₁: X × ℝ × I → X × ℝ`.
    pub fn h1(&self, x: &LinePoint, u: f64) -> Result<LinePoint> {
        let s = self.slice_at(x.height)?;
        Ok(LinePoint::new(s.h1.at(&x.point, u)?, x.height))
    }

    /// `h₂: Y × ℝ × I → Y × ℝ`.
    pub fn h2(&self, y: &LinePoint, u: f64) -> Result<LinePoint> {
        let s = self.slice_at(y.height)?;
        Ok(LinePoint::new(s.h2.at(&y.point, u)?, y.height))
    }
}

/// Glues a family into a bounded equivalence via α and measures its bound
/// `B` in `O(Y₊)` over `samples × heights`. Heights `t ≤ 0` contribute zero:
/// both ends of every track sit at the cone point.
pub fn assemble_bounded_equivalence(
    family: Arc<dyn SliceFamily>,
    oracle_y: &DistanceOracle,
    samples_x: &[Point],
    samples_y: &[Point],
    heights: &[f64],
) -> Result<BoundedEquivalence> {
    let comesh = family.epsilon_bound();
    if !(comesh > 0.0 && comesh.is_finite()) {
        return Err(Error::OutOfRange(format!("comesh {comesh} admits no schedule")));
    }
    let mut eq = BoundedEquivalence {
        family,
        comesh,
        cache: Mutex::new(BTreeMap::new()),
        bound: 0.0,
        rows: Vec::new(),
    };
    let f = eq.family.map().clone();
    let mut rows = Vec::with_capacity(heights.len());
    for &t in heights {
        let eps = eq.epsilon_at(t);
        let cone_bound = if t > 0.0 {
            let s = eq.slice_at(t)?;
            t * measure_slice(&f, &s, oracle_y, samples_x, samples_y, eps)?.worst()
        } else {
            0.0
        };
        rows.push(HeightRow { height: t, epsilon: eps, cone_bound });
    }
    eq.bound = rows.iter().map(|r| r.cone_bound).fold(0.0, f64::max);
    eq.rows = rows;
    Ok(eq)
}

/// `(g_t, h₁,t, h₂,t)`: the slice at height `t` pulled back by `p_t`, with
/// its expected control `B/t`.
#[derive(Clone, Debug)]
pub struct SliceEquivalence {
    pub height: f64,
    pub slice: Arc<Slice>,
    pub target: f64,
}

impl SliceEquivalence {
    /// `g_t(y)`: lift `y` to height `t`, apply `g`, forget the height.
    pub fn g(&self, y: &Point) -> Result<Point> {
        self.slice.g.apply(y)
    }

    pub fn measure(
        &self,
        f: &SimplicialMap,
        oracle_y: &DistanceOracle,
        samples_x: &[Point],
        samples_y: &[Point],
    ) -> Result<SliceControl> {
        measure_slice(f, &self.slice, oracle_y, samples_x, samples_y, self.target)
    }
}

pub fn slice_equivalence(data: &BoundedEquivalence, t: f64) -> Result<SliceEquivalence> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("slice height {t} must be positive")));
    }
    Ok(SliceEquivalence { height: t, slice: data.slice_at(t)?, target: data.bound / t })
}
