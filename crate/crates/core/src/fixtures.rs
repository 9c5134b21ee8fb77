//! Built-in complexes and maps used by the tests, the benches and the CLI.
//!
//! `ex44_*` is the projection `(x, y, z) ↦ (x, y, 0)` from a four-triangle
//! complex in ℝ³ onto two triangles in the plane. Its fibers are vertical
//! segments, so fiber points over a shared simplex can be given by a height
//! `z ∈ [0, 1]`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::{closure_complex, Point, Simplex, SimplicialComplex};
use crate::controlled::{build_gamma_map, ControlledFamily, FlagMap};
use crate::error::{Error, Result};
use crate::fiber::FiberPoint;
use crate::map::SimplicialMap;

fn k(gens: &[&[&str]]) -> Arc<SimplicialComplex> {
    let g: Vec<Vec<&str>> = gens.iter().map(|s| s.to_vec()).collect();
    Arc::new(closure_complex(&g).expect("fixture is well formed"))
}

/// The 1-simplex `ab`.
pub fn d1() -> Arc<SimplicialComplex> {
    k(&[&["a", "b"]])
}

/// The 2-simplex `abc`.
pub fn d2() -> Arc<SimplicialComplex> {
    k(&[&["a", "b", "c"]])
}

/// The boundary of `abc`: a circle.
pub fn bd2() -> Arc<SimplicialComplex> {
    k(&[&["a", "b"], &["b", "c"], &["a", "c"]])
}

/// The boundary of the 3-simplex `abcd`: a 2-sphere.
pub fn boundary_tetrahedron() -> Arc<SimplicialComplex> {
    k(&[&["a", "b", "c"], &["a", "b", "d"], &["a", "c", "d"], &["b", "c", "d"]])
}

/// The cone on the circle with apex `o`.
pub fn cone_bd2() -> Arc<SimplicialComplex> {
    Arc::new(bd2().cone("o").expect("fresh apex"))
}

/// Planar positions for `d1`, `d2` and `bd2`.
pub fn planar_positions(k: &SimplicialComplex) -> Option<Vec<[f64; 2]>> {
    let table: HashMap<&str, [f64; 2]> = [
        ("a", [0.0, 0.0]),
        ("b", [1.0, 0.0]),
        ("c", [0.5, 0.75f64.sqrt()]),
        ("0", [0.0, 0.0]),
        ("e1", [1.0, 0.0]),
        ("e2", [0.0, 1.0]),
        ("e1+e2", [1.0, 1.0]),
    ]
    .into_iter()
    .collect();
    k.labels().iter().map(|l| table.get(l.as_str()).copied()).collect()
}

/// `abc → ab`, `c ↦ b`: fibers are points or segments.
pub fn map_collapse() -> Arc<SimplicialMap> {
    Arc::new(
        SimplicialMap::from_labels(d2(), d1(), &[("a", "a"), ("b", "b"), ("c", "b")])
            .expect("fixture is simplicial"),
    )
}

/// Circle onto an edge, `c ↦ a`: the fiber over the open edge is two points.
pub fn map_bad() -> Arc<SimplicialMap> {
    Arc::new(
        SimplicialMap::from_labels(bd2(), d1(), &[("a", "a"), ("b", "b"), ("c", "a")])
            .expect("fixture is simplicial"),
    )
}

/// Vertices of the source in ℝ³, by label.
pub const EX44_SOURCE: [(&str, [f64; 3]); 6] = [
    ("0", [0.0, 0.0, 0.0]),
    ("e1", [1.0, 0.0, 0.0]),
    ("e3", [0.0, 0.0, 1.0]),
    ("e1+e2", [1.0, 1.0, 0.0]),
    ("e2+e3", [0.0, 1.0, 1.0]),
    ("e1+e2+e3", [1.0, 1.0, 1.0]),
];

/// `τ₁ = 0·e1·(e1+e2)`, `τ₂ = e3·(e2+e3)·(e1+e2+e3)`, `τ₃ = 0·e3·(e1+e2+e3)`,
/// `τ₄ = 0·(e1+e2)·(e1+e2+e3)`.
pub fn ex44_source() -> Arc<SimplicialComplex> {
    k(&[
        &["0", "e1", "e1+e2"],
        &["e3", "e2+e3", "e1+e2+e3"],
        &["0", "e3", "e1+e2+e3"],
        &["0", "e1+e2", "e1+e2+e3"],
    ])
}

/// `σ₁ = 0·e1·(e1+e2)`, `σ₂ = 0·e2·(e1+e2)`.
pub fn ex44_target() -> Arc<SimplicialComplex> {
    k(&[&["0", "e1", "e1+e2"], &["0", "e2", "e1+e2"]])
}

/// The vertical projection.
pub fn ex44_map() -> Arc<SimplicialMap> {
    Arc::new(
        SimplicialMap::from_labels(
            ex44_source(),
            ex44_target(),
            &[
                ("0", "0"),
                ("e1", "e1"),
                ("e3", "0"),
                ("e1+e2", "e1+e2"),
                ("e2+e3", "e2"),
                ("e1+e2+e3", "e1+e2"),
            ],
        )
        .expect("projection is simplicial"),
    )
}

/// Euclidean coordinates of a source point.
pub fn ex44_coordinates(x: &SimplicialComplex, p: &Point) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (v, c) in p.iter() {
        let pos = EX44_SOURCE
            .iter()
            .find(|(l, _)| *l == x.label(v))
            .map(|e| e.1)
            .expect("point of the source");
        for i in 0..3 {
            out[i] += c * pos[i];
        }
    }
    out
}

/// Which part of the target a simplex lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ex44Region {
    /// In `σ₁` only: height 0.
    First,
    /// In `σ₁ ∩ σ₂`.
    Shared,
    /// In `σ₂` only: height 1.
    Second,
}

pub fn ex44_region(y: &SimplicialComplex, s: &Simplex) -> Ex44Region {
    let s1 = y.simplex_by_labels(&["0", "e1", "e1+e2"]).expect("σ₁");
    let s2 = y.simplex_by_labels(&["0", "e2", "e1+e2"]).expect("σ₂");
    match (s.is_face_of(&s1), s.is_face_of(&s2)) {
        (true, true) => Ex44Region::Shared,
        (true, false) => Ex44Region::First,
        (false, true) => Ex44Region::Second,
        (false, false) => unreachable!("every simplex lies in σ₁ or σ₂"),
    }
}

/// The fiber point over `σ̂` at height `h` (vertical identification).
pub fn ex44_height_point(f: &SimplicialMap, sigma: &Simplex, h: f64) -> Result<FiberPoint> {
    let x = f.source();
    let y = f.target();
    let id = |l: &str| x.vertex_id(l).expect("source vertex");
    let h = h.clamp(0.0, 1.0);
    let names: Vec<&str> = sigma.vertices().iter().map(|&v| y.label(v)).collect();
    let w: Vec<(usize, f64)> = match names.as_slice() {
        ["0"] => vec![(id("0"), 1.0 - h), (id("e3"), h)],
        ["e1+e2"] => vec![(id("e1+e2"), 1.0 - h), (id("e1+e2+e3"), h)],
        ["0", "e1+e2"] => {
            // Over the barycentre the fiber is τ₄ ∩ f⁻¹ for h ≤ ½ and τ₃ ∩ f⁻¹
            // above: height (1−a)/2 + (1−b)/2.
            let (a, b) = if h <= 0.5 { (1.0, 1.0 - 2.0 * h) } else { (2.0 - 2.0 * h, 0.0) };
            vec![(id("0"), a), (id("e3"), 1.0 - a), (id("e1+e2"), b), (id("e1+e2+e3"), 1.0 - b)]
        }
        _ => {
            // Single point fibers: the unique vertex over each vertex of σ.
            let mut w = Vec::new();
            for &v in sigma.vertices() {
                let pre = f.vertex_preimage(v);
                let want = if ex44_region(y, sigma) == Ex44Region::Second { 1.0 } else { 0.0 };
                let u = pre
                    .into_iter()
                    .find(|&u| EX44_SOURCE.iter().any(|(l, p)| *l == x.label(u) && p[2] == want))
                    .ok_or_else(|| Error::NotFound(format!("no vertex over {}", y.label(v))))?;
                w.push((u, 1.0));
            }
            w
        }
    };
    Ok(FiberPoint::from_weights(w.into_iter().filter(|p| p.1 > 0.0)))
}

/// Height of a fiber point over `σ̂` (inverse of [`ex44_height_point`]).
pub fn ex44_height(f: &SimplicialMap, sigma: &Simplex, phi: &FiberPoint) -> f64 {
    let x = f.source();
    let n = sigma.len() as f64;
    phi.weights()
        .iter()
        .map(|&(u, w)| {
            let z = EX44_SOURCE.iter().find(|(l, _)| *l == x.label(u)).map_or(0.0, |e| e.1[2]);
            w * z / n
        })
        .sum()
}

/// Base heights: 0 in `σ₁ \ σ₂`, ½ on the shared edge and its vertices, 1 in
/// `σ₂ \ σ₁`.
pub fn ex44_base_height(y: &SimplicialComplex, s: &Simplex) -> f64 {
    match ex44_region(y, s) {
        Ex44Region::First => 0.0,
        Ex44Region::Shared => 0.5,
        Ex44Region::Second => 1.0,
    }
}

/// γ with the hand-picked heights: base values from [`ex44_base_height`] and
/// explicit fiber values on the chains through the shared edge ρ:
///
/// * `ρ < σ₁`: `½t₀`; `ρ < σ₂`: `½t₀ + t₁`;
/// * `v < ρ < σ₁`: `½t₀ + ½t₁`; `v < ρ < σ₂`: `½t₀ + ½t₁ + t₂`;
///
/// and, to keep the cells glued under the vertical identification, the
/// faces these force: `v < ρ`: `½`; `v < σ₁`: `½t₀`; `v < σ₂`: `½t₀ + t₁`.
pub fn ex44_explicit_gamma() -> Result<FlagMap> {
    let f = ex44_map();
    let y = f.target().clone();
    let mut base = HashMap::new();
    for s in y.simplices() {
        base.insert(s.clone(), ex44_height_point(&f, s, ex44_base_height(&y, s))?);
    }
    let mut gamma = build_gamma_map(f.clone(), Some(base))?;
    let rho = y.simplex_by_labels(&["0", "e1+e2"])?;
    let s1 = y.simplex_by_labels(&["0", "e1", "e1+e2"])?;
    let s2 = y.simplex_by_labels(&["0", "e2", "e1+e2"])?;
    let mut add = |chain: Vec<Simplex>, height: fn(&[f64]) -> f64| {
        let f = f.clone();
        let s0 = chain[0].clone();
        gamma.set_override(chain, Arc::new(move |t: &[f64]| ex44_height_point(&f, &s0, height(t))));
    };
    add(vec![rho.clone(), s1.clone()], |t| 0.5 * t[0]);
    add(vec![rho.clone(), s2.clone()], |t| 0.5 * t[0] + t[1]);
    for v in rho.vertices() {
        let v = Simplex::vertex(*v);
        add(vec![v.clone(), rho.clone(), s1.clone()], |t| 0.5 * t[0] + 0.5 * t[1]);
        add(vec![v.clone(), rho.clone(), s2.clone()], |t| 0.5 * t[0] + 0.5 * t[1] + t[2]);
        add(vec![v.clone(), rho.clone()], |_| 0.5);
        add(vec![v.clone(), s1.clone()], |t| 0.5 * t[0]);
        add(vec![v, s2.clone()], |t| 0.5 * t[0] + t[1]);
    }
    Ok(gamma)
}

pub fn ex44_explicit_family() -> Result<ControlledFamily> {
    Ok(ControlledFamily::new(ex44_explicit_gamma()?))
}

/// A named built-in map.
pub fn named_map(name: &str) -> Option<Arc<SimplicialMap>> {
    match name {
        "MAP_COLLAPSE" | "collapse" => Some(map_collapse()),
        "MAP_BAD" | "bad" => Some(map_bad()),
        "EX44" | "ex44" => Some(ex44_map()),
        _ => None,
    }
}
