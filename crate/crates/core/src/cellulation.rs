//! Flags, the flag cellulation χ(X), the maps Γ_ε: χ(X) → X and the straight
//! line homotopy from the ε-subdivision cellulation back to X.
//!
//! A flag is a simplex σ together with a chain `σ ⩽ σ₀ < … < σ_m`; its cell
//! is `σ × σ̂₀…σ̂_m` with coordinates `(s, t)`. Writing `λ_j = ε / |v σ̂_j|`
//! (the same for every vertex v of σ_j), the vertex images are
//! `Γ_ε(v × σ̂_j) = (1 − λ_j)·v + λ_j·σ̂_j`, and bilinearity collapses to
//!
//! ```text
//! Γ_ε(s, t) = μ·s + Σ_j t_j λ_j σ̂_j,    μ = 1 − Σ_j t_j λ_j.
//! ```
//!
//! With `a = μ·s` and `w_j = t_j λ_j` this is linear, which is how
//! [`Cellulation::invert`] solves it.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::complex::{Point, Simplex, SimplicialComplex, TOL};
use crate::error::{Error, Result};
use crate::homotopy::Homotopy;
use crate::metric::standard_comesh;

/// `σ ⩽ σ₀ < … < σ_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    pub base: Simplex,
    pub chain: Vec<Simplex>,
}

impl Flag {
    pub fn new(base: Simplex, chain: Vec<Simplex>) -> Result<Self> {
        if chain.is_empty() || !base.is_face_of(&chain[0]) {
            return Err(Error::Malformed("flag base must be a face of the first chain element".into()));
        }
        if chain.windows(2).any(|w| !w[0].is_proper_face_of(&w[1])) {
            return Err(Error::Malformed("flag chain must be strictly increasing".into()));
        }
        Ok(Flag { base, chain })
    }

    /// Flag length `m`.
    pub fn length(&self) -> usize {
        self.chain.len() - 1
    }

    /// Cell dimension `|σ| + m`.
    pub fn dim(&self) -> usize {
        self.base.dim() + self.length()
    }

    /// Largest chain element; carrier of the cell's interior.
    pub fn top(&self) -> &Simplex {
        self.chain.last().unwrap()
    }

    pub fn describe(&self, k: &SimplicialComplex) -> String {
        let chain: Vec<String> = self.chain.iter().map(|s| k.fmt_simplex(s)).collect();
        format!("Γ_{{{}}}({})", chain.join(","), k.fmt_simplex(&self.base))
    }
}

/// All flags, ordered by base and then lexicographically by chain.
pub fn enumerate_flags(k: &SimplicialComplex) -> Vec<Flag> {
    let up: Vec<Vec<usize>> = k
        .simplices()
        .iter()
        .map(|s| {
            (0..k.len())
                .filter(|&j| s.is_proper_face_of(&k.simplices()[j]))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    fn extend(k: &SimplicialComplex, up: &[Vec<usize>], base: &Simplex, chain: &mut Vec<usize>, out: &mut Vec<Flag>) {
        out.push(Flag {
            base: base.clone(),
            chain: chain.iter().map(|&i| k.simplices()[i].clone()).collect(),
        });
        let last = *chain.last().unwrap();
        for &j in &up[last] {
            chain.push(j);
            extend(k, up, base, chain, out);
            chain.pop();
        }
    }
    for (i, base) in k.simplices().iter().enumerate() {
        let mut starts = up[i].clone();
        starts.push(i);
        starts.sort_unstable();
        for j in starts {
            extend(k, &up, base, &mut vec![j], &mut out);
        }
    }
    out
}

/// `|v τ̂|` for any vertex v of τ: `√(|τ| / (|τ| + 1))`.
pub fn vertex_to_barycenter(tau: &Simplex) -> f64 {
    let n = tau.len() as f64;
    ((n - 1.0) / n).sqrt()
}

fn lambda(eps: f64, tau: &Simplex) -> f64 {
    if tau.len() == 1 {
        0.0
    } else {
        eps / vertex_to_barycenter(tau)
    }
}

fn check_epsilon(k: &SimplicialComplex, eps: f64, allow_zero: bool) -> Result<f64> {
    let comesh = standard_comesh(k);
    if !eps.is_finite() || eps < 0.0 || (eps == 0.0 && !allow_zero) || eps >= comesh {
        return Err(Error::OutOfRange(format!(
            "epsilon {eps} outside {} comesh {comesh}",
            if allow_zero { "[0, comesh) with" } else { "(0, comesh) with" }
        )));
    }
    Ok(comesh)
}

fn vertex_image(eps: f64, v: usize, tau: &Simplex) -> Point {
    Point::vertex(v).lerp(&Point::barycenter(tau), lambda(eps, tau))
}

/// `Γ_ε(v × τ̂)`: the point at distance ε from v on the segment to τ̂.
pub fn gamma_vertex(k: &SimplicialComplex, eps: f64, v: usize, tau: &Simplex) -> Result<Point> {
    check_epsilon(k, eps, true)?;
    k.require(tau)?;
    if !tau.contains(v) {
        return Err(Error::Malformed(format!("vertex {} is not in {}", k.label(v), k.fmt_simplex(tau))));
    }
    Ok(vertex_image(eps, v, tau))
}

/// Coordinates on a flag cell: `s` over the base vertices, `t` over the chain.
#[derive(Clone, Debug, PartialEq)]
pub struct CellCoords {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

impl CellCoords {
    /// Largest coordinate difference.
    pub fn distance_sup(&self, other: &CellCoords) -> f64 {
        self.s
            .iter()
            .zip(&other.s)
            .chain(self.t.iter().zip(&other.t))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The base point `Σ s_i v_i`, i.e. `Γ₀`.
    pub fn base_point(&self, flag: &Flag) -> Point {
        Point::from_weights(flag.base.vertices().iter().copied().zip(self.s.iter().copied()))
    }
}

fn check_coords(flag: &Flag, c: &CellCoords) -> Result<()> {
    let ok = |v: &[f64], n: usize| {
        v.len() == n
            && v.iter().all(|x| x.is_finite() && *x >= -TOL)
            && (v.iter().sum::<f64>() - 1.0).abs() <= TOL
    };
    if !ok(&c.s, flag.base.len()) || !ok(&c.t, flag.chain.len()) {
        return Err(Error::Malformed(format!(
            "coordinates ({:?}, {:?}) do not fit a cell with {} base vertices and chain length {}",
            c.s,
            c.t,
            flag.base.len(),
            flag.chain.len()
        )));
    }
    Ok(())
}

fn eval_unchecked(eps: f64, flag: &Flag, c: &CellCoords) -> Point {
    let lam: Vec<f64> = flag.chain.iter().map(|s| lambda(eps, s)).collect();
    let mu = 1.0 - c.t.iter().zip(&lam).map(|(t, l)| t * l).sum::<f64>();
    let mut w: Vec<(usize, f64)> =
        flag.base.vertices().iter().zip(&c.s).map(|(&v, &s)| (v, mu * s)).collect();
    for ((sj, &tj), &lj) in flag.chain.iter().zip(&c.t).zip(&lam) {
        let share = tj * lj / sj.len() as f64;
        w.extend(sj.vertices().iter().map(|&v| (v, share)));
    }
    Point::from_weights(w)
}

/// `Γ_ε` on one cell.
pub fn gamma_eval(k: &SimplicialComplex, eps: f64, flag: &Flag, coords: &CellCoords) -> Result<Point> {
    check_epsilon(k, eps, true)?;
    check_coords(flag, coords)?;
    Ok(eval_unchecked(eps, flag, coords))
}

/// The fundamental ε-subdivision cellulation: every flag cell with its vertex
/// images, indexed for inversion by carrier simplex.
#[derive(Clone, Debug)]
pub struct Cellulation {
    complex: Arc<SimplicialComplex>,
    epsilon: f64,
    flags: Vec<Flag>,
    /// `images[c][i][j] = Γ_ε(v_i × σ̂_j)` for cell `c`.
    images: Vec<Vec<Vec<Point>>>,
    /// Top-dimensional cells inside each open simplex.
    by_carrier: HashMap<Simplex, Vec<usize>>,
}

pub fn build_cellulation(k: Arc<SimplicialComplex>, eps: f64) -> Result<Cellulation> {
    check_epsilon(&k, eps, false)?;
    let flags = enumerate_flags(&k);
    let images: Vec<Vec<Vec<Point>>> = flags
        .par_iter()
        .map(|fl| {
            fl.base
                .vertices()
                .iter()
                .map(|&v| fl.chain.iter().map(|s| vertex_image(eps, v, s)).collect())
                .collect()
        })
        .collect();
    for (fl, im) in flags.iter().zip(&images) {
        let pts: Vec<&Point> = im.iter().flatten().collect();
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                if pts[a].l2(pts[b]) <= TOL {
                    return Err(Error::Internal(format!(
                        "cell {} has coincident vertex images",
                        fl.describe(&k)
                    )));
                }
            }
        }
    }
    let mut by_carrier: HashMap<Simplex, Vec<usize>> = HashMap::new();
    for (i, fl) in flags.iter().enumerate() {
        if fl.dim() == fl.top().dim() {
            by_carrier.entry(fl.top().clone()).or_default().push(i);
        }
    }
    Ok(Cellulation { complex: k, epsilon: eps, flags, images, by_carrier })
}

impl Cellulation {
    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// `Γ_ε(v_i × σ̂_j)` for cell `c`.
    pub fn vertex_images(&self, c: usize) -> &[Vec<Point>] {
        &self.images[c]
    }

    /// Cell counts by dimension.
    pub fn census(&self) -> Vec<usize> {
        let top = self.flags.iter().map(Flag::dim).max().unwrap_or(0);
        let mut out = vec![0; top + 1];
        for f in &self.flags {
            out[f.dim()] += 1;
        }
        out
    }

    /// `Γ_δ` on a cell of this cellulation, for any `0 ≤ δ ≤ ε`.
    pub fn eval_at(&self, delta: f64, c: usize, coords: &CellCoords) -> Result<Point> {
        if !(0.0..=self.epsilon).contains(&delta) {
            return Err(Error::OutOfRange(format!("delta {delta} outside [0, {}]", self.epsilon)));
        }
        check_coords(&self.flags[c], coords)?;
        Ok(eval_unchecked(delta, &self.flags[c], coords))
    }

    pub fn eval(&self, c: usize, coords: &CellCoords) -> Result<Point> {
        self.eval_at(self.epsilon, c, coords)
    }

    /// `Γ_ε⁻¹(y)`: the lowest-index top-dimensional cell over the carrier of
    /// `y` whose linear solve is feasible.
    pub fn invert(&self, y: &Point) -> Result<(usize, CellCoords)> {
        y.check_in(&self.complex)?;
        let carrier = y.carrier();
        let cands = self.by_carrier.get(&carrier).map(Vec::as_slice).unwrap_or(&[]);
        let mut best: Option<(f64, usize, CellCoords)> = None;
        for &c in cands {
            if let Some((viol, coords)) = self.solve(c, y) {
                if viol <= 1e-10 {
                    return Ok((c, coords));
                }
                if best.as_ref().is_none_or(|b| viol < b.0) {
                    best = Some((viol, c, coords));
                }
            }
        }
        match best {
            Some((viol, c, coords)) if viol <= 1e-7 => Ok((c, coords)),
            _ => Err(Error::InversionFailure(format!(
                "no cell of the ε = {} cellulation contains {y}",
                self.epsilon
            ))),
        }
    }

    /// Solves cell `c` for `y`, returning the worst sign violation and the
    /// clamped coordinates.
    fn solve(&self, c: usize, y: &Point) -> Option<(f64, CellCoords)> {
        let fl = &self.flags[c];
        let rows = fl.top().vertices();
        let lam: Vec<f64> = fl.chain.iter().map(|s| lambda(self.epsilon, s)).collect();
        let vertex_base = lam[0] == 0.0;
        let nb = fl.base.len();
        let nw = if vertex_base { fl.chain.len() - 1 } else { fl.chain.len() };
        let w_off = if vertex_base { 1 } else { 0 };
        let n_unknown = nb + nw;
        let n_eq = rows.len() + usize::from(!vertex_base);
        if n_unknown != n_eq {
            return None;
        }
        let mut m = DMatrix::<f64>::zeros(n_eq, n_unknown);
        let mut rhs = DVector::<f64>::zeros(n_eq);
        for (r, &x) in rows.iter().enumerate() {
            rhs[r] = y.coord(x);
            if let Ok(i) = fl.base.vertices().binary_search(&x) {
                m[(r, i)] = 1.0;
            }
            for j in 0..nw {
                let sj = &fl.chain[j + w_off];
                if sj.contains(x) {
                    m[(r, nb + j)] = 1.0 / sj.len() as f64;
                }
            }
        }
        if !vertex_base {
            let r = rows.len();
            rhs[r] = 1.0;
            for j in 0..nw {
                m[(r, nb + j)] = 1.0 / lam[j];
            }
        }
        let sol = m.lu().solve(&rhs)?;
        let a: Vec<f64> = sol.iter().take(nb).copied().collect();
        let w: Vec<f64> = sol.iter().skip(nb).copied().collect();
        let mut t: Vec<f64> = Vec::with_capacity(fl.chain.len());
        if vertex_base {
            let rest: f64 = w.iter().zip(&lam[1..]).map(|(w, l)| w / l).sum();
            t.push(1.0 - rest);
        }
        t.extend(w.iter().zip(&lam[w_off..]).map(|(w, l)| w / l));
        let viol = a
            .iter()
            .chain(t.iter())
            .map(|&x| -x)
            .fold(0.0, f64::max);
        let clamp = |v: Vec<f64>| -> Vec<f64> {
            let v: Vec<f64> = v.into_iter().map(|x| x.max(0.0)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        };
        Some((viol, CellCoords { s: clamp(a), t: clamp(t) }))
    }

    /// The straight line homotopy `h₂,ε(y, t) = Γ_{ε(1−t)} Γ_ε⁻¹(y)`.
    pub fn straightline(self: &Arc<Self>) -> StraightLineHomotopy {
        StraightLineHomotopy { cells: self.clone() }
    }

    /// `Γ₀ Γ_ε⁻¹(y)`.
    pub fn collapse(&self, y: &Point) -> Result<Point> {
        let (c, coords) = self.invert(y)?;
        Ok(coords.base_point(&self.flags[c]))
    }
}

/// `h₂,ε`; tracks are straight segments of length at most ε.
#[derive(Clone, Debug)]
pub struct StraightLineHomotopy {
    cells: Arc<Cellulation>,
}

impl StraightLineHomotopy {
    pub fn cellulation(&self) -> &Arc<Cellulation> {
        &self.cells
    }
}

impl Homotopy for StraightLineHomotopy {
    fn at(&self, y: &Point, t: f64) -> Result<Point> {
        let (c, coords) = self.cells.invert(y)?;
        let delta = self.cells.epsilon * (1.0 - t.clamp(0.0, 1.0));
        Ok(eval_unchecked(delta, &self.cells.flags[c], &coords))
    }
}

pub fn straightline_homotopy(k: Arc<SimplicialComplex>, eps: f64) -> Result<StraightLineHomotopy> {
    Ok(Arc::new(build_cellulation(k, eps)?).straightline())
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

    #[test]
    fn flag_counts() {
        assert_eq!(enumerate_flags(&k(&["ab"])).len(), 7);
        let d2 = enumerate_flags(&k(&["abc"]));
        assert_eq!(d2.len(), 43);
        assert_eq!(enumerate_flags(&k(&["a"])).len(), 1);
    }

    #[test]
    fn flags_are_sorted() {
        let flags = enumerate_flags(&k(&["abc"]));
        assert!(flags.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn edge_vertex_image() {
        let d1 = k(&["ab"]);
        let ab = Simplex::new(vec![0, 1]).unwrap();
        let p = gamma_vertex(&d1, 0.1, 0, &ab).unwrap();
        assert!((p.coord(0) - (1.0 - 0.1 / 2f64.sqrt())).abs() < 1e-12);
        assert!((p.coord(1) - 0.1 / 2f64.sqrt()).abs() < 1e-12);
        assert!((p.l2(&Point::vertex(0)) - 0.1).abs() < 1e-12);
        assert_eq!(gamma_vertex(&d1, 0.0, 0, &ab).unwrap(), Point::vertex(0));
        assert!(matches!(gamma_vertex(&d1, 0.8, 0, &ab), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn round_trip_on_triangle() {
        let d2 = k(&["abc"]);
        let cells = build_cellulation(d2, 0.1).unwrap();
        for (c, fl) in cells.flags().iter().enumerate() {
            let s = vec![1.0 / fl.base.len() as f64; fl.base.len()];
            let t = vec![1.0 / fl.chain.len() as f64; fl.chain.len()];
            let coords = CellCoords { s, t };
            let y = cells.eval(c, &coords).unwrap();
            let (c2, back) = cells.invert(&y).unwrap();
            assert!(cells.eval(c2, &back).unwrap().l2(&y) < 1e-9);
            if fl.dim() == fl.top().dim() {
                assert_eq!(c2, c);
                assert!(back.distance_sup(&coords) < 1e-9);
            }
        }
    }

    #[test]
    fn zero_epsilon_is_projection() {
        let d2 = k(&["abc"]);
        let flags = enumerate_flags(&d2);
        let fl = flags.iter().find(|f| f.dim() == 2 && f.length() == 1).unwrap();
        let coords = CellCoords { s: vec![0.25, 0.75], t: vec![0.4, 0.6] };
        let p = gamma_eval(&d2, 0.0, fl, &coords).unwrap();
        assert!(p.l2(&coords.base_point(fl)) < 1e-15);
    }

    #[test]
    fn census_of_triangle() {
        let cells = build_cellulation(k(&["abc"]), 0.1).unwrap();
        assert_eq!(cells.census(), vec![12, 21, 10]);
    }
}
