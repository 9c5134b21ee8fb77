//! Independent oracles for values the library derives: flag counts from raw
//! subset chains, Betti numbers from rational elimination, fiber components
//! from source-simplex incidence, subdivision sizes from face-poset chains,
//! and simplex geometry from explicit coordinates in ℝⁿ⁺¹.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{One, Zero};

use plcontrol::cellulation::build_cellulation;
use plcontrol::fiber::fiber_over_barycenter;
use plcontrol::fixtures;
use plcontrol::homology::homology;
use plcontrol::metric::{mesh_comesh, standard_comesh};
use plcontrol::{Simplex, SimplicialComplex, SimplicialMap};

type Face = BTreeSet<usize>;

fn faces(k: &SimplicialComplex) -> Vec<Face> {
    k.simplices().iter().map(|s| s.vertices().iter().copied().collect()).collect()
}

fn strictly_below(a: &Face, b: &Face) -> bool {
    a.len() < b.len() && a.is_subset(b)
}

/// Cells `base ⩽ σ₀ < … < σ_m` by dimension, enumerated by extending chains
/// one face at a time.
fn flag_census(k: &SimplicialComplex) -> Vec<usize> {
    let fs = faces(k);
    let mut census = vec![0usize; 2 * k.dim() + 1];
    fn extend(fs: &[Face], chain: &mut Vec<usize>, base_dim: usize, census: &mut [usize]) {
        census[base_dim + chain.len() - 1] += 1;
        let top = &fs[*chain.last().unwrap()];
        for (j, g) in fs.iter().enumerate() {
            if strictly_below(top, g) {
                chain.push(j);
                extend(fs, chain, base_dim, census);
                chain.pop();
            }
        }
    }
    for base in &fs {
        for (i, s0) in fs.iter().enumerate() {
            if base.is_subset(s0) {
                extend(&fs, &mut vec![i], base.len() - 1, &mut census);
            }
        }
    }
    while census.len() > 1 && *census.last().unwrap() == 0 {
        census.pop();
    }
    census
}

fn alternating(v: &[usize]) -> i64 {
    v.iter().enumerate().map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
}

#[test]
fn flag_census_matches_chain_enumeration() {
    for k in [fixtures::d1(), fixtures::d2(), fixtures::bd2(), fixtures::cone_bd2(), fixtures::ex44_target()] {
        let eps = standard_comesh(&k) / 3.0;
        let cells = build_cellulation(k.clone(), eps).unwrap();
        let oracle = flag_census(&k);
        assert_eq!(cells.census(), oracle);
        // χ(X) is a cell structure on X.
        assert_eq!(alternating(&oracle), k.euler_characteristic());
    }
    assert_eq!(flag_census(&fixtures::d1()), vec![4, 3]);
    assert_eq!(flag_census(&fixtures::d2()), vec![12, 21, 10]);
}

/// Rank of a rational matrix by Gaussian elimination.
fn rank(mut m: Vec<Vec<Rational64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c];
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c] / pivot;
                for j in c..cols {
                    let sub = factor * m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Reduced Betti numbers over ℚ.
fn rational_betti(k: &SimplicialComplex) -> Vec<usize> {
    let fs = faces(k);
    let by_dim = |d: usize| -> Vec<&Face> { fs.iter().filter(|f| f.len() == d + 1).collect() };
    let top = k.dim();
    let boundary_rank = |d: usize| -> usize {
        // ∂_d : C_d → C_{d−1}; d = 0 is the augmentation.
        let cols = by_dim(d);
        if cols.is_empty() {
            return 0;
        }
        if d == 0 {
            return 1;
        }
        let rows = by_dim(d - 1);
        let index: HashMap<&Face, usize> = rows.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut m = vec![vec![Rational64::zero(); cols.len()]; rows.len()];
        for (j, s) in cols.iter().enumerate() {
            for (i, v) in s.iter().enumerate() {
                let mut f = (*s).clone();
                f.remove(v);
                let sign = if i % 2 == 0 { Rational64::one() } else { -Rational64::one() };
                m[index[&f]][j] = sign;
            }
        }
        rank(m)
    };
    (0..=top)
        .map(|d| by_dim(d).len() - boundary_rank(d) - if d < top { boundary_rank(d + 1) } else { 0 })
        .collect()
}

#[test]
fn betti_numbers_match_rational_elimination() {
    let rp2 = Arc::new(
        plcontrol::closure_complex(&[
            vec!["1", "2", "4"], vec!["2", "3", "4"], vec!["3", "1", "5"], vec!["1", "4", "5"],
            vec!["4", "5", "6"], vec!["2", "5", "6"], vec!["3", "2", "5"], vec!["1", "2", "6"],
            vec!["1", "3", "6"], vec!["3", "4", "6"],
        ])
        .unwrap(),
    );
    let cases = [
        fixtures::d2(),
        fixtures::bd2(),
        fixtures::boundary_tetrahedron(),
        fixtures::cone_bd2(),
        fixtures::ex44_source(),
        rp2,
    ];
    for k in cases {
        let oracle = rational_betti(&k);
        let h = homology(&k);
        let mut b = h.betti.clone();
        b.resize(oracle.len(), 0);
        assert_eq!(b, oracle);
    }
}

/// Components of `f⁻¹(σ̂)`: each source simplex whose image contains σ meets
/// the fiber in a convex piece; two pieces meet when the common face of
/// their simplices still maps onto a superset of σ.
fn fiber_components(f: &SimplicialMap, sigma: &Simplex) -> usize {
    let x = f.source();
    let target: Face = sigma.vertices().iter().copied().collect();
    let pieces: Vec<Face> = x
        .simplices()
        .iter()
        .filter(|t| {
            let img: Face = t.vertices().iter().map(|&v| f.vertex_image(v)).collect();
            target.is_subset(&img)
        })
        .map(|t| t.vertices().iter().copied().collect())
        .collect();
    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            let common: Face = pieces[a].intersection(&pieces[b]).copied().collect();
            let img: Face = common.iter().map(|&v| f.vertex_image(v)).collect();
            if target.is_subset(&img) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    (0..pieces.len()).filter(|&i| find(&mut parent, i) == i).count()
}

#[test]
fn fiber_components_match_incidence_oracle() {
    for f in [fixtures::map_collapse(), fixtures::map_bad(), fixtures::ex44_map()] {
        for sigma in f.target().simplices() {
            let fiber = fiber_over_barycenter(&f, sigma).unwrap();
            let got = if fiber.is_empty() { 0 } else { fiber.triangulation.num_components() };
            assert_eq!(got, fiber_components(&f, sigma), "{}", f.target().fmt_simplex(sigma));
        }
    }
    let bad = fixtures::map_bad();
    let ab = bad.target().simplex_by_labels(&["a", "b"]).unwrap();
    assert_eq!(fiber_components(&bad, &ab), 2);
}

/// Number of chains `σ₀ < … < σ_d` of faces, i.e. d-simplices of Sd K.
fn chain_counts(k: &SimplicialComplex) -> Vec<usize> {
    let fs = faces(k);
    let mut counts = vec![0usize; k.dim() + 1];
    fn walk(fs: &[Face], last: usize, len: usize, counts: &mut [usize]) {
        counts[len - 1] += 1;
        for (j, g) in fs.iter().enumerate() {
            if strictly_below(&fs[last], g) {
                walk(fs, j, len + 1, counts);
            }
        }
    }
    for i in 0..fs.len() {
        walk(&fs, i, 1, &mut counts);
    }
    counts
}

#[test]
fn subdivision_matches_face_poset_chains() {
    for k in [fixtures::d2(), fixtures::bd2(), fixtures::boundary_tetrahedron(), fixtures::ex44_source()] {
        let (sd, _) = k.barycentric_subdivision();
        assert_eq!(sd.f_vector(), chain_counts(&k));
        assert_eq!(sd.euler_characteristic(), k.euler_characteristic());
    }
}

/// Distance in ℝⁿ⁺¹ between barycentres of vertex subsets of the standard
/// simplex.
fn euclid_bary(a: &[usize], b: &[usize], n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let x = if a.contains(&i) { 1.0 / a.len() as f64 } else { 0.0 };
            let y = if b.contains(&i) { 1.0 / b.len() as f64 } else { 0.0 };
            (x - y) * (x - y)
        })
        .sum::<f64>()
        .sqrt()
}

#[test]
fn mesh_and_comesh_from_coordinates() {
    // Diameter of Δⁿ is |e₀ − e₁|; radius is the distance from the
    // barycentre to the barycentre of a facet.
    let edge = euclid_bary(&[0], &[1], 3);
    let rad2 = euclid_bary(&[0, 1, 2], &[0, 1], 3);
    let rad1 = euclid_bary(&[0, 1], &[0], 2);
    assert!((edge - 2f64.sqrt()).abs() < 1e-15);
    for k in [fixtures::d2(), fixtures::cone_bd2(), fixtures::boundary_tetrahedron(), fixtures::ex44_source(), fixtures::ex44_target()] {
        let (mesh, comesh) = mesh_comesh(&k, None).unwrap();
        assert!((mesh - edge).abs() < 1e-9);
        assert!((comesh - rad2).abs() < 1e-9);
        assert!((standard_comesh(&k) - rad2).abs() < 1e-12);
    }
    for k in [fixtures::d1(), fixtures::bd2()] {
        let (mesh, comesh) = mesh_comesh(&k, None).unwrap();
        assert!((mesh - edge).abs() < 1e-9);
        assert!((comesh - rad1).abs() < 1e-9);
    }
}

#[test]
fn collapse_map_controls_metric_through_target() {
    // Measured through MAP_COLLAPSE, the triangle abc is seen as the edge ab.
    let f = fixtures::map_collapse();
    let (mesh, comesh) = mesh_comesh(f.source(), Some(&f)).unwrap();
    assert!((mesh - 2f64.sqrt()).abs() < 1e-9);
    // bc collapses to a point, so its radius is zero.
    assert!(comesh.abs() < 1e-9);
}
