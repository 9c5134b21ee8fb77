//! Integral reduced simplicial homology via Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::complex::SimplicialComplex;

/// Reduced Betti numbers and torsion coefficients per degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    /// `betti[d]` is the rank of the free part of H̃_d.
    pub betti: Vec<usize>,
    /// Invariant factors greater than one of H̃_d, in divisibility order.
    pub torsion: Vec<Vec<String>>,
    /// The empty complex has H̃_{-1} = ℤ; it is recorded here.
    pub empty: bool,
}

impl HomologyProfile {
    /// True when every reduced group vanishes (never for the empty complex).
    pub fn is_trivial(&self) -> bool {
        !self.empty && self.betti.iter().all(|&b| b == 0) && self.torsion.iter().all(Vec::is_empty)
    }
}

/// Boundary matrix `∂_d : C_d → C_{d-1}` with rows indexed by
/// `(d-1)`-simplices and columns by `d`-simplices, both in lexicographic
/// order. For `d = 0` this is the augmentation row of ones.
pub fn boundary_matrix(k: &SimplicialComplex, d: usize) -> Vec<Vec<BigInt>> {
    let cols: Vec<_> = k.simplices_of_dim(d).collect();
    if d == 0 {
        return vec![vec![BigInt::one(); cols.len()]];
    }
    let rows: Vec<_> = k.simplices_of_dim(d - 1).collect();
    let row_of: std::collections::HashMap<_, _> =
        rows.iter().enumerate().map(|(i, s)| ((*s).clone(), i)).collect();
    let mut m = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for (i, f) in s.facets().iter().enumerate() {
            // facets()[i] omits the i-th vertex.
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            m[row_of[f]][j] = sign;
        }
    }
    m
}

/// Non-zero invariant factors of an integer matrix, in divisibility order.
pub fn smith_diagonal(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // Pivot: smallest non-zero absolute value in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !m[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return diag;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..cols {
                    let v = &q * &m[t][j];
                    m[i][j] -= v;
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for i in t..rows {
                    let v = &q * &m[i][t];
                    m[i][j] -= v;
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Pivot must divide the rest of the block.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    for j in t..cols {
                        let v = m[i][j].clone();
                        m[t][j] += v;
                    }
                }
                None => {
                    diag.push(m[t][t].abs());
                    break;
                }
            }
        }
    }
    diag
}

/// Reduced integral homology of `k`.
pub fn homology(k: &SimplicialComplex) -> HomologyProfile {
    if k.is_empty() {
        return HomologyProfile { betti: Vec::new(), torsion: Vec::new(), empty: true };
    }
    let top = k.dim();
    let counts = k.f_vector();
    // factors[d] = invariant factors of ∂_d, d = 0..=top+1.
    let factors: Vec<Vec<BigInt>> = (0..=top + 1)
        .map(|d| if d <= top { smith_diagonal(boundary_matrix(k, d)) } else { Vec::new() })
        .collect();
    let mut betti = Vec::with_capacity(top + 1);
    let mut torsion = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let rank_d = factors[d].len();
        let rank_up = factors[d + 1].len();
        betti.push(counts[d] - rank_d - rank_up);
        torsion.push(
            factors[d + 1]
                .iter()
                .filter(|x| !x.is_one())
                .map(|x| x.to_string())
                .collect(),
        );
    }
    HomologyProfile { betti, torsion, empty: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::closure_complex;

    fn k(gens: &[&str]) -> SimplicialComplex {
        let g: Vec<Vec<String>> =
            gens.iter().map(|s| s.chars().map(|c| c.to_string()).collect()).collect();
        closure_complex(&g).unwrap()
    }

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn smith_small() {
        let d = smith_diagonal(big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        let d: Vec<i64> = d.iter().map(|x| x.to_string().parse().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        assert!(smith_diagonal(big(&[&[0, 0], &[0, 0]])).is_empty());
    }

    #[test]
    fn point_circle_sphere() {
        assert!(homology(&k(&["a"])).is_trivial());
        let h = homology(&k(&["ab", "bc", "ca"]));
        assert_eq!(h.betti, vec![0, 1]);
        let h = homology(&k(&["abc", "abd", "acd", "bcd"]));
        assert_eq!(h.betti, vec![0, 0, 1]);
        let h = homology(&k(&["a", "b"]));
        assert_eq!(h.betti, vec![1]);
        assert!(!homology(&SimplicialComplex::empty()).is_trivial());
    }

    #[test]
    fn projective_plane_has_two_torsion() {
        // Six-vertex RP².
        let rp2 = k(&["abc", "acd", "ade", "aef", "afb", "bce", "cdf", "deb", "efc", "fbd"]);
        let h = homology(&rp2);
        assert_eq!(h.betti, vec![0, 0, 0]);
        assert_eq!(h.torsion[1], vec!["2".to_string()]);
    }
}
