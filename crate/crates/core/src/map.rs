//! Simplicial maps: validation, affine evaluation and image bookkeeping.

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::{Point, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// A vertex assignment between complexes that sends every simplex onto a
/// simplex (degenerations allowed), extended affinely.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    vertex_map: Vec<usize>,
    /// For each target simplex σ, the source simplices τ with f(τ) = σ.
    onto: HashMap<Simplex, Vec<Simplex>>,
}

/// Which open simplices of the target miss the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivityReport {
    /// Every σ with σ̊ ∩ im(f) = ∅.
    pub missed: Vec<Simplex>,
    /// Missed simplices none of whose proper faces is missed; their open
    /// stars are the maximal open sets avoiding the image.
    pub minimal: Vec<Simplex>,
}

impl SurjectivityReport {
    pub fn is_surjective(&self) -> bool {
        self.missed.is_empty()
    }
}

impl SimplicialMap {
    /// Builds and validates; non-simplicial assignments are rejected with the
    /// full list of offending source simplices.
    pub fn new(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        vertex_map: Vec<usize>,
    ) -> Result<Self> {
        let violations = validate_map(&source, &target, &vertex_map)?;
        if !violations.is_empty() {
            return Err(Error::NotSimplicial(
                violations.iter().map(|s| source.fmt_simplex(s)).collect(),
            ));
        }
        let mut onto: HashMap<Simplex, Vec<Simplex>> = HashMap::new();
        for t in source.simplices() {
            let img = Simplex::from_image(t.vertices().iter().map(|&v| vertex_map[v]).collect());
            onto.entry(img).or_default().push(t.clone());
        }
        Ok(SimplicialMap { source, target, vertex_map, onto })
    }

    /// Builds from a label-to-label assignment.
    pub fn from_labels<S: AsRef<str>>(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut vm = vec![usize::MAX; source.num_vertices()];
        for (a, b) in pairs {
            let a = source
                .vertex_id(a.as_ref())
                .ok_or_else(|| Error::NotFound(format!("source vertex {:?}", a.as_ref())))?;
            let b = target
                .vertex_id(b.as_ref())
                .ok_or_else(|| Error::NotFound(format!("target vertex {:?}", b.as_ref())))?;
            vm[a] = b;
        }
        if let Some(v) = vm.iter().position(|&x| x == usize::MAX) {
            return Err(Error::Malformed(format!(
                "vertex {:?} has no image",
                source.label(v)
            )));
        }
        Self::new(source, target, vm)
    }

    /// The identity map of a complex.
    pub fn identity(k: Arc<SimplicialComplex>) -> Self {
        let vm = (0..k.num_vertices()).collect();
        Self::new(k.clone(), k, vm).expect("identity is simplicial")
    }

    pub fn source(&self) -> &Arc<SimplicialComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SimplicialComplex> {
        &self.target
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn image_simplex(&self, t: &Simplex) -> Simplex {
        Simplex::from_image(t.vertices().iter().map(|&v| self.vertex_map[v]).collect())
    }

    /// Source simplices τ with f(τ) = σ, in lexicographic order.
    pub fn simplices_onto(&self, sigma: &Simplex) -> &[Simplex] {
        self.onto.get(sigma).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Source vertices over `w`.
    pub fn vertex_preimage(&self, w: usize) -> Vec<usize> {
        (0..self.vertex_map.len()).filter(|&v| self.vertex_map[v] == w).collect()
    }

    /// Affine extension of the vertex map; coordinates of vertices sharing an
    /// image are summed.
    pub fn evaluate(&self, p: &Point) -> Result<Point> {
        p.check_in(&self.source)?;
        Ok(self.evaluate_unchecked(p))
    }

    pub(crate) fn evaluate_unchecked(&self, p: &Point) -> Point {
        Point::from_weights(p.iter().map(|(v, c)| (self.vertex_map[v], c)))
    }

    pub fn surjectivity_check(&self) -> SurjectivityReport {
        let missed: Vec<Simplex> = self
            .target
            .simplices()
            .iter()
            .filter(|s| !self.onto.contains_key(*s))
            .cloned()
            .collect();
        let minimal = missed
            .iter()
            .filter(|s| !missed.iter().any(|m| m.is_proper_face_of(s)))
            .cloned()
            .collect();
        SurjectivityReport { missed, minimal }
    }
}

/// Source simplices whose vertex image does not span a target simplex.
pub fn validate_map(
    source: &SimplicialComplex,
    target: &SimplicialComplex,
    vertex_map: &[usize],
) -> Result<Vec<Simplex>> {
    if vertex_map.len() != source.num_vertices() {
        return Err(Error::Malformed(format!(
            "vertex map has {} entries for {} source vertices",
            vertex_map.len(),
            source.num_vertices()
        )));
    }
    if let Some(&w) = vertex_map.iter().find(|&&w| w >= target.num_vertices()) {
        return Err(Error::Malformed(format!("target vertex index {w} out of range")));
    }
    Ok(source
        .simplices()
        .iter()
        .filter(|t| {
            let img = Simplex::from_image(t.vertices().iter().map(|&v| vertex_map[v]).collect());
            !target.contains(&img)
        })
        .cloned()
        .collect())
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

    fn collapse() -> SimplicialMap {
        SimplicialMap::from_labels(k(&["abc"]), k(&["ab"]), &[("a", "a"), ("b", "b"), ("c", "b")])
            .unwrap()
    }

    #[test]
    fn collapse_is_simplicial_and_surjective() {
        let f = collapse();
        assert!(f.surjectivity_check().is_surjective());
    }

    #[test]
    fn non_adjacent_image_is_a_violation() {
        let src = k(&["ab"]);
        let tgt = k(&["a", "b"]);
        let v = validate_map(&src, &tgt, &[0, 1]).unwrap();
        assert_eq!(v, vec![Simplex::new(vec![0, 1]).unwrap()]);
        assert!(matches!(SimplicialMap::new(src, tgt, vec![0, 1]), Err(Error::NotSimplicial(_))));
    }

    #[test]
    fn barycentre_under_collapse() {
        let f = collapse();
        let abc = Simplex::new(vec![0, 1, 2]).unwrap();
        let img = f.evaluate(&Point::barycenter(&abc)).unwrap();
        assert_eq!(img.carrier(), Simplex::new(vec![0, 1]).unwrap());
        assert!((img.coord(0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((img.coord(1) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.evaluate(&Point::vertex(2)).unwrap(), Point::vertex(1));
    }

    #[test]
    fn inclusion_misses_star_of_c() {
        let d1 = k(&["ab"]);
        let d2 = k(&["abc"]);
        let inc = SimplicialMap::from_labels(d1, d2.clone(), &[("a", "a"), ("b", "b")]).unwrap();
        let r = inc.surjectivity_check();
        let names: Vec<String> = r.missed.iter().map(|s| d2.fmt_simplex(s)).collect();
        assert_eq!(names, vec!["abc", "ac", "bc", "c"]);
        assert_eq!(r.minimal, vec![Simplex::vertex(2)]);
    }

    #[test]
    fn identity_evaluates_to_itself() {
        let d1 = k(&["ab"]);
        let id = SimplicialMap::identity(d1);
        let m = Point::barycenter(&Simplex::new(vec![0, 1]).unwrap());
        assert_eq!(id.evaluate(&m).unwrap(), m);
    }
}
