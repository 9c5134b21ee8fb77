//! Semi-deciding contractibility: homology rules complexes out, greedy
//! elementary collapses rule them in, and a full collapse is turned into an
//! explicit PL contraction.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::complex::{Point, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::homology::{homology, HomologyProfile};
use crate::homotopy::Homotopy;

/// Removal of a free face together with its unique proper coface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryCollapse {
    pub face: Simplex,
    pub coface: Simplex,
}

impl ElementaryCollapse {
    /// The vertex of `coface` not in `face`.
    pub fn apex(&self) -> usize {
        self.coface.difference(&self.face).expect("coface is strictly larger").vertices()[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseSequence {
    pub steps: Vec<ElementaryCollapse>,
    /// Simplices left when no free face remains.
    pub remaining: Vec<Simplex>,
}

impl CollapseSequence {
    /// Collapsed all the way down to one vertex.
    pub fn is_full(&self) -> bool {
        self.remaining.len() == 1
    }

    /// The surviving vertex of a full collapse.
    pub fn basepoint(&self) -> Option<usize> {
        if self.is_full() {
            Some(self.remaining[0].vertices()[0])
        } else {
            None
        }
    }

    /// Re-applies the steps to `k`, checking each removed face is free at the
    /// time. Returns the surviving simplices.
    pub fn replay(&self, k: &SimplicialComplex) -> Result<Vec<Simplex>> {
        let mut present: BTreeSet<Simplex> = k.simplices().iter().cloned().collect();
        for step in &self.steps {
            let cofaces: Vec<&Simplex> =
                present.iter().filter(|s| step.face.is_proper_face_of(s)).collect();
            if cofaces != [&step.coface] {
                return Err(Error::Mismatch(format!("{} is not free", k.fmt_simplex(&step.face))));
            }
            present.remove(&step.face);
            present.remove(&step.coface);
        }
        Ok(present.into_iter().collect())
    }
}

/// Outcome of the contractibility semi-decision.
#[derive(Clone, Debug)]
pub enum Verdict {
    Contractible(CollapseSequence),
    NotContractible(String),
    Unknown(String),
}

impl Verdict {
    pub fn is_contractible(&self) -> bool {
        matches!(self, Verdict::Contractible(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Contractible(_) => "contractible",
            Verdict::NotContractible(_) => "not-contractible",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn reason(&self) -> String {
        match self {
            Verdict::Contractible(seq) => format!("collapses in {} steps", seq.steps.len()),
            Verdict::NotContractible(r) | Verdict::Unknown(r) => r.clone(),
        }
    }
}

/// Serializable summary of a verdict.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictSummary {
    pub verdict: &'static str,
    pub reason: String,
}

impl From<&Verdict> for VerdictSummary {
    fn from(v: &Verdict) -> Self {
        VerdictSummary { verdict: v.label(), reason: v.reason() }
    }
}

/// Repeatedly removes the lexicographically smallest free face and its coface.
pub fn greedy_collapse(k: &SimplicialComplex) -> Result<CollapseSequence> {
    if k.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut present: BTreeSet<Simplex> = k.simplices().iter().cloned().collect();
    // Number of present immediate cofaces of each present simplex. A simplex
    // with exactly one is free: any larger coface would contribute two.
    let mut up: HashMap<Simplex, usize> = k
        .simplices()
        .iter()
        .map(|s| (s.clone(), k.immediate_cofaces(s).count()))
        .collect();
    let mut steps = Vec::new();
    loop {
        let Some(face) = present.iter().find(|s| up[*s] == 1).cloned() else {
            break;
        };
        let coface = k
            .immediate_cofaces(&face)
            .find(|c| present.contains(*c))
            .cloned()
            .ok_or_else(|| Error::Internal("free face lost its coface".into()))?;
        present.remove(&face);
        present.remove(&coface);
        for f in face.facets() {
            *up.get_mut(&f).unwrap() -= 1;
        }
        for f in coface.facets() {
            if f != face {
                *up.get_mut(&f).unwrap() -= 1;
            }
        }
        steps.push(ElementaryCollapse { face, coface });
    }
    Ok(CollapseSequence { steps, remaining: present.into_iter().collect() })
}

/// Homology first, then collapse. `Contractible` is only returned when both
/// the homology is trivial and the greedy collapse reaches a vertex.
pub fn contractibility_verdict(k: &SimplicialComplex) -> Verdict {
    if k.is_empty() {
        return Verdict::NotContractible("empty".into());
    }
    let n = k.num_components();
    if n > 1 {
        return Verdict::NotContractible(format!("disconnected ({n} components)"));
    }
    let h = homology(k);
    if !h.is_trivial() {
        return Verdict::NotContractible(describe_homology(&h));
    }
    match greedy_collapse(k) {
        Ok(seq) if seq.is_full() => Verdict::Contractible(seq),
        Ok(seq) => Verdict::Unknown(format!(
            "acyclic but greedy collapse stuck with {} simplices",
            seq.remaining.len()
        )),
        Err(e) => Verdict::Unknown(e.to_string()),
    }
}

fn describe_homology(h: &HomologyProfile) -> String {
    let mut parts = Vec::new();
    for (d, b) in h.betti.iter().enumerate() {
        if *b > 0 {
            parts.push(format!("b{d} = {b}"));
        }
    }
    for (d, t) in h.torsion.iter().enumerate() {
        if !t.is_empty() {
            parts.push(format!("torsion in degree {d}: {}", t.join(", ")));
        }
    }
    format!("nonzero reduced homology ({})", parts.join("; "))
}

/// Contraction assembled from a full collapse sequence: step `i` runs on
/// `[i/N, (i+1)/N]` and pushes the coface onto the rest of its boundary
/// radially from the point `2·facê − apex` beyond the free face. The final
/// interval moves nothing once only the basepoint is left.
#[derive(Clone, Debug)]
pub struct CollapseContraction {
    complex: Arc<SimplicialComplex>,
    steps: Vec<ElementaryCollapse>,
    basepoint: usize,
}

impl CollapseContraction {
    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    /// Applies the first `n` full retractions.
    pub fn retract_through(&self, p: &Point, n: usize) -> Point {
        let mut x = p.clone();
        for s in &self.steps[..n.min(self.steps.len())] {
            x = push(&x, s, 1.0);
        }
        x
    }
}

/// Radial push of `x` across one elementary collapse, `s ∈ [0, 1]` of the way.
/// Only points carried by the face or the coface move.
fn push(x: &Point, step: &ElementaryCollapse, s: f64) -> Point {
    let carrier = x.carrier();
    if carrier != step.face && carrier != step.coface {
        return x.clone();
    }
    let k1 = step.face.len() as f64;
    let c = 2.0 / k1;
    let v = step.apex();
    // Line x + λ(x − p*) leaves the coface where the first face coordinate
    // x_u + λ(x_u − c) hits zero.
    let mut best: Option<(f64, usize)> = None;
    for &u in step.face.vertices() {
        let xu = x.coord(u);
        if xu < c {
            let lam = xu / (c - xu);
            if best.is_none_or(|(b, _)| lam < b) {
                best = Some((lam, u));
            }
        }
    }
    let Some((lam, hit)) = best else {
        return x.clone();
    };
    let l = s * lam;
    let mut w: Vec<(usize, f64)> = step
        .face
        .vertices()
        .iter()
        .map(|&u| {
            let xu = x.coord(u);
            let val = if s >= 1.0 && u == hit { 0.0 } else { xu + l * (xu - c) };
            (u, val.max(0.0))
        })
        .collect();
    w.push((v, x.coord(v) + l * (x.coord(v) + 1.0)));
    Point::from_weights(w)
}

impl Homotopy for CollapseContraction {
    fn at(&self, p: &Point, t: f64) -> Result<Point> {
        p.check_in(&self.complex)?;
        let n = self.steps.len();
        if n == 0 {
            return Ok(if t <= 0.0 { p.clone() } else { Point::vertex(self.basepoint) });
        }
        let t = t.clamp(0.0, 1.0);
        let scaled = t * n as f64;
        let i = (scaled.floor() as usize).min(n);
        let x = self.retract_through(p, i);
        if i == n {
            return Ok(x);
        }
        Ok(push(&x, &self.steps[i], scaled - i as f64))
    }
}

/// The contraction of `k` determined by a full collapse sequence.
pub fn contraction_from_collapse(
    k: Arc<SimplicialComplex>,
    seq: &CollapseSequence,
) -> Result<CollapseContraction> {
    let basepoint = seq
        .basepoint()
        .ok_or_else(|| Error::NotContractible("collapse sequence is partial".into()))?;
    Ok(CollapseContraction { complex: k, steps: seq.steps.clone(), basepoint })
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

    #[test]
    fn simplex_collapses_fully() {
        let d2 = k(&["abc"]);
        let seq = greedy_collapse(&d2).unwrap();
        assert!(seq.is_full());
        assert_eq!(seq.steps.len(), 3);
        assert_eq!(seq.replay(&d2).unwrap(), seq.remaining);
    }

    #[test]
    fn circle_gets_stuck() {
        let bd2 = k(&["ab", "bc", "ca"]);
        let seq = greedy_collapse(&bd2).unwrap();
        assert!(!seq.is_full());
        assert!(seq.steps.is_empty());
        assert!(matches!(contractibility_verdict(&bd2), Verdict::NotContractible(_)));
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(greedy_collapse(&SimplicialComplex::empty()), Err(Error::EmptyInput)));
    }

    #[test]
    fn contraction_of_an_edge() {
        let d1 = Arc::new(k(&["ab"]));
        let seq = greedy_collapse(&d1).unwrap();
        let c = contraction_from_collapse(d1.clone(), &seq).unwrap();
        for i in 0..=10 {
            let x = Point::from_weights([(0, i as f64 / 10.0), (1, 1.0 - i as f64 / 10.0)]);
            assert_eq!(c.at(&x, 0.0).unwrap(), x);
            assert_eq!(c.at(&x, 1.0).unwrap(), Point::vertex(c.basepoint()));
        }
    }

    #[test]
    fn partial_sequence_is_refused() {
        let bd2 = Arc::new(k(&["ab", "bc", "ca"]));
        let seq = greedy_collapse(&bd2).unwrap();
        assert!(matches!(
            contraction_from_collapse(bd2, &seq),
            Err(Error::NotContractible(_))
        ));
    }
}
