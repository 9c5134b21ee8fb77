//! Complex, map, point and path files.
//!
//! Complex: `{"vertices": [...], "simplices": [[...], ...], "positions": {...}}`
//! with `positions` optional (planar coordinates used for drawing).
//! Map: `{"source": path, "target": path, "vertex_map": {"a": "x", ...}}`,
//! paths relative to the map file.
//! Point: `a=0.5,b=0.5` (a bare label means weight 1).
//! Paths: `{"paths": [[{"a": 1.0}, {"a": 0.5, "b": 0.5}], ...]}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cone::{coning_map, ConePoint};
use crate::complex::{Point, Simplex, SimplicialComplex, TOL};
use crate::error::{Error, Result};
use crate::map::SimplicialMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub vertices: Vec<String>,
    pub simplices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<BTreeMap<String, [f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub source: String,
    pub target: String,
    pub vertex_map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub paths: Vec<Vec<BTreeMap<String, f64>>>,
}

/// A complex with optional planar vertex positions and load-time warnings.
#[derive(Clone, Debug)]
pub struct LoadedComplex {
    pub complex: Arc<SimplicialComplex>,
    pub positions: Option<Vec<[f64; 2]>>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct LoadedMap {
    pub map: Arc<SimplicialMap>,
    pub source: LoadedComplex,
    pub target: LoadedComplex,
    pub warnings: Vec<String>,
}

fn parse_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), msg: msg.into() }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e.to_string()))
}

/// Parses complex text; `origin` names the source in diagnostics.
pub fn parse_complex(text: &str, origin: &str) -> Result<LoadedComplex> {
    let file: ComplexFile = serde_json::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
    complex_from_file(&file, origin)
}

pub fn complex_from_file(file: &ComplexFile, origin: &str) -> Result<LoadedComplex> {
    let mut index = BTreeMap::new();
    for (i, v) in file.vertices.iter().enumerate() {
        if index.insert(v.as_str(), i).is_some() {
            return Err(parse_err(origin, format!("vertices[{i}]: duplicate vertex {v:?}")));
        }
    }
    let mut gens = Vec::with_capacity(file.simplices.len());
    for (i, s) in file.simplices.iter().enumerate() {
        let mut ids = Vec::with_capacity(s.len());
        for (j, l) in s.iter().enumerate() {
            let id = index
                .get(l.as_str())
                .ok_or_else(|| parse_err(origin, format!("simplices[{i}][{j}]: unknown vertex {l:?}")))?;
            ids.push(*id);
        }
        Simplex::new(ids.clone()).map_err(|e| parse_err(origin, format!("simplices[{i}]: {e}")))?;
        gens.push(ids);
    }
    let complex = SimplicialComplex::from_generators(file.vertices.clone(), &gens)
        .map_err(|e| parse_err(origin, e.to_string()))?;

    let listed: std::collections::HashSet<Simplex> =
        gens.iter().map(|g| Simplex::new(g.clone()).expect("validated above")).collect();
    let added = complex
        .simplices()
        .iter()
        .filter(|s| s.len() > 1 && !listed.contains(*s))
        .count();
    let mut warnings = Vec::new();
    if added > 0 {
        let w = format!("{origin}: closed under faces, {added} simplices added");
        log::warn!("{w}");
        warnings.push(w);
    }

    let positions = match &file.positions {
        None => None,
        Some(p) => {
            let mut out = Vec::with_capacity(file.vertices.len());
            for v in &file.vertices {
                let xy = p
                    .get(v)
                    .ok_or_else(|| parse_err(origin, format!("positions: vertex {v:?} missing")))?;
                if !xy.iter().all(|c| c.is_finite()) {
                    return Err(parse_err(origin, format!("positions: {v:?} is not finite")));
                }
                out.push(*xy);
            }
            if let Some(extra) = p.keys().find(|k| !index.contains_key(k.as_str())) {
                return Err(parse_err(origin, format!("positions: unknown vertex {extra:?}")));
            }
            Some(out)
        }
    };
    Ok(LoadedComplex { complex: Arc::new(complex), positions, warnings })
}

pub fn load_complex(path: impl AsRef<Path>) -> Result<LoadedComplex> {
    let path = path.as_ref();
    parse_complex(&read(path)?, &path.display().to_string())
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

pub fn load_map(path: impl AsRef<Path>) -> Result<LoadedMap> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let file: MapFile =
        serde_json::from_str(&read(path)?).map_err(|e| parse_err(&origin, e.to_string()))?;
    let source = load_complex(resolve(path, &file.source))?;
    let target = load_complex(resolve(path, &file.target))?;
    let map = map_from_file(&file, &source, &target, &origin)?;
    let warnings = source.warnings.iter().chain(&target.warnings).cloned().collect();
    Ok(LoadedMap { map: Arc::new(map), source, target, warnings })
}

/// Resolves `vertex_map` against already loaded complexes.
pub fn map_from_file(
    file: &MapFile,
    source: &LoadedComplex,
    target: &LoadedComplex,
    origin: &str,
) -> Result<SimplicialMap> {
    let pairs: Vec<(&str, &str)> =
        file.vertex_map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    for (a, b) in &pairs {
        if source.complex.vertex_id(a).is_none() {
            return Err(parse_err(origin, format!("vertex_map: unknown source vertex {a:?}")));
        }
        if target.complex.vertex_id(b).is_none() {
            return Err(parse_err(origin, format!("vertex_map[{a:?}]: unknown target vertex {b:?}")));
        }
    }
    SimplicialMap::from_labels(source.complex.clone(), target.complex.clone(), &pairs)
}

/// Serializes a complex: vertex labels in index order and maximal simplices.
pub fn complex_to_file(k: &SimplicialComplex, positions: Option<&[[f64; 2]]>) -> ComplexFile {
    ComplexFile {
        vertices: k.labels().to_vec(),
        simplices: k
            .maximal_simplices()
            .map(|s| s.vertices().iter().map(|&v| k.label(v).to_string()).collect())
            .collect(),
        positions: positions.map(|p| {
            p.iter().enumerate().map(|(i, xy)| (k.label(i).to_string(), *xy)).collect()
        }),
    }
}

/// Builds a point from labelled weights; they must be nonnegative, sum to 1
/// within 1e-9 and be carried by a simplex of `k`.
pub fn point_from_weights<'a>(
    k: &SimplicialComplex,
    weights: impl IntoIterator<Item = (&'a str, f64)>,
) -> Result<Point> {
    let mut w = Vec::new();
    for (l, c) in weights {
        let v = k.vertex_id(l).ok_or_else(|| Error::NotFound(format!("vertex {l:?}")))?;
        if !(c.is_finite() && c >= -TOL) {
            return Err(Error::Malformed(format!("weight {c} of {l:?}")));
        }
        w.push((v, c.max(0.0)));
    }
    let sum: f64 = w.iter().map(|p| p.1).sum();
    if (sum - 1.0).abs() > TOL {
        return Err(Error::Malformed(format!("weights sum to {sum}, not 1")));
    }
    let p = Point::from_weights(w);
    p.check_in(k)?;
    Ok(p)
}

/// Parses `a=0.5,b=0.5`.
pub fn parse_point(k: &SimplicialComplex, text: &str) -> Result<Point> {
    let mut pairs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (l, c) = match part.split_once('=') {
            Some((l, c)) => {
                let c: f64 = c
                    .trim()
                    .parse()
                    .map_err(|_| Error::Malformed(format!("bad weight in {part:?}")))?;
                (l.trim(), c)
            }
            None => (part, 1.0),
        };
        pairs.push((l, c));
    }
    if pairs.is_empty() {
        return Err(Error::Malformed("empty point".into()));
    }
    point_from_weights(k, pairs)
}

/// Parses `POINT@HEIGHT`; the base may be empty when the height is not
/// positive (`@-1`).
pub fn parse_cone_point(k: &SimplicialComplex, text: &str) -> Result<ConePoint> {
    let (base, height) = text
        .rsplit_once('@')
        .ok_or_else(|| Error::Malformed(format!("{text:?} lacks '@height'")))?;
    let t: f64 = height
        .trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("bad height {height:?}")))?;
    if !t.is_finite() {
        return Err(Error::Malformed(format!("height {t} is not finite")));
    }
    if base.trim().is_empty() {
        if t > 0.0 {
            return Err(Error::Malformed(format!("{text:?}: positive height needs a base point")));
        }
        return Ok(coning_map(&Point::vertex(0), t));
    }
    Ok(coning_map(&parse_point(k, base)?, t))
}

/// `a=0.5,b=0.5`, labels in vertex order, 12 significant digits.
pub fn format_point(k: &SimplicialComplex, p: &Point) -> String {
    p.iter()
        .map(|(v, c)| format!("{}={}", k.label(v), trim_float(c)))
        .collect::<Vec<_>>()
        .join(",")
}

fn trim_float(c: f64) -> String {
    let s = format!("{c:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Loads piecewise linear paths in `k`; consecutive points must share a
/// simplex.
pub fn load_paths(k: &SimplicialComplex, path: impl AsRef<Path>) -> Result<Vec<Vec<Point>>> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let file: PathFile =
        serde_json::from_str(&read(path)?).map_err(|e| parse_err(&origin, e.to_string()))?;
    let mut out = Vec::with_capacity(file.paths.len());
    for (i, p) in file.paths.iter().enumerate() {
        if p.is_empty() {
            return Err(parse_err(&origin, format!("paths[{i}] is empty")));
        }
        let mut pts = Vec::with_capacity(p.len());
        for (j, w) in p.iter().enumerate() {
            let pt = point_from_weights(k, w.iter().map(|(l, c)| (l.as_str(), *c)))
                .map_err(|e| parse_err(&origin, format!("paths[{i}][{j}]: {e}")))?;
            if let Some(prev) = pts.last() {
                let joint = Point::carrier(prev).union(&pt.carrier());
                if !k.contains(&joint) {
                    return Err(parse_err(
                        &origin,
                        format!("paths[{i}][{j}]: segment leaves every simplex"),
                    ));
                }
            }
            pts.push(pt);
        }
        out.push(pts);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_warning_and_positions() {
        let text = r#"{"vertices":["a","b","c"],"simplices":[["a","b","c"]],
            "positions":{"a":[0,0],"b":[1,0],"c":[0,1]}}"#;
        let l = parse_complex(text, "t").unwrap();
        assert_eq!(l.complex.f_vector(), vec![3, 3, 1]);
        assert_eq!(l.warnings.len(), 1);
        assert_eq!(l.positions.unwrap()[2], [0.0, 1.0]);
    }

    #[test]
    fn closed_file_has_no_warning() {
        let text = r#"{"vertices":["a","b"],"simplices":[["a","b"]]}"#;
        assert!(parse_complex(text, "t").unwrap().warnings.is_empty());
    }

    #[test]
    fn unknown_vertex_is_located() {
        let text = r#"{"vertices":["a"],"simplices":[["a","z"]]}"#;
        let e = parse_complex(text, "t").unwrap_err().to_string();
        assert!(e.contains("simplices[0][1]"), "{e}");
    }

    #[test]
    fn repeated_vertex_in_simplex_is_rejected() {
        let text = r#"{"vertices":["a","b"],"simplices":[["a","a"]]}"#;
        assert!(parse_complex(text, "t").is_err());
    }

    #[test]
    fn syntax_error_reports_line() {
        let e = parse_complex("{\n\"vertices\": [,\n", "t").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn point_round_trip() {
        let k = parse_complex(r#"{"vertices":["a","b"],"simplices":[["a","b"]]}"#, "t").unwrap();
        let p = parse_point(&k.complex, "a=0.25, b=0.75").unwrap();
        assert_eq!(format_point(&k.complex, &p), "a=0.25,b=0.75");
        assert_eq!(parse_point(&k.complex, "b").unwrap(), Point::vertex(1));
        assert!(parse_point(&k.complex, "a=0.5").is_err());
        let c = parse_cone_point(&k.complex, "a=0.25,b=0.75@2").unwrap();
        assert_eq!(c.height(), 2.0);
        assert_eq!(parse_cone_point(&k.complex, "@-1").unwrap(), parse_cone_point(&k.complex, "b@-1").unwrap());
        assert!(parse_cone_point(&k.complex, "@1").is_err());
    }
}
