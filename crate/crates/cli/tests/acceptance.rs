//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plcontrol::cellulation::build_cellulation;
use plcontrol::cone::{cone_distance, cone_formula, coning_map};
use plcontrol::contractibility::{contractibility_verdict, Verdict};
use plcontrol::controlled::measure_family;
use plcontrol::fiber::fiber_over_barycenter;
use plcontrol::fixtures::{self, ex44_coordinates, ex44_height, ex44_region, Ex44Region};
use plcontrol::homology::homology;
use plcontrol::homotopy::{measure_homotopy_control, random_point_in, sample_points, Homotopy, PointMap, DEFAULT_SEED};
use plcontrol::metric::{mesh_comesh, standard_comesh, DistanceOracle, DEFAULT_REFINEMENT};
use plcontrol::verify::{dyadic_schedule, run_verify, OverallVerdict, VerificationReport, VerifyOptions, IDENTITY_TOL};
use plcontrol::{Point, SimplicialComplex};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let r = f();
    let dt = start.elapsed();
    match r {
        Ok(m) if dt <= limit => Ok(format!("{m} ({:.2} s)", dt.as_secs_f64())),
        Ok(m) => Err(format!("{m}; took {:.2} s, limit {:.0} s", dt.as_secs_f64(), limit.as_secs_f64())),
        Err(m) => Err(format!("{m} ({:.2} s)", dt.as_secs_f64())),
    }
}

fn all_fixtures() -> Vec<(&'static str, Arc<SimplicialComplex>)> {
    vec![
        ("D1", fixtures::d1()),
        ("D2", fixtures::d2()),
        ("BD2", fixtures::bd2()),
        ("boundary tetrahedron", fixtures::boundary_tetrahedron()),
        ("cone BD2", fixtures::cone_bd2()),
        ("EX44 source", fixtures::ex44_source()),
        ("EX44 target", fixtures::ex44_target()),
    ]
}

fn metric_anchors() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, k) in all_fixtures() {
        let (mesh, comesh) = mesh_comesh(&k, None).map_err(|e| format!("{name}: {e}"))?;
        let expected = if k.dim() >= 2 { 1.0 / 6f64.sqrt() } else { 0.5f64.sqrt() };
        let err = (mesh - 2f64.sqrt()).abs().max((comesh - expected).abs());
        worst = worst.max(err);
        if err > 1e-9 {
            return Err(format!("{name}: mesh {mesh}, comesh {comesh}"));
        }
    }
    Ok(format!("7 fixtures, worst deviation {worst:.1e}"))
}

/// Cells `base ⩽ σ₀ < … < σ_m` by dimension `dim base + m`.
fn chain_census(k: &SimplicialComplex) -> Vec<usize> {
    let faces: Vec<BTreeSet<usize>> = k.simplices().iter().map(|s| s.vertices().iter().copied().collect()).collect();
    let mut census = vec![0usize; 2 * k.dim() + 1];
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for b in &faces {
        for (i, s0) in faces.iter().enumerate() {
            if b.is_subset(s0) {
                stack.push((b.len() - 1, i, 0));
            }
        }
    }
    while let Some((bd, top, m)) = stack.pop() {
        census[bd + m] += 1;
        for (j, g) in faces.iter().enumerate() {
            if faces[top].len() < g.len() && faces[top].is_subset(g) {
                stack.push((bd, j, m + 1));
            }
        }
    }
    while census.len() > 1 && census.last() == Some(&0) {
        census.pop();
    }
    census
}

fn flag_census() -> Outcome {
    let d1 = build_cellulation(fixtures::d1(), 0.1).map_err(|e| e.to_string())?;
    let d2k = fixtures::d2();
    let d2 = build_cellulation(d2k.clone(), 0.1).map_err(|e| e.to_string())?;
    let census = d2.census();
    let euler: i64 = census.iter().enumerate().map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
    check(
        d1.len() == 7 && d2.len() == 43 && census == vec![12, 21, 10] && euler == 1 && chain_census(&d2k) == census
            && chain_census(&fixtures::d1()) == d1.census(),
        format!("D1 {} cells, D2 {} cells {:?}, euler {euler}, oracle {:?}", d1.len(), d2.len(), census, chain_census(&d2k)),
    )
}

fn straight_line_control() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    let mut worst_track: f64 = 0.0;
    let mut tracks = 0usize;
    let mut samples = 0usize;
    for (name, k) in [("D2", fixtures::d2()), ("EX44 target", fixtures::ex44_target())] {
        let oracle = DistanceOracle::new(k.clone(), DEFAULT_REFINEMENT).map_err(|e| e.to_string())?;
        let pts = sample_points(&k, 4, 10_000, DEFAULT_SEED);
        for eps in dyadic_schedule(standard_comesh(&k), 5) {
            let cells = Arc::new(build_cellulation(k.clone(), eps).map_err(|e| e.to_string())?);
            let h = cells.straightline();
            let r = measure_homotopy_control(&oracle, &pts, eps, 9, |y, t| Ok((y.clone(), h.at(y, t)?)))
                .map_err(|e| e.to_string())?;
            samples = pts.len();
            worst_ratio = worst_ratio.max(r.measured_control / eps);
            if !r.within(1e-4) {
                return Err(format!("{name}, ε = {eps}: control {}", r.measured_control));
            }
            for (c, flag) in cells.flags().iter().enumerate() {
                if flag.dim() != 0 || flag.chain[0].len() == 1 {
                    continue;
                }
                let y = &cells.vertex_images(c)[0][0];
                let end = h.at(y, 1.0).map_err(|e| e.to_string())?;
                let len = oracle.distance(y, &end).map_err(|e| e.to_string())?;
                worst_track = worst_track.max((len - eps).abs());
                tracks += 1;
            }
        }
    }
    check(
        worst_ratio <= 1.0 + 1e-4 && worst_track <= 1e-9 && samples >= 10_000,
        format!("{samples} samples per complex, control/ε ≤ {worst_ratio:.6}, {tracks} vertex tracks within {worst_track:.1e} of ε"),
    )
}

fn proof_identities(reports: &[(&str, VerificationReport)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, r) in reports {
        if r.identities.is_empty() {
            return Err(format!("{name}: no identity rows"));
        }
        for row in &r.identities {
            worst = worst.max(row.errors.worst());
        }
    }
    check(worst <= IDENTITY_TOL, format!("MAP_COLLAPSE and EX44, worst identity error {worst:.1e}"))
}

fn family_law(reports: &[(&str, VerificationReport)], elapsed: Duration) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for (name, r) in reports {
        for c in &r.controls {
            let k = &c.control;
            for rep in [&k.fg, &k.h1, &k.h2] {
                worst = worst.max(rep.measured_control / k.epsilon);
            }
            if !c.within {
                return Err(format!("{name}: ε = {} exceeds", k.epsilon));
            }
            rows += 1;
        }
    }
    let ok = worst <= 1.0 + 1e-4 && rows == 10 && elapsed <= Duration::from_secs(120);
    check(ok, format!("{rows} ε rows, worst control/ε {worst:.6}, {:.1} s", elapsed.as_secs_f64()))
}

fn ex44_reproduction() -> Outcome {
    let family = fixtures::ex44_explicit_family().map_err(|e| e.to_string())?;
    let f = family.map().clone();
    let x = f.source().clone();
    let y = f.target().clone();
    let gamma = family.gamma().clone();
    let rho = y.simplex_by_labels(&["0", "e1+e2"]).map_err(|e| e.to_string())?;
    let s1 = y.simplex_by_labels(&["0", "e1", "e1+e2"]).map_err(|e| e.to_string())?;
    let s2 = y.simplex_by_labels(&["0", "e2", "e1+e2"]).map_err(|e| e.to_string())?;
    let v = plcontrol::Simplex::vertex(rho.vertices()[0]);

    // The four displayed extension formulas and the three base heights.
    type Formula = fn(&[f64]) -> f64;
    let formulas: [(Vec<plcontrol::Simplex>, Formula); 4] = [
        (vec![rho.clone(), s1.clone()], |t| 0.5 * t[0]),
        (vec![rho.clone(), s2.clone()], |t| 0.5 * t[0] + t[1]),
        (vec![v.clone(), rho.clone(), s1.clone()], |t| 0.5 * t[0] + 0.5 * t[1]),
        (vec![v.clone(), rho.clone(), s2.clone()], |t| 0.5 * t[0] + 0.5 * t[1] + t[2]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut formula_err: f64 = 0.0;
    for (chain, h) in &formulas {
        for _ in 0..200 {
            let t = random_point_in(&(0..chain.len()).collect::<Vec<_>>(), &mut rng);
            let t: Vec<f64> = (0..chain.len()).map(|i| t.coord(i)).collect();
            let phi = gamma.fiber_value(chain, &t).map_err(|e| e.to_string())?;
            formula_err = formula_err.max((ex44_height(&f, &chain[0], &phi) - h(&t)).abs());
        }
    }
    for (s, want) in [(&s1, 0.0), (&rho, 0.5), (&s2, 1.0)] {
        let phi = gamma.fiber_value(std::slice::from_ref(s), &[1.0]).map_err(|e| e.to_string())?;
        formula_err = formula_err.max((ex44_height(&f, s, &phi) - want).abs());
    }
    if formula_err > 1e-12 {
        return Err(format!("γ deviates from the displayed formulas by {formula_err:.1e}"));
    }

    let oracle = DistanceOracle::new(y.clone(), DEFAULT_REFINEMENT).map_err(|e| e.to_string())?;
    let ys = sample_points(&y, 4, 3000, DEFAULT_SEED);
    let xs = sample_points(&x, 2, 200, DEFAULT_SEED + 1);
    let (mut first, mut second, mut collar) = (0usize, 0usize, 0usize);
    let mut worst: f64 = 0.0;
    for eps in dyadic_schedule(standard_comesh(&y), 5) {
        let g = family.g(eps).map_err(|e| e.to_string())?;
        let cells = g.cellulation().clone();
        for p in &ys {
            let (c, _) = cells.invert(p).map_err(|e| e.to_string())?;
            let z = ex44_coordinates(&x, &g.apply(p).map_err(|e| e.to_string())?)[2];
            match ex44_region(&y, &cells.flags()[c].chain[0]) {
                Ex44Region::First => {
                    first += 1;
                    if z.abs() > 1e-9 {
                        return Err(format!("σ₁ point {p} lifted to height {z}"));
                    }
                }
                Ex44Region::Second => {
                    second += 1;
                    if (z - 1.0).abs() > 1e-9 {
                        return Err(format!("σ₂ point {p} lifted to height {z}"));
                    }
                }
                Ex44Region::Shared => {
                    collar += 1;
                    if !(-1e-9..=1.0 + 1e-9).contains(&z) {
                        return Err(format!("collar point {p} lifted to height {z}"));
                    }
                }
            }
        }
        let control = measure_family(&family, &oracle, &xs, &ys, eps).map_err(|e| e.to_string())?;
        for r in [&control.fg, &control.h1, &control.h2] {
            worst = worst.max(r.measured_control / eps);
        }
    }
    check(
        worst <= 1.0 + 1e-4 && first > 0 && second > 0 && collar > 0,
        format!("formulas exact, {first} σ₁ points at z = 0, {second} σ₂ points at z = 1, {collar} collar points in [0, 1], control/ε ≤ {worst:.6}"),
    )
}

fn open_cone() -> Outcome {
    let cases = [cone_formula(1.0, 2.0, 2.0), cone_formula(1.0, -1.0, -3.0), cone_formula(0.0, 1.0, 5.0)];
    if cases != [2.0, 2.0, 4.0] {
        return Err(format!("formula cases {cases:?}"));
    }
    let d2 = fixtures::d2();
    let oracle = DistanceOracle::new(d2.clone(), DEFAULT_REFINEMENT).map_err(|e| e.to_string())?;
    let a = Point::vertex(0);
    let b = Point::vertex(1);
    let via_points = [
        cone_distance(&oracle, &coning_map(&a, -1.0), &coning_map(&b, -3.0)).map_err(|e| e.to_string())?,
        cone_distance(&oracle, &coning_map(&a, 1.0), &coning_map(&a, 5.0)).map_err(|e| e.to_string())?,
    ];
    if via_points != [2.0, 4.0] {
        return Err(format!("cone points give {via_points:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let tri = [0, 1, 2];
    for _ in 0..10_000 {
        let m = random_point_in(&tri, &mut rng);
        let n = random_point_in(&tri, &mut rng);
        let t: f64 = rng.gen_range(0.0..50.0);
        let at_t = cone_distance(&oracle, &coning_map(&m, t), &coning_map(&n, t)).map_err(|e| e.to_string())?;
        let at_1 = cone_distance(&oracle, &coning_map(&m, 1.0), &coning_map(&n, 1.0)).map_err(|e| e.to_string())?;
        if at_t != t * at_1 {
            return Err(format!("scaling fails at t = {t}: {at_t} vs {}", t * at_1));
        }
    }
    let mut slack = f64::INFINITY;
    for _ in 0..10_000 {
        let p: Vec<_> = (0..3)
            .map(|_| coning_map(&random_point_in(&tri, &mut rng), rng.gen_range(-5.0..50.0)))
            .collect();
        let d = |i: usize, j: usize| cone_distance(&oracle, &p[i], &p[j]).unwrap();
        let s = d(0, 2) + d(2, 1) - d(0, 1);
        slack = slack.min(s);
        if s < -1e-9 || d(0, 1) != d(1, 0) {
            return Err(format!("triangle inequality fails by {s}"));
        }
    }
    Ok(format!("cases 2, 2, 4 exact; scaling exact on 10⁴ pairs; triangle slack ≥ {slack:.1e} on 10⁴ triples"))
}

fn assembly(reports: &[(&str, VerificationReport)]) -> Outcome {
    let mut lines = Vec::new();
    for (name, r) in reports {
        let b = r.bound.as_ref().ok_or_else(|| format!("{name}: no bound"))?;
        if b.bound > 1.0 + 1e-3 {
            return Err(format!("{name}: B = {}", b.bound));
        }
        if r.slices.len() != 3 {
            return Err(format!("{name}: {} slices", r.slices.len()));
        }
        for s in &r.slices {
            if s.measured > s.target * (1.0 + 1e-3) {
                return Err(format!("{name}: slice at t = {} measured {} against {}", s.height, s.measured, s.target));
            }
        }
        lines.push(format!("{name} B = {:.6}", b.bound));
    }
    let collapse = &reports[0].1;
    let comesh = collapse.comesh;
    let s = &collapse.slices[0];
    if (s.height - 2.0 / comesh).abs() > 1e-12 || s.measured > comesh / 2.0 * (1.0 + 1e-2) {
        return Err(format!("MAP_COLLAPSE round trip at 2/comesh gives {}", s.measured));
    }
    Ok(format!("{}; slices at 2, 4, 8 / comesh within B/t", lines.join(", ")))
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn negative_control() -> Outcome {
    let f = fixtures::map_bad();
    let ab = f.target().simplex_by_labels(&["a", "b"]).map_err(|e| e.to_string())?;
    let fiber = fiber_over_barycenter(&f, &ab).map_err(|e| e.to_string())?;
    let fv = fiber.triangulation.f_vector();
    let h = homology(&fiber.triangulation);
    let verdict = fiber.verdict();
    if fv != vec![2] || h.betti.first() != Some(&1) || !matches!(verdict, Verdict::NotContractible(_)) {
        return Err(format!("fiber f-vector {fv:?}, reduced Betti {:?}, verdict {}", h.betti, verdict.label()));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_plcontrol"))
        .arg("verify")
        .arg(fixture_path("map_bad.json"))
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    check(
        out.status.code() == Some(1) && stderr.contains("ab"),
        format!("fiber is two points, b̃₀ = 1; verify exited {:?}: {}", out.status.code(), stderr.trim()),
    )
}

fn contractibility() -> Outcome {
    let mut notes = Vec::new();
    for (name, k) in [("D2", fixtures::d2()), ("cone BD2", fixtures::cone_bd2())] {
        match contractibility_verdict(&k) {
            Verdict::Contractible(seq) if seq.is_full() && homology(&k).is_trivial() => notes.push(format!("{name} contractible")),
            v => return Err(format!("{name}: {}", v.label())),
        }
    }
    for (name, k, d) in [("BD2", fixtures::bd2(), 1), ("boundary tetrahedron", fixtures::boundary_tetrahedron(), 2)] {
        let betti = homology(&k).betti;
        match contractibility_verdict(&k) {
            Verdict::NotContractible(_) if betti.get(d) == Some(&1) => notes.push(format!("{name} not contractible (b̃{d} = 1)")),
            v => return Err(format!("{name}: {} with Betti {betti:?}", v.label())),
        }
    }
    Ok(notes.join(", "))
}

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let start = Instant::now();
    let reports: Result<Vec<(&str, VerificationReport)>, String> = (|| {
        let collapse = run_verify(fixtures::map_collapse(), &opts).map_err(|e| e.to_string())?;
        let ex44 = run_verify(fixtures::ex44_map(), &opts).map_err(|e| e.to_string())?;
        Ok(vec![("MAP_COLLAPSE", collapse), ("EX44", ex44)])
    })();
    let elapsed = start.elapsed();
    let reports = reports.and_then(|r| {
        for (name, rep) in &r {
            if rep.verdict != OverallVerdict::TheoremConsistent {
                return Err(format!("{name}: verdict {:?}, failures {:?}", rep.verdict, rep.failures));
            }
        }
        Ok(r)
    });
    let with_reports = |f: &dyn Fn(&[(&str, VerificationReport)]) -> Outcome| match &reports {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };

    let results: Vec<(&str, Outcome)> = vec![
        ("metric anchors", timed(Duration::from_secs(1), metric_anchors)),
        ("flag cellulation census", timed(Duration::from_secs(1), flag_census)),
        ("straight-line homotopy control", timed(Duration::from_secs(30), straight_line_control)),
        ("proof identities", with_reports(&proof_identities)),
        ("controlled-family law", with_reports(&|r| family_law(r, elapsed))),
        ("EX44 reproduction", ex44_reproduction()),
        ("open-cone metric", open_cone()),
        ("assembly and slices", with_reports(&assembly)),
        ("negative control", negative_control()),
        ("contractibility engine", contractibility()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(m) => println!("criterion {:>2} PASS  {name}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {m}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
