use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use plcontrol::cellulation::build_cellulation;
use plcontrol::cone::cone_distance;
use plcontrol::contractibility::Verdict;
use plcontrol::controlled::{measure_family, ControlledFamily};
use plcontrol::fiber::fiber_over_barycenter;
use plcontrol::homotopy::{sample_points, PointMap, DEFAULT_SEED};
use plcontrol::io::{format_point, load_complex, load_map, load_paths, parse_cone_point, parse_point, LoadedMap};
use plcontrol::metric::{standard_comesh, DistanceOracle, DEFAULT_REFINEMENT};
use plcontrol::svg::cellulation_svg;
use plcontrol::verify::{lift_paths, run_verify, OverallVerdict, VerificationReport, VerifyOptions};
use plcontrol::Point;

#[derive(Parser)]
#[command(name = "plcontrol", version, about = "Controlled homotopy inverses of simplicial maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide contractibility of the fiber over every simplex barycentre.
    CheckFibers {
        map: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the ε-subdivision cellulation of a complex.
    Cellulate {
        complex: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Write an SVG drawing (dimension at most 2).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Evaluate the homotopy inverse g_ε.
    Inverse {
        map: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Points of the target such as `a=0.5,b=0.5`; defaults to all
        /// barycentres.
        #[arg(long = "point")]
        points: Vec<String>,
    },
    /// Measure the control of g_ε, h₁,ε and h₂,ε.
    MeasureControl {
        map: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the full verification pipeline.
    Verify {
        map: PathBuf,
        /// Comma separated ε values; defaults to comesh/2, …, comesh/32.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Relative tolerance on control rows.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Distance in the open cone between two points `POINT@HEIGHT`.
    ConeDistance {
        complex: PathBuf,
        a: String,
        b: String,
    },
    /// ε-lift the piecewise linear paths of a homotopy file.
    Lift {
        map: PathBuf,
        homotopy: PathBuf,
        /// Defaults to comesh/4.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
}

fn load(path: &PathBuf) -> Result<LoadedMap> {
    let m = load_map(path).with_context(|| format!("loading {}", path.display()))?;
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    Ok(m)
}

fn check_fibers(path: &PathBuf, json: bool) -> Result<u8> {
    let m = load(path)?;
    let y = m.map.target();
    let mut rows = Vec::new();
    let (mut bad, mut unknown) = (false, false);
    for sigma in y.simplices() {
        let v = fiber_over_barycenter(&m.map, sigma)?.verdict();
        bad |= matches!(v, Verdict::NotContractible(_));
        unknown |= matches!(v, Verdict::Unknown(_));
        rows.push((y.fmt_simplex(sigma), v.label(), v.reason()));
    }
    if json {
        let out: Vec<_> = rows
            .iter()
            .map(|(s, v, r)| serde_json::json!({"simplex": s, "verdict": v, "reason": r}))
            .collect();
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        for (s, v, r) in &rows {
            println!("{s}\t{v}\t{r}");
        }
    }
    Ok(if bad { 1 } else if unknown { 2 } else { 0 })
}

fn cellulate(path: &PathBuf, eps: f64, svg: Option<&PathBuf>) -> Result<u8> {
    let k = load_complex(path).with_context(|| format!("loading {}", path.display()))?;
    for w in &k.warnings {
        eprintln!("warning: {w}");
    }
    let cells = build_cellulation(k.complex.clone(), eps)?;
    let census = cells.census();
    let euler: i64 = census.iter().enumerate().map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
    println!("cells {}", cells.len());
    println!("census {census:?}");
    println!("euler {euler}");
    if let Some(out) = svg {
        let text = cellulation_svg(&cells, k.positions.as_deref())?;
        std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(0)
}

fn inverse(path: &PathBuf, eps: f64, points: &[String]) -> Result<u8> {
    let m = load(path)?;
    let family = ControlledFamily::from_map(m.map.clone())?;
    let g = family.g(eps)?;
    let y = m.map.target();
    let x = m.map.source();
    let pts: Vec<Point> = if points.is_empty() {
        y.simplices().iter().map(Point::barycenter).collect()
    } else {
        points.iter().map(|p| parse_point(y, p)).collect::<plcontrol::Result<_>>()?
    };
    for p in &pts {
        println!("{} -> {}", format_point(y, p), format_point(x, &g.apply(p)?));
    }
    Ok(0)
}

fn measure_control(path: &PathBuf, eps: f64, samples: usize, seed: u64) -> Result<u8> {
    let m = load(path)?;
    let family = ControlledFamily::from_map(m.map.clone())?;
    let oracle = DistanceOracle::new(m.map.target().clone(), DEFAULT_REFINEMENT)?;
    let sy = sample_points(m.map.target(), 3, samples, seed);
    let sx = sample_points(m.map.source(), 3, samples, seed.wrapping_add(1));
    let c = measure_family(&family, &oracle, &sx, &sy, eps)?;
    println!("epsilon {eps}");
    for (name, r) in [("g", &c.fg), ("h1", &c.h1), ("h2", &c.h2)] {
        println!(
            "{name}\tmeasured {:.9}\tsamples {}\tmargin {:.3e}\t{}",
            r.measured_control,
            r.samples,
            r.lipschitz_margin,
            if r.within(1e-4) { "ok" } else { "EXCEEDS" }
        );
    }
    Ok(if c.fg.within(1e-4) && c.h1.within(1e-4) && c.h2.within(1e-4) { 0 } else { 1 })
}

fn print_report(r: &VerificationReport) {
    println!("comesh {:.9}", r.comesh);
    println!("surjective {}", r.surjective);
    for f in &r.fibers {
        println!("fiber {}\t{}\t{}", f.simplex, f.verdict.verdict, f.verdict.reason);
    }
    for o in &r.obstructions {
        println!(
            "obstruction {}\t{} components, spread {:.6}\t{}",
            o.simplex, o.fiber_components, o.fiber_spread, o.construction
        );
    }
    for c in &r.controls {
        let k = &c.control;
        println!(
            "control eps {:.9}\tg {:.9}\th1 {:.9}\th2 {:.9}\t{}",
            k.epsilon,
            k.fg.measured_control,
            k.h1.measured_control,
            k.h2.measured_control,
            if c.within { "ok" } else { "EXCEEDS" }
        );
    }
    if let Some(b) = &r.bound {
        println!("bound B {:.9}\t{}", b.bound, if b.within { "ok" } else { "EXCEEDS" });
    }
    for s in &r.slices {
        println!(
            "slice t {:.6}\ttarget {:.9}\tmeasured {:.9}\t{}",
            s.height,
            s.target,
            s.measured,
            if s.within { "ok" } else { "EXCEEDS" }
        );
    }
    for f in &r.failures {
        println!("failure {f}");
    }
    println!("verdict {:?}", r.verdict);
}

fn verify(path: &PathBuf, opts: VerifyOptions, json: bool) -> Result<u8> {
    let m = load(path)?;
    let r = run_verify(m.map.clone(), &opts)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        print_report(&r);
    }
    if r.verdict == OverallVerdict::FibersNotContractible {
        let names: Vec<&str> = r.obstructions.iter().map(|o| o.simplex.as_str()).collect();
        eprintln!("error: fibers not contractible over {}", names.join(", "));
    }
    Ok(r.verdict.exit_code() as u8)
}

fn cone(path: &PathBuf, a: &str, b: &str) -> Result<u8> {
    let k = load_complex(path).with_context(|| format!("loading {}", path.display()))?;
    let oracle = DistanceOracle::new(k.complex.clone(), DEFAULT_REFINEMENT)?;
    let a = parse_cone_point(&k.complex, a)?;
    let b = parse_cone_point(&k.complex, b)?;
    println!("{:.9}", cone_distance(&oracle, &a, &b)?);
    Ok(0)
}

fn lift(path: &PathBuf, homotopy: &PathBuf, eps: Option<f64>, steps: usize) -> Result<u8> {
    let m = load(path)?;
    let paths = load_paths(m.map.target(), homotopy)?;
    let eps = eps.unwrap_or_else(|| standard_comesh(m.map.target()) / 4.0);
    if !(eps > 0.0) {
        bail!("epsilon must be positive");
    }
    let family = Arc::new(ControlledFamily::from_map(m.map.clone())?);
    let r = lift_paths(family, paths, eps, steps)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(if r.within { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::CheckFibers { map, json } => check_fibers(&map, json),
        Command::Cellulate { complex, epsilon, svg } => cellulate(&complex, epsilon, svg.as_ref()),
        Command::Inverse { map, epsilon, points } => inverse(&map, epsilon, &points),
        Command::MeasureControl { map, epsilon, samples, seed } => measure_control(&map, epsilon, samples, seed),
        Command::Verify { map, schedule, seed, tol, samples, json } => {
            let opts = VerifyOptions { schedule, seed, tol, random_samples: samples, ..VerifyOptions::default() };
            verify(&map, opts, json)
        }
        Command::ConeDistance { complex, a, b } => cone(&complex, &a, &b),
        Command::Lift { map, homotopy, epsilon, steps } => lift(&map, &homotopy, epsilon, steps),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
