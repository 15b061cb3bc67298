use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use simplicial_metric::checks::{run_suites, summarize, CheckConfig, SUITES};
use simplicial_metric::extension::ExtendedMetric;
use simplicial_metric::generators::{self, GeneratorSpec, DEFAULT_MAX_DIM};
use simplicial_metric::io::{
    complex_to_json, point_from_json, point_to_json, read_complex, read_metric, witness_to_json,
};
use simplicial_metric::oracle::{grid_tolerance, GridOracle};
use simplicial_metric::probes::{
    decay_probe, dd_convergence_probe, dd_divergence_probe, default_depths, equivalence_windows_check, DecayConfig,
    ProbeConfig, ProbeReport, RaySpec, Slot, Verdict,
};
use simplicial_metric::sampling::{random_grid_point, random_point};
use simplicial_metric::vertex_metrics::{hyperbolicity_delta, word_metric, DistanceTable, VertexMetric};
use simplicial_metric::{BarycentricPoint, Error, SimplicialComplex};

const EXIT_VALIDATION: u8 = 1;
const EXIT_SUITE: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Workbench for metric extensions from the vertices of a simplicial
/// complex to the whole complex.
#[derive(Parser, Debug)]
#[command(name = "metric-ext", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a complex and, optionally, a vertex metric on it.
    Validate {
        #[arg(short, long)]
        complex: PathBuf,
        #[arg(short, long)]
        metric: Option<String>,
    },
    /// Generate a complex and print it as JSON.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Write to this file instead of stdout.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Distance between two points.
    Dist {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = DistKind::Extended)]
        kind: DistKind,
        #[arg(short = 'x', long)]
        x: String,
        #[arg(short = 'y', long)]
        y: String,
    },
    /// Double difference of four points under the extended metric.
    Dd {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        x: String,
        #[arg(long)]
        x2: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        y2: String,
    },
    /// Gromov product of `a` and `b` at `at` under the extended metric.
    Gp {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'a', long)]
        a: String,
        #[arg(short = 'b', long)]
        b: String,
        #[arg(long)]
        at: String,
    },
    /// Boundary-behaviour experiments.
    Probe {
        #[command(subcommand)]
        kind: ProbeKind,
    },
    /// Compare the exact path metric with the grid discretization.
    OracleCompare {
        #[command(flatten)]
        input: Input,
        /// Grid resolution n (step 1/n).
        #[arg(long, default_value_t = 16)]
        resolution: u32,
        /// Number of random grid pairs, used unless both points are given.
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(short = 'x', long, requires = "y")]
        x: Option<String>,
        #[arg(short = 'y', long, requires = "x")]
        y: Option<String>,
    },
    /// Run property suites.
    Check {
        #[command(flatten)]
        input: Input,
        /// Suite names, comma separated, or `all`.
        #[arg(long, default_value = "all", value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 500)]
        triples: usize,
        #[arg(long, default_value_t = 300)]
        tuples: usize,
    },
}

#[derive(Args, Debug)]
struct Input {
    #[arg(short, long)]
    complex: PathBuf,
    /// Metric file, or `word` for the word metric.
    #[arg(short, long, default_value = "word")]
    metric: String,
}

#[derive(Subcommand, Debug)]
enum GenKind {
    Simplex {
        #[arg(long)]
        dimension: usize,
    },
    Path {
        #[arg(long)]
        vertices: usize,
    },
    Cycle {
        #[arg(long)]
        vertices: usize,
    },
    Tree {
        #[arg(long)]
        branching: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Truncated Rips complex of the 1-skeleton of an existing complex.
    RipsGraph {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Truncated Rips complex of points read from a JSON array of coordinates.
    RipsPoints {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Random connected flag complex; uses the global seed.
    Random {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// A generator spec given as JSON, e.g. `{"kind":"cycle","vertices":6}`.
    Spec { spec: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DistKind {
    Vertex,
    Bilinear,
    L1path,
    Extended,
}

#[derive(Subcommand, Debug)]
enum ProbeKind {
    /// Double difference as ray slots move outward.
    Convergence(SlotArgs),
    /// Growth of a double difference with two slots on the same ray.
    Divergence(SlotArgs),
    /// Decay of `⟨u,c|a,b⟩` with the distance of `a,b` from `u,c`.
    Decay {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
    },
    /// Double-difference window and fitted comparison with the word metric.
    Windows {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct SlotArgs {
    #[command(flatten)]
    input: Input,
    /// Four slots in order x, x', y, y'. Each is a JSON point, `ray:BASE:TARGET`
    /// (the word geodesic from BASE to TARGET) or `ray:V0,V1,...`.
    #[arg(long = "slot", num_args = 1, required = true)]
    slots: Vec<String>,
    /// Comma-separated depths; by default every depth the rays allow.
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<usize>>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::InternalInconsistency(_)) { EXIT_INCONSISTENT } else { EXIT_VALIDATION };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn threads() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var("METRIC_EXT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map_or(available, |n| n.min(available.max(1)))
}

fn load(input: &Input) -> Result<(SimplicialComplex, VertexMetric), Failure> {
    let complex = read_complex(&input.complex)?;
    let word = word_metric(&complex)?;
    let metric = read_metric(&input.metric)?.build(&complex, &word)?;
    Ok((complex, metric))
}

fn point(complex: &SimplicialComplex, text: &str) -> Result<BarycentricPoint, Failure> {
    Ok(point_from_json(complex, text)?)
}

/// Prints to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn emit(cli: &Cli, value: Value, text: impl FnOnce() -> String) {
    if cli.json {
        say(&serde_json::to_string_pretty(&value).expect("JSON value serializes"));
    } else {
        say(&text());
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { complex, metric } => validate(cli, complex, metric.as_deref()),
        Command::Gen { kind, output } => gen(cli, kind, output.as_ref()),
        Command::Dist { input, kind, x, y } => dist(cli, input, *kind, x, y),
        Command::Dd { input, x, x2, y, y2 } => {
            let (complex, metric) = load(input)?;
            let ext = ExtendedMetric::new(&complex, metric)?;
            let p = [x, x2, y, y2].map(|s| point(&complex, s));
            let [x, x2, y, y2] = p;
            let value = ext.double_difference(&x?, &x2?, &y?, &y2?)?;
            emit(cli, json!({ "double_difference": value }), || format!("{value}"));
            Ok(0)
        }
        Command::Gp { input, a, b, at } => {
            let (complex, metric) = load(input)?;
            let ext = ExtendedMetric::new(&complex, metric)?;
            let value = ext.gromov_product(&point(&complex, a)?, &point(&complex, b)?, &point(&complex, at)?)?;
            emit(cli, json!({ "gromov_product": value }), || format!("{value}"));
            Ok(0)
        }
        Command::Probe { kind } => probe(cli, kind),
        Command::OracleCompare { input, resolution, pairs, x, y } => {
            oracle_compare(cli, input, *resolution, *pairs, x.as_deref().zip(y.as_deref()))
        }
        Command::Check { input, suite, pairs, triples, tuples } => {
            check(cli, input, suite, CheckConfig {
                seed: cli.seed,
                pairs: *pairs,
                triples: *triples,
                tuples: *tuples,
                threads: threads(),
                ..CheckConfig::default()
            })
        }
    }
}

fn validate(cli: &Cli, path: &Path, metric: Option<&str>) -> Outcome {
    let complex = read_complex(path)?;
    let word = word_metric(&complex)?;
    let mut summary = json!({
        "vertices": complex.vertex_count(),
        "maximal_simplices": complex.maximal_simplices().len(),
        "dimension": complex.dimension(),
        "diameter": word.diameter(),
    });
    if let Some(spec) = metric {
        let m = read_metric(spec)?.build(&complex, &word)?;
        summary["C"] = json!(m.linear_bound());
        if let Some(q) = m.qi() {
            summary["A"] = json!(q.a);
            summary["B"] = json!(q.b);
        }
        if complex.vertex_count() <= 60 {
            summary["delta"] = json!(hyperbolicity_delta(&m));
        }
    }
    emit(cli, summary.clone(), || {
        let fields = summary.as_object().expect("summary is an object");
        let parts: Vec<String> = fields.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        format!("valid: {}", parts.join(", "))
    });
    Ok(0)
}

fn gen(cli: &Cli, kind: &GenKind, output: Option<&PathBuf>) -> Outcome {
    let spec = match kind {
        GenKind::Simplex { dimension } => GeneratorSpec::Simplex { dimension: *dimension },
        GenKind::Path { vertices } => GeneratorSpec::Path { vertices: *vertices },
        GenKind::Cycle { vertices } => GeneratorSpec::Cycle { vertices: *vertices },
        GenKind::Tree { branching, depth } => GeneratorSpec::Tree { branching: *branching, depth: *depth },
        GenKind::RipsGraph { from, radius, max_dim } => {
            let base = read_complex(from)?;
            GeneratorSpec::RipsGraph {
                vertices: base.vertex_count(),
                edges: base.edges(),
                radius: *radius,
                max_dim: *max_dim,
            }
        }
        GenKind::RipsPoints { points, radius, max_dim } => {
            let text = std::fs::read_to_string(points)
                .map_err(|e| Failure::from(Error::Parse(format!("{}: {e}", points.display()))))?;
            let points = serde_json::from_str(&text).map_err(|e| Failure::from(Error::Parse(e.to_string())))?;
            GeneratorSpec::RipsPoints { points, radius: *radius, max_dim: *max_dim }
        }
        GenKind::Random { vertices, density, max_dim } => {
            GeneratorSpec::Random { vertices: *vertices, density: *density, seed: cli.seed, max_dim: *max_dim }
        }
        GenKind::Spec { spec } => {
            serde_json::from_str(spec).map_err(|e| usage(format!("bad generator spec: {e}")))?
        }
    };
    let complex = generators::generate(&spec)?;
    let text = complex_to_json(&complex);
    match output {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Failure { code: EXIT_VALIDATION, message: format!("{}: {e}", path.display()) })?,
        None => say(&text),
    }
    Ok(0)
}

fn dist(cli: &Cli, input: &Input, kind: DistKind, x: &str, y: &str) -> Outcome {
    let (complex, metric) = load(input)?;
    let (x, y) = (point(&complex, x)?, point(&complex, y)?);
    match kind {
        DistKind::Vertex => {
            let (Some(u), Some(v)) = (x.as_vertex(), y.as_vertex()) else {
                return Err(usage("--kind vertex needs two vertices"));
            };
            let value = metric.dist(u, v);
            emit(cli, json!({ "kind": "vertex", "value": value }), || format!("{value}"));
        }
        DistKind::Bilinear => {
            let value = simplicial_metric::extension::bilinear_extension(&metric, &x, &y);
            emit(cli, json!({ "kind": "bilinear", "value": value }), || format!("{value}"));
        }
        DistKind::L1path => {
            let ext = ExtendedMetric::new(&complex, metric)?;
            let d = ext.path_metric().distance(&x, &y, ext.options())?;
            let witness = witness_to_json(&complex, &d.witness);
            let bounds: Vec<Value> =
                d.lower_bounds.iter().map(|b| json!({ "kind": b.kind.name(), "value": b.value })).collect();
            emit(cli, json!({ "kind": "l1path", "value": d.value, "witness": witness, "lower_bounds": bounds }), || {
                format!("{}\nwitness: {}", d.value, path_text(&complex, &d.witness.points))
            });
        }
        DistKind::Extended => {
            let ext = ExtendedMetric::new(&complex, metric)?;
            let d = ext.distance(&x, &y)?;
            let path = ext.path_metric().distance(&x, &y, ext.options())?;
            let witness = witness_to_json(&complex, &path.witness);
            emit(
                cli,
                json!({
                    "kind": "extended",
                    "value": d.value,
                    "branch": d.branch.name(),
                    "bilinear": d.bilinear,
                    "l1_path": path.value,
                    "scale": ext.scale(),
                    "witness": witness,
                }),
                || {
                    let mut s = format!("{} (branch {})\nbilinear {}", d.value, d.branch.name(), d.bilinear);
                    s += &format!("\nl1 path {} (scaled {})", path.value, ext.scale() * path.value);
                    s + &format!("\nwitness: {}", path_text(&complex, &path.witness.points))
                },
            );
        }
    }
    Ok(0)
}

fn path_text(complex: &SimplicialComplex, points: &[BarycentricPoint]) -> String {
    points.iter().map(|p| point_to_json(complex, p).to_string()).collect::<Vec<_>>().join(" -> ")
}

fn parse_slot(complex: &SimplicialComplex, ext: &ExtendedMetric<'_>, text: &str) -> Result<Slot, Failure> {
    let Some(ray) = text.strip_prefix("ray:") else {
        return Ok(Slot::Point(point(complex, text)?));
    };
    let word = ext.word_metric();
    if ray.contains(',') {
        let vertices = ray.split(',').map(|l| complex.vertex_id(l.trim())).collect::<Result<Vec<_>, _>>()?;
        return Ok(Slot::Ray(RaySpec::new(complex, word, vertices)?));
    }
    let (base, target) = ray.split_once(':').ok_or_else(|| usage(format!("bad ray `{text}`")))?;
    Ok(Slot::Ray(RaySpec::toward(complex, word, complex.vertex_id(base)?, complex.vertex_id(target)?)))
}

fn print_report(cli: &Cli, report: &ProbeReport) {
    emit(cli, serde_json::to_value(report).expect("report serializes"), || report.to_text());
}

fn probe(cli: &Cli, kind: &ProbeKind) -> Outcome {
    match kind {
        ProbeKind::Convergence(args) | ProbeKind::Divergence(args) => {
            if args.slots.len() != 4 {
                return Err(usage(format!("expected 4 --slot values, got {}", args.slots.len())));
            }
            let (complex, metric) = load(&args.input)?;
            let ext = ExtendedMetric::new(&complex, metric)?;
            let slots: Vec<Slot> = args.slots.iter().map(|s| parse_slot(&complex, &ext, s)).collect::<Result<_, _>>()?;
            let slots: [Slot; 4] = slots.try_into().expect("four slots");
            let config = ProbeConfig::default();
            let depths = args.depths.clone().unwrap_or_else(|| default_depths(&slots, &config));
            let report = if matches!(kind, ProbeKind::Convergence(_)) {
                dd_convergence_probe(&ext, &slots, &depths, &config)?
            } else {
                dd_divergence_probe(&ext, &slots, &depths, &config)?
            };
            print_report(cli, &report);
            Ok(if matches!(report.verdict, Verdict::Violated(_)) { EXIT_SUITE } else { 0 })
        }
        ProbeKind::Decay { input, samples } => {
            let (complex, metric) = load(input)?;
            let ext = ExtendedMetric::new(&complex, metric)?;
            let config = DecayConfig { samples: *samples, seed: cli.seed, ..DecayConfig::default() };
            let (report, _) = decay_probe(&ext, &config)?;
            print_report(cli, &report);
            Ok(0)
        }
        ProbeKind::Windows { input, samples } => {
            let (complex, metric) = load(input)?;
            let ext = ExtendedMetric::new(&complex, metric)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let n = complex.vertex_count();
            let quads: Vec<[BarycentricPoint; 4]> = (0..*samples)
                .map(|i| {
                    std::array::from_fn(|_| {
                        if i % 2 == 0 {
                            BarycentricPoint::vertex(rand::Rng::gen_range(&mut rng, 0..n))
                        } else {
                            random_point(&mut rng, &complex)
                        }
                    })
                })
                .collect();
            let report = equivalence_windows_check(&ext, &quads)?;
            let failed = report.hard.is_failure();
            emit(cli, serde_json::to_value(&report).expect("report serializes"), || {
                format!(
                    "window: {:?}\nchecked: {}\nvertex quadruples: {}\nalpha: {:?}\nbeta: {:?}",
                    report.hard, report.checked, report.vertex_quadruples, report.alpha, report.beta
                )
            });
            Ok(if failed { EXIT_SUITE } else { 0 })
        }
    }
}

fn oracle_compare(cli: &Cli, input: &Input, n: u32, pairs: usize, given: Option<(&str, &str)>) -> Outcome {
    let (complex, metric) = load(input)?;
    let ext = ExtendedMetric::new(&complex, metric)?;
    let oracle = GridOracle::new(&complex, n)?;
    let points: Vec<(BarycentricPoint, BarycentricPoint)> = match given {
        Some((x, y)) => vec![(point(&complex, x)?, point(&complex, y)?)],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            (0..pairs).map(|_| (random_grid_point(&mut rng, &complex, n), random_grid_point(&mut rng, &complex, n))).collect()
        }
    };
    let dim = complex.dimension().max(1);
    let mut rows = Vec::new();
    let mut bad = 0;
    for (x, y) in &points {
        let exact = ext.l1_path(x, y)?;
        let grid = oracle.distance(x, y)?;
        let tol = grid_tolerance(dim, n, exact);
        let ok = exact <= grid + 1e-9 && grid - exact <= tol;
        bad += usize::from(!ok);
        rows.push(json!({
            "x": point_to_json(&complex, x),
            "y": point_to_json(&complex, y),
            "exact": exact,
            "grid": grid,
            "tolerance": tol,
            "ok": ok,
        }));
    }
    let summary = json!({ "resolution": n, "grid_nodes": oracle.node_count(), "pairs": rows.len(), "failures": bad });
    emit(cli, json!({ "summary": summary, "pairs": rows }), || {
        let mut s = String::from("exact        grid         gap\n");
        for r in &rows {
            let (e, g) = (r["exact"].as_f64().unwrap_or(0.0), r["grid"].as_f64().unwrap_or(0.0));
            s += &format!("{e:<12.6} {g:<12.6} {:.2e}{}\n", g - e, if r["ok"] == json!(true) { "" } else { "  FAIL" });
        }
        s + &format!("{} pair(s), {bad} outside tolerance, {} grid nodes", rows.len(), oracle.node_count())
    });
    Ok(if bad > 0 { EXIT_SUITE } else { 0 })
}

fn check(cli: &Cli, input: &Input, suites: &[String], config: CheckConfig) -> Outcome {
    for s in suites {
        if s != "all" && !SUITES.contains(&s.as_str()) {
            return Err(usage(format!("unknown suite `{s}`; known: all, {}", SUITES.join(", "))));
        }
    }
    let (complex, metric) = load(input)?;
    let names: Vec<&str> = suites.iter().map(String::as_str).collect();
    let outcomes = run_suites(&complex, &metric, &names, &config)?;
    let (passed, failed, tripwire) = summarize(&outcomes);
    emit(cli, json!({ "seed": config.seed, "suites": outcomes, "passed": passed, "failed": failed }), || {
        let mut s = String::new();
        for o in &outcomes {
            let status = match (&o.skipped, o.ok()) {
                (Some(_), true) => "SKIP",
                (_, true) => "PASS",
                (_, false) => "FAIL",
            };
            s += &format!("{status} {:<24} {:>6}/{:<6} {}\n", o.name, o.passed, o.checked, o.anchor);
            if let Some(why) = &o.skipped {
                s += &format!("       skipped: {why}\n");
            }
            for note in &o.notes {
                s += &format!("       {note}\n");
            }
            for f in &o.failures {
                s += &format!("       failure: {f}\n");
            }
        }
        s + &format!("{passed} suite(s) passed, {failed} failed")
    });
    Ok(if tripwire {
        EXIT_INCONSISTENT
    } else if failed > 0 {
        EXIT_SUITE
    } else {
        0
    })
}
