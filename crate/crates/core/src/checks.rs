//! Property suites over one complex and vertex metric, as run by
//! `metric-ext check`.
//!
//! Each suite samples points with its own seeded generator, so results do
//! not depend on which suites run or in what order. A solver answer below
//! one of its own lower bounds is reported separately as a tripwire.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{coordinate_l1, simplex_l1, Automorphism, BarycentricPoint, SimplicialComplex, TOL};
use crate::error::{Error, Result};
use crate::extension::ExtendedMetric;
use crate::io::{complex_from_json, complex_to_json};
use crate::oracle::{exhaustive_metric_scan, grid_tolerance, GridOracle, ScanViolation};
use crate::path_metric::PathOptions;
use crate::probes::{decay_probe, equivalence_windows_check, DecayConfig, Verdict};
use crate::sampling::{point_in_simplex, random_grid_point, random_interior_point, random_point};
use crate::vertex_metrics::{
    double_difference_vertices, gromov_product_vertices, hyperbolicity_delta, linear_bound_constant, DistanceTable,
    VertexMetric,
};

/// Names of all suites, in reporting order.
pub const SUITES: [&str; 13] = [
    "complex",
    "naive-bilinear",
    "vertex-agreement",
    "restriction",
    "disjoint-supports",
    "path-metric-axioms",
    "extended-metric-axioms",
    "grid-oracle",
    "sandwich",
    "double-difference",
    "automorphisms",
    "geodesic-defect",
    "probes",
];

fn anchor(name: &str) -> &'static str {
    match name {
        "complex" => "face closure, simplex metric, serialization and barycentric coordinates",
        "naive-bilinear" => "bilinear extension fails identity of indiscernibles",
        "vertex-agreement" => "d_X = d_G and d~ = d^ on vertices; minimal linear-bound constant",
        "restriction" => "d_X restricts to the simplex metric; simplices have diameter 1",
        "disjoint-supports" => "disjoint supports: d_X >= 1 and d~ = D^",
        "path-metric-axioms" => "d_X is a metric",
        "extended-metric-axioms" => "d~ is a metric; mixed and bilinear triangle inequalities",
        "grid-oracle" => "grid discretization agrees with exact d_X",
        "sandwich" => "D^ - B' <= d~ <= D^ and the 4B' double-difference window",
        "double-difference" => "double-difference identities (a)-(e) and Gromov products",
        "automorphisms" => "automorphism invariance of d_X, d~, double differences and Gromov products",
        "geodesic-defect" => "additivity defect along word geodesics",
        "probes" => "decay of double differences and equivalence windows",
        _ => "",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub pairs: usize,
    pub triples: usize,
    pub tuples: usize,
    pub oracle_pairs: usize,
    pub oracle_resolution: u32,
    pub threads: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            pairs: 200,
            triples: 500,
            tuples: 300,
            oracle_pairs: 50,
            oracle_resolution: 16,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub anchor: String,
    pub checked: usize,
    pub passed: usize,
    /// Reason the suite did not apply to this input.
    pub skipped: Option<String>,
    pub failures: Vec<String>,
    /// Measurements reported without pass/fail meaning.
    pub notes: Vec<String>,
    /// A solver contradicted one of its own lower bounds.
    pub tripwire: bool,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        SuiteOutcome {
            name: name.to_owned(),
            anchor: anchor(name).to_owned(),
            checked: 0,
            passed: 0,
            skipped: None,
            failures: Vec::new(),
            notes: Vec::new(),
            tripwire: false,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn error(&mut self, e: Error) {
        self.checked += 1;
        if matches!(e, Error::InternalInconsistency(_)) {
            self.tripwire = true;
        }
        if self.failures.len() < 20 {
            self.failures.push(e.to_string());
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && !self.tripwire
    }
}

/// Runs the named suites (all of [`SUITES`] for `["all"]`) on up to
/// `config.threads` workers; outcomes come back in the order requested.
pub fn run_suites(
    complex: &SimplicialComplex,
    metric: &VertexMetric,
    names: &[&str],
    config: &CheckConfig,
) -> Result<Vec<SuiteOutcome>> {
    let names: Vec<&str> = if names.contains(&"all") { SUITES.to_vec() } else { names.to_vec() };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        return Err(Error::InvalidParameters(format!("unknown suite `{bad}`")));
    }
    let ext = ExtendedMetric::new(complex, metric.clone())?;
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<SuiteOutcome>> = vec![None; names.len()];
    let workers = config.threads.clamp(1, names.len().max(1));
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(&name) = names.get(i) else { break };
                        done.push((i, run_one(&ext, name, config)));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (i, out) in h.join().expect("suite worker panicked") {
                slots[i] = Some(out);
            }
        }
    });
    Ok(slots.into_iter().map(|s| s.expect("every suite ran")).collect())
}

fn suite_rng(config: &CheckConfig, name: &str) -> ChaCha8Rng {
    let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x1000_0000_01b3));
    ChaCha8Rng::seed_from_u64(config.seed ^ salt)
}

fn run_one(ext: &ExtendedMetric<'_>, name: &str, config: &CheckConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(name);
    let mut rng = suite_rng(config, name);
    let result = match name {
        "complex" => complex_suite(ext, &mut rng, &mut out),
        "naive-bilinear" => naive_suite(ext, &mut rng, &mut out),
        "vertex-agreement" => vertex_suite(ext, &mut out),
        "restriction" => restriction_suite(ext, config, &mut rng, &mut out),
        "disjoint-supports" => disjoint_suite(ext, config, &mut rng, &mut out),
        "path-metric-axioms" => path_axioms_suite(ext, config, &mut rng, &mut out),
        "extended-metric-axioms" => extended_axioms_suite(ext, config, &mut rng, &mut out),
        "grid-oracle" => grid_suite(ext, config, &mut rng, &mut out),
        "sandwich" => sandwich_suite(ext, config, &mut rng, &mut out),
        "double-difference" => dd_suite(ext, config, &mut rng, &mut out),
        "automorphisms" => automorphism_suite(ext, config, &mut rng, &mut out),
        "geodesic-defect" => defect_suite(ext, &mut rng, &mut out),
        "probes" => probe_suite(ext, config, &mut rng, &mut out),
        _ => unreachable!("suite names are validated"),
    };
    if let Err(e) = result {
        out.error(e);
    }
    out
}

fn no_shortcuts() -> PathOptions {
    PathOptions { shortcuts: false, ..PathOptions::default() }
}

fn complex_suite(ext: &ExtendedMetric<'_>, rng: &mut ChaCha8Rng, out: &mut SuiteOutcome) -> Result<()> {
    let k = ext.complex();
    out.record(k.check_invariants().is_ok(), || format!("{:?}", k.check_invariants()));
    let back = complex_from_json(&complex_to_json(k))?;
    out.record(&back == k, || "JSON round trip changed the complex".into());
    for sigma in k.maximal_simplices().iter().filter(|s| s.len() <= 6).take(200) {
        let closed = sigma.faces().all(|f| k.is_simplex(f.vertices()));
        out.record(closed, || format!("a face of {:?} is missing", k.simplex_labels(sigma)));
    }
    for _ in 0..100 {
        let sigma = k.maximal_simplices().choose(rng).expect("complex has a simplex");
        let tau = sigma.faces().collect::<Vec<_>>().choose(rng).cloned().expect("simplex has faces");
        let [x, y, z] = [0; 3].map(|_| point_in_simplex(rng, &tau));
        let d = |a, b| simplex_l1(k, a, b);
        let (xy, yz, xz) = (d(&x, &y)?, d(&y, &z)?, d(&x, &z)?);
        let ok = xy == d(&y, &x)? && d(&x, &x)? == 0.0 && xz <= xy + yz + TOL && xy <= 1.0 + TOL;
        out.record(ok, || format!("simplex metric axioms fail in {:?}", k.simplex_labels(&tau)));
    }
    for _ in 0..100 {
        let p = random_point(rng, k);
        let total: f64 = p.weights().iter().map(|&(_, w)| w).sum();
        out.record((total - 1.0).abs() <= 1e-12 && k.is_simplex(p.support().vertices()), || {
            format!("sampled point {p:?} is not normalized or not in a simplex")
        });
    }
    Ok(())
}

fn naive_suite(ext: &ExtendedMetric<'_>, rng: &mut ChaCha8Rng, out: &mut SuiteOutcome) -> Result<()> {
    let k = ext.complex();
    let Some(inner) = random_interior_point(rng, k) else {
        out.skipped = Some("complex has no edge".into());
        return Ok(());
    };
    let mut sample: Vec<BarycentricPoint> = (0..k.vertex_count().min(20)).map(BarycentricPoint::vertex).collect();
    sample.push(inner);
    let found = exhaustive_metric_scan(&sample, TOL, |a, b| ext.bilinear(a, b));
    out.record(found.iter().any(|v| matches!(v, ScanViolation::NonzeroSelfDistance { .. })), || {
        "bilinear extension vanished on an interior point".into()
    });
    for &(u, v) in k.edges().iter().take(50) {
        let mid = BarycentricPoint::new(k, [(u, 0.5), (v, 0.5)])?;
        let expect = 0.5 * ext.vertex_metric().dist(u, v);
        let got = ext.bilinear(&mid, &mid);
        out.record((got - expect).abs() <= 1e-12, || format!("midpoint of {u}-{v}: {got} != {expect}"));
    }
    Ok(())
}

fn vertex_suite(ext: &ExtendedMetric<'_>, out: &mut SuiteOutcome) -> Result<()> {
    let k = ext.complex();
    let n = k.vertex_count().min(60);
    let opts = no_shortcuts();
    for u in 0..n {
        for v in u..n {
            let d = ext.path_metric().distance(&BarycentricPoint::vertex(u), &BarycentricPoint::vertex(v), &opts)?;
            let g = f64::from(ext.word_metric().get(u, v));
            out.record((d.value - g).abs() <= TOL, || format!("d_X({u},{v}) = {} but d_G = {g}", d.value));
            let hat = ext.vertex_metric().dist(u, v);
            let tilde = ext.dist(&BarycentricPoint::vertex(u), &BarycentricPoint::vertex(v))?;
            out.record(tilde == hat, || format!("d~({u},{v}) = {tilde} but d^ = {hat}"));
        }
    }
    if k.vertex_count() >= 2 {
        let word = ext.word_metric();
        let minimal = linear_bound_constant(ext.vertex_metric(), word, None)?;
        let m = k.vertex_count();
        let slack = |u, v| minimal * word.dist(u, v) - ext.vertex_metric().dist(u, v);
        let pairs = (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v)));
        let worst = pairs.map(|(u, v)| slack(u, v)).fold(f64::INFINITY, f64::min);
        out.record(worst.abs() <= TOL, || format!("least slack of the minimal C is {worst}, not 0"));
        out.record(ext.linear_bound() + TOL >= minimal, || format!("C = {} below minimal {minimal}", ext.linear_bound()));
    }
    if k.vertex_count() > n {
        out.notes.push(format!("checked vertices 0..{n} of {}", k.vertex_count()));
    }
    Ok(())
}

fn restriction_suite(
    ext: &ExtendedMetric<'_>,
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let k = ext.complex();
    let opts = no_shortcuts();
    for _ in 0..config.pairs {
        let sigma = k.maximal_simplices().choose(rng).expect("complex has a simplex");
        let (x, y) = (point_in_simplex(rng, sigma), point_in_simplex(rng, sigma));
        let d = ext.path_metric().distance(&x, &y, &opts)?.value;
        let l1 = coordinate_l1(&x, &y);
        out.record((d - l1).abs() <= TOL && d <= 1.0 + TOL, || format!("same-simplex pair: d_X {d}, simplex l1 {l1}"));
    }
    Ok(())
}

fn disjoint_pair(rng: &mut ChaCha8Rng, k: &SimplicialComplex) -> Option<(BarycentricPoint, BarycentricPoint)> {
    (0..100).find_map(|_| {
        let (x, y) = (random_point(rng, k), random_point(rng, k));
        x.disjoint_support(&y).then_some((x, y))
    })
}

fn disjoint_suite(
    ext: &ExtendedMetric<'_>,
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let k = ext.complex();
    if k.vertex_count() < 2 {
        out.skipped = Some("fewer than two vertices".into());
        return Ok(());
    }
    for _ in 0..config.pairs {
        let Some((x, y)) = disjoint_pair(rng, k) else { continue };
        let dx = ext.l1_path(&x, &y)?;
        let d = ext.distance(&x, &y)?;
        out.record(dx >= 1.0 - TOL, || format!("disjoint supports with d_X = {dx}"));
        out.record(d.bilinear <= ext.scale() * dx + TOL, || {
            format!("D^ = {} exceeds 3C d_X = {}", d.bilinear, ext.scale() * dx)
        });
        out.record(d.value == d.bilinear, || format!("d~ = {} but D^ = {}", d.value, d.bilinear));
    }
    Ok(())
}

fn distinct(x: &BarycentricPoint, y: &BarycentricPoint) -> bool {
    coordinate_l1(x, y) >= 1e-6
}

fn path_axioms_suite(
    ext: &ExtendedMetric<'_>,
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let k = ext.complex();
    let p = ext.path_metric();
    let opts = PathOptions::default();
    for _ in 0..config.triples {
        let (x, y, z) = (random_point(rng, k), random_point(rng, k), random_point(rng, k));
        let dxy = p.distance(&x, &y, &opts)?;
        let dyx = p.distance(&y, &x, &opts)?.value;
        let dyz = p.distance(&y, &z, &opts)?.value;
        let dxz = p.distance(&x, &z, &opts)?.value;
        out.record((dxy.value - dyx).abs() <= TOL, || format!("d_X asymmetric: {} vs {dyx}", dxy.value));
        out.record(dxz <= dxy.value + dyz + TOL, || format!("d_X triangle: {dxz} > {} + {dyz}", dxy.value));
        out.record(!distinct(&x, &y) || dxy.value > 0.0, || "d_X vanished on distinct points".into());
        out.record(p.distance(&x, &x, &opts)?.value == 0.0, || "d_X(x,x) != 0".into());
        out.record((dxy.witness.length - dxy.value).abs() <= TOL, || "witness length differs from value".into());
    }
    Ok(())
}

fn extended_axioms_suite(
    ext: &ExtendedMetric<'_>,
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let k = ext.complex();
    let two_c = 2.0 * ext.linear_bound();
    for _ in 0..config.triples {
        let (x, y, z) = (random_point(rng, k), random_point(rng, k), random_point(rng, k));
        let dxy = ext.dist(&x, &y)?;
        let dyz = ext.dist(&y, &z)?;
        let dxz = ext.dist(&x, &z)?;
        out.record(dxy == ext.dist(&y, &x)?, || "d~ not exactly symmetric".into());
        out.record(dxz <= dxy + dyz + TOL, || format!("d~ triangle: {dxz} > {dxy} + {dyz}"));
        out.record(ext.dist(&x, &x)? == 0.0 && (!distinct(&x, &y) || dxy > 0.0), || "d~ positivity".into());
        let (bxz, bxy, byz) = (ext.bilinear(&x, &z), ext.bilinear(&x, &y), ext.bilinear(&y, &z));
        let dx_yz = ext.l1_path(&y, &z)?;
        out.record(bxz <= bxy + two_c * dx_yz + TOL, || format!("mixed inequality: {bxz} > {bxy} + 2C·{dx_yz}"));
        out.record(bxz <= bxy + byz + TOL, || format!("D^ triangle: {bxz} > {bxy} + {byz}"));
    }
    Ok(())
}

fn grid_suite(ext: &ExtendedMetric<'_>, config: &CheckConfig, rng: &mut ChaCha8Rng, out: &mut SuiteOutcome) -> Result<()> {
    let k = ext.complex();
    if k.dimension() > 3 || k.vertex_count() > 12 {
        out.skipped = Some("grid oracle runs on complexes of dimension <= 3 with <= 12 vertices".into());
        return Ok(());
    }
    let n = config.oracle_resolution;
    let coarse = GridOracle::new(k, n)?;
    let fine = GridOracle::new(k, 2 * n)?;
    let dim = k.dimension().max(1);
    for _ in 0..config.oracle_pairs {
        let (x, y) = (random_grid_point(rng, k, n), random_grid_point(rng, k, n));
        let exact = ext.l1_path(&x, &y)?;
        let g = coarse.distance(&x, &y)?;
        let g2 = fine.distance(&x, &y)?;
        out.record(exact <= g + TOL, || format!("exact {exact} above grid {g}"));
        out.record(g - exact <= grid_tolerance(dim, n, exact), || format!("grid {g} too far above exact {exact}"));
        out.record(g2 <= g + TOL, || format!("refinement increased {g} to {g2}"));
    }
    Ok(())
}

fn sandwich_suite(
    ext: &ExtendedMetric<'_>,
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    out: &mut SuiteOutcome,
) -> Result<()> {
    if ext.b_prime().is_none() {
        out.skipped = Some("no quasi-isometry constants".into());
        return Ok(());
    }
    let k = ext.complex();
    for _ in 0..config.pairs {
        let (x, y) = (random_point(rng, k), random_point(rng, k));
        let c = ext.sandwich_check(&x, &y)?;
        out.record(!c.is_failure(), || format!("{c:?}"));
    }
    for _ in 0..config.tuples {
        let q: Vec<_> = (0..4).map(|_| random_point(rng, k)).collect();
        let c = ext.window_check(&q[0], &q[1], &q[2], &q[3])?;
        out.record(!c.is_failure(), || format!("{c:?}"));
    }
    Ok(())
}

fn dd_suite(ext: &ExtendedMetric<'_>, config: &CheckConfig, rng: &mut ChaCha8Rng, out: &mut SuiteOutcome) -> Result<()> {
    let k = ext.complex();
    let dd = |a: &BarycentricPoint, b: &BarycentricPoint, c: &BarycentricPoint, d: &BarycentricPoint| {
        ext.double_difference(a, b, c, d)
    };
    for _ in 0..config.tuples {
        let p: Vec<_> = (0..5).map(|_| random_point(rng, k)).collect();
        let (a, a2, b, b2, a3) = (&p[0], &p[1], &p[2], &p[3], &p[4]);
        let base = dd(a, a2, b, b2)?;
        let close = |x: f64, y: f64| (x - y).abs() <= TOL;
        out.record(close(base, dd(b, b2, a, a2)?), || "(a) symmetry".into());
        out.record(close(base, -dd(a2, a, b, b2)?) && close(base, -dd(a, a2, b2, b)?), || "(b) antisymmetry".into());
        out.record(close(dd(a, a, b, b2)?, 0.0) && close(dd(a, a2, b, b)?, 0.0), || "(c) repeated entries".into());
        out.record(close(base + dd(a2, a3, b, b2)?, dd(a, a3, b, b2)?), || "(d) transitivity".into());
        let cocycle = dd(a, b, a2, b2)? + dd(a2, a, b, b2)? + dd(b, a2, a, b2)?;
        out.record(cocycle.abs() <= TOL, || format!("(e) cocycle sum {cocycle}"));
        let gp = ext.gromov_product(a, b, a2)?;
        out.record(close(2.0 * gp, dd(a2, a, b, a2)?) && gp >= -TOL, || format!("Gromov product {gp}"));
    }
    let d = ext.vertex_metric();
    let n = k.vertex_count();
    for _ in 0..config.tuples {
        let [a, a2, a3, b, b2]: [usize; 5] = std::array::from_fn(|_| rng.gen_range(0..n));
        let dd = |p, q, r, s| double_difference_vertices(d, p, q, r, s);
        let base = dd(a, a2, b, b2);
        let close = |x: f64, y: f64| (x - y).abs() <= TOL;
        let identities = close(base, dd(b, b2, a, a2))
            && close(base, -dd(a2, a, b, b2))
            && dd(a, a, b, b2) == 0.0
            && close(base + dd(a2, a3, b, b2), dd(a, a3, b, b2))
            && close(dd(a, b, a2, b2) + dd(a2, a, b, b2) + dd(b, a2, a, b2), 0.0);
        out.record(identities, || format!("vertex identities at {:?}", (a, a2, a3, b, b2)));
        let via_gp = gromov_product_vertices(d, a2, b, a) - gromov_product_vertices(d, a2, b2, a);
        out.record(close(2.0 * via_gp, base), || format!("vertex Gromov relation at {:?}", (a, a2, b, b2)));
    }
    Ok(())
}

/// Vertex permutations preserving the complex, its word metric and `d̂`,
/// found by backtracking; at most `limit` nontrivial ones.
pub fn find_automorphisms(ext: &ExtendedMetric<'_>, limit: usize, node_budget: usize) -> Vec<Automorphism> {
    let n = ext.complex().vertex_count();
    let mut search = AutomorphismSearch {
        ext,
        limit,
        budget: node_budget,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        found: Vec::new(),
    };
    search.extend(0);
    search.found
}

struct AutomorphismSearch<'e, 'a> {
    ext: &'e ExtendedMetric<'a>,
    limit: usize,
    budget: usize,
    map: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Automorphism>,
}

impl AutomorphismSearch<'_, '_> {
    fn compatible(&self, v: usize, t: usize) -> bool {
        let k = self.ext.complex();
        let (word, d) = (self.ext.word_metric(), self.ext.vertex_metric());
        k.neighbors(v).len() == k.neighbors(t).len()
            && k.maximal_containing_vertex(v).len() == k.maximal_containing_vertex(t).len()
            && (0..v).all(|u| {
                let image = self.map[u];
                word.get(u, v) == word.get(image, t) && d.dist(u, v) == d.dist(image, t)
            })
    }

    fn extend(&mut self, v: usize) {
        if self.found.len() >= self.limit || self.budget == 0 {
            return;
        }
        self.budget -= 1;
        let n = self.map.len();
        if v == n {
            let identity = self.map.iter().enumerate().all(|(i, &t)| i == t);
            if !identity {
                if let Ok(g) = Automorphism::from_indices(self.ext.complex(), self.map.clone()) {
                    self.found.push(g);
                }
            }
            return;
        }
        for t in 0..n {
            if !self.used[t] && self.compatible(v, t) {
                self.map[v] = t;
                self.used[t] = true;
                self.extend(v + 1);
                self.used[t] = false;
                self.map[v] = usize::MAX;
            }
        }
    }
}

fn automorphism_suite(
    ext: &ExtendedMetric<'_>,
    config: &CheckConfig,
    rng: &mut ChaCha8Rng,
    out: &mut SuiteOutcome,
) -> Result<()> {
    let k = ext.complex();
    if k.vertex_count() > 64 {
        out.skipped = Some("automorphism search limited to 64 vertices".into());
        return Ok(());
    }
    let autos = find_automorphisms(ext, 4, 200_000);
    if autos.is_empty() {
        out.skipped = Some("no nontrivial metric-preserving automorphism found".into());
        return Ok(());
    }
    out.notes.push(format!("{} automorphism(s) used", autos.len()));
    let per = (config.tuples / autos.len()).max(1);
    for g in &autos {
        for _ in 0..per {
            let p: Vec<_> = (0..4).map(|_| random_point(rng, k)).collect();
            let q: Vec<_> = p.iter().map(|x| g.apply(x)).collect();
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
            let (d0, d1) = (ext.dist(&p[0], &p[1])?, ext.dist(&q[0], &q[1])?);
            out.record(close(d0, d1), || format!("d~ {d0} vs {d1}"));
            let (x0, x1) = (ext.l1_path(&p[0], &p[1])?, ext.l1_path(&q[0], &q[1])?);
            out.record(close(x0, x1), || format!("d_X {x0} vs {x1}"));
            let (e0, e1) = (
                ext.double_difference(&p[0], &p[1], &p[2], &p[3])?,
                ext.double_difference(&q[0], &q[1], &q[2], &q[3])?,
            );
            out.record(close(e0, e1), || format!("double difference {e0} vs {e1}"));
            let (g0, g1) = (ext.gromov_product(&p[0], &p[1], &p[2])?, ext.gromov_product(&q[0], &q[1], &q[2])?);
            out.record(close(g0, g1), || format!("Gromov product {g0} vs {g1}"));
        }
    }
    Ok(())
}

fn defect_suite(ext: &ExtendedMetric<'_>, rng: &mut ChaCha8Rng, out: &mut SuiteOutcome) -> Result<()> {
    let k = ext.complex();
    let n = k.vertex_count();
    let mut triples = Vec::new();
    for _ in 0..2000 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let path = ext.word_metric().geodesic(k, u, v);
        let w = *path.choose(rng).expect("geodesic has endpoints");
        triples.push((u, w, v));
    }
    let defect = ext.geodesic_defect(&triples);
    out.checked += 1;
    out.passed += 1;
    out.notes.push(format!("geodesic defect {} over {} triples", defect.max, defect.triples));
    if n <= 60 {
        out.notes.push(format!("hyperbolicity delta of d^: {}", hyperbolicity_delta(ext.vertex_metric())));
    }
    Ok(())
}

fn probe_suite(ext: &ExtendedMetric<'_>, config: &CheckConfig, rng: &mut ChaCha8Rng, out: &mut SuiteOutcome) -> Result<()> {
    if ext.b_prime().is_none() {
        out.skipped = Some("no quasi-isometry constants".into());
        return Ok(());
    }
    let k = ext.complex();
    let samples: Vec<[BarycentricPoint; 4]> = (0..config.tuples)
        .map(|i| {
            if i % 2 == 0 {
                std::array::from_fn(|_| BarycentricPoint::vertex(rng.gen_range(0..k.vertex_count())))
            } else {
                std::array::from_fn(|_| random_point(rng, k))
            }
        })
        .collect();
    let windows = equivalence_windows_check(ext, &samples)?;
    out.record(!windows.hard.is_failure(), || format!("4B' window: {:?}", windows.hard));
    if let (Some(a), Some(b)) = (windows.alpha, windows.beta) {
        out.notes.push(format!("fitted alpha = {a}, beta = {b}"));
    }
    let decay = DecayConfig { seed: config.seed, samples: 2000, ..DecayConfig::default() };
    let (report, _) = decay_probe(ext, &decay)?;
    let (again, _) = decay_probe(ext, &decay)?;
    out.record(report == again, || "decay probe is not reproducible under a fixed seed".into());
    out.notes.push(format!("decay probe: {} {:?}", report.verdict, report.fitted));
    if let Verdict::Violated(_) = report.verdict {
        out.notes.push("decay violation is reported, not asserted".into());
    }
    Ok(())
}

/// Counts of passing and failing suites, and whether any tripwire fired.
pub fn summarize(outcomes: &[SuiteOutcome]) -> (usize, usize, bool) {
    let failed = outcomes.iter().filter(|o| !o.ok()).count();
    let tripwire = outcomes.iter().any(|o| o.tripwire);
    (outcomes.len() - failed, failed, tripwire)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn all_suites_pass_on_a_small_cycle() {
        let k = generators::cycle(6).unwrap();
        let ext = ExtendedMetric::word(&k).unwrap();
        let config = CheckConfig { pairs: 20, triples: 20, tuples: 20, oracle_pairs: 5, threads: 2, ..CheckConfig::default() };
        let out = run_suites(&k, ext.vertex_metric(), &["all"], &config).unwrap();
        for o in &out {
            assert!(o.ok(), "{}: {:?}", o.name, o.failures);
        }
        assert_eq!(out.len(), SUITES.len());
    }

    #[test]
    fn cycle_has_rotations() {
        let k = generators::cycle(5).unwrap();
        let ext = ExtendedMetric::word(&k).unwrap();
        let autos = find_automorphisms(&ext, 3, 10_000);
        assert_eq!(autos.len(), 3);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let k = generators::path(2).unwrap();
        let ext = ExtendedMetric::word(&k).unwrap();
        assert!(run_suites(&k, ext.vertex_metric(), &["nope"], &CheckConfig::default()).is_err());
    }
}
