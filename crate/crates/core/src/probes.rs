//! Finite experiments on the behaviour of double differences "at infinity".
//!
//! Boundary points are stood in for by geodesic rays of vertices; a probe
//! evaluates the extended double difference with ray slots replaced by ray
//! vertices of growing depth and summarizes the resulting table. Probes
//! report what they see. They cannot prove or refute limits.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{BarycentricPoint, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::extension::{ConstantCheck, ExtendedMetric};
use crate::vertex_metrics::{double_difference_vertices, WordMetricTable};

/// A geodesic vertex ray `r_0 = base, r_1, ..` with `d_G(base, r_k) = k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RaySpec {
    vertices: Vec<VertexId>,
}

impl RaySpec {
    pub fn new(complex: &SimplicialComplex, word: &WordMetricTable, vertices: Vec<VertexId>) -> Result<Self> {
        let Some(&base) = vertices.first() else {
            return Err(Error::InvalidConfiguration("ray needs a base vertex".into()));
        };
        for (k, pair) in vertices.windows(2).enumerate() {
            if !complex.neighbors(pair[0]).contains(&pair[1]) {
                return Err(Error::InvalidConfiguration(format!("ray vertices {k} and {} are not adjacent", k + 1)));
            }
        }
        for (k, &v) in vertices.iter().enumerate() {
            if word.get(base, v) as usize != k {
                return Err(Error::InvalidConfiguration(format!("ray vertex {k} is not at distance {k} from the base")));
            }
        }
        Ok(RaySpec { vertices })
    }

    /// The ray along the canonical geodesic from `base` to `target`.
    pub fn toward(complex: &SimplicialComplex, word: &WordMetricTable, base: VertexId, target: VertexId) -> Self {
        RaySpec { vertices: word.geodesic(complex, base, target) }
    }

    pub fn base(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn depth(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn at(&self, depth: usize) -> Result<VertexId> {
        self.vertices.get(depth).copied().ok_or_else(|| {
            Error::InvalidConfiguration(format!("depth {depth} beyond ray depth {}", self.depth()))
        })
    }
}

/// One argument of a probed double difference.
#[derive(Clone, Debug, PartialEq)]
pub enum Slot {
    Point(BarycentricPoint),
    Ray(RaySpec),
}

impl Slot {
    fn at(&self, depth: usize) -> Result<BarycentricPoint> {
        match self {
            Slot::Point(p) => Ok(p.clone()),
            Slot::Ray(r) => Ok(BarycentricPoint::vertex(r.at(depth)?)),
        }
    }

    fn ray(&self) -> Option<&RaySpec> {
        match self {
            Slot::Ray(r) => Some(r),
            Slot::Point(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    Inconclusive,
    PlusDivergent,
    MinusDivergent,
    Bounded,
    DecayConsistent,
    Violated(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Converging => f.write_str("converging"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
            Verdict::PlusDivergent => f.write_str("+inf-divergent"),
            Verdict::MinusDivergent => f.write_str("-inf-divergent"),
            Verdict::Bounded => f.write_str("bounded"),
            Verdict::DecayConsistent => f.write_str("decay-consistent"),
            Verdict::Violated(w) => write!(f, "violated({w})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub label: String,
    /// `(depth, value)` rows in increasing depth.
    pub table: Vec<(usize, f64)>,
    pub fitted: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

impl ProbeReport {
    /// Plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n  depth  value\n", self.label);
        for (d, v) in &self.table {
            out.push_str(&format!("  {d:>5}  {v:.9}\n"));
        }
        for (k, v) in &self.fitted {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        out.push_str(&format!("  verdict: {}\n", self.verdict));
        out
    }
}

/// Thresholds shared by the ray probes.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    /// Largest final step still called converging.
    pub converge_tol: f64,
    /// Smallest per-depth slope magnitude called divergent.
    pub slope_threshold: f64,
    pub depth_max: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { converge_tol: 1e-3, slope_threshold: 0.5, depth_max: 12 }
    }
}

/// Default depths `0..=depth_max`, clipped to the shortest ray.
pub fn default_depths(slots: &[Slot; 4], config: &ProbeConfig) -> Vec<usize> {
    let cap = slots.iter().filter_map(Slot::ray).map(RaySpec::depth).min().unwrap_or(config.depth_max);
    (0..=config.depth_max.min(cap)).collect()
}

fn check_pattern(slots: &[Slot; 4]) -> Result<()> {
    for s in slots.iter().filter_map(Slot::ray) {
        let count = slots.iter().filter(|t| t.ray() == Some(s)).count();
        if count > 2 {
            return Err(Error::InvalidConfiguration(format!("ray from vertex {} fills {count} slots", s.base())));
        }
    }
    Ok(())
}

fn evaluate(metric: &ExtendedMetric<'_>, slots: &[Slot; 4], depths: &[usize]) -> Result<Vec<(usize, f64)>> {
    if depths.is_empty() || depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfiguration("depths must be nonempty and strictly increasing".into()));
    }
    depths
        .iter()
        .map(|&k| {
            let p: Vec<_> = slots.iter().map(|s| s.at(k)).collect::<Result<_>>()?;
            Ok((k, metric.double_difference(&p[0], &p[1], &p[2], &p[3])?))
        })
        .collect()
}

/// Tabulates `⟨x,x'|y,y'⟩` as ray slots move outward.
pub fn dd_convergence_probe(
    metric: &ExtendedMetric<'_>,
    slots: &[Slot; 4],
    depths: &[usize],
    config: &ProbeConfig,
) -> Result<ProbeReport> {
    check_pattern(slots)?;
    let table = evaluate(metric, slots, depths)?;
    let mut fitted = BTreeMap::new();
    let verdict = match table.as_slice() {
        [.., (_, a), (_, b)] => {
            let step = (b - a).abs();
            fitted.insert("last_step".to_owned(), step);
            if step < config.converge_tol {
                Verdict::Converging
            } else {
                Verdict::Inconclusive
            }
        }
        _ if slots.iter().all(|s| s.ray().is_none()) => Verdict::Converging,
        _ => Verdict::Inconclusive,
    };
    Ok(ProbeReport { label: "convergence".into(), table, fitted, verdict })
}

/// Which divergence a coincident pair of ray slots predicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coincidence {
    /// `a = b′` or `a′ = b`: the double difference should grow without bound.
    Crossed,
    /// `a = b` or `a′ = b′`: it should decrease without bound.
    Straight,
}

fn coincidence(slots: &[Slot; 4]) -> Result<Option<Coincidence>> {
    let same = |i: usize, j: usize| slots[i].ray().is_some() && slots[i].ray() == slots[j].ray();
    let crossed = same(0, 3) || same(1, 2);
    let straight = same(0, 2) || same(1, 3);
    match (crossed, straight) {
        (true, true) => Err(Error::InvalidConfiguration("both crossed and straight coincidences".into())),
        (true, false) => Ok(Some(Coincidence::Crossed)),
        (false, true) => Ok(Some(Coincidence::Straight)),
        (false, false) => Ok(None),
    }
}

fn least_squares_slope(table: &[(usize, f64)]) -> f64 {
    let n = table.len() as f64;
    let mx = table.iter().map(|&(d, _)| d as f64).sum::<f64>() / n;
    let my = table.iter().map(|&(_, v)| v).sum::<f64>() / n;
    let sxy: f64 = table.iter().map(|&(d, v)| (d as f64 - mx) * (v - my)).sum();
    let sxx: f64 = table.iter().map(|&(d, _)| (d as f64 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Tabulates a configuration in which two slots share a ray and classifies
/// the growth; the sign must match the kind of coincidence.
pub fn dd_divergence_probe(
    metric: &ExtendedMetric<'_>,
    slots: &[Slot; 4],
    depths: &[usize],
    config: &ProbeConfig,
) -> Result<ProbeReport> {
    check_pattern(slots)?;
    let kind = coincidence(slots)?;
    let has_ray = slots.iter().any(|s| s.ray().is_some());
    if kind.is_none() && has_ray {
        return Err(Error::InvalidConfiguration("no pair of slots shares a ray".into()));
    }
    let table = evaluate(metric, slots, depths)?;
    let mut fitted = BTreeMap::new();
    let verdict = match kind {
        None => Verdict::Bounded,
        Some(kind) => {
            // Fit over the deeper half, past where rays meet the fixed points.
            let tail = &table[table.len() / 2..];
            let slope = least_squares_slope(tail);
            fitted.insert("slope".to_owned(), slope);
            let seen = if slope >= config.slope_threshold {
                Verdict::PlusDivergent
            } else if slope <= -config.slope_threshold {
                Verdict::MinusDivergent
            } else {
                Verdict::Inconclusive
            };
            match (kind, &seen) {
                (Coincidence::Crossed, Verdict::MinusDivergent) | (Coincidence::Straight, Verdict::PlusDivergent) => {
                    Verdict::Violated(format!("{kind:?} coincidence with slope {slope}"))
                }
                _ => seen,
            }
        }
    };
    Ok(ProbeReport { label: "divergence".into(), table, fitted, verdict })
}

/// Parameters of the decay experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayConfig {
    pub samples: usize,
    pub seed: u64,
    pub lambda_grid: Vec<f64>,
    /// Radius of the balls from which the close partners `c` of `u` and `b`
    /// of `a` are drawn.
    pub near_radius: u32,
    /// Largest `m` bin reported in the table; larger values share the last bin.
    pub depth_max: usize,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            samples: 4000,
            seed: 0,
            lambda_grid: (0..10).map(|i| 0.5 + 0.05 * f64::from(i)).collect(),
            near_radius: 2,
            depth_max: 12,
        }
    }
}

/// One sampled quadruple of the decay experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecaySample {
    pub u: VertexId,
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
    pub m: f64,
    pub value: f64,
}

/// Samples vertex quadruples `(u, a, b, c)` with
/// `m = max(⟨u,a|b,c⟩, ⟨u,b|a,c⟩) >= T = 6(A+B)` and fits the least `λ` on
/// the grid with `|⟨u,c|a,b⟩| <= λ^m` on all of them.
///
/// Uniform quadruples rarely reach large `m`, so most draws pair `u` with a
/// nearby `c` and a far `a` with a nearby `b`.
pub fn decay_probe(metric: &ExtendedMetric<'_>, config: &DecayConfig) -> Result<(ProbeReport, Vec<DecaySample>)> {
    let qi = metric.vertex_metric().qi().ok_or(Error::MissingQIConstants)?;
    let threshold = 6.0 * (qi.a + qi.b);
    let word = metric.word_metric();
    let n = metric.complex().vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let all: Vec<VertexId> = (0..n).collect();
    let ball = |v: VertexId| -> Vec<VertexId> { all.iter().copied().filter(|&w| word.get(v, w) <= config.near_radius).collect() };
    let far_floor = threshold.ceil() as u32;

    let dd = |x, x2, y, y2| -> Result<f64> {
        let p = |v| BarycentricPoint::vertex(v);
        metric.double_difference(&p(x), &p(x2), &p(y), &p(y2))
    };
    let mut samples = Vec::new();
    for draw in 0..config.samples {
        let u = *all.choose(&mut rng).expect("complex has vertices");
        let (a, b, c) = if draw % 4 == 3 {
            let pick = |r: &mut ChaCha8Rng| *all.choose(r).expect("nonempty");
            (pick(&mut rng), pick(&mut rng), pick(&mut rng))
        } else {
            let far: Vec<VertexId> = all.iter().copied().filter(|&w| word.get(u, w) >= far_floor).collect();
            let Some(&a) = far.choose(&mut rng) else { continue };
            let b = *ball(a).choose(&mut rng).expect("ball contains its centre");
            let c = *ball(u).choose(&mut rng).expect("ball contains its centre");
            (a, b, c)
        };
        let m = dd(u, a, b, c)?.max(dd(u, b, a, c)?);
        if m >= threshold {
            samples.push(DecaySample { u, a, b, c, m, value: dd(u, c, a, b)?.abs() });
        }
    }

    let mut bins: BTreeMap<usize, f64> = BTreeMap::new();
    for s in &samples {
        let bin = (s.m.floor() as usize).min(config.depth_max.max(threshold.ceil() as usize));
        let e = bins.entry(bin).or_insert(0.0);
        *e = e.max(s.value);
    }
    let mut fitted = BTreeMap::from([("T".to_owned(), threshold), ("samples".to_owned(), samples.len() as f64)]);
    let verdict = if samples.is_empty() {
        Verdict::Inconclusive
    } else {
        let mut grid = config.lambda_grid.clone();
        grid.sort_by(f64::total_cmp);
        match grid.iter().find(|&&l| samples.iter().all(|s| s.value <= l.powf(s.m))) {
            Some(&lambda) => {
                fitted.insert("lambda".to_owned(), lambda);
                Verdict::DecayConsistent
            }
            None => {
                let lmax = grid.last().copied().unwrap_or(1.0);
                let w = samples.iter().find(|s| s.value > lmax.powf(s.m)).expect("some sample fails the largest λ");
                Verdict::Violated(format!("u={} a={} b={} c={} m={} |dd|={}", w.u, w.a, w.b, w.c, w.m, w.value))
            }
        }
    };
    let report = ProbeReport { label: "decay".into(), table: bins.into_iter().collect(), fitted, verdict };
    Ok((report, samples))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowsReport {
    /// The `±4B′` window on every sample.
    pub hard: ConstantCheck,
    pub checked: usize,
    /// Fitted `(α, β)` over the all-vertex samples, if there were any.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub vertex_quadruples: usize,
}

/// The α values tried when fitting the comparison with the word metric.
pub const ALPHA_GRID: [f64; 9] = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0];

/// Checks the hard window on every sample, then fits
/// `(1/α)·DD_G − β <= DD~ <= α·DD_G + β` on the vertex samples: for each α on
/// [`ALPHA_GRID`] the least β is computed, and the α with the least β wins
/// (smaller α on ties).
pub fn equivalence_windows_check(
    metric: &ExtendedMetric<'_>,
    samples: &[[BarycentricPoint; 4]],
) -> Result<WindowsReport> {
    let mut hard = if metric.b_prime().is_some() { ConstantCheck::Pass { margin: f64::INFINITY } } else { ConstantCheck::NotRun };
    let mut pairs = Vec::new();
    for q in samples {
        if let ConstantCheck::Pass { margin: worst } = &mut hard {
            match metric.window_check(&q[0], &q[1], &q[2], &q[3])? {
                ConstantCheck::Pass { margin } => *worst = worst.min(margin),
                fail @ ConstantCheck::Fail { .. } => hard = fail,
                ConstantCheck::NotRun => {}
            }
        }
        let vs: Vec<Option<VertexId>> = q.iter().map(BarycentricPoint::as_vertex).collect();
        if let [Some(a), Some(a2), Some(b), Some(b2)] = vs[..] {
            let ext = metric.double_difference(&q[0], &q[1], &q[2], &q[3])?;
            let g = double_difference_vertices(metric.word_metric(), a, a2, b, b2);
            pairs.push((g, ext));
        }
    }
    let (alpha, beta) = if pairs.is_empty() {
        (None, None)
    } else {
        let beta_for = |alpha: f64| {
            pairs.iter().fold(0.0f64, |acc, &(g, e)| acc.max(g / alpha - e).max(e - alpha * g))
        };
        let mut best = (ALPHA_GRID[0], beta_for(ALPHA_GRID[0]));
        for &alpha in &ALPHA_GRID[1..] {
            let beta = beta_for(alpha);
            if beta < best.1 {
                best = (alpha, beta);
            }
        }
        (Some(best.0), Some(best.1))
    };
    Ok(WindowsReport { hard, checked: samples.len(), alpha, beta, vertex_quadruples: pairs.len() })
}
