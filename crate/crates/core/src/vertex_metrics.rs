//! Metrics on the vertex set: the word metric of the 1-skeleton, validated
//! user metrics with their linear-bound and quasi-isometry constants, and
//! vertex-level Gromov products, double differences and δ-hyperbolicity.

use std::collections::VecDeque;
use std::fmt;

use crate::complex::{SimplicialComplex, VertexId, TOL};
use crate::error::{Error, Result};

/// Read access to a dense symmetric distance table on `0..len()`.
pub trait DistanceTable {
    fn len(&self) -> usize;
    fn dist(&self, u: VertexId, v: VertexId) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// All-pairs graph distances on the 1-skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordMetricTable {
    n: usize,
    d: Vec<u32>,
}

impl WordMetricTable {
    pub fn get(&self, u: VertexId, v: VertexId) -> u32 {
        self.d[u * self.n + v]
    }

    pub fn row(&self, u: VertexId) -> &[u32] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    pub fn eccentricity(&self, u: VertexId) -> u32 {
        self.row(u).iter().copied().max().unwrap_or(0)
    }

    pub fn diameter(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(0)
    }

    /// Minimum distance between two vertex sets.
    pub fn set_distance<I, J>(&self, a: I, b: J) -> u32
    where
        I: IntoIterator<Item = VertexId>,
        J: IntoIterator<Item = VertexId> + Clone,
    {
        a.into_iter()
            .flat_map(|u| b.clone().into_iter().map(move |v| (u, v)))
            .map(|(u, v)| self.get(u, v))
            .min()
            .unwrap_or(u32::MAX)
    }

    /// A shortest edge path from `u` to `v`, stepping to the smallest-index
    /// neighbour that makes progress.
    pub fn geodesic(&self, complex: &SimplicialComplex, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            let target = self.get(cur, v) - 1;
            cur = *complex
                .neighbors(cur)
                .iter()
                .find(|&&w| self.get(w, v) == target)
                .expect("connected table always has a descending neighbour");
            path.push(cur);
        }
        path
    }
}

impl DistanceTable for WordMetricTable {
    fn len(&self) -> usize {
        self.n
    }

    fn dist(&self, u: VertexId, v: VertexId) -> f64 {
        f64::from(self.get(u, v))
    }
}

/// Breadth-first all-pairs distances on the 1-skeleton.
pub fn word_metric(complex: &SimplicialComplex) -> Result<WordMetricTable> {
    let n = complex.vertex_count();
    let mut d = vec![u32::MAX; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut d[s * n..(s + 1) * n];
        row[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &v in complex.neighbors(u) {
                if row[v] == u32::MAX {
                    row[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        if row.contains(&u32::MAX) {
            return Err(Error::DisconnectedComplex);
        }
    }
    Ok(WordMetricTable { n, d })
}

/// The sphere of radius `k` about `u` in the word metric.
pub fn sphere(word: &WordMetricTable, u: VertexId, k: u32) -> Vec<VertexId> {
    (0..word.n).filter(|&z| word.get(u, z) == k).collect()
}

/// A reason a matrix fails to be a metric on the vertex set.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricViolation {
    NotSymmetric { u: String, v: String, forward: f64, backward: f64 },
    NegativeDistance { u: String, v: String, value: f64 },
    ZeroOffDiagonal { u: String, v: String },
    NonzeroDiagonal { u: String, value: f64 },
    TriangleViolation { u: String, v: String, w: String, excess: f64 },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSymmetric { u, v, forward, backward } => {
                write!(f, "d({u},{v}) = {forward} but d({v},{u}) = {backward}")
            }
            Self::NegativeDistance { u, v, value } => write!(f, "d({u},{v}) = {value} < 0"),
            Self::ZeroOffDiagonal { u, v } => write!(f, "d({u},{v}) = 0 for distinct vertices"),
            Self::NonzeroDiagonal { u, value } => write!(f, "d({u},{u}) = {value} != 0"),
            Self::TriangleViolation { u, v, w, excess } => {
                write!(f, "d({u},{w}) exceeds d({u},{v}) + d({v},{w}) by {excess}")
            }
        }
    }
}

/// Quasi-isometry constants: `d_G/A - B <= d <= A d_G + B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QiConstants {
    pub a: f64,
    pub b: f64,
}

/// A validated metric on the vertex set of a complex.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexMetric {
    n: usize,
    d: Vec<f64>,
    c: f64,
    qi: Option<QiConstants>,
}

impl DistanceTable for VertexMetric {
    fn len(&self) -> usize {
        self.n
    }

    fn dist(&self, u: VertexId, v: VertexId) -> f64 {
        self.d[u * self.n + v]
    }
}

impl VertexMetric {
    /// The word metric itself, with `C = 1` and `(A, B) = (1, 0)`.
    pub fn from_word(word: &WordMetricTable) -> Self {
        VertexMetric {
            n: word.n,
            d: word.d.iter().map(|&x| f64::from(x)).collect(),
            c: 1.0,
            qi: Some(QiConstants { a: 1.0, b: 0.0 }),
        }
    }

    /// Linear-bound constant `C` with `d(u,v) <= C d_G(u,v)`.
    pub fn linear_bound(&self) -> f64 {
        self.c
    }

    pub fn qi(&self) -> Option<QiConstants> {
        self.qi
    }

    /// Computes (or checks a supplied) linear-bound constant against `word`.
    pub fn with_linear_bound(mut self, word: &WordMetricTable, supplied: Option<f64>) -> Result<Self> {
        self.c = linear_bound_constant(&self, word, supplied)?;
        Ok(self)
    }

    /// Attaches quasi-isometry constants after checking them on all pairs.
    pub fn with_qi(mut self, word: &WordMetricTable, a: f64, b: f64) -> Result<Self> {
        let report = qi_constants_check(&self, word, a, b);
        if !report.pass {
            return Err(Error::QiConstantsViolated { a, b, pairs: report.witnesses.len() });
        }
        self.qi = Some(QiConstants { a, b });
        Ok(self)
    }

    /// Whether `d(g u, g v) = d(u, v)` for the vertex permutation `g`.
    pub fn is_invariant_under(&self, map: &[VertexId]) -> bool {
        (0..self.n).all(|u| (0..self.n).all(|v| self.dist(map[u], map[v]) == self.dist(u, v)))
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }
}

/// Exhaustively checks the metric axioms of `matrix` (indexed in the
/// complex's vertex order). The linear bound starts at the minimal value
/// and no quasi-isometry constants are attached.
pub fn validate_vertex_metric(
    complex: &SimplicialComplex,
    word: &WordMetricTable,
    matrix: &[Vec<f64>],
) -> Result<VertexMetric> {
    let n = complex.vertex_count();
    if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
        let cols = matrix.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n);
        return Err(Error::MetricShape { rows: matrix.len(), cols, expected: n });
    }
    let label = |v: usize| complex.label(v).to_owned();
    let mut violations = Vec::new();
    for (u, row) in matrix.iter().enumerate() {
        if row[u] != 0.0 {
            violations.push(MetricViolation::NonzeroDiagonal { u: label(u), value: row[u] });
        }
        for (v, &x) in row.iter().enumerate() {
            if x < 0.0 || !x.is_finite() {
                violations.push(MetricViolation::NegativeDistance { u: label(u), v: label(v), value: x });
            }
            if v > u {
                if x != matrix[v][u] {
                    violations.push(MetricViolation::NotSymmetric {
                        u: label(u),
                        v: label(v),
                        forward: x,
                        backward: matrix[v][u],
                    });
                }
                if x == 0.0 {
                    violations.push(MetricViolation::ZeroOffDiagonal { u: label(u), v: label(v) });
                }
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                let excess = matrix[u][w] - matrix[u][v] - matrix[v][w];
                if excess > TOL {
                    violations.push(MetricViolation::TriangleViolation {
                        u: label(u),
                        v: label(v),
                        w: label(w),
                        excess,
                    });
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::InvalidMetric(violations));
    }
    let metric = VertexMetric { n, d: matrix.concat(), c: 1.0, qi: None };
    metric.with_linear_bound(word, None)
}

/// The least `C` with `d(u,v) <= C d_G(u,v)` on all pairs, or the supplied
/// value after checking it is admissible. For a single vertex any positive
/// constant works and `1` (or the supplied value) is returned.
pub fn linear_bound_constant(
    metric: &impl DistanceTable,
    word: &WordMetricTable,
    supplied: Option<f64>,
) -> Result<f64> {
    let n = metric.len();
    let mut minimal: f64 = 0.0;
    for u in 0..n {
        for v in (u + 1)..n {
            minimal = minimal.max(metric.dist(u, v) / word.dist(u, v));
        }
    }
    match supplied {
        Some(c) if c + TOL < minimal || c.is_nan() || c <= 0.0 => {
            Err(Error::SuppliedConstantTooSmall { supplied: c, minimal })
        }
        Some(c) => Ok(c),
        None if n < 2 => Ok(1.0),
        None => Ok(minimal),
    }
}

/// Outcome of [`qi_constants_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct QiReport {
    pub pass: bool,
    /// Pairs `(u, v, d(u,v), d_G(u,v))` outside the quasi-isometry window.
    pub witnesses: Vec<(VertexId, VertexId, f64, f64)>,
    /// `C = A + B` on success.
    pub derived_c: Option<f64>,
}

pub fn qi_constants_check(metric: &impl DistanceTable, word: &WordMetricTable, a: f64, b: f64) -> QiReport {
    let mut witnesses = Vec::new();
    if a >= 1.0 && b >= 0.0 {
        let n = metric.len();
        for u in 0..n {
            for v in (u + 1)..n {
                let (d, g) = (metric.dist(u, v), word.dist(u, v));
                if d < g / a - b - TOL || d > a * g + b + TOL {
                    witnesses.push((u, v, d, g));
                }
            }
        }
    }
    let pass = a >= 1.0 && b >= 0.0 && witnesses.is_empty();
    QiReport { pass, witnesses, derived_c: pass.then_some(a + b) }
}

/// `½(d(a,c) + d(b,c) − d(a,b))`, the Gromov product of `a` and `b` at `c`.
pub fn gromov_product_vertices(d: &impl DistanceTable, a: VertexId, b: VertexId, c: VertexId) -> f64 {
    0.5 * (d.dist(a, c) + d.dist(b, c) - d.dist(a, b))
}

/// `d(x,y) − d(x',y) − d(x,y') + d(x',y')`.
pub fn double_difference_vertices(
    d: &impl DistanceTable,
    x: VertexId,
    x2: VertexId,
    y: VertexId,
    y2: VertexId,
) -> f64 {
    d.dist(x, y) - d.dist(x2, y) - d.dist(x, y2) + d.dist(x2, y2)
}

/// Least δ with `⟨x|y⟩_w >= min(⟨x|z⟩_w, ⟨z|y⟩_w) − δ` for all quadruples.
/// Exhaustive, O(n⁴); meant for small tables.
pub fn hyperbolicity_delta(d: &impl DistanceTable) -> f64 {
    let n = d.len();
    let mut delta: f64 = 0.0;
    for w in 0..n {
        let gp = |a: usize, b: usize| gromov_product_vertices(d, a, b, w);
        for x in 0..n {
            for y in x..n {
                let xy = gp(x, y);
                for z in 0..n {
                    delta = delta.max(gp(x, z).min(gp(z, y)) - xy);
                }
            }
        }
    }
    delta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SimplicialComplex {
        let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges: Vec<Vec<String>> = (1..n).map(|i| vec![labels[i - 1].clone(), labels[i].clone()]).collect();
        SimplicialComplex::build(&labels, edges).unwrap()
    }

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::build(&["a", "b", "c"], [vec!["a", "b", "c"]]).unwrap()
    }

    #[test]
    fn word_metric_examples() {
        let w = word_metric(&path(3)).unwrap();
        assert_eq!(w.get(0, 2), 2);
        assert_eq!(w.get(1, 1), 0);
        let t = word_metric(&triangle()).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(t.get(u, v), u32::from(u != v));
            }
        }
        let split = SimplicialComplex::build(&["a", "b"], [["a"], ["b"]]).unwrap();
        assert_eq!(word_metric(&split), Err(Error::DisconnectedComplex));
    }

    #[test]
    fn sphere_examples() {
        let w = word_metric(&path(3)).unwrap();
        assert_eq!(sphere(&w, 0, 1), vec![1]);
        assert_eq!(sphere(&w, 0, 0), vec![0]);
        assert!(sphere(&w, 0, 5).is_empty());
    }

    #[test]
    fn validation_examples() {
        let k = path(3);
        let w = word_metric(&k).unwrap();
        let good: Vec<Vec<f64>> = (0..3).map(|u| (0..3).map(|v| w.dist(u, v)).collect()).collect();
        assert!(validate_vertex_metric(&k, &w, &good).is_ok());

        let bad = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        match validate_vertex_metric(&k, &w, &bad) {
            Err(Error::InvalidMetric(v)) => {
                assert!(v.iter().any(|x| matches!(x, MetricViolation::TriangleViolation { .. })))
            }
            other => panic!("expected triangle violation, got {other:?}"),
        }

        let mut diag = good.clone();
        diag[0][0] = 0.1;
        match validate_vertex_metric(&k, &w, &diag) {
            Err(Error::InvalidMetric(v)) => {
                assert!(v.iter().any(|x| matches!(x, MetricViolation::NonzeroDiagonal { .. })))
            }
            other => panic!("expected diagonal violation, got {other:?}"),
        }

        let mut asym = good;
        asym[0][1] = 1.5;
        match validate_vertex_metric(&k, &w, &asym) {
            Err(Error::InvalidMetric(v)) => {
                assert!(v.iter().any(|x| matches!(x, MetricViolation::NotSymmetric { .. })))
            }
            other => panic!("expected asymmetry, got {other:?}"),
        }
    }

    #[test]
    fn linear_bound_examples() {
        let k = path(4);
        let w = word_metric(&k).unwrap();
        let m = VertexMetric::from_word(&w);
        assert_eq!(linear_bound_constant(&m, &w, None).unwrap(), 1.0);
        let doubled: Vec<Vec<f64>> = (0..4).map(|u| (0..4).map(|v| 2.0 * w.dist(u, v)).collect()).collect();
        let m2 = validate_vertex_metric(&k, &w, &doubled).unwrap();
        assert_eq!(m2.linear_bound(), 2.0);
        assert_eq!(
            linear_bound_constant(&m, &w, Some(0.5)),
            Err(Error::SuppliedConstantTooSmall { supplied: 0.5, minimal: 1.0 })
        );
    }

    #[test]
    fn qi_examples() {
        let k = path(5);
        let w = word_metric(&k).unwrap();
        let m = VertexMetric::from_word(&w);
        let r = qi_constants_check(&m, &w, 1.0, 0.0);
        assert!(r.pass);
        assert_eq!(r.derived_c, Some(1.0));

        let shifted: Vec<Vec<f64>> = (0..5)
            .map(|u| (0..5).map(|v| if u == v { 0.0 } else { w.dist(u, v) + 5.0 }).collect())
            .collect();
        let ms = validate_vertex_metric(&k, &w, &shifted).unwrap();
        assert!(qi_constants_check(&ms, &w, 1.0, 5.0).pass);

        let tripled: Vec<Vec<f64>> = (0..5).map(|u| (0..5).map(|v| 3.0 * w.dist(u, v)).collect()).collect();
        let mt = validate_vertex_metric(&k, &w, &tripled).unwrap();
        let r = qi_constants_check(&mt, &w, 2.0, 0.0);
        assert!(!r.pass);
        assert!(!r.witnesses.is_empty());
    }

    #[test]
    fn double_difference_examples() {
        let w = word_metric(&path(4)).unwrap();
        // a=0, b=1, c=2, d=3
        assert_eq!(double_difference_vertices(&w, 0, 1, 3, 2), 0.0);
        assert_eq!(double_difference_vertices(&w, 2, 2, 0, 3), 0.0);
        assert_eq!(double_difference_vertices(&w, 0, 3, 1, 2), -double_difference_vertices(&w, 3, 0, 1, 2));
    }

    #[test]
    fn gromov_product_basics() {
        let w = word_metric(&path(3)).unwrap();
        assert_eq!(gromov_product_vertices(&w, 0, 2, 0), 0.0);
        // a - c - b with c in the middle
        assert_eq!(gromov_product_vertices(&w, 0, 2, 1), 0.0);
        assert_eq!(gromov_product_vertices(&w, 1, 2, 0), 1.0);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(hyperbolicity_delta(&word_metric(&path(6)).unwrap()), 0.0);
        let single = SimplicialComplex::build(&["a"], [["a"]]).unwrap();
        assert_eq!(hyperbolicity_delta(&word_metric(&single).unwrap()), 0.0);
        let k4 = SimplicialComplex::build(&["a", "b", "c", "d"], [vec!["a", "b", "c", "d"]]).unwrap();
        assert!(hyperbolicity_delta(&word_metric(&k4).unwrap()) <= 1.0);
    }
}
