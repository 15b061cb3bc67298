//! Extending a vertex metric `d̂` to every point of the complex.
//!
//! The bilinear extension `D̂(x,y) = Σ x_u y_v d̂(u,v)` satisfies the triangle
//! inequality but has `D̂(x,x) > 0` away from the vertices. Capping it by
//! the rescaled path metric repairs this:
//!
//! ```text
//! d̃(x,y) = min( D̂(x,y), 3C·d_X(x,y) )
//! ```
//!
//! where `C` bounds `d̂` linearly by the word metric. The result is a metric
//! that agrees with `d̂` on vertices and with `D̂` on points with disjoint
//! supports.

use std::cmp::Ordering;

use serde::Serialize;

use crate::complex::{BarycentricPoint, SimplicialComplex, VertexId, TOL};
use crate::error::{Error, Result};
use crate::path_metric::{L1PathMetric, PathOptions};
use crate::vertex_metrics::{linear_bound_constant, DistanceTable, VertexMetric, WordMetricTable};

/// `Σ x_u y_v d̂(u,v)`.
pub fn bilinear_extension(metric: &impl DistanceTable, x: &BarycentricPoint, y: &BarycentricPoint) -> f64 {
    let mut total = 0.0;
    for &(u, xu) in x.weights() {
        for &(v, yv) in y.weights() {
            total += xu * yv * metric.dist(u, v);
        }
    }
    total
}

/// Which term of the minimum attained the extended distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Bilinear,
    PathMetric,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Bilinear => "bilinear",
            Branch::PathMetric => "l1path",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedDistance {
    pub value: f64,
    pub branch: Branch,
    pub bilinear: f64,
    /// The path distance, when it had to be computed. It is skipped when a
    /// lower bound alone shows the bilinear term is the smaller one.
    pub l1_path: Option<f64>,
}

/// Outcome of a check that needs quasi-isometry constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConstantCheck {
    /// No (A, B) attached to the metric.
    NotRun,
    Pass { margin: f64 },
    Fail { margin: f64, detail: String },
}

impl ConstantCheck {
    pub fn is_failure(&self) -> bool {
        matches!(self, ConstantCheck::Fail { .. })
    }
}

/// The metric `d̃` of a complex with a chosen vertex metric.
#[derive(Clone, Debug)]
pub struct ExtendedMetric<'a> {
    path: L1PathMetric<'a>,
    vertex: VertexMetric,
    scale: f64,
    options: PathOptions,
}

impl<'a> ExtendedMetric<'a> {
    /// Checks the metric's linear-bound constant against the word metric.
    pub fn new(complex: &'a SimplicialComplex, vertex: VertexMetric) -> Result<Self> {
        let path = L1PathMetric::new(complex)?;
        Self::with_path_metric(path, vertex)
    }

    pub fn with_path_metric(path: L1PathMetric<'a>, vertex: VertexMetric) -> Result<Self> {
        if vertex.len() != path.complex().vertex_count() {
            return Err(Error::MetricShape {
                rows: vertex.len(),
                cols: vertex.len(),
                expected: path.complex().vertex_count(),
            });
        }
        let c = linear_bound_constant(&vertex, path.word(), Some(vertex.linear_bound()))?;
        Ok(ExtendedMetric { path, vertex, scale: 3.0 * c, options: PathOptions::default() })
    }

    /// The word metric itself as `d̂`.
    pub fn word(complex: &'a SimplicialComplex) -> Result<Self> {
        let path = L1PathMetric::new(complex)?;
        let vertex = VertexMetric::from_word(path.word());
        Self::with_path_metric(path, vertex)
    }

    pub fn with_options(mut self, options: PathOptions) -> Self {
        self.options = options;
        self
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.path.complex()
    }

    pub fn word_metric(&self) -> &WordMetricTable {
        self.path.word()
    }

    pub fn path_metric(&self) -> &L1PathMetric<'a> {
        &self.path
    }

    pub fn vertex_metric(&self) -> &VertexMetric {
        &self.vertex
    }

    pub fn options(&self) -> &PathOptions {
        &self.options
    }

    pub fn linear_bound(&self) -> f64 {
        self.vertex.linear_bound()
    }

    /// The factor `3C` in front of the path metric.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `B′ = 2(A + B)`, when quasi-isometry constants are attached.
    pub fn b_prime(&self) -> Option<f64> {
        self.vertex.qi().map(|q| 2.0 * (q.a + q.b))
    }

    pub fn bilinear(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> f64 {
        let (x, y) = canonical_pair(x, y);
        bilinear_extension(&self.vertex, x, y)
    }

    pub fn l1_path(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<f64> {
        let (x, y) = canonical_pair(x, y);
        Ok(self.path.distance(x, y, &self.options)?.value)
    }

    /// `d̃(x,y)` with the attaining branch; ties go to the bilinear term.
    ///
    /// Arguments are put in a canonical order first, so `d̃(x,y)` and
    /// `d̃(y,x)` are computed identically and agree bit for bit.
    pub fn distance(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<ExtendedDistance> {
        let (x, y) = canonical_pair(x, y);
        let bilinear = bilinear_extension(&self.vertex, x, y);
        if x == y && x.is_vertex() {
            return Ok(ExtendedDistance { value: 0.0, branch: Branch::Bilinear, bilinear, l1_path: Some(0.0) });
        }
        if self.scale * self.path.best_lower_bound(x, y) >= bilinear {
            return Ok(ExtendedDistance { value: bilinear, branch: Branch::Bilinear, bilinear, l1_path: None });
        }
        let l1 = self.path.distance(x, y, &self.options)?.value;
        let capped = self.scale * l1;
        let (value, branch) =
            if bilinear <= capped { (bilinear, Branch::Bilinear) } else { (capped, Branch::PathMetric) };
        Ok(ExtendedDistance { value, branch, bilinear, l1_path: Some(l1) })
    }

    pub fn dist(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<f64> {
        Ok(self.distance(x, y)?.value)
    }

    /// Checks `d̃ <= D̂` and `D̂ − d̃ <= B′` for one pair.
    pub fn sandwich_check(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<ConstantCheck> {
        let Some(b_prime) = self.b_prime() else {
            return Ok(ConstantCheck::NotRun);
        };
        let d = self.distance(x, y)?;
        let gap = d.bilinear - d.value;
        let margin = (b_prime - gap).min(gap);
        if gap < -TOL || gap > b_prime + TOL {
            return Ok(ConstantCheck::Fail {
                margin,
                detail: format!("bilinear {} vs extended {} with B' = {b_prime}", d.bilinear, d.value),
            });
        }
        Ok(ConstantCheck::Pass { margin })
    }

    /// `⟨x,x'|y,y'⟩ = d̃(x,y) − d̃(x',y) − d̃(x,y') + d̃(x',y')`.
    pub fn double_difference(
        &self,
        x: &BarycentricPoint,
        x2: &BarycentricPoint,
        y: &BarycentricPoint,
        y2: &BarycentricPoint,
    ) -> Result<f64> {
        Ok(self.dist(x, y)? - self.dist(x2, y)? - self.dist(x, y2)? + self.dist(x2, y2)?)
    }

    /// The same combination of bilinear values.
    pub fn double_difference_hat(
        &self,
        x: &BarycentricPoint,
        x2: &BarycentricPoint,
        y: &BarycentricPoint,
        y2: &BarycentricPoint,
    ) -> f64 {
        self.bilinear(x, y) - self.bilinear(x2, y) - self.bilinear(x, y2) + self.bilinear(x2, y2)
    }

    /// `½(d̃(a,c) + d̃(b,c) − d̃(a,b))`, which is half of `⟨c,a|b,c⟩`.
    pub fn gromov_product(&self, a: &BarycentricPoint, b: &BarycentricPoint, c: &BarycentricPoint) -> Result<f64> {
        Ok(0.5 * (self.dist(a, c)? + self.dist(b, c)? - self.dist(a, b)?))
    }

    /// Checks that the extended and bilinear double differences are within
    /// `4B′` of each other.
    pub fn window_check(
        &self,
        x: &BarycentricPoint,
        x2: &BarycentricPoint,
        y: &BarycentricPoint,
        y2: &BarycentricPoint,
    ) -> Result<ConstantCheck> {
        let Some(b_prime) = self.b_prime() else {
            return Ok(ConstantCheck::NotRun);
        };
        let ext = self.double_difference(x, x2, y, y2)?;
        let hat = self.double_difference_hat(x, x2, y, y2);
        let margin = 4.0 * b_prime - (ext - hat).abs();
        if margin < -TOL {
            return Ok(ConstantCheck::Fail {
                margin,
                detail: format!("extended {ext} vs bilinear {hat}, window ±{}", 4.0 * b_prime),
            });
        }
        Ok(ConstantCheck::Pass { margin })
    }

    /// Largest `|d̃(u,v) − d̃(u,w) − d̃(w,v)|` over the triples with `w` on a
    /// word-metric geodesic from `u` to `v`; other triples are ignored.
    pub fn geodesic_defect(&self, triples: &[(VertexId, VertexId, VertexId)]) -> GeodesicDefect {
        let word = self.word_metric();
        let mut defect = GeodesicDefect { max: 0.0, triples: 0, witness: None };
        for &(u, w, v) in triples {
            if word.get(u, w) + word.get(w, v) != word.get(u, v) {
                continue;
            }
            defect.triples += 1;
            let d = |a, b| self.vertex.dist(a, b);
            let gap = (d(u, v) - d(u, w) - d(w, v)).abs();
            if gap > defect.max {
                defect.max = gap;
                defect.witness = Some((u, w, v));
            }
        }
        defect
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicDefect {
    pub max: f64,
    /// Number of geodesic triples examined.
    pub triples: usize,
    pub witness: Option<(VertexId, VertexId, VertexId)>,
}

fn point_order(a: &BarycentricPoint, b: &BarycentricPoint) -> Ordering {
    let (wa, wb) = (a.weights(), b.weights());
    for (&(u, x), &(v, y)) in wa.iter().zip(wb) {
        let o = u.cmp(&v).then(x.total_cmp(&y));
        if o != Ordering::Equal {
            return o;
        }
    }
    wa.len().cmp(&wb.len())
}

fn canonical_pair<'p>(x: &'p BarycentricPoint, y: &'p BarycentricPoint) -> (&'p BarycentricPoint, &'p BarycentricPoint) {
    if point_order(x, y) == Ordering::Greater {
        (y, x)
    } else {
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_uvw() -> SimplicialComplex {
        SimplicialComplex::build(&["u", "v", "w"], [["u", "v"], ["v", "w"]]).unwrap()
    }

    fn pt(k: &SimplicialComplex, w: &[(&str, f64)]) -> BarycentricPoint {
        BarycentricPoint::from_labels(k, w.iter().copied()).unwrap()
    }

    #[test]
    fn bilinear_examples() {
        let k = path_uvw();
        let m = ExtendedMetric::word(&k).unwrap();
        let u = pt(&k, &[("u", 1.0)]);
        let w = pt(&k, &[("w", 1.0)]);
        assert_eq!(m.bilinear(&u, &w), 2.0);
        let mid = pt(&k, &[("u", 0.5), ("v", 0.5)]);
        assert_eq!(m.bilinear(&mid, &mid), 0.5);
        assert_eq!(m.bilinear(&mid, &w), 1.5);
    }

    #[test]
    fn extended_examples() {
        let k = path_uvw();
        let m = ExtendedMetric::word(&k).unwrap();
        let x = pt(&k, &[("u", 0.5), ("v", 0.5)]);
        let y = pt(&k, &[("v", 0.5), ("w", 0.5)]);
        assert_eq!(m.dist(&x, &x).unwrap(), 0.0);
        assert_eq!(m.distance(&x, &x).unwrap().branch, Branch::PathMetric);
        let u = pt(&k, &[("u", 1.0)]);
        let w = pt(&k, &[("w", 1.0)]);
        assert_eq!(m.dist(&u, &w).unwrap(), 2.0);
        let d = m.distance(&x, &y).unwrap();
        assert_eq!(d.value, 1.0);
        assert_eq!(d.branch, Branch::Bilinear);
    }

    #[test]
    fn constant_checks() {
        let k = path_uvw();
        let m = ExtendedMetric::word(&k).unwrap();
        assert_eq!(m.b_prime(), Some(2.0));
        let x = pt(&k, &[("u", 0.5), ("v", 0.5)]);
        let w = pt(&k, &[("w", 1.0)]);
        assert!(matches!(m.sandwich_check(&x, &w).unwrap(), ConstantCheck::Pass { .. }));
        assert!(matches!(m.window_check(&x, &x, &w, &x).unwrap(), ConstantCheck::Pass { .. }));

        let word = m.word_metric().clone();
        let plain = crate::vertex_metrics::validate_vertex_metric(&k, &word, &VertexMetric::from_word(&word).matrix())
            .unwrap();
        let m = ExtendedMetric::new(&k, plain).unwrap();
        assert_eq!(m.sandwich_check(&x, &w).unwrap(), ConstantCheck::NotRun);
    }

    #[test]
    fn double_difference_basics() {
        let k = path_uvw();
        let m = ExtendedMetric::word(&k).unwrap();
        let x = pt(&k, &[("u", 0.3), ("v", 0.7)]);
        let y = pt(&k, &[("v", 0.2), ("w", 0.8)]);
        let z = pt(&k, &[("u", 1.0)]);
        assert_eq!(m.double_difference(&x, &x, &y, &z).unwrap(), 0.0);
        assert_eq!(m.gromov_product(&x, &y, &x).unwrap(), 0.0);
        let gp = m.gromov_product(&x, &y, &z).unwrap();
        let dd = m.double_difference(&z, &x, &y, &z).unwrap();
        assert!((2.0 * gp - dd).abs() < 1e-12);
    }

    #[test]
    fn geodesic_defect_of_word_metric_is_zero() {
        let k = path_uvw();
        let m = ExtendedMetric::word(&k).unwrap();
        let d = m.geodesic_defect(&[(0, 1, 2), (0, 2, 1), (2, 1, 0)]);
        assert_eq!(d.max, 0.0);
        assert_eq!(d.triples, 2);
    }
}
