//! Brute-force reference computations, written without reusing any solver
//! code so they can serve as ground truth for it.
//!
//! * [`GridOracle`]: shortest paths over all points with coordinates in
//!   `{0, 1/n, .., 1}`. Two grid points of one simplex at l¹ distance `k/n`
//!   are joined by a chain of `k` unit moves (shift `1/n` of weight between
//!   two vertices of the simplex), so breadth-first search over unit moves
//!   finds the same distances as the complete per-simplex graph.
//! * [`exhaustive_metric_scan`]: every symmetry, identity and triangle
//!   violation of a distance function on a finite sample.
//! * [`tree_gromov_oracle`] and friends: combinatorial answers on trees.

use std::collections::{HashMap, VecDeque};

use crate::complex::{BarycentricPoint, SimplicialComplex, VertexId};
use crate::error::{Error, Result};

type GridKey = Vec<(VertexId, u32)>;

/// All grid points of a complex at resolution `1/n`, with unit moves.
#[derive(Clone, Debug)]
pub struct GridOracle {
    n: u32,
    index: HashMap<GridKey, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl GridOracle {
    pub fn new(complex: &SimplicialComplex, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::ResolutionTooCoarse(n));
        }
        let mut oracle = GridOracle { n, index: HashMap::new(), adjacency: Vec::new() };
        for sigma in complex.maximal_simplices() {
            let vs = sigma.vertices();
            let mut counts = vec![0u32; vs.len()];
            compositions(n, &mut counts, 0, &mut |c| {
                let here = oracle.intern(key_of(vs, c));
                for from in 0..vs.len() {
                    if c[from] == 0 {
                        continue;
                    }
                    for to in 0..vs.len() {
                        if to != from {
                            let mut moved = c.to_vec();
                            moved[from] -= 1;
                            moved[to] += 1;
                            let there = oracle.intern(key_of(vs, &moved));
                            oracle.adjacency[here].push(there);
                        }
                    }
                }
            });
        }
        Ok(oracle)
    }

    pub fn resolution(&self) -> u32 {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    fn intern(&mut self, key: GridKey) -> usize {
        let next = self.adjacency.len();
        let id = *self.index.entry(key).or_insert(next);
        if id == next {
            self.adjacency.push(Vec::new());
        }
        id
    }

    /// The grid node nearest to `p` (largest-remainder rounding), and its
    /// l¹ offset from `p`. Errors when the offset exceeds half a grid step.
    pub fn snap(&self, p: &BarycentricPoint) -> Result<(usize, f64)> {
        let n = f64::from(self.n);
        let mut parts: Vec<(VertexId, u32, f64)> = p
            .weights()
            .iter()
            .map(|&(v, w)| {
                let scaled = w * n;
                (v, scaled.floor() as u32, scaled - scaled.floor())
            })
            .collect();
        let assigned: u32 = parts.iter().map(|p| p.1).sum();
        let mut order: Vec<usize> = (0..parts.len()).collect();
        order.sort_by(|&a, &b| parts[b].2.total_cmp(&parts[a].2).then(a.cmp(&b)));
        for &i in order.iter().take((self.n - assigned.min(self.n)) as usize) {
            parts[i].1 += 1;
        }
        let offset: f64 = 0.5
            * p.weights()
                .iter()
                .zip(&parts)
                .map(|(&(_, w), &(_, k, _))| (w - f64::from(k) / n).abs())
                .sum::<f64>();
        if offset > 0.5 / n {
            return Err(Error::PointNotOnGrid(self.n));
        }
        let key: GridKey = parts.into_iter().filter(|p| p.1 > 0).map(|(v, k, _)| (v, k)).collect();
        let id = self.index.get(&key).copied().ok_or(Error::PointNotOnGrid(self.n))?;
        Ok((id, offset))
    }

    /// Grid shortest-path length between the nodes nearest to `x` and `y`.
    pub fn distance(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<f64> {
        let (s, _) = self.snap(x)?;
        let (t, _) = self.snap(y)?;
        let steps = self.bfs(s, Some(t))[t];
        if steps == u32::MAX {
            return Err(Error::ResolutionTooCoarse(self.n));
        }
        Ok(f64::from(steps) / f64::from(self.n))
    }

    fn bfs(&self, source: usize, target: Option<usize>) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adjacency.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if Some(u) == target {
                break;
            }
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

fn key_of(vs: &[VertexId], counts: &[u32]) -> GridKey {
    vs.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&v, &c)| (v, c)).collect()
}

/// Calls `f` on every vector of `counts.len()` nonnegative integers summing
/// to `remaining` (with the first `at` entries already fixed).
fn compositions(remaining: u32, counts: &mut [u32], at: usize, f: &mut impl FnMut(&[u32])) {
    if at + 1 == counts.len() {
        counts[at] = remaining;
        f(counts);
        return;
    }
    for k in 0..=remaining {
        counts[at] = k;
        compositions(remaining - k, counts, at + 1, f);
    }
}

/// Grid shortest-path value at resolution `1/n`; builds the grid per call.
pub fn grid_oracle_path_distance(
    complex: &SimplicialComplex,
    x: &BarycentricPoint,
    y: &BarycentricPoint,
    n: u32,
) -> Result<f64> {
    GridOracle::new(complex, n)?.distance(x, y)
}

/// Acceptance tolerance for grid agreement: `dim · h · (1 + exact)`.
pub fn grid_tolerance(dimension: usize, n: u32, exact: f64) -> f64 {
    dimension as f64 / f64::from(n) * (1.0 + exact)
}

/// A failure of the metric axioms on a sample, indexed into the sample.
#[derive(Clone, Debug, PartialEq)]
pub enum ScanViolation {
    Asymmetric { i: usize, j: usize, margin: f64 },
    /// `d(p, p) != 0`.
    NonzeroSelfDistance { i: usize, value: f64 },
    /// `d(p, q) = 0` (within tolerance) for distinct `p`, `q`.
    ZeroBetweenDistinct { i: usize, j: usize },
    Negative { i: usize, j: usize, value: f64 },
    Triangle { i: usize, j: usize, k: usize, margin: f64 },
}

/// Checks every pair and triple of `points` under `d`, with slack `tol` on
/// the triangle inequality and symmetry. Cubic in the sample size; meant
/// for samples of at most a couple hundred points.
pub fn exhaustive_metric_scan<P: PartialEq>(
    points: &[P],
    tol: f64,
    mut d: impl FnMut(&P, &P) -> f64,
) -> Vec<ScanViolation> {
    let n = points.len();
    let mut table = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            table[i * n + j] = d(&points[i], &points[j]);
        }
    }
    let at = |i: usize, j: usize| table[i * n + j];
    let mut out = Vec::new();
    for i in 0..n {
        if at(i, i) != 0.0 {
            out.push(ScanViolation::NonzeroSelfDistance { i, value: at(i, i) });
        }
        for j in 0..n {
            if at(i, j) < 0.0 {
                out.push(ScanViolation::Negative { i, j, value: at(i, j) });
            }
            if j > i {
                let margin = (at(i, j) - at(j, i)).abs();
                if margin > tol {
                    out.push(ScanViolation::Asymmetric { i, j, margin });
                }
                if at(i, j) <= tol && points[i] != points[j] {
                    out.push(ScanViolation::ZeroBetweenDistinct { i, j });
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let margin = at(i, k) - at(i, j) - at(j, k);
                if margin > tol {
                    out.push(ScanViolation::Triangle { i, j, k, margin });
                }
            }
        }
    }
    out
}

fn bfs_distances(complex: &SimplicialComplex, source: VertexId) -> (Vec<u32>, Vec<Option<VertexId>>) {
    let n = complex.vertex_count();
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![None; n];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in complex.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    (dist, parent)
}

/// Whether the 1-skeleton is a tree (connected with `n - 1` edges).
pub fn is_tree(complex: &SimplicialComplex) -> bool {
    let n = complex.vertex_count();
    let edges: usize = (0..n).map(|v| complex.neighbors(v).len()).sum::<usize>() / 2;
    n > 0 && edges == n - 1 && bfs_distances(complex, 0).0.iter().all(|&d| d != u32::MAX)
}

/// Graph distance on a tree, by breadth-first search from `a`.
pub fn tree_distance(complex: &SimplicialComplex, a: VertexId, b: VertexId) -> Result<u32> {
    if !is_tree(complex) {
        return Err(Error::NotATree);
    }
    Ok(bfs_distances(complex, a).0[b])
}

/// `⟨a|b⟩_c` on a tree, computed as the distance from `c` to the `a`–`b` path.
pub fn tree_gromov_oracle(complex: &SimplicialComplex, a: VertexId, b: VertexId, c: VertexId) -> Result<u32> {
    if !is_tree(complex) {
        return Err(Error::NotATree);
    }
    let (_, parent) = bfs_distances(complex, a);
    let mut on_path = vec![b];
    let mut cur = b;
    while let Some(p) = parent[cur] {
        on_path.push(p);
        cur = p;
    }
    let (from_c, _) = bfs_distances(complex, c);
    Ok(on_path.iter().map(|&v| from_c[v]).min().expect("path contains b"))
}

/// `d(x,y) − d(x',y) − d(x,y') + d(x',y')` for the tree's graph metric.
pub fn tree_double_difference(
    complex: &SimplicialComplex,
    x: VertexId,
    x2: VertexId,
    y: VertexId,
    y2: VertexId,
) -> Result<i64> {
    let d = |a, b| tree_distance(complex, a, b).map(i64::from);
    Ok(d(x, y)? - d(x2, y)? - d(x, y2)? + d(x2, y2)?)
}
