//! Deterministic generators for test complexes.
//!
//! Vertex labels are zero-padded (`v00`, `v01`, ..) so that label order and
//! construction order agree.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Default dimension cap for clique (flag) completion.
pub const DEFAULT_MAX_DIM: usize = 3;

const MAX_VERTICES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// The full simplex of the given dimension.
    Simplex { dimension: usize },
    Path { vertices: usize },
    Cycle { vertices: usize },
    /// Complete rooted tree.
    Tree { branching: usize, depth: usize },
    /// Truncated Rips complex of a graph: cliques of the graph-distance-`r`
    /// neighbourhood graph, up to `max_dim`.
    RipsGraph { vertices: usize, edges: Vec<(usize, usize)>, radius: u32, max_dim: usize },
    /// Truncated Rips complex of a Euclidean point set.
    RipsPoints { points: Vec<Vec<f64>>, radius: f64, max_dim: usize },
    /// Connected random graph with edge probability `density`, flag-completed.
    Random { vertices: usize, density: f64, seed: u64, max_dim: usize },
}

pub fn generate(spec: &GeneratorSpec) -> Result<SimplicialComplex> {
    match *spec {
        GeneratorSpec::Simplex { dimension } => simplex(dimension),
        GeneratorSpec::Path { vertices } => path(vertices),
        GeneratorSpec::Cycle { vertices } => cycle(vertices),
        GeneratorSpec::Tree { branching, depth } => tree(branching, depth),
        GeneratorSpec::RipsGraph { vertices, ref edges, radius, max_dim } => {
            rips_graph(vertices, edges, radius, max_dim)
        }
        GeneratorSpec::RipsPoints { ref points, radius, max_dim } => rips_points(points, radius, max_dim),
        GeneratorSpec::Random { vertices, density, seed, max_dim } => random(vertices, density, seed, max_dim),
    }
}

fn labels(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("v{i:0width$}")).collect()
}

fn from_index_sets(n: usize, sets: Vec<Vec<usize>>) -> Result<SimplicialComplex> {
    let names = labels(n);
    let simplices: Vec<Vec<&str>> =
        sets.iter().map(|s| s.iter().map(|&i| names[i].as_str()).collect()).collect();
    SimplicialComplex::build(&names, simplices)
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameters("at least one vertex required".into()));
    }
    if n > MAX_VERTICES {
        return Err(Error::InvalidParameters(format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
    }
    Ok(())
}

/// One `dimension`-simplex with all of its faces.
pub fn simplex(dimension: usize) -> Result<SimplicialComplex> {
    if dimension > 16 {
        return Err(Error::InvalidParameters(format!("simplex dimension {dimension} exceeds 16")));
    }
    from_index_sets(dimension + 1, vec![(0..=dimension).collect()])
}

/// The path graph on `n` vertices.
pub fn path(n: usize) -> Result<SimplicialComplex> {
    check_size(n)?;
    let edges = (1..n).map(|i| vec![i - 1, i]).collect();
    from_index_sets(n, edges)
}

/// The cycle graph on `n ≥ 3` vertices.
pub fn cycle(n: usize) -> Result<SimplicialComplex> {
    if n < 3 {
        return Err(Error::InvalidParameters(format!("cycle needs at least 3 vertices, got {n}")));
    }
    check_size(n)?;
    let edges = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    from_index_sets(n, edges)
}

/// Complete rooted tree; vertices are numbered breadth-first from the root.
pub fn tree(branching: usize, depth: usize) -> Result<SimplicialComplex> {
    if branching == 0 && depth > 0 {
        return Err(Error::InvalidParameters("tree branching must be positive".into()));
    }
    let mut n: usize = 1;
    let mut level: usize = 1;
    for _ in 0..depth {
        level = level.checked_mul(branching).filter(|&l| l <= MAX_VERTICES).ok_or_else(|| {
            Error::InvalidParameters(format!("tree({branching}, {depth}) is too large"))
        })?;
        n += level;
    }
    check_size(n)?;
    let edges = (1..n).map(|i| vec![(i - 1) / branching, i]).collect();
    from_index_sets(n, edges)
}

/// Maximal cliques of a graph given as sorted adjacency lists, each
/// truncated to at most `max_dim + 1` vertices by taking all subsets of
/// that size.
fn flag_simplices(adj: &[Vec<usize>], max_dim: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut cliques = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(adj, &mut r, (0..n).collect(), Vec::new(), &mut cliques);
    let cap = max_dim + 1;
    let mut out = Vec::new();
    for mut c in cliques {
        c.sort_unstable();
        if c.len() <= cap {
            out.push(c);
        } else {
            subsets_of_size(&c, cap, &mut Vec::new(), 0, &mut out);
        }
    }
    out
}

fn bron_kerbosch(adj: &[Vec<usize>], r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p.iter().chain(&x).copied().max_by_key(|&u| adj[u].len()).expect("p or x is nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|v| adj[pivot].binary_search(v).is_err()).collect();
    let (mut p, mut x) = (p, x);
    for v in candidates {
        let keep = |s: &[usize]| s.iter().copied().filter(|u| adj[v].binary_search(u).is_ok()).collect();
        r.push(v);
        bron_kerbosch(adj, r, keep(&p), keep(&x), out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

fn subsets_of_size(items: &[usize], k: usize, cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..items.len() {
        if items.len() - i < k - cur.len() {
            break;
        }
        cur.push(items[i]);
        subsets_of_size(items, k, cur, i + 1, out);
        cur.pop();
    }
}

fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidParameters(format!("edge ({a}, {b}) out of range for {n} vertices")));
        }
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    Ok(adj)
}

/// Truncated Rips complex of a graph at graph-distance scale `radius`.
pub fn rips_graph(n: usize, edges: &[(usize, usize)], radius: u32, max_dim: usize) -> Result<SimplicialComplex> {
    check_size(n)?;
    let adj = adjacency_from_edges(n, edges)?;
    let mut scaled = vec![Vec::new(); n];
    for (s, row) in scaled.iter_mut().enumerate() {
        let mut dist = vec![u32::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if dist[u] == radius {
                continue;
            }
            for &v in &adj[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        *row = (0..n).filter(|&v| v != s && dist[v] != u32::MAX).collect();
    }
    from_index_sets(n, flag_simplices(&scaled, max_dim))
}

/// Truncated Rips complex of Euclidean points: `u ~ v` iff `|u − v| <= radius`.
pub fn rips_points(points: &[Vec<f64>], radius: f64, max_dim: usize) -> Result<SimplicialComplex> {
    check_size(points.len())?;
    if radius.is_nan() || radius < 0.0 {
        return Err(Error::InvalidParameters(format!("radius {radius} must be nonnegative")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim || p.iter().any(|c| !c.is_finite())) {
        return Err(Error::InvalidParameters("points must be finite and of equal dimension".into()));
    }
    let n = points.len();
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() <= radius * radius;
    let adj: Vec<Vec<usize>> =
        (0..n).map(|u| (0..n).filter(|&v| v != u && close(&points[u], &points[v])).collect()).collect();
    from_index_sets(n, flag_simplices(&adj, max_dim))
}

/// A connected random flag complex: a random spanning tree plus every other
/// edge independently with probability `density`, then clique completion
/// up to `max_dim`.
pub fn random(n: usize, density: f64, seed: u64, max_dim: usize) -> Result<SimplicialComplex> {
    check_size(n)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameters(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((order[i], order[j]));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    let adj = adjacency_from_edges(n, &edges)?;
    from_index_sets(n, flag_simplices(&adj, max_dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_shapes() {
        let t = tree(2, 3).unwrap();
        assert_eq!(t.vertex_count(), 15);
        assert_eq!(t.edges().len(), 14);
        assert_eq!(t.dimension(), 1);

        let s = simplex(3).unwrap();
        assert_eq!(s.maximal_simplices().len(), 1);
        assert_eq!(s.faces().len(), 15);

        let c = cycle(6).unwrap();
        let edges: Vec<(usize, usize)> = c.edges();
        let r = rips_graph(6, &edges, 1, DEFAULT_MAX_DIM).unwrap();
        assert_eq!(r, c);
        assert_eq!(r.dimension(), 1);
    }

    #[test]
    fn rips_closes_cliques() {
        let c = cycle(6).unwrap();
        let r = rips_graph(6, &c.edges(), 2, DEFAULT_MAX_DIM).unwrap();
        // Every vertex sees four others; {0, 1, 2} and {0, 2, 4} are both cliques.
        assert!(r.is_simplex(&[0, 1, 2]));
        assert!(r.is_simplex(&[0, 2, 4]));
        assert!(!r.is_simplex(&[0, 3]));

        let full = rips_graph(6, &c.edges(), 3, 2).unwrap();
        assert_eq!(full.dimension(), 2);
        assert_eq!(full.maximal_simplices().len(), 20);
    }

    #[test]
    fn random_is_connected_and_reproducible() {
        for seed in 0..5 {
            let a = random(12, 0.2, seed, DEFAULT_MAX_DIM).unwrap();
            assert!(a.is_connected());
            assert_eq!(a, random(12, 0.2, seed, DEFAULT_MAX_DIM).unwrap());
        }
        assert!(random(4, 1.5, 0, 3).is_err());
    }

    #[test]
    fn labels_sort_in_construction_order() {
        let p = path(12).unwrap();
        assert_eq!(p.label(0), "v00");
        assert_eq!(p.label(11), "v11");
        assert_eq!(p.neighbors(10), &[9, 11]);
    }
}
