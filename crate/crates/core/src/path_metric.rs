//! The l¹-path metric between arbitrary points of a complex.
//!
//! A path from `x` to `y` is a sequence of points in which consecutive
//! points share a simplex; its length is the sum of per-simplex l¹
//! distances. The distance is the least length over all paths.
//!
//! Exact evaluation works over *chains* of maximal simplices. For a fixed
//! chain `σ_1..σ_r` the best path has its breakpoints in the faces
//! `σ_i ∩ σ_{i+1}`, and finding them is a linear program. The search
//! enumerates chains depth-first with branch-and-bound, using three facts:
//!
//! * A chain that revisits a simplex, or in which some breakpoint face lies
//!   inside a non-neighbouring chain simplex, can be shortcut without
//!   increasing length (the per-simplex metric is the restriction of the
//!   path metric). Only chains free of such shortcuts are enumerated.
//! * Each in-simplex step moves weight between vertices at graph distance
//!   one, so its length is its transport cost under the word metric. The
//!   path length is therefore at least the optimal transport cost from `x`
//!   to `y`, and a partial chain ending anywhere in its last simplex can be
//!   completed no more cheaply than transport allows.
//! * Any simplex whose graph distance to `supp(x)` plus its graph distance to
//!   `supp(y)` exceeds the incumbent cannot carry an improving path.
//!
//! When the search stops before it can rule out every open branch the
//! result is [`Error::ChainBudgetExceeded`], never an approximation.

use crate::complex::{
    common_simplex, coordinate_l1, is_sorted_subset, BarycentricPoint, Simplex, SimplicialComplex, VertexId,
    TOL,
};
use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::vertex_metrics::{word_metric, WordMetricTable};

/// A sequence of simplices with consecutive nonempty intersections.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Chain {
    simplices: Vec<Simplex>,
}

impl Chain {
    pub fn new(simplices: Vec<Simplex>) -> Result<Self> {
        if simplices.is_empty() {
            return Err(Error::EmptySimplex);
        }
        for (i, pair) in simplices.windows(2).enumerate() {
            if pair[0].intersection(&pair[1]).is_none() {
                return Err(Error::EmptyIntersection { index: i });
            }
        }
        Ok(Chain { simplices })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

/// A polygonal path `a_0..a_r` with carriers `σ_1..σ_r`, `a_{i-1}, a_i ∈ σ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathWitness {
    pub points: Vec<BarycentricPoint>,
    pub carriers: Vec<Simplex>,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathOptions {
    /// Longest chain the search may build. `None` uses the number of maximal
    /// simplices for shortcut-free chains and `2·⌈U⌉ + 3` otherwise, where
    /// `U` is the routing upper bound.
    pub max_chain_length: Option<usize>,
    /// Restrict the search to shortcut-free chains.
    pub simple_chains_only: bool,
    /// Use the closed-form answers for points in a common simplex and for
    /// vertex pairs instead of searching.
    pub shortcuts: bool,
    /// Hard cap on visited search nodes.
    pub max_nodes: usize,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { max_chain_length: None, simple_chains_only: true, shortcuts: true, max_nodes: 2_000_000 }
    }
}

/// Sum of per-simplex l¹ lengths along a path with explicit carriers.
pub fn path_length(complex: &SimplicialComplex, points: &[BarycentricPoint], carriers: &[Simplex]) -> Result<f64> {
    if points.len() != carriers.len() + 1 {
        return Err(Error::InvalidCarrier { index: carriers.len() });
    }
    let mut total = 0.0;
    for (i, carrier) in carriers.iter().enumerate() {
        let (a, b) = (&points[i], &points[i + 1]);
        let inside = |p: &BarycentricPoint| p.support_vertices().all(|v| carrier.contains(v));
        if !complex.is_simplex(carrier.vertices()) || !inside(a) || !inside(b) {
            return Err(Error::InvalidCarrier { index: i });
        }
        total += coordinate_l1(a, b);
    }
    Ok(total)
}

/// Optimal breakpoints for a fixed chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSolution {
    pub value: f64,
    /// `a_0 = x, a_1, .., a_r = y`.
    pub breakpoints: Vec<BarycentricPoint>,
}

enum ChainEnd<'a> {
    Fixed(&'a BarycentricPoint),
    /// Free endpoint in the last simplex, charged the cost of transporting
    /// it onto `target` with ground costs from `word`. That cost is a lower
    /// bound on the remaining path length, since every in-simplex step moves
    /// mass between vertices at graph distance one.
    Toward { target: &'a BarycentricPoint, word: &'a WordMetricTable },
}

/// Shortest path from `x` to `y` whose i-th step lies in the i-th simplex
/// of `chain`.
pub fn chain_lp(chain: &Chain, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<ChainSolution> {
    let refs: Vec<&Simplex> = chain.simplices.iter().collect();
    let (value, layers) = solve_chain(&refs, x, ChainEnd::Fixed(y))?;
    let r = layers.len() - 1;
    let breakpoints = layers
        .into_iter()
        .enumerate()
        .map(|(i, layer)| match i {
            0 => x.clone(),
            i if i == r => y.clone(),
            _ => BarycentricPoint::from_trusted(layer),
        })
        .collect();
    Ok(ChainSolution { value, breakpoints })
}

type Breakpoint = Vec<(VertexId, f64)>;

/// Builds and solves the chain program. Returns the optimal value and the
/// weights of every layer `a_0..a_r`.
fn solve_chain(
    chain: &[&Simplex],
    x: &BarycentricPoint,
    end: ChainEnd<'_>,
) -> Result<(f64, Vec<Breakpoint>)> {
    let r = chain.len();
    if !x.support_vertices().all(|v| chain[0].contains(v)) {
        return Err(Error::EndpointNotInCarrier);
    }
    if let ChainEnd::Fixed(y) = end {
        if !y.support_vertices().all(|v| chain[r - 1].contains(v)) {
            return Err(Error::EndpointNotInCarrier);
        }
    }

    // Layer i holds either fixed weights or LP variables over a vertex set.
    enum Layer {
        Fixed(Vec<(VertexId, f64)>),
        Var(Vec<(VertexId, usize)>),
    }
    let mut n_vars = 0;
    let mut alloc = |vs: &[VertexId]| {
        let start = n_vars;
        n_vars += vs.len();
        vs.iter().enumerate().map(|(k, &v)| (v, start + k)).collect::<Vec<_>>()
    };
    let mut layers = vec![Layer::Fixed(x.weights().to_vec())];
    for i in 1..r {
        let face = chain[i - 1].intersection(chain[i]).ok_or(Error::EmptyIntersection { index: i - 1 })?;
        layers.push(Layer::Var(alloc(face.vertices())));
    }
    let completion = match end {
        ChainEnd::Fixed(y) => {
            layers.push(Layer::Fixed(y.weights().to_vec()));
            None
        }
        ChainEnd::Toward { target, word } => {
            layers.push(Layer::Var(alloc(chain[r - 1].vertices())));
            Some((target, word))
        }
    };

    let layer_vertices = |l: &Layer| -> Vec<VertexId> {
        match l {
            Layer::Fixed(w) => w.iter().map(|&(v, _)| v).collect(),
            Layer::Var(vs) => vs.iter().map(|&(v, _)| v).collect(),
        }
    };
    // Per step, one (plus, minus) slack pair for every vertex either layer touches.
    let mut steps = Vec::with_capacity(r);
    for i in 1..=r {
        let mut touched = layer_vertices(&layers[i - 1]);
        touched.extend(layer_vertices(&layers[i]));
        touched.sort_unstable();
        touched.dedup();
        let slacks: Vec<(VertexId, usize)> = touched
            .into_iter()
            .map(|v| {
                n_vars += 2;
                (v, n_vars - 2)
            })
            .collect();
        steps.push(slacks);
    }

    // Transport plan t[v][w] from the free endpoint onto the target.
    let transport: Vec<(VertexId, VertexId, usize)> = match (completion, &layers[r]) {
        (Some((target, _)), Layer::Var(vs)) => vs
            .iter()
            .flat_map(|&(v, _)| target.support_vertices().map(move |w| (v, w)))
            .map(|(v, w)| {
                n_vars += 1;
                (v, w, n_vars - 1)
            })
            .collect(),
        _ => Vec::new(),
    };

    let mut lp = LinearProgram::new(n_vars);
    for slacks in &steps {
        for &(_, s) in slacks {
            lp.set_cost(s, 0.5);
            lp.set_cost(s + 1, 0.5);
        }
    }
    if let (Some((target, word)), Layer::Var(vs)) = (completion, &layers[r]) {
        for &(v, w, t) in &transport {
            lp.set_cost(t, f64::from(word.get(v, w)));
        }
        for &(v, j) in vs {
            let mut coeffs: Vec<_> = transport.iter().filter(|e| e.0 == v).map(|e| (e.2, 1.0)).collect();
            coeffs.push((j, -1.0));
            lp.add_eq(coeffs, 0.0);
        }
        for &(w, yw) in target.weights() {
            lp.add_eq(transport.iter().filter(|e| e.1 == w).map(|e| (e.2, 1.0)).collect(), yw);
        }
    }
    for layer in &layers {
        if let Layer::Var(vs) = layer {
            lp.add_eq(vs.iter().map(|&(_, j)| (j, 1.0)).collect(), 1.0);
        }
    }
    let term = |l: &Layer, v: VertexId| -> (Option<usize>, f64) {
        match l {
            Layer::Fixed(w) => (None, w.iter().find(|&&(u, _)| u == v).map_or(0.0, |&(_, x)| x)),
            Layer::Var(vs) => (vs.iter().find(|&&(u, _)| u == v).map(|&(_, j)| j), 0.0),
        }
    };
    // a_{i-1,v} - a_{i,v} - plus + minus = 0
    for (i, slacks) in steps.iter().enumerate() {
        for &(v, s) in slacks {
            let (prev_var, prev_fixed) = term(&layers[i], v);
            let (next_var, next_fixed) = term(&layers[i + 1], v);
            let mut coeffs = vec![(s, -1.0), (s + 1, 1.0)];
            if let Some(j) = prev_var {
                coeffs.push((j, 1.0));
            }
            if let Some(j) = next_var {
                coeffs.push((j, -1.0));
            }
            lp.add_eq(coeffs, next_fixed - prev_fixed);
        }
    }

    let sol = lp.solve().map_err(|e| Error::LinearProgram(e.to_string()))?;
    let weights = layers
        .iter()
        .map(|l| match l {
            Layer::Fixed(w) => w.clone(),
            Layer::Var(vs) => vs.iter().map(|&(v, j)| (v, sol.x[j])).collect(),
        })
        .collect();
    Ok((sol.value, weights))
}

/// Which admissible lower bound a value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    /// Half the coordinate-wise l¹ variation.
    Coordinate,
    /// One, when the supports are disjoint.
    DisjointSupport,
    /// Full-weight crossings of word-metric spheres.
    Sphere,
    /// Optimal transport cost with word-metric ground costs.
    Transport,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Coordinate => "coordinate",
            BoundKind::DisjointSupport => "disjoint-support",
            BoundKind::Sphere => "sphere",
            BoundKind::Transport => "transport",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBound {
    pub kind: BoundKind,
    pub value: f64,
}

/// Sphere-crossing bound about `centre`, for paths from `x` to `y`.
///
/// With `S_k` the word-metric spheres about `centre` and `w_k(p)` the weight
/// of `p` on `S_k`: consecutive path points share a simplex, so the largest
/// sphere index in the support grows by at most one per step. If `supp(x)`
/// lies within radius `h_x` and `y` reaches radius `h_y`, then for every
/// `h_x <= k < h_y` some path point has all of its weight on `S_k`, so the
/// total variation of `w_k` is at least `(1 - w_k(x)) + (1 - w_k(y))`.
/// Every other sphere contributes at least `|w_k(x) - w_k(y)|`, and the
/// length is at least half the sum over spheres.
fn sphere_bound_about(word: &WordMetricTable, centre: VertexId, x: &BarycentricPoint, y: &BarycentricPoint) -> f64 {
    let idx = |v: VertexId| word.get(centre, v) as usize;
    let hx = x.support_vertices().map(idx).max().unwrap_or(0);
    let hy = y.support_vertices().map(idx).max().unwrap_or(0);
    let top = hx.max(hy);
    let mut wx = vec![0.0; top + 1];
    let mut wy = vec![0.0; top + 1];
    for &(v, w) in x.weights() {
        wx[idx(v)] += w;
    }
    for &(v, w) in y.weights() {
        wy[idx(v)] += w;
    }
    let total: f64 = (0..=top)
        .map(|k| {
            if hx <= k && k < hy {
                (1.0 - wx[k]) + (1.0 - wy[k])
            } else {
                (wx[k] - wy[k]).abs()
            }
        })
        .sum();
    0.5 * total
}

/// Admissible lower bounds on the path distance; every value is provably at
/// most the true distance.
pub fn lower_bounds(word: &WordMetricTable, x: &BarycentricPoint, y: &BarycentricPoint) -> Vec<LowerBound> {
    let coordinate = coordinate_l1(x, y);
    let disjoint = if x.disjoint_support(y) { 1.0 } else { 0.0 };
    let mut sphere: f64 = 0.0;
    for c in 0..word_len(word) {
        sphere = sphere.max(sphere_bound_about(word, c, x, y)).max(sphere_bound_about(word, c, y, x));
    }
    vec![
        LowerBound { kind: BoundKind::Coordinate, value: coordinate },
        LowerBound { kind: BoundKind::DisjointSupport, value: disjoint },
        LowerBound { kind: BoundKind::Sphere, value: sphere },
        LowerBound { kind: BoundKind::Transport, value: transport_cost(word, x, y) },
    ]
}

/// Least cost of moving the weights of `x` onto those of `y` when a unit of
/// weight costs `d_G(u, v)` to move from `u` to `v`.
pub fn transport_cost(word: &WordMetricTable, x: &BarycentricPoint, y: &BarycentricPoint) -> f64 {
    if x == y {
        return 0.0;
    }
    let (xs, ys) = (x.weights(), y.weights());
    let mut lp = LinearProgram::new(xs.len() * ys.len());
    for (i, &(u, _)) in xs.iter().enumerate() {
        for (j, &(v, _)) in ys.iter().enumerate() {
            lp.set_cost(i * ys.len() + j, f64::from(word.get(u, v)));
        }
    }
    for (i, &(_, w)) in xs.iter().enumerate() {
        lp.add_eq((0..ys.len()).map(|j| (i * ys.len() + j, 1.0)).collect(), w);
    }
    for (j, &(_, w)) in ys.iter().enumerate() {
        lp.add_eq((0..xs.len()).map(|i| (i * ys.len() + j, 1.0)).collect(), w);
    }
    // A balanced transportation problem is always feasible and bounded.
    lp.solve().map(|s| s.value.max(0.0)).unwrap_or(0.0)
}

fn word_len(word: &WordMetricTable) -> usize {
    use crate::vertex_metrics::DistanceTable;
    word.len()
}

/// How an exact distance was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    Identical,
    CommonSimplex,
    VertexPair,
    ChainSearch { nodes: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Distance {
    pub value: f64,
    pub witness: PathWitness,
    pub method: Method,
    pub lower_bounds: Vec<LowerBound>,
}

/// The l¹-path metric of a connected complex, with its word metric cached.
#[derive(Clone, Debug)]
pub struct L1PathMetric<'a> {
    complex: &'a SimplicialComplex,
    word: WordMetricTable,
}

impl<'a> L1PathMetric<'a> {
    pub fn new(complex: &'a SimplicialComplex) -> Result<Self> {
        Ok(L1PathMetric { complex, word: word_metric(complex)? })
    }

    pub fn with_word(complex: &'a SimplicialComplex, word: WordMetricTable) -> Self {
        L1PathMetric { complex, word }
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.complex
    }

    pub fn word(&self) -> &WordMetricTable {
        &self.word
    }

    pub fn lower_bounds(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Vec<LowerBound> {
        lower_bounds(&self.word, x, y)
    }

    pub fn best_lower_bound(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> f64 {
        self.lower_bounds(x, y).iter().map(|b| b.value).fold(0.0, f64::max)
    }

    /// Exact path distance with an attaining witness.
    pub fn distance(&self, x: &BarycentricPoint, y: &BarycentricPoint, opts: &PathOptions) -> Result<L1Distance> {
        let bounds = self.lower_bounds(x, y);
        let (witness, method) = if x == y {
            let carrier = x.support();
            (PathWitness { points: vec![x.clone(), y.clone()], carriers: vec![carrier], length: 0.0 }, Method::Identical)
        } else if let Some(s) = common_simplex(self.complex, x, y).filter(|_| opts.shortcuts) {
            let length = coordinate_l1(x, y);
            (PathWitness { points: vec![x.clone(), y.clone()], carriers: vec![s], length }, Method::CommonSimplex)
        } else if let (Some(u), Some(v), true) = (x.as_vertex(), y.as_vertex(), opts.shortcuts) {
            (self.vertex_path(u, v), Method::VertexPair)
        } else {
            let (w, nodes) = self.search(x, y, opts)?;
            (w, Method::ChainSearch { nodes })
        };

        let recomputed = path_length(self.complex, &witness.points, &witness.carriers)?;
        if (recomputed - witness.length).abs() > TOL {
            return Err(Error::InternalInconsistency(format!(
                "witness length {recomputed} disagrees with solver value {}",
                witness.length
            )));
        }
        for b in &bounds {
            if witness.length < b.value - TOL {
                return Err(Error::InternalInconsistency(format!(
                    "path distance {} below {} bound {}",
                    witness.length,
                    b.kind.name(),
                    b.value
                )));
            }
        }
        Ok(L1Distance { value: witness.length, witness, method, lower_bounds: bounds })
    }

    fn vertex_path(&self, u: VertexId, v: VertexId) -> PathWitness {
        let route = self.word.geodesic(self.complex, u, v);
        self.edge_path_witness(&route)
    }

    fn edge_path_witness(&self, route: &[VertexId]) -> PathWitness {
        let points: Vec<_> = route.iter().map(|&v| BarycentricPoint::vertex(v)).collect();
        let carriers: Vec<_> = route
            .windows(2)
            .map(|e| Simplex::new(vec![e[0], e[1]]).expect("edge is nonempty"))
            .collect();
        let length = carriers.len() as f64;
        PathWitness { points, carriers, length }
    }

    /// x → v → (edge path) → w → y through the best pair of support vertices.
    fn routing_witness(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> PathWitness {
        let mut best: Option<(f64, VertexId, VertexId)> = None;
        for &(v, xv) in x.weights() {
            for &(w, yw) in y.weights() {
                let cost = (1.0 - xv) + f64::from(self.word.get(v, w)) + (1.0 - yw);
                if best.is_none_or(|(c, _, _)| cost < c) {
                    best = Some((cost, v, w));
                }
            }
        }
        let (_, v, w) = best.expect("points have nonempty supports");
        let mut points = Vec::new();
        let mut carriers = Vec::new();
        if x.as_vertex() != Some(v) {
            points.push(x.clone());
            carriers.push(x.support());
        }
        let inner = self.edge_path_witness(&self.word.geodesic(self.complex, v, w));
        points.extend(inner.points);
        carriers.extend(inner.carriers);
        if y.as_vertex() != Some(w) {
            points.push(y.clone());
            carriers.push(y.support());
        }
        let length = carriers
            .iter()
            .enumerate()
            .map(|(i, _)| coordinate_l1(&points[i], &points[i + 1]))
            .sum();
        PathWitness { points, carriers, length }
    }

    /// A shortcut-free chain never repeats a simplex, so the number of
    /// maximal simplices bounds its length. Chains with repeats have no such
    /// bound and get `2·⌈U⌉ + 3`, with `U` the routing upper bound.
    fn default_chain_cap(&self, x: &BarycentricPoint, y: &BarycentricPoint, opts: &PathOptions) -> usize {
        if opts.simple_chains_only {
            return self.complex.maximal_simplices().len();
        }
        let y_support: Vec<VertexId> = y.support_vertices().collect();
        let routing = 2 + self.word.set_distance(x.support_vertices(), y_support) as usize;
        2 * routing + 3
    }

    fn search(&self, x: &BarycentricPoint, y: &BarycentricPoint, opts: &PathOptions) -> Result<(PathWitness, usize)> {
        let k = self.complex;
        let incumbent = self.routing_witness(x, y);

        let set_dist = |s: &Simplex, p: &BarycentricPoint| -> f64 {
            f64::from(self.word.set_distance(s.vertices().iter().copied(), p.support_vertices().collect::<Vec<_>>()))
        };
        let maximal = k.maximal_simplices();
        let reach: Vec<f64> = maximal.iter().map(|s| set_dist(s, x) + set_dist(s, y)).collect();
        let max_len = opts.max_chain_length.unwrap_or_else(|| self.default_chain_cap(x, y, opts)).max(1);

        let mut search = Search {
            complex: k,
            x,
            y,
            opts,
            word: &self.word,
            reach,
            max_len,
            nodes: 0,
            best_value: incumbent.length,
            best: None,
            unresolved: f64::INFINITY,
            node_cap_hit: false,
            y_support: y.support(),
        };
        let x_support = x.support();
        for start in k.maximal_containing(x_support.vertices()) {
            let mut chain = vec![start];
            search.dfs(&mut chain)?;
        }

        if search.node_cap_hit {
            return Err(Error::ChainBudgetExceeded(format!("node limit {}", opts.max_nodes)));
        }
        if search.unresolved < search.best_value - TOL {
            return Err(Error::ChainBudgetExceeded(format!(
                "chain length {max_len} with open bound {} below incumbent {}",
                search.unresolved, search.best_value
            )));
        }
        let nodes = search.nodes;
        let witness = match search.best {
            None => incumbent,
            Some((chain, sol)) => {
                let carriers: Vec<Simplex> = chain.iter().map(|&i| maximal[i].clone()).collect();
                let length = path_length(k, &sol.breakpoints, &carriers)?;
                PathWitness { points: sol.breakpoints, carriers, length }
            }
        };
        Ok((witness, nodes))
    }
}

struct Search<'s> {
    complex: &'s SimplicialComplex,
    x: &'s BarycentricPoint,
    y: &'s BarycentricPoint,
    opts: &'s PathOptions,
    word: &'s WordMetricTable,
    reach: Vec<f64>,
    max_len: usize,
    nodes: usize,
    best_value: f64,
    best: Option<(Vec<usize>, ChainSolution)>,
    /// Smallest bound among branches cut off by the length limit.
    unresolved: f64,
    node_cap_hit: bool,
    y_support: Simplex,
}

impl Search<'_> {
    fn simplices(&self, chain: &[usize]) -> Vec<&Simplex> {
        let maximal = self.complex.maximal_simplices();
        chain.iter().map(|&i| &maximal[i]).collect()
    }

    fn dfs(&mut self, chain: &mut Vec<usize>) -> Result<()> {
        if self.node_cap_hit {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.opts.max_nodes {
            self.node_cap_hit = true;
            return Ok(());
        }
        let maximal = self.complex.maximal_simplices();
        let last = *chain.last().expect("chain is nonempty");

        if self.y_support.is_face_of(&maximal[last]) {
            let refs = self.simplices(chain);
            let (value, layers) = solve_chain(&refs, self.x, ChainEnd::Fixed(self.y))?;
            if value < self.best_value - 1e-12 {
                let r = layers.len() - 1;
                let breakpoints = layers
                    .into_iter()
                    .enumerate()
                    .map(|(i, l)| match i {
                        0 => self.x.clone(),
                        i if i == r => self.y.clone(),
                        _ => BarycentricPoint::from_trusted(l),
                    })
                    .collect();
                self.best_value = value;
                self.best = Some((chain.clone(), ChainSolution { value, breakpoints }));
            }
            return Ok(());
        }

        let refs = self.simplices(chain);
        let (bound, _) = solve_chain(&refs, self.x, ChainEnd::Toward { target: self.y, word: self.word })?;
        if bound >= self.best_value - TOL {
            return Ok(());
        }
        if chain.len() >= self.max_len {
            self.unresolved = self.unresolved.min(bound);
            return Ok(());
        }

        let mut candidates: Vec<usize> = maximal[last]
            .vertices()
            .iter()
            .flat_map(|&v| self.complex.maximal_containing_vertex(v).iter().copied())
            .filter(|&c| c != last)
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        for cand in candidates {
            if self.reach[cand] > self.best_value + TOL {
                continue;
            }
            if self.opts.simple_chains_only && !self.extends_simply(chain, cand) {
                continue;
            }
            chain.push(cand);
            self.dfs(chain)?;
            chain.pop();
        }
        Ok(())
    }

    /// Whether appending `cand` keeps the chain free of shortcuts: no
    /// repeated simplex and no breakpoint face (including `supp(x)`) inside
    /// a chain simplex other than its own two.
    fn extends_simply(&self, chain: &[usize], cand: usize) -> bool {
        if chain.contains(&cand) {
            return false;
        }
        let maximal = self.complex.maximal_simplices();
        let j = chain.len();
        let new_face = maximal[chain[j - 1]]
            .intersection(&maximal[cand])
            .expect("candidates intersect the last simplex");
        if chain[..j - 1].iter().any(|&k| new_face.is_face_of(&maximal[k])) {
            return false;
        }
        let x_support: Vec<VertexId> = self.x.support_vertices().collect();
        if is_sorted_subset(&x_support, maximal[cand].vertices()) {
            return false;
        }
        for i in 1..j {
            let face = maximal[chain[i - 1]].intersection(&maximal[chain[i]]).expect("chain is valid");
            if face.is_face_of(&maximal[cand]) {
                return false;
            }
        }
        true
    }
}

/// Exact l¹-path distance; builds the word metric on every call.
pub fn l1_path_distance(
    complex: &SimplicialComplex,
    x: &BarycentricPoint,
    y: &BarycentricPoint,
    opts: &PathOptions,
) -> Result<L1Distance> {
    L1PathMetric::new(complex)?.distance(x, y, opts)
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

    fn simplex(k: &SimplicialComplex, labels: &[&str]) -> Simplex {
        Simplex::new(labels.iter().map(|l| k.vertex_id(l).unwrap()).collect()).unwrap()
    }

    #[test]
    fn path_length_examples() {
        let k = path_uvw();
        let x = pt(&k, &[("u", 0.5), ("v", 0.5)]);
        let y = pt(&k, &[("v", 0.5), ("w", 0.5)]);
        let v = pt(&k, &[("v", 1.0)]);
        let uv = simplex(&k, &["u", "v"]);
        let vw = simplex(&k, &["v", "w"]);
        assert_eq!(path_length(&k, &[x.clone(), v.clone()], std::slice::from_ref(&uv)).unwrap(), 0.5);
        assert_eq!(path_length(&k, &[x.clone(), v, y.clone()], &[uv.clone(), vw.clone()]).unwrap(), 1.0);
        assert_eq!(path_length(&k, &[x.clone(), x.clone(), x.clone()], &[uv.clone(), uv.clone()]).unwrap(), 0.0);
        assert_eq!(path_length(&k, &[x, y], &[uv]), Err(Error::InvalidCarrier { index: 0 }));
    }

    #[test]
    fn chain_lp_examples() {
        let k = path_uvw();
        let x = pt(&k, &[("u", 0.25), ("v", 0.75)]);
        let y = pt(&k, &[("u", 0.75), ("v", 0.25)]);
        let uv = simplex(&k, &["u", "v"]);
        let vw = simplex(&k, &["v", "w"]);
        let single = Chain::new(vec![uv.clone()]).unwrap();
        assert!((chain_lp(&single, &x, &y).unwrap().value - 0.5).abs() < 1e-12);

        let mx = pt(&k, &[("u", 0.5), ("v", 0.5)]);
        let my = pt(&k, &[("v", 0.5), ("w", 0.5)]);
        let two = Chain::new(vec![uv.clone(), vw]).unwrap();
        let sol = chain_lp(&two, &mx, &my).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert_eq!(sol.breakpoints[1].as_vertex(), Some(k.vertex_id("v").unwrap()));

        let k4 = SimplicialComplex::build(&["u", "v", "w", "z"], [["u", "v"], ["w", "z"]]).unwrap();
        let bad = Chain::new(vec![simplex(&k4, &["u", "v"]), simplex(&k4, &["w", "z"])]);
        assert_eq!(bad, Err(Error::EmptyIntersection { index: 0 }));
    }

    #[test]
    fn lower_bound_examples() {
        let k = SimplicialComplex::build(&["a", "b", "c", "d"], [["a", "b"], ["b", "c"], ["c", "d"]]).unwrap();
        let word = word_metric(&k).unwrap();
        let x = pt(&k, &[("a", 0.3), ("b", 0.7)]);
        for b in lower_bounds(&word, &x, &x) {
            assert_eq!(b.value, 0.0, "{:?}", b.kind);
        }
        let a = pt(&k, &[("a", 1.0)]);
        let d = pt(&k, &[("d", 1.0)]);
        let bounds = lower_bounds(&word, &a, &d);
        assert_eq!(bounds[1].value, 1.0);
        assert_eq!(bounds[2].value, 3.0);
    }

    #[test]
    fn distance_examples() {
        let k = SimplicialComplex::build(&["a", "b", "c"], [["a", "b"], ["b", "c"]]).unwrap();
        let metric = L1PathMetric::new(&k).unwrap();
        let a = BarycentricPoint::vertex(0);
        let c = BarycentricPoint::vertex(2);
        let d = metric.distance(&a, &c, &PathOptions::default()).unwrap();
        assert_eq!(d.value, 2.0);
        assert_eq!(d.method, Method::VertexPair);

        let k = path_uvw();
        let metric = L1PathMetric::new(&k).unwrap();
        let x = pt(&k, &[("u", 0.5), ("v", 0.5)]);
        let y = pt(&k, &[("v", 0.5), ("w", 0.5)]);
        let d = metric.distance(&x, &y, &PathOptions::default()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_needs_interior_breakpoints() {
        // Strip of two triangles u0 v0 u1 and v0 u1 v1: the rung midpoints are
        // one apart, half the cost of going through vertices.
        let k = SimplicialComplex::build(&["u0", "u1", "v0", "v1"], [["u0", "v0", "u1"], ["v0", "u1", "v1"]])
            .unwrap();
        let metric = L1PathMetric::new(&k).unwrap();
        let x = pt(&k, &[("u0", 0.5), ("v0", 0.5)]);
        let y = pt(&k, &[("u1", 0.5), ("v1", 0.5)]);
        let d = metric.distance(&x, &y, &PathOptions::default()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12, "{}", d.value);
        assert!(matches!(d.method, Method::ChainSearch { .. }));
    }

    #[test]
    fn search_agrees_with_shortcuts() {
        let k = SimplicialComplex::build(
            &["a", "b", "c", "d", "e"],
            [vec!["a", "b", "c"], vec!["c", "d"], vec!["d", "e", "b"]],
        )
        .unwrap();
        let metric = L1PathMetric::new(&k).unwrap();
        let no_short = PathOptions { shortcuts: false, ..PathOptions::default() };
        for u in 0..5 {
            for v in 0..5 {
                let (x, y) = (BarycentricPoint::vertex(u), BarycentricPoint::vertex(v));
                let fast = metric.distance(&x, &y, &PathOptions::default()).unwrap().value;
                let slow = metric.distance(&x, &y, &no_short).unwrap().value;
                assert!((fast - slow).abs() < 1e-9, "{u} {v}: {fast} vs {slow}");
                assert_eq!(fast, f64::from(metric.word().get(u, v)));
            }
        }
    }

    #[test]
    fn tiny_length_cap_is_reported() {
        let labels: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
        let edges: Vec<Vec<String>> = (1..6).map(|i| vec![labels[i - 1].clone(), labels[i].clone()]).collect();
        let k = SimplicialComplex::build(&labels, edges).unwrap();
        let metric = L1PathMetric::new(&k).unwrap();
        let x = pt(&k, &[("p0", 0.5), ("p1", 0.5)]);
        let y = pt(&k, &[("p4", 0.5), ("p5", 0.5)]);
        // Transport completion already certifies the routing incumbent here,
        // so even a one-simplex cap suffices.
        let capped = PathOptions { max_chain_length: Some(1), ..PathOptions::default() };
        assert!((metric.distance(&x, &y, &capped).unwrap().value - 4.0).abs() < 1e-12);

        let ladder = SimplicialComplex::build(
            &["u0", "u1", "u2", "v0", "v1", "v2"],
            [["u0", "v0", "u1"], ["v0", "u1", "v1"], ["u1", "v1", "u2"], ["v1", "u2", "v2"]],
        )
        .unwrap();
        let metric = L1PathMetric::new(&ladder).unwrap();
        let x = pt(&ladder, &[("u0", 0.5), ("v0", 0.5)]);
        let y = pt(&ladder, &[("u2", 0.5), ("v2", 0.5)]);
        let capped = PathOptions { max_chain_length: Some(2), ..PathOptions::default() };
        assert!(matches!(metric.distance(&x, &y, &capped), Err(Error::ChainBudgetExceeded(_))));
        let d = metric.distance(&x, &y, &PathOptions::default()).unwrap();
        assert!((d.value - 2.0).abs() < 1e-12, "{}", d.value);
    }
}
