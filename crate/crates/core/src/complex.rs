//! Finite abstract simplicial complexes and barycentric points.
//!
//! Vertices are identified by string labels. Internally every vertex is an
//! index into the label list, and the label list is sorted lexicographically,
//! so index order and label order agree. All set iteration in this crate goes
//! through that order, which keeps every output reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

/// Index of a vertex inside its complex (position in the sorted label list).
pub type VertexId = usize;

/// Weights below this are treated as exact zeros.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Default comparison tolerance.
pub const TOL: f64 = 1e-9;

/// A nonempty, sorted, duplicate-free vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptySimplex);
        }
        vertices.sort_unstable();
        vertices.dedup();
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// `true` when every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn intersection(&self, other: &Simplex) -> Option<Simplex> {
        let common: Vec<_> = self.0.iter().copied().filter(|v| other.contains(*v)).collect();
        (!common.is_empty()).then_some(Simplex(common))
    }

    /// All nonempty faces, including `self`.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (1u64..(1u64 << n)).map(move |mask| {
            Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect())
        })
    }
}

pub(crate) fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|s| it.any(|b| b == s))
}

/// A finite simplicial complex, immutable after [`SimplicialComplex::build`].
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    maximal: Vec<Simplex>,
    faces: BTreeSet<Simplex>,
    adjacency: Vec<Vec<VertexId>>,
    containing: Vec<Vec<usize>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.maximal == other.maximal
    }
}

impl SimplicialComplex {
    /// Builds a complex from vertex labels and a list of simplices given by
    /// label. Listed simplices need not be maximal; the face closure is
    /// computed and only inclusion-maximal simplices are kept as generators.
    /// Vertices not covered by any listed simplex become isolated 0-simplices.
    pub fn build<S, T, I>(vertices: &[S], simplices: I) -> Result<Self>
    where
        S: AsRef<str>,
        T: AsRef<str>,
        I: IntoIterator,
        I::Item: IntoIterator<Item = T>,
    {
        let mut labels: Vec<String> = vertices.iter().map(|s| s.as_ref().to_owned()).collect();
        labels.sort();
        for pair in labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateVertex(pair[0].clone()));
            }
        }
        let index: HashMap<String, VertexId> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();

        let mut generators = BTreeSet::new();
        for simplex in simplices {
            let mut ids = Vec::new();
            for label in simplex {
                let label = label.as_ref();
                let id = *index
                    .get(label)
                    .ok_or_else(|| Error::UnknownVertexInSimplex(label.to_owned()))?;
                ids.push(id);
            }
            generators.insert(Simplex::new(ids)?);
        }
        Ok(Self::from_generators(labels, index, generators))
    }

    fn from_generators(
        labels: Vec<String>,
        index: HashMap<String, VertexId>,
        mut generators: BTreeSet<Simplex>,
    ) -> Self {
        let n = labels.len();
        let covered: BTreeSet<VertexId> =
            generators.iter().flat_map(|s| s.vertices().iter().copied()).collect();
        for v in 0..n {
            if !covered.contains(&v) {
                generators.insert(Simplex::vertex(v));
            }
        }
        // Larger simplices first so containment only has to look backwards.
        let mut by_size: Vec<Simplex> = generators.into_iter().collect();
        by_size.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut maximal: Vec<Simplex> = Vec::new();
        for s in by_size {
            if !maximal.iter().any(|m| s.is_face_of(m)) {
                maximal.push(s);
            }
        }
        maximal.sort();

        let mut faces = BTreeSet::new();
        for m in &maximal {
            faces.extend(m.faces());
        }

        let mut adjacency = vec![BTreeSet::new(); n];
        let mut containing = vec![Vec::new(); n];
        for (mi, m) in maximal.iter().enumerate() {
            for &u in m.vertices() {
                containing[u].push(mi);
                for &v in m.vertices() {
                    if u != v {
                        adjacency[u].insert(v);
                    }
                }
            }
        }
        let adjacency = adjacency.into_iter().map(|s| s.into_iter().collect()).collect();

        SimplicialComplex { labels, index, maximal, faces, adjacency, containing }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn vertex_id(&self, label: &str) -> Result<VertexId> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownVertex(label.to_owned()))
    }

    /// Inclusion-maximal simplices in canonical order.
    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    /// Every simplex of the complex (the full face closure).
    pub fn faces(&self) -> &BTreeSet<Simplex> {
        &self.faces
    }

    pub fn dimension(&self) -> usize {
        self.maximal.iter().map(Simplex::dimension).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    /// Indices (into [`Self::maximal_simplices`]) of the maximal simplices containing `v`.
    pub fn maximal_containing_vertex(&self, v: VertexId) -> &[usize] {
        &self.containing[v]
    }

    /// Indices of the maximal simplices containing the sorted vertex set `vs`.
    pub fn maximal_containing(&self, vs: &[VertexId]) -> Vec<usize> {
        match vs.first() {
            None => Vec::new(),
            Some(&v0) => self.containing[v0]
                .iter()
                .copied()
                .filter(|&mi| is_sorted_subset(vs, self.maximal[mi].vertices()))
                .collect(),
        }
    }

    /// Whether the sorted, duplicate-free vertex set `vs` spans a simplex.
    pub fn is_simplex(&self, vs: &[VertexId]) -> bool {
        match vs.first() {
            None => false,
            Some(&v0) => self.containing[v0]
                .iter()
                .any(|&mi| is_sorted_subset(vs, self.maximal[mi].vertices())),
        }
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// Labels of a simplex, for messages and serialization.
    pub fn simplex_labels(&self, s: &Simplex) -> Vec<String> {
        s.vertices().iter().map(|&v| self.labels[v].clone()).collect()
    }

    /// Checks the structural invariants: face closure of every maximal
    /// simplex and a simple 1-skeleton. Returns a description of the first
    /// problem found.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for m in &self.maximal {
            if m.len() <= 6 {
                for f in m.faces() {
                    if !self.faces.contains(&f) {
                        return Err(format!("face {:?} of {:?} missing", f, m));
                    }
                }
            }
        }
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.contains(&u) {
                return Err(format!("loop at vertex {}", self.labels[u]));
            }
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("repeated edge at vertex {}", self.labels[u]));
            }
        }
        for v in 0..self.vertex_count() {
            if self.containing[v].is_empty() {
                return Err(format!("vertex {} in no simplex", self.labels[v]));
            }
        }
        Ok(())
    }
}

/// A point of the complex in barycentric coordinates.
///
/// Stored sparsely as `(vertex, weight)` pairs sorted by vertex. Weights are
/// strictly positive, at least [`WEIGHT_FLOOR`], and sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycentricPoint {
    weights: Vec<(VertexId, f64)>,
}

impl BarycentricPoint {
    /// Normalizes `weights` and checks that the support spans a simplex of `complex`.
    pub fn new<I>(complex: &SimplicialComplex, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, f64)>,
    {
        let mut acc: BTreeMap<VertexId, f64> = BTreeMap::new();
        for (v, w) in weights {
            if v >= complex.vertex_count() {
                return Err(Error::UnknownVertex(format!("#{v}")));
            }
            if w < 0.0 || w.is_nan() {
                return Err(Error::NegativeWeight { vertex: complex.label(v).to_owned(), weight: w });
            }
            *acc.entry(v).or_default() += w;
        }
        let point = Self::normalized(acc.into_iter().collect())?;
        let support: Vec<_> = point.weights.iter().map(|&(v, _)| v).collect();
        if !complex.is_simplex(&support) {
            return Err(Error::SupportNotASimplex(
                support.iter().map(|&v| complex.label(v).to_owned()).collect(),
            ));
        }
        Ok(point)
    }

    /// Builds a point from label-keyed weights.
    pub fn from_labels<'a, I>(complex: &SimplicialComplex, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut pairs = Vec::new();
        for (label, w) in weights {
            pairs.push((complex.vertex_id(label)?, w));
        }
        Self::new(complex, pairs)
    }

    fn normalized(raw: Vec<(VertexId, f64)>) -> Result<Self> {
        let total: f64 = raw.iter().map(|&(_, w)| w).sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::WeightsNotNormalizable(total));
        }
        let kept: Vec<_> = raw
            .into_iter()
            .map(|(v, w)| (v, w / total))
            .filter(|&(_, w)| w >= WEIGHT_FLOOR)
            .collect();
        let total: f64 = kept.iter().map(|&(_, w)| w).sum();
        let weights = kept.into_iter().map(|(v, w)| (v, w / total)).collect();
        Ok(BarycentricPoint { weights })
    }

    /// Rebuilds a point from solver output without re-validating the support
    /// (the caller guarantees it lies in a known simplex).
    pub(crate) fn from_trusted(raw: Vec<(VertexId, f64)>) -> Self {
        let raw = raw.into_iter().map(|(v, w)| (v, w.max(0.0))).collect();
        Self::normalized(raw).expect("trusted weights must be normalizable")
    }

    /// The vertex `v` as a point.
    pub fn vertex(v: VertexId) -> Self {
        BarycentricPoint { weights: vec![(v, 1.0)] }
    }

    pub fn weights(&self) -> &[(VertexId, f64)] {
        &self.weights
    }

    pub fn weight(&self, v: VertexId) -> f64 {
        self.weights
            .binary_search_by_key(&v, |&(u, _)| u)
            .map(|i| self.weights[i].1)
            .unwrap_or(0.0)
    }

    pub fn support(&self) -> Simplex {
        Simplex(self.support_vertices().collect())
    }

    pub fn support_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.weights.iter().map(|&(v, _)| v)
    }

    /// `Some(v)` when the point is the vertex `v`.
    pub fn as_vertex(&self) -> Option<VertexId> {
        match self.weights.as_slice() {
            [(v, _)] => Some(*v),
            _ => None,
        }
    }

    pub fn is_vertex(&self) -> bool {
        self.weights.len() == 1
    }

    /// Whether the supports of `self` and `other` are disjoint.
    pub fn disjoint_support(&self, other: &BarycentricPoint) -> bool {
        !self.support_vertices().any(|v| other.weight(v) > 0.0)
    }

    /// Label-keyed weights, in canonical order.
    pub fn to_labels(&self, complex: &SimplicialComplex) -> BTreeMap<String, f64> {
        self.weights.iter().map(|&(v, w)| (complex.label(v).to_owned(), w)).collect()
    }
}

/// The smallest simplex containing both points, if one exists.
pub fn common_simplex(
    complex: &SimplicialComplex,
    x: &BarycentricPoint,
    y: &BarycentricPoint,
) -> Option<Simplex> {
    let union: BTreeSet<_> = x.support_vertices().chain(y.support_vertices()).collect();
    let union: Vec<_> = union.into_iter().collect();
    complex.is_simplex(&union).then_some(Simplex(union))
}

/// Half the l¹ distance between barycentric coordinate vectors, over the
/// union of supports. This is the simplex metric when the points share a
/// simplex, and a lower bound on the path metric otherwise.
pub fn coordinate_l1(x: &BarycentricPoint, y: &BarycentricPoint) -> f64 {
    let (a, b) = (x.weights(), y.weights());
    let (mut i, mut j, mut sum) = (0, 0, 0.0);
    loop {
        match (a.get(i), b.get(j)) {
            (Some(&(u, wu)), Some(&(v, wv))) => {
                if u == v {
                    sum += (wu - wv).abs();
                    i += 1;
                    j += 1;
                } else if u < v {
                    sum += wu;
                    i += 1;
                } else {
                    sum += wv;
                    j += 1;
                }
            }
            (Some(&(_, wu)), None) => {
                sum += wu;
                i += 1;
            }
            (None, Some(&(_, wv))) => {
                sum += wv;
                j += 1;
            }
            (None, None) => break,
        }
    }
    0.5 * sum
}

/// The per-simplex l¹ metric between two points of a common simplex.
pub fn simplex_l1(
    complex: &SimplicialComplex,
    x: &BarycentricPoint,
    y: &BarycentricPoint,
) -> Result<f64> {
    common_simplex(complex, x, y).ok_or(Error::NoCommonSimplex)?;
    Ok(coordinate_l1(x, y))
}

/// A simplicial automorphism, stored as a permutation of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    map: Vec<VertexId>,
}

impl Automorphism {
    pub fn identity(complex: &SimplicialComplex) -> Self {
        Automorphism { map: (0..complex.vertex_count()).collect() }
    }

    pub fn from_indices(complex: &SimplicialComplex, map: Vec<VertexId>) -> Result<Self> {
        let n = complex.vertex_count();
        if map.len() != n {
            return Err(Error::NotAnAutomorphism(format!("map has {} entries, expected {n}", map.len())));
        }
        let mut hit = vec![false; n];
        for &v in &map {
            if v >= n || std::mem::replace(&mut hit[v], true) {
                return Err(Error::NotAnAutomorphism("not a bijection".into()));
            }
        }
        let g = Automorphism { map };
        for s in complex.maximal_simplices() {
            let image = g.apply_simplex(s);
            if !complex.is_simplex(image.vertices()) {
                return Err(Error::NotAnAutomorphism(format!(
                    "image of {:?} is not a simplex",
                    complex.simplex_labels(s)
                )));
            }
        }
        Ok(g)
    }

    /// Builds an automorphism from a label map; unmapped vertices are fixed.
    pub fn from_labels<'a, I>(complex: &SimplicialComplex, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut map: Vec<VertexId> = (0..complex.vertex_count()).collect();
        for (from, to) in pairs {
            map[complex.vertex_id(from)?] = complex.vertex_id(to)?;
        }
        Self::from_indices(complex, map)
    }

    pub fn apply_vertex(&self, v: VertexId) -> VertexId {
        self.map[v]
    }

    pub fn apply_simplex(&self, s: &Simplex) -> Simplex {
        Simplex::new(s.vertices().iter().map(|&v| self.map[v]).collect())
            .expect("image of a nonempty simplex is nonempty")
    }

    pub fn apply(&self, x: &BarycentricPoint) -> BarycentricPoint {
        let mut weights: Vec<_> = x.weights().iter().map(|&(v, w)| (self.map[v], w)).collect();
        weights.sort_by_key(|&(v, _)| v);
        BarycentricPoint { weights }
    }

    pub fn mapping(&self) -> &[VertexId] {
        &self.map
    }
}
