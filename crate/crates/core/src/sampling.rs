//! Seeded random points, used by the property suites, probes and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{BarycentricPoint, Simplex, SimplicialComplex};

/// A uniformly distributed point of the closed simplex `s`.
pub fn point_in_simplex<R: Rng + ?Sized>(rng: &mut R, s: &Simplex) -> BarycentricPoint {
    let raw: Vec<_> = s.vertices().iter().map(|&v| (v, -(1.0 - rng.gen::<f64>()).ln())).collect();
    BarycentricPoint::from_trusted(raw)
}

/// A point on a uniformly chosen face of a uniformly chosen maximal
/// simplex, uniform within that face. Mixes vertices, edge points and
/// interior points.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, complex: &SimplicialComplex) -> BarycentricPoint {
    let sigma = complex.maximal_simplices().choose(rng).expect("complex has a simplex");
    let mut face: Vec<_> = sigma.vertices().iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if face.is_empty() {
        face.push(*sigma.vertices().choose(rng).expect("simplex is nonempty"));
    }
    point_in_simplex(rng, &Simplex::new(face).expect("face is nonempty"))
}

/// A point of the simplex `s` whose coordinates are multiples of `1/n`.
pub fn grid_point_in_simplex<R: Rng + ?Sized>(rng: &mut R, s: &Simplex, n: u32) -> BarycentricPoint {
    let k = s.len();
    // Stars and bars: choose k-1 cut positions among n + k - 1 slots.
    let mut cuts: Vec<u32> = rand::seq::index::sample(rng, (n as usize) + k - 1, k - 1)
        .into_iter()
        .map(|c| c as u32)
        .collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut raw = Vec::with_capacity(k);
    for (i, &v) in s.vertices().iter().enumerate() {
        let end = cuts.get(i).copied().unwrap_or((n as usize + k - 1) as u32);
        let parts = end - prev;
        raw.push((v, f64::from(parts) / f64::from(n)));
        prev = end + 1;
    }
    BarycentricPoint::from_trusted(raw.into_iter().filter(|&(_, w)| w > 0.0).collect())
}

/// A grid point (resolution `1/n`) in a uniformly chosen maximal simplex.
pub fn random_grid_point<R: Rng + ?Sized>(rng: &mut R, complex: &SimplicialComplex, n: u32) -> BarycentricPoint {
    let sigma = complex.maximal_simplices().choose(rng).expect("complex has a simplex");
    grid_point_in_simplex(rng, sigma, n)
}

/// A point of `complex` that is not a vertex, when the complex has an edge.
pub fn random_interior_point<R: Rng + ?Sized>(rng: &mut R, complex: &SimplicialComplex) -> Option<BarycentricPoint> {
    let big: Vec<_> = complex.maximal_simplices().iter().filter(|s| s.len() >= 2).collect();
    let sigma = big.choose(rng)?;
    Some(point_in_simplex(rng, sigma))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn grid_points_have_grid_coordinates() {
        let k = SimplicialComplex::build(&["a", "b", "c"], [["a", "b", "c"]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = random_grid_point(&mut rng, &k, 16);
            let total: f64 = p.weights().iter().map(|&(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for &(_, w) in p.weights() {
                assert!((w * 16.0 - (w * 16.0).round()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let k = SimplicialComplex::build(&["a", "b", "c", "d"], [vec!["a", "b", "c"], vec!["c", "d"]]).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| random_point(&mut rng, &k)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }
}
