use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simplicial_metric::complex::{coordinate_l1, simplex_l1, Automorphism, TOL};
use simplicial_metric::extension::ExtendedMetric;
use simplicial_metric::generators;
use simplicial_metric::io::{complex_from_json, complex_to_json};
use simplicial_metric::oracle::{exhaustive_metric_scan, grid_tolerance, GridOracle, ScanViolation};
use simplicial_metric::path_metric::{PathOptions, L1PathMetric};
use simplicial_metric::sampling::{point_in_simplex, random_grid_point, random_interior_point, random_point};
use simplicial_metric::vertex_metrics::{
    double_difference_vertices, gromov_product_vertices, linear_bound_constant, validate_vertex_metric,
    word_metric, DistanceTable, VertexMetric,
};
use simplicial_metric::{BarycentricPoint, SimplicialComplex};

fn complexes() -> impl Strategy<Value = SimplicialComplex> {
    prop_oneof![
        (3usize..10, 0.15f64..0.6, any::<u64>(), 1usize..=3)
            .prop_map(|(n, p, seed, dim)| generators::random(n, p, seed, dim).unwrap()),
        (3usize..9).prop_map(|n| generators::cycle(n).unwrap()),
        (2usize..4, 1usize..3).prop_map(|(b, d)| generators::tree(b, d).unwrap()),
        (1usize..4).prop_map(|d| generators::simplex(d).unwrap()),
    ]
}

fn small_complexes() -> impl Strategy<Value = SimplicialComplex> {
    (3usize..8, 0.2f64..0.6, any::<u64>(), 1usize..=2)
        .prop_map(|(n, p, seed, dim)| generators::random(n, p, seed, dim).unwrap())
}

/// A metric `d_G` scaled and shifted on distinct pairs, which stays a metric
/// and keeps the vertex set's automorphisms.
fn scaled_metric(k: &SimplicialComplex, scale: f64, shift: f64) -> VertexMetric {
    let word = word_metric(k).unwrap();
    let n = k.vertex_count();
    let m: Vec<Vec<f64>> = (0..n)
        .map(|u| (0..n).map(|v| if u == v { 0.0 } else { scale * word.dist(u, v) + shift }).collect())
        .collect();
    validate_vertex_metric(k, &word, &m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn faces_are_closed_and_files_round_trip(k in complexes()) {
        for s in k.maximal_simplices() {
            for f in s.faces() {
                prop_assert!(k.is_simplex(f.vertices()));
            }
        }
        prop_assert_eq!(complex_from_json(&complex_to_json(&k)).unwrap(), k);
    }

    #[test]
    fn random_generator_is_deterministic(n in 2usize..20, p in 0.0f64..1.0, seed: u64) {
        prop_assert_eq!(generators::random(n, p, seed, 3).unwrap(), generators::random(n, p, seed, 3).unwrap());
    }

    #[test]
    fn simplex_metric_axioms(k in complexes(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = &k.maximal_simplices()[seed as usize % k.maximal_simplices().len()];
        let [x, y, z] = [0; 3].map(|_| point_in_simplex(&mut rng, sigma));
        let d = |a, b| simplex_l1(&k, a, b).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + TOL);
        prop_assert!(d(&x, &y) <= 1.0 + TOL);
    }

    #[test]
    fn rotation_preserves_simplex_metric(n in 3usize..12, r in 1usize..11, seed: u64) {
        let k = generators::cycle(n).unwrap();
        let g = Automorphism::from_indices(&k, (0..n).map(|i| (i + r) % n).collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = &k.maximal_simplices()[seed as usize % n];
        let (x, y) = (point_in_simplex(&mut rng, sigma), point_in_simplex(&mut rng, sigma));
        prop_assert_eq!(simplex_l1(&k, &x, &y).unwrap(), simplex_l1(&k, &g.apply(&x), &g.apply(&y)).unwrap());
    }

    #[test]
    fn minimal_linear_bound_is_attained(k in complexes(), scale in 0.5f64..3.0, shift in 0.0f64..2.0) {
        prop_assume!(k.vertex_count() >= 2);
        let word = word_metric(&k).unwrap();
        let m = scaled_metric(&k, scale, shift);
        let c = linear_bound_constant(&m, &word, None).unwrap();
        let n = k.vertex_count();
        let mut least = f64::INFINITY;
        for u in 0..n {
            for v in (u + 1)..n {
                let slack = c * word.dist(u, v) - m.dist(u, v);
                prop_assert!(slack >= -TOL);
                least = least.min(slack);
            }
        }
        prop_assert!(least.abs() <= TOL);
    }

    #[test]
    fn vertex_double_differences(k in complexes(), picks in prop::array::uniform5(any::<usize>())) {
        let word = word_metric(&k).unwrap();
        let [a, a2, a3, b, b2] = picks.map(|i| i % k.vertex_count());
        let dd = |p, q, r, s| double_difference_vertices(&word, p, q, r, s);
        prop_assert_eq!(dd(a, a2, b, b2), dd(b, b2, a, a2));
        prop_assert_eq!(dd(a, a2, b, b2), -dd(a2, a, b, b2));
        prop_assert_eq!(dd(a, a, b, b2), 0.0);
        prop_assert_eq!(dd(a, a2, b, b2) + dd(a2, a3, b, b2), dd(a, a3, b, b2));
        prop_assert_eq!(dd(a, b, a2, b2) + dd(a2, a, b, b2) + dd(b, a2, a, b2), 0.0);
        let via_gp = gromov_product_vertices(&word, a2, b, a) - gromov_product_vertices(&word, a2, b2, a);
        prop_assert_eq!(2.0 * via_gp, dd(a, a2, b, b2));
    }

    #[test]
    fn path_metric_is_a_metric(k in complexes(), seed: u64) {
        let p = L1PathMetric::new(&k).unwrap();
        let opts = PathOptions::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [x, y, z] = [0; 3].map(|_| random_point(&mut rng, &k));
        let dxy = p.distance(&x, &y, &opts).unwrap();
        let d = |a, b| p.distance(a, b, &opts).unwrap().value;
        prop_assert!((dxy.value - d(&y, &x)).abs() <= TOL);
        prop_assert!(d(&x, &z) <= dxy.value + d(&y, &z) + TOL);
        prop_assert_eq!(d(&x, &x), 0.0);
        if coordinate_l1(&x, &y) >= 1e-6 {
            prop_assert!(dxy.value > 0.0);
        }
        prop_assert!((dxy.witness.length - dxy.value).abs() <= TOL);
        for b in &dxy.lower_bounds {
            prop_assert!(dxy.value >= b.value - TOL, "{:?} above {}", b, dxy.value);
        }
    }

    #[test]
    fn search_agrees_with_shortcuts(k in complexes(), seed: u64) {
        let p = L1PathMetric::new(&k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = &k.maximal_simplices()[seed as usize % k.maximal_simplices().len()];
        let (x, y) = (point_in_simplex(&mut rng, sigma), point_in_simplex(&mut rng, sigma));
        let searched = p.distance(&x, &y, &PathOptions { shortcuts: false, ..PathOptions::default() }).unwrap().value;
        prop_assert!((searched - coordinate_l1(&x, &y)).abs() <= TOL);
        let (u, v) = (seed as usize % k.vertex_count(), (seed >> 32) as usize % k.vertex_count());
        let opts = PathOptions { shortcuts: false, ..PathOptions::default() };
        let dv = p.distance(&BarycentricPoint::vertex(u), &BarycentricPoint::vertex(v), &opts).unwrap().value;
        prop_assert!((dv - f64::from(p.word().get(u, v))).abs() <= TOL);
    }

    #[test]
    fn extended_metric_axioms(k in complexes(), scale in 0.5f64..2.0, shift in 0.0f64..1.0, seed: u64) {
        let ext = ExtendedMetric::new(&k, scaled_metric(&k, scale, shift)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [x, y, z] = [0; 3].map(|_| random_point(&mut rng, &k));
        let d = |a, b| ext.dist(a, b).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + TOL);
        prop_assert_eq!(d(&x, &x), 0.0);
        if coordinate_l1(&x, &y) >= 1e-6 {
            prop_assert!(d(&x, &y) > 0.0);
        }
        let two_c = 2.0 * ext.linear_bound();
        prop_assert!(ext.bilinear(&x, &z) <= ext.bilinear(&x, &y) + two_c * ext.l1_path(&y, &z).unwrap() + TOL);
        prop_assert!(ext.bilinear(&x, &z) <= ext.bilinear(&x, &y) + ext.bilinear(&y, &z) + TOL);
        if x.disjoint_support(&y) {
            prop_assert!(ext.bilinear(&x, &y) <= ext.scale() * ext.l1_path(&x, &y).unwrap() + TOL);
            prop_assert_eq!(d(&x, &y), ext.bilinear(&x, &y));
        }
        let (u, v) = (seed as usize % k.vertex_count(), (seed >> 32) as usize % k.vertex_count());
        prop_assert_eq!(d(&BarycentricPoint::vertex(u), &BarycentricPoint::vertex(v)), ext.vertex_metric().dist(u, v));
    }

    #[test]
    fn extended_double_differences(k in complexes(), seed: u64) {
        let ext = ExtendedMetric::word(&k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, a2, a3, b, b2] = [0; 5].map(|_| random_point(&mut rng, &k));
        let dd = |p, q, r, s| ext.double_difference(p, q, r, s).unwrap();
        let base = dd(&a, &a2, &b, &b2);
        prop_assert!((base - dd(&b, &b2, &a, &a2)).abs() <= TOL);
        prop_assert!((base + dd(&a2, &a, &b, &b2)).abs() <= TOL);
        prop_assert!(dd(&a, &a, &b, &b2).abs() <= TOL);
        prop_assert!((base + dd(&a2, &a3, &b, &b2) - dd(&a, &a3, &b, &b2)).abs() <= TOL);
        prop_assert!((dd(&a, &b, &a2, &b2) + dd(&a2, &a, &b, &b2) + dd(&b, &a2, &a, &b2)).abs() <= TOL);
    }

    #[test]
    fn naive_extension_always_fails(k in complexes(), seed: u64) {
        let ext = ExtendedMetric::word(&k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assume!(!k.edges().is_empty());
        let inner = random_interior_point(&mut rng, &k).unwrap();
        let found = exhaustive_metric_scan(&[BarycentricPoint::vertex(0), inner], TOL, |a, b| ext.bilinear(a, b));
        let hit = found.iter().any(|v| matches!(v, ScanViolation::NonzeroSelfDistance { .. }));
        prop_assert!(hit);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn grid_oracle_brackets_exact(k in small_complexes(), seed: u64) {
        let p = L1PathMetric::new(&k).unwrap();
        let (coarse, fine) = (GridOracle::new(&k, 6).unwrap(), GridOracle::new(&k, 12).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..4 {
            let (x, y) = (random_grid_point(&mut rng, &k, 6), random_grid_point(&mut rng, &k, 6));
            let exact = p.distance(&x, &y, &PathOptions::default()).unwrap().value;
            let g = coarse.distance(&x, &y).unwrap();
            prop_assert!(exact <= g + TOL);
            prop_assert!(g - exact <= grid_tolerance(k.dimension().max(1), 6, exact));
            prop_assert!(fine.distance(&x, &y).unwrap() <= g + TOL);
        }
    }
}
