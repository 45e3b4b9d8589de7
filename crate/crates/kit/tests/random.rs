use godbersen_core::geometry::VPolytope;
use godbersen_core::simplex::standard_simplex;
use godbersen_core::{GeomError, Rational, Scalar};
use godbersen_kit::random::{random_polytope, Flavor};

const FLAVORS: [Flavor; 3] = [Flavor::HullOfGaussians, Flavor::HullOfSpherePoints, Flavor::PerturbedSimplex(0.2)];

#[test]
fn fixed_seed_gives_identical_vertices() {
    for flavor in FLAVORS {
        let a: VPolytope<Rational> = random_polytope(3, 7, 42, flavor).unwrap();
        let b: VPolytope<Rational> = random_polytope(3, 7, 42, flavor).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        let c: VPolytope<Rational> = random_polytope(3, 7, 43, flavor).unwrap();
        assert_ne!(a.vertices(), c.vertices());
    }
}

#[test]
fn exact_output_is_centered() {
    for n in 2..=4 {
        for flavor in FLAVORS {
            let k: VPolytope<Rational> = random_polytope(n, n + 3, 7, flavor).unwrap();
            assert!(k.centroid().iter().all(|c| c.is_zero_tol(0.0)), "n={n} {flavor:?}");
            let v = k.volume().to_f64();
            // Exact mode rounds the scale factor.
            assert!((v - 1.0).abs() < 0.15, "volume {v}");
        }
    }
}

#[test]
fn float_output_has_unit_volume() {
    for seed in 0..5 {
        let k: VPolytope<f64> = random_polytope(3, 9, seed, Flavor::HullOfSpherePoints).unwrap();
        assert!((k.volume() - 1.0).abs() < 1e-9);
        assert!(k.centroid().iter().all(|c| c.abs() < 1e-9));
    }
}

#[test]
fn unperturbed_simplex_is_a_simplex() {
    let k: VPolytope<Rational> = random_polytope(3, 4, 9, Flavor::PerturbedSimplex(0.0)).unwrap();
    assert_eq!(k.num_vertices(), 4);
    // Same shape as the standard simplex: the volume ratio is a cube of the scale.
    let s: VPolytope<Rational> = standard_simplex(3).unwrap();
    let edge = |p: &VPolytope<Rational>| {
        let v = p.vertices();
        (0..3).map(|a| (v[0][a].clone() - &v[1][a]).to_f64().powi(2)).sum::<f64>()
    };
    let scale2 = edge(&k) / edge(&s);
    assert!(((k.volume().to_f64() / s.volume().to_f64()) - scale2.powf(1.5)).abs() < 1e-9);
}

#[test]
fn too_few_points_is_rejected() {
    let r = random_polytope::<f64>(3, 3, 0, Flavor::HullOfGaussians);
    assert!(matches!(r, Err(GeomError::TooFewPoints { .. })));
}
