use godbersen_core::geometry::VPolytope;
use godbersen_core::simplex::{centered_simplex, simplex_hull_ratio};
use godbersen_kit::random::{random_polytope, Flavor};
use godbersen_kit::translation::{minimize_over_translation, translation_objective};

fn square() -> VPolytope<f64> {
    VPolytope::convex_hull(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 2.0], vec![0.0, 2.0]]).unwrap()
}

#[test]
fn centered_simplex_minimum_is_at_the_centroid() {
    for n in [2usize, 3] {
        let s: VPolytope<f64> = centered_simplex(n).unwrap();
        let sol = minimize_over_translation(&s, 0.5).unwrap();
        let expected = simplex_hull_ratio(n, &0.5).unwrap().ratio * s.volume();
        assert!((sol.value - expected).abs() <= 1e-7 * expected, "n={n}: {} vs {expected}", sol.value);
        // The minimizer need not be unique; the centroid must attain the minimum.
        let at_origin = translation_objective(&s, &0.5, &vec![0.0; n]).unwrap();
        assert!((at_origin - expected).abs() <= 1e-9 * expected);
        assert!(s.contains(&sol.x_star));
    }
}

#[test]
fn lambda_zero_objective_is_the_volume() {
    let k = square();
    let sol = minimize_over_translation(&k, 0.0).unwrap();
    assert!((sol.value - 4.0).abs() < 1e-9);
    assert!((translation_objective(&k, &0.0, &[0.3, 1.7]).unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn square_minimum_beats_the_centroid() {
    let k = square();
    for lambda in [0.2, 0.5, 0.7] {
        let sol = minimize_over_translation(&k, lambda).unwrap();
        let at_centroid = translation_objective(&k, &lambda, &[1.0, 1.0]).unwrap();
        assert!(sol.value <= at_centroid + 1e-12);
        assert!(k.contains(&sol.x_star));
        assert_eq!(sol.certificate.violations, 0);
    }
}

#[test]
fn random_solid_result_lies_in_body() {
    let k: VPolytope<f64> = random_polytope(3, 8, 5, Flavor::HullOfGaussians).unwrap();
    let sol = minimize_over_translation(&k, 0.4).unwrap();
    assert!(k.contains(&sol.x_star));
    assert!(sol.value <= translation_objective(&k, &0.4, &k.centroid()).unwrap() + 1e-12);
    assert!(sol.certificate.tests > 0);
}
