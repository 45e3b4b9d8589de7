use godbersen_core::geometry::VPolytope;
use godbersen_core::mixed::{
    difference_body_check, godbersen_proof_chain, godbersen_ratio, godbersen_ratios, mixed_volume_general,
    mixed_volume_pair, mixed_volume_pair_polarized, proved_bound, Method,
};
use godbersen_core::planar::ccw_vertices;
use godbersen_core::scalar::{binomial, Rational, Scalar};
use godbersen_core::simplex::{centered_simplex, standard_simplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn cube(d: usize) -> VPolytope<Rational> {
    let pts: Vec<Vec<Rational>> = (0..1usize << d)
        .map(|mask| (0..d).map(|i| q(if mask >> i & 1 == 1 { 1 } else { -1 }, 1)).collect())
        .collect();
    VPolytope::convex_hull(&pts).unwrap()
}

fn random_body(rng: &mut ChaCha8Rng, d: usize, m: usize) -> VPolytope<Rational> {
    loop {
        let pts: Vec<Vec<Rational>> =
            (0..m).map(|_| (0..d).map(|_| q(rng.random_range(-20..=20), 10)).collect()).collect();
        if let Ok(p) = VPolytope::convex_hull(&pts) {
            return p;
        }
    }
}

fn centered(p: &VPolytope<Rational>) -> VPolytope<Rational> {
    let c: Vec<Rational> = p.centroid().iter().map(|x| -x.clone()).collect();
    p.translate(&c).unwrap()
}

/// Mixed area as half the sum of `h_K` over the edge normals of `T`, weighted by edge length.
fn mixed_area_oracle(k: &VPolytope<Rational>, t: &VPolytope<Rational>) -> Rational {
    let ring = ccw_vertices(t).unwrap();
    let m = ring.len();
    let mut acc = q(0, 1);
    for i in 0..m {
        let (a, b) = (&ring[i], &ring[(i + 1) % m]);
        let normal = vec![b[1].clone() - &a[1], a[0].clone() - &b[0]];
        acc = acc + &k.support(&normal);
    }
    acc / &q(2, 1)
}

#[test]
fn full_multiplicity_gives_volume() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in 2..=3 {
        let k = random_body(&mut rng, d, 8);
        let t = random_body(&mut rng, d, 8);
        assert_eq!(mixed_volume_pair(&k, &t, d).unwrap().value, k.volume());
        assert_eq!(mixed_volume_pair(&k, &t, 0).unwrap().value, t.volume());
        for j in 0..=d {
            assert_eq!(mixed_volume_pair(&k, &k, j).unwrap().value, k.volume());
        }
    }
}

#[test]
fn triangle_against_reflection() {
    let k = standard_simplex::<Rational>(2).unwrap();
    let r = mixed_volume_pair(&k, &k.reflect(), 1).unwrap();
    assert_eq!(r.method, Method::Interpolation);
    assert_eq!(r.value / &k.volume(), q(2, 1));
}

#[test]
fn planar_mixed_area_matches_edge_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let k = random_body(&mut rng, 2, 7);
        let t = random_body(&mut rng, 2, 7);
        let expected = mixed_area_oracle(&k, &t);
        assert_eq!(mixed_volume_pair(&k, &t, 1).unwrap().value, expected);
        assert_eq!(mixed_volume_pair(&t, &k, 1).unwrap().value, expected);
    }
}

#[test]
fn methods_agree_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..20 {
        let d = 2 + i % 3;
        let k = random_body(&mut rng, d, d + 3);
        let t = random_body(&mut rng, d, d + 3);
        let j = rng.random_range(0..=d);
        let a = mixed_volume_pair(&k, &t, j).unwrap();
        let b = mixed_volume_pair_polarized(&k, &t, j).unwrap();
        assert_eq!(b.method, Method::Polarization);
        assert_eq!(a.value, b.value, "d = {d}, j = {j}");
        assert!(a.value >= q(0, 1));
    }
}

#[test]
fn general_form_basics() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = random_body(&mut rng, 3, 7);
    assert_eq!(mixed_volume_general(&[b.clone(), b.clone(), b.clone()]).unwrap().value, b.volume());
    let bodies: Vec<_> = (0..3).map(|_| random_body(&mut rng, 3, 6)).collect();
    let v = mixed_volume_general(&bodies).unwrap().value;
    let shuffled = vec![bodies[2].clone(), bodies[0].clone(), bodies[1].clone()];
    assert_eq!(mixed_volume_general(&shuffled).unwrap().value, v);
    assert!(mixed_volume_general(&vec![b.clone(); 5]).is_err());
}

#[test]
fn multilinear_homogeneous_translation_invariant_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = random_body(&mut rng, 2, 6);
    let t1 = random_body(&mut rng, 2, 6);
    let t2 = random_body(&mut rng, 2, 6);
    let sum = t1.minkowski_sum(&t2).unwrap();
    let v = |a: &VPolytope<Rational>, b: &VPolytope<Rational>, j| mixed_volume_pair(a, b, j).unwrap().value;
    assert_eq!(v(&k, &sum, 1), v(&k, &t1, 1) + &v(&k, &t2, 1));

    let k3 = random_body(&mut rng, 3, 7);
    let t3 = random_body(&mut rng, 3, 7);
    for s in [q(1, 2), q(3, 1)] {
        for j in 0..=3u32 {
            let scaled = k3.scale(&s).unwrap();
            assert_eq!(v(&scaled, &t3, j as usize), s.powi(j) * &v(&k3, &t3, j as usize));
        }
    }
    let moved = k3.translate(&[q(7, 3), q(-1, 5), q(2, 1)]).unwrap();
    assert_eq!(v(&moved, &t3, 2), v(&k3, &t3, 2));

    let outer = k3.hull_union(&random_body(&mut rng, 3, 5)).unwrap();
    for j in 0..=3 {
        assert!(v(&k3, &t3, j) <= v(&outer, &t3, j));
    }
}

#[test]
fn simplices_attain_binomial() {
    for n in 2..=4 {
        let s = centered_simplex::<Rational>(n).unwrap();
        for r in godbersen_ratios(&s).unwrap() {
            assert_eq!(r.lhs, r.meta["rhs_conjectured"].as_f64().unwrap());
            assert!(r.pass);
            assert_eq!(r.meta["conjecture_holds"], true);
        }
        for j in 1..n {
            let rep = godbersen_ratio(&s, j).unwrap();
            assert_eq!(rep.meta["lhs_exact"], binomial::<Rational>(n as u32, j as u32).to_json());
            let pol = mixed_volume_pair_polarized(&s, &s.reflect(), j).unwrap().value;
            assert_eq!(pol, binomial::<Rational>(n as u32, j as u32) * &s.volume());
        }
    }
}

#[test]
fn symmetric_body_ratio_is_one() {
    for n in 2..=3 {
        for j in 1..n {
            let rep = godbersen_ratio(&cube(n), j).unwrap();
            assert_eq!(rep.lhs, 1.0);
            assert!(rep.pass);
        }
    }
}

#[test]
fn proved_bound_values() {
    assert_eq!(proved_bound::<Rational>(2, 1), q(4, 1));
    assert_eq!(proved_bound::<Rational>(3, 1), q(27, 4));
    assert_eq!(proved_bound::<Rational>(4, 2), q(16, 1));
}

#[test]
fn random_centered_bodies_respect_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let k = centered(&random_body(&mut rng, 3, 8));
        for r in godbersen_ratios(&k).unwrap() {
            assert!(r.pass, "{}", r.to_json());
        }
    }
}

#[test]
fn difference_body_examples() {
    let tri = standard_simplex::<Rational>(2).unwrap();
    let rep = difference_body_check(&tri).unwrap();
    assert_eq!(rep.lhs, 6.0);
    assert!(rep.pass && rep.is_equality());
    for n in 2..=3 {
        let rep = difference_body_check(&cube(n)).unwrap();
        assert_eq!(rep.lhs, (1u32 << n) as f64);
        assert_eq!(rep.meta["expansion_holds"], true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 2..=4 {
        let rep = difference_body_check(&random_body(&mut rng, d, d + 4)).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.meta["expansion_holds"], true);
    }
}

#[test]
fn proof_chain_links() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let k = centered(&random_body(&mut rng, 3, 7));
        for j in 1..3 {
            let links = godbersen_proof_chain(&k, j).unwrap();
            assert_eq!(links.len(), 3);
            for l in links {
                assert!(l.pass, "{}", l.to_json());
            }
        }
    }
    let far = standard_simplex::<Rational>(2).unwrap().translate(&[q(5, 1), q(5, 1)]).unwrap();
    assert!(godbersen_proof_chain(&far, 1).is_err());
}

#[test]
fn float_mode_reports_conditioning() {
    let k = centered_simplex::<f64>(3).unwrap();
    let r = mixed_volume_pair(&k, &k.reflect(), 1).unwrap();
    assert!(r.condition_estimate.unwrap() > 1.0);
    assert!((r.value / k.volume() - 3.0).abs() < 1e-8);
}
