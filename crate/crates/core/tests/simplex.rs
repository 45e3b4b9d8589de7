use godbersen_core::geometry::VPolytope;
use godbersen_core::scalar::{binomial, Rational, Scalar};
use godbersen_core::simplex::{
    admissible_k, build_kt, centered_simplex, facet_normal_supports, gfr_implies_godbersen_bound,
    simplex_hull_ratio, standard_simplex, vertex_at_origin_ratio, KtVertex,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn hull_volume(s: &VPolytope<Rational>, lambda: &Rational) -> Rational {
    s.weighted_hull(&(q(1, 1) - lambda), s, &-lambda.clone()).unwrap().volume()
}

#[test]
fn formula_examples() {
    let f = simplex_hull_ratio(2, &q(1, 2)).unwrap();
    assert_eq!((f.k.clone(), f.ratio), (vec![1], q(1, 2)));
    let f = simplex_hull_ratio(3, &q(1, 2)).unwrap();
    assert_eq!((f.k.clone(), f.ratio), (vec![1, 2], q(3, 8)));
    for n in 1..=5 {
        assert_eq!(simplex_hull_ratio(n, &q(0, 1)).unwrap().ratio, q(1, 1));
    }
    assert!(simplex_hull_ratio(2, &q(3, 2)).is_err());
}

#[test]
fn admissible_k_window() {
    for n in 1..=6usize {
        for num in 0..=24 {
            let lam = q(num, 24);
            let x = q(n as i64 + 1, 1) * &(q(1, 1) - &lam);
            let ks = admissible_k(n, &lam);
            assert!(!ks.is_empty() && ks.len() <= 2);
            for k in ks {
                let kk = q(k as i64, 1);
                assert!(kk <= x && x.clone() - &q(1, 1) <= kk);
            }
        }
    }
}

#[test]
fn formula_matches_hull_volume() {
    for n in 2..=3 {
        let s = centered_simplex::<Rational>(n).unwrap();
        let vol = s.volume();
        for num in 0..=10 {
            let lam = q(num, 10);
            let f = simplex_hull_ratio(n, &lam).unwrap();
            assert_eq!(hull_volume(&s, &lam), f.ratio * &vol, "n = {n}, lambda = {lam}");
        }
        for j in 1..=n {
            let lam = q((n + 1 - j) as i64, (n + 1) as i64);
            let f = simplex_hull_ratio(n, &lam).unwrap();
            assert_eq!(f.k.len(), 2);
            assert_eq!(hull_volume(&s, &lam), f.ratio * &vol);
        }
    }
}

#[test]
fn vertex_at_origin_gives_one() {
    for n in 1..=6 {
        for lam in [q(1, 4), q(1, 2), q(3, 4), q(2, 7)] {
            assert_eq!(vertex_at_origin_ratio(n, &lam), q(1, 1));
        }
    }
    let s = standard_simplex::<Rational>(3).unwrap();
    assert_eq!(hull_volume(&s, &q(1, 3)), s.volume());
}

#[test]
fn kt_facets_and_volume() {
    for n in 2..=4usize {
        for i in 0..=10 {
            // t ranges over [1/n, 1]
            let t = q(1, n as i64) + &(q(i, 10) * &(q(1, 1) - &q(1, n as i64)));
            let body = build_kt(n, &t).unwrap();
            let lam = t.clone() / &(q(1, 1) + &t);
            let ks = admissible_k(n, &lam);
            let k = ks[0];
            let ratio = body.polytope.volume() / &body.simplex_volume;
            let expected = binomial::<Rational>(n as u32, k as u32) * &t.powi((n - k) as u32);
            assert_eq!(ratio, expected, "n = {n}, t = {t}");
            if ks.len() == 1 && k >= 1 {
                assert!(facet_normal_supports(n, k, &t), "n = {n}, k = {k}, t = {t}");
                for f in body.polytope.facets() {
                    assert_eq!(f.vertex_indices.len(), n);
                    let from_s = f
                        .vertex_indices
                        .iter()
                        .filter(|&&v| matches!(body.labels[v], KtVertex::Simplex(_)))
                        .count();
                    assert_eq!(from_s, k);
                }
            }
        }
    }
}

#[test]
fn gfr_gives_binomial() {
    assert_eq!(gfr_implies_godbersen_bound::<Rational>(3, 1).unwrap().lhs, 3.0);
    assert_eq!(gfr_implies_godbersen_bound::<Rational>(2, 1).unwrap().lhs, 2.0);
    for n in 2..=8 {
        for j in 1..n {
            let rep = gfr_implies_godbersen_bound::<Rational>(n, j).unwrap();
            assert!(rep.pass && rep.is_equality(), "n = {n}, j = {j}");
        }
    }
    assert!(gfr_implies_godbersen_bound::<Rational>(3, 0).is_err());
}

#[test]
fn float_mode_matches_exact() {
    for n in 2..=4 {
        for num in 0..=20 {
            let e = simplex_hull_ratio(n, &q(num, 20)).unwrap().ratio.to_f64();
            let f = simplex_hull_ratio(n, &(num as f64 / 20.0)).unwrap().ratio;
            assert!((e - f).abs() < 1e-12);
        }
    }
}
