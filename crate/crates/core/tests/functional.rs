use godbersen_core::functional::{
    builtin, delta_support_identity_check, gaussian, geometric_mean, indicator_simplex, inf_convolution, integrate,
    lambda_difference, lambda_norm, legendre, polar_exponential_integral, sharp_exponential,
    verify_functional_inequality, ConvexSamples, Grid, GridFunction,
};
use godbersen_core::geometry::VPolytope;
use godbersen_core::linalg;
use godbersen_core::rs_bodies::gauge;
use godbersen_core::GeomError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn square() -> VPolytope<f64> {
    VPolytope::convex_hull(&[vec![-0.5, -0.5], vec![0.5, -0.5], vec![-0.5, 0.5], vec![0.5, 0.5]]).unwrap()
}

fn centered_triangle() -> VPolytope<f64> {
    VPolytope::convex_hull(&[vec![-1.0, -1.0], vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap()
}

/// Exhaustive search over all node pairs, keyed by the output node each pair lands on.
fn brute_force(f: &GridFunction, g: &GridFunction, lambda: f64, out: &Grid) -> Vec<f64> {
    let (cf, cg) = ((1.0 - lambda).powi(2), lambda * lambda);
    let mut best = vec![0.0f64; out.len()];
    let (fg, gg) = (f.grid(), g.grid());
    for i in 0..fg.len() {
        let p = fg.point(&fg.multi(i));
        for k in 0..gg.len() {
            let qv = gg.point(&gg.multi(k));
            let z: Vec<f64> = p.iter().zip(&qv).map(|(a, b)| cf * a - cg * b).collect();
            let node = out.nearest(&z);
            let hit = out.point(&node);
            assert!(linalg::max_abs(&linalg::sub(&hit, &z)) < 1e-9, "pair misses the output lattice");
            let v = f.values()[i].powf(1.0 - lambda) * g.values()[k].powf(lambda);
            let idx = out.flat(&node);
            best[idx] = best[idx].max(v);
        }
    }
    best
}

#[test]
fn integrate_examples() {
    let unit = GridFunction::from_fn(Grid::cube(2, 0.0, 1.0, 17).unwrap(), true, |_| 1.0).unwrap();
    assert!((integrate(&unit).value - 1.0).abs() < 1e-12);
    let e = sharp_exponential(2, 10.0, 65).unwrap();
    let r = integrate(&e);
    assert!((r.value - 1.0).abs() < 1e-3);
    assert!((r.value - (1.0 - (-10f64).exp()).powi(2)).abs() < 1e-9);
    let gs = gaussian(1, 8.0, 33, &[0.0], 1.0).unwrap();
    let coarse = integrate(&gs);
    let fine = integrate(&gaussian(1, 8.0, 65, &[0.0], 1.0).unwrap());
    assert!((fine.value - coarse.value).abs() <= coarse.error);
    assert!((fine.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 3.0 * fine.error);
}

#[test]
fn sharp_example_pointwise_and_integral() {
    for n in 1..=2 {
        let g = sharp_exponential(n, 40.0, 129).unwrap();
        for lambda in [0.25, 0.5, 0.75] {
            let d = lambda_difference(&g, &g, lambda).unwrap();
            let grid = d.grid();
            for i in (0..grid.len()).step_by(97) {
                let z = grid.point(&grid.multi(i));
                let want = (-z.iter().map(|&a| lambda_norm(a, lambda)).sum::<f64>()).exp();
                let got = d.values()[i];
                assert!((got - want).abs() <= 1e-9 * want.max(1e-300) + 1e-300, "z = {z:?}");
            }
            let int = integrate(&d);
            assert!((int.value - 1.0).abs() < 1e-3, "n = {n}, lambda = {lambda}: {}", int.value);
        }
    }
}

#[test]
fn constant_on_box_gives_constant() {
    let one = GridFunction::from_fn(Grid::cube(2, -1.0, 1.0, 9).unwrap(), true, |_| 1.0).unwrap();
    let d = lambda_difference(&one, &one, 0.5).unwrap();
    assert!(d.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    assert!((d.grid().lo()[0] + 0.5).abs() < 1e-12 && (d.grid().hi()[0] - 0.5).abs() < 1e-12);
}

#[test]
fn matches_exhaustive_search() {
    // box ratios chosen so that both lattices are used without resampling
    for (lambda, wf, wg) in [(0.5, 3.0, 3.0), (1.0 / 3.0, 2.0, 8.0)] {
        let f = gaussian(2, wf, 13, &[0.3, -0.2], 1.0).unwrap();
        let g = gaussian(2, wg, 13, &[-0.5, 0.1], 1.5).unwrap();
        let d = lambda_difference(&f, &g, lambda).unwrap();
        let brute = brute_force(&f, &g, lambda, d.grid());
        for (a, b) in d.values().iter().zip(&brute) {
            assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }
    }
}

#[test]
fn gaussian_closed_form() {
    let f = gaussian(2, 6.0, 97, &[0.0, 0.0], 1.0).unwrap();
    for lambda in [0.3, 0.5] {
        let d = lambda_difference(&f, &f, lambda).unwrap();
        let c = (1.0 - lambda).powi(3) + lambda.powi(3);
        let grid = d.grid();
        for i in (0..grid.len()).step_by(13) {
            let z = grid.point(&grid.multi(i));
            if linalg::dot(&z, &z) > 1.0 {
                continue;
            }
            let want = (-linalg::dot(&z, &z) / (2.0 * c)).exp();
            assert!((d.values()[i] - want).abs() < 2e-2, "z = {z:?}");
        }
    }
}

#[test]
fn scaling_and_translation() {
    let lambda = 0.4;
    let f = gaussian(2, 4.0, 17, &[0.1, 0.0], 1.0).unwrap();
    let g = gaussian(2, 4.0, 17, &[0.0, -0.3], 1.2).unwrap();
    let d = lambda_difference(&f, &g, lambda).unwrap();
    let ds = lambda_difference(&f.scaled(2.0).unwrap(), &g.scaled(5.0).unwrap(), lambda).unwrap();
    let factor = 2f64.powf(1.0 - lambda) * 5f64.powf(lambda);
    for (a, b) in d.values().iter().zip(ds.values()) {
        assert!((a * factor - b).abs() <= 1e-12 * b.max(1e-300));
    }
    let (a, b) = ([0.5, -1.0], [1.5, 0.25]);
    let dt = lambda_difference(&f.translated(&a), &g.translated(&b), lambda).unwrap();
    for (x, y) in dt.values().iter().zip(d.values()) {
        assert!((x - y).abs() <= 1e-9 * y);
    }
    let (cf, cg) = ((1.0 - lambda).powi(2), lambda * lambda);
    for ax in 0..2 {
        let shift = cf * a[ax] - cg * b[ax];
        assert!((d.grid().lo()[ax] - shift - dt.grid().lo()[ax]).abs() < 1e-12);
    }
    assert!(d.passes_log_concavity_test(1e-9));
}

#[test]
fn geometric_mean_properties() {
    let f = gaussian(2, 3.0, 9, &[0.2, 0.0], 1.0).unwrap();
    let g = gaussian(2, 3.0, 9, &[0.0, 0.4], 0.7).unwrap();
    let same = geometric_mean(&f, &f, 0.3).unwrap();
    for (a, b) in same.values().iter().zip(f.values()) {
        assert!((a - b).abs() <= 1e-14 * b);
    }
    let x = geometric_mean(&f, &g, 0.3).unwrap();
    let y = geometric_mean(&g, &f, 0.7).unwrap();
    for (a, b) in x.values().iter().zip(y.values()) {
        assert!((a - b).abs() <= 1e-14 * b);
    }
    let other = gaussian(2, 4.0, 9, &[0.0, 0.0], 1.0).unwrap();
    assert!(matches!(geometric_mean(&f, &other, 0.5), Err(GeomError::IncompatibleGrids(_))));

    // exponentials of polar support functions: the mean is the exponential of the polar
    // support of the combination of polars, i.e. the gauge of the harmonic-type body
    let (k, l) = (square(), centered_triangle());
    let kp = k.polar().unwrap().to_vrep().unwrap();
    let lp = l.polar().unwrap().to_vrep().unwrap();
    let lam = 0.3;
    let mix = kp.scale(&lam).unwrap().minkowski_sum(&lp.scale(&(1.0 - lam)).unwrap()).unwrap();
    let grid = Grid::cube(2, -2.0, 2.0, 9).unwrap();
    let ek = GridFunction::from_potential(grid.clone(), |x| gauge(&k, x).unwrap()).unwrap();
    let el = GridFunction::from_potential(grid.clone(), |x| gauge(&l, x).unwrap()).unwrap();
    let gm = geometric_mean(&ek, &el, lam).unwrap();
    for i in 0..grid.len() {
        let x = grid.point(&grid.multi(i));
        let want = (-mix.support(&x)).exp();
        assert!((gm.values()[i] - want).abs() < 1e-12);
    }
}

#[test]
fn functional_inequality_cases() {
    let g = sharp_exponential(1, 40.0, 129).unwrap();
    let rep = verify_functional_inequality(&g, &g, 0.5).unwrap();
    assert!(rep.pass && rep.is_equality(), "{}", rep.to_json());
    assert_eq!(rep.meta["pl_holds"], true);

    let f = gaussian(2, 6.0, 65, &[0.5, 0.0], 1.0).unwrap();
    let h = gaussian(2, 6.0, 65, &[0.0, -0.5], 0.8).unwrap();
    let rep = verify_functional_inequality(&f, &h, 1.0 / 3.0).unwrap();
    assert!(rep.pass && !rep.is_equality(), "{}", rep.to_json());
    assert_eq!(rep.meta["pl_holds"], true);

    let a = verify_functional_inequality(&f.scaled(3.0).unwrap(), &h, 0.4).unwrap();
    let b = verify_functional_inequality(&f, &h, 0.4).unwrap();
    assert!((a.lhs / b.lhs - 3.0).abs() < 1e-9 && (a.rhs / b.rhs - 3.0).abs() < 1e-9);

    let bumpy = GridFunction::from_fn(Grid::cube(1, -1.0, 1.0, 9).unwrap(), true, |x| 1.0 + x[0] * x[0]).unwrap();
    assert!(matches!(verify_functional_inequality(&bumpy, &bumpy, 0.5), Err(GeomError::NotLogConcave(_))));
    assert!(verify_functional_inequality(&f, &h, 1.0).is_err());
}

#[test]
fn random_log_concave_pairs_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..4 {
        let c1 = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let c2 = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let f = gaussian(2, 7.0, 49, &c1, rng.random_range(0.6..1.4)).unwrap();
        let g = gaussian(2, 7.0, 49, &c2, rng.random_range(0.6..1.4)).unwrap();
        let rep = verify_functional_inequality(&f, &g, rng.random_range(0.1..0.9)).unwrap();
        assert!(rep.pass && rep.meta["pl_holds"] == true, "{}", rep.to_json());
    }
    let s = indicator_simplex(2, 41).unwrap();
    let rep = verify_functional_inequality(&s, &s, 0.5).unwrap();
    assert!(rep.pass, "{}", rep.to_json());
}

#[test]
fn legendre_examples() {
    let grid = Grid::cube(1, -4.0, 4.0, 161).unwrap();
    let half_sq = ConvexSamples::from_fn(grid.clone(), |x| 0.5 * x[0] * x[0]);
    let out = Grid::cube(1, -2.0, 2.0, 21).unwrap();
    let l = legendre(&half_sq, &out);
    for i in 0..out.len() {
        let x = out.coord(0, i);
        assert!((l.values[i] - 0.5 * x * x).abs() < 1e-2);
    }
    // support function of [-1, 1]^2 transforms to the (convex) indicator of the square
    let g2 = Grid::cube(2, -6.0, 6.0, 61).unwrap();
    let h = ConvexSamples::from_fn(g2, |y| y[0].abs() + y[1].abs());
    let out2 = Grid::cube(2, -2.0, 2.0, 9).unwrap();
    let lh = legendre(&h, &out2);
    for i in 0..out2.len() {
        let x = out2.point(&out2.multi(i));
        let inside = x.iter().all(|c| c.abs() <= 1.0);
        if inside {
            assert!(lh.values[i].abs() < 1e-12);
        } else {
            assert!(lh.values[i] > 1.0);
        }
    }
}

#[test]
fn inf_convolution_against_brute_force_and_duality() {
    let a = Grid::cube(1, -2.0, 2.0, 21).unwrap();
    let b = Grid::cube(1, -1.0, 3.0, 21).unwrap();
    let phi = ConvexSamples::from_fn(a.clone(), |x| (x[0] - 0.3).powi(2));
    let psi = ConvexSamples::from_fn(b.clone(), |x| 2.0 * (x[0] - 1.0).abs());
    let conv = inf_convolution(&phi, &psi).unwrap();
    for m in 0..conv.grid.len() {
        let z = conv.grid.coord(0, m);
        let mut best = f64::INFINITY;
        for i in 0..a.len() {
            for k in 0..b.len() {
                if (a.coord(0, i) + b.coord(0, k) - z).abs() < 1e-9 {
                    best = best.min(phi.values[i] + psi.values[k]);
                }
            }
        }
        assert!((conv.values[m] - best).abs() < 1e-12);
    }
    // inf-convolution is dual to the sum of transforms
    let slopes = Grid::cube(1, -1.5, 1.5, 31).unwrap();
    let lsum: Vec<f64> =
        legendre(&phi, &slopes).values.iter().zip(&legendre(&psi, &slopes).values).map(|(x, y)| x + y).collect();
    let lconv = legendre(&conv, &slopes);
    for (x, y) in lconv.values.iter().zip(&lsum) {
        assert!((x - y).abs() < 1e-9);
    }
    let c = Grid::cube(1, -2.0, 2.0, 11).unwrap();
    assert!(inf_convolution(&phi, &ConvexSamples::from_fn(c, |x| x[0])).is_err());
}

#[test]
fn delta_support_identity() {
    let sq = square();
    let rep = delta_support_identity_check(&sq, &sq, 0.5, 129).unwrap();
    assert!(rep.pass, "{}", rep.to_json());
    assert_eq!(rep.meta["directions"], 16);
    let tri = centered_triangle();
    let rep = delta_support_identity_check(&sq, &tri, 0.3, 129).unwrap();
    assert!(rep.pass, "{}", rep.to_json());

    let seg = VPolytope::convex_hull(&[vec![-1.0], vec![1.0]]).unwrap();
    let norm = polar_exponential_integral(&seg, 4001).unwrap();
    assert!((norm.value - 2.0).abs() < 1e-3);
    assert!(delta_support_identity_check(&seg, &seg, 0.5, 129).unwrap().pass);

    let off = VPolytope::convex_hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert!(matches!(delta_support_identity_check(&off, &sq, 0.5, 65), Err(GeomError::OriginNotInterior)));
}

#[test]
fn normalization_on_random_bodies() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..3 {
        let pts: Vec<Vec<f64>> = (0..8).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let k = VPolytope::convex_hull(&pts).unwrap();
        let c: Vec<f64> = k.centroid().iter().map(|x| -x).collect();
        let k = k.translate(&c).unwrap();
        let norm = polar_exponential_integral(&k, 1025).unwrap();
        let target = 2.0 * k.volume();
        assert!((norm.extrapolated() - target).abs() <= 1e-3 * target, "{} vs {}", norm.extrapolated(), target);
    }
}

#[test]
fn json_and_builtins() {
    let f = builtin("gaussian", 2, 9).unwrap();
    let back = GridFunction::from_json(&f.to_json()).unwrap();
    assert_eq!(back, f);
    assert!(builtin("sharp-exponential", 1, 9).is_ok());
    assert!(builtin("indicator-simplex", 2, 9).unwrap().passes_log_concavity_test(0.0));
    assert!(builtin("nope", 1, 9).is_err());
    assert!(Grid::cube(4, 0.0, 1.0, 3).is_err());
}
