//! Seeded random polytopes, centered and normalized to (about) unit volume.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use godbersen_core::geometry::{Point, VPolytope};
use godbersen_core::{GeomError, Mode, Result, Scalar};

/// Number of attempts before a degenerate sample is reported.
pub const MAX_ATTEMPTS: usize = 10;

/// Coordinates are rounded to this grid before the hull is taken, keeping exact
/// arithmetic cheap.
pub const QUANTUM: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Flavor {
    HullOfGaussians,
    HullOfSpherePoints,
    /// Vertices of a simplex moved by Gaussian noise of the given size.
    PerturbedSimplex(f64),
}

impl Flavor {
    /// Parses `hull-of-gaussians`, `hull-of-sphere-points` or `perturbed-simplex`.
    pub fn parse(name: &str, perturbation: f64) -> Option<Flavor> {
        match name {
            "hull-of-gaussians" => Some(Flavor::HullOfGaussians),
            "hull-of-sphere-points" => Some(Flavor::HullOfSpherePoints),
            "perturbed-simplex" => Some(Flavor::PerturbedSimplex(perturbation)),
            _ => None,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn sample(rng: &mut ChaCha8Rng, n: usize, m: usize, flavor: Flavor) -> Vec<Vec<f64>> {
    match flavor {
        Flavor::HullOfGaussians => (0..m).map(|_| gaussian(rng, n)).collect(),
        Flavor::HullOfSpherePoints => (0..m)
            .map(|_| {
                let g = gaussian(rng, n);
                let r = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                g.into_iter().map(|x| x / r).collect()
            })
            .collect(),
        Flavor::PerturbedSimplex(eps) => (0..=n)
            .map(|i| {
                let noise = gaussian(rng, n);
                (0..n).map(|a| if a + 1 == i { 1.0 } else { 0.0 } + eps * noise[a]).collect()
            })
            .collect(),
    }
}

fn quantize<S: Scalar>(x: f64) -> S {
    S::from_ratio((x * QUANTUM as f64).round() as i64, QUANTUM)
}

/// A random polytope, translated so that its centroid is the origin and scaled to unit
/// volume. In exact mode the scale factor is rounded to a multiple of `1/QUANTUM`, so
/// the volume is only close to one; centering is always exact.
pub fn random_polytope<S: Scalar>(n: usize, m: usize, seed: u64, flavor: Flavor) -> Result<VPolytope<S>> {
    if m < n + 1 {
        return Err(GeomError::TooFewPoints { needed: n + 1, got: m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let pts: Vec<Point<S>> = sample(&mut rng, n, m, flavor)
            .into_iter()
            .map(|p| p.into_iter().map(quantize::<S>).collect())
            .collect();
        match VPolytope::convex_hull_in(n, &pts) {
            Ok(p) => return normalize(&p),
            Err(e @ GeomError::DegenerateInput { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn normalize<S: Scalar>(p: &VPolytope<S>) -> Result<VPolytope<S>> {
    let shift: Point<S> = p.centroid().iter().map(|c| -c.clone()).collect();
    let centered = p.translate(&shift)?;
    let s = centered.volume().to_f64().powf(-1.0 / p.dim() as f64);
    let factor = match S::MODE {
        Mode::Float => S::from_f64(s),
        Mode::Exact => S::from_ratio(((s * QUANTUM as f64).round() as i64).max(1), QUANTUM),
    };
    centered.scale(&factor)
}
