//! Numerical search for the translation minimizing `Vol((1-l)(K-x) v l(x-K))`.

use serde::Serialize;

use godbersen_core::geometry::{Point, VPolytope};
use godbersen_core::{Result, Scalar};

/// Relative improvement below which the sweeps stop.
pub const STOP_REL: f64 = 1e-8;
const MAX_SWEEPS: usize = 60;
const GOLDEN_ITERS: usize = 48;
/// Boundary probes start this fraction of the way from the centroid to the boundary.
const PROBE_DEPTH: f64 = 0.9;

/// Midpoint convexity tests `f(mid) <= (f(a) + f(b)) / 2` made along search segments.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConvexityCertificate {
    pub tests: usize,
    pub violations: usize,
    /// Largest relative excess `(f(mid) - avg) / max(|avg|, 1)` seen.
    pub max_excess: f64,
}

impl ConvexityCertificate {
    fn record(&mut self, left: f64, mid: f64, right: f64) {
        let avg = 0.5 * (left + right);
        let excess = (mid - avg) / avg.abs().max(1.0);
        self.tests += 1;
        if excess > 1e-12 {
            self.violations += 1;
        }
        self.max_excess = self.max_excess.max(excess);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranslationSolution {
    pub x_star: Vec<f64>,
    pub value: f64,
    /// Coordinate sweeps over all starts.
    pub iterations: usize,
    pub evaluations: usize,
    pub certificate: ConvexityCertificate,
}

/// `Vol((1-l)(K-x) v l(x-K))`.
pub fn translation_objective<S: Scalar>(k: &VPolytope<S>, lambda: &S, x: &[S]) -> Result<S> {
    let shift: Point<S> = x.iter().map(|v| -v.clone()).collect();
    let moved = k.translate(&shift)?;
    moved.weighted_hull(&(S::one() - lambda), &moved.reflect(), lambda).map(|h| h.volume())
}

/// Parameters `t` with `x + t e_axis` in `K`.
fn chord(k: &VPolytope<f64>, x: &[f64], axis: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for f in k.facets() {
        let a = f.outward_normal[axis];
        let slack = f.offset - f.outward_normal.iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
        if a > 1e-15 {
            hi = hi.min(slack / a);
        } else if a < -1e-15 {
            lo = lo.max(slack / a);
        }
    }
    (lo.min(0.0), hi.max(0.0))
}

struct Search<'a> {
    k: &'a VPolytope<f64>,
    lambda: f64,
    evaluations: usize,
    certificate: ConvexityCertificate,
}

impl Search<'_> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        translation_objective(self.k, &self.lambda, x)
    }

    /// Golden-section minimization along one coordinate chord; returns the new value.
    fn line(&mut self, x: &mut [f64], axis: usize, current: f64) -> Result<f64> {
        let (lo, hi) = chord(self.k, x, axis);
        if hi - lo <= 1e-14 {
            return Ok(current);
        }
        let base = x[axis];
        let at = |s: &mut Self, t: f64| -> Result<f64> {
            let mut y = x.to_vec();
            y[axis] = base + t;
            s.eval(&y)
        };
        let ends = (at(self, lo)?, at(self, hi)?);
        let mid = at(self, 0.5 * (lo + hi))?;
        self.certificate.record(ends.0, mid, ends.1);

        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (at(self, c)?, at(self, d)?);
        for _ in 0..GOLDEN_ITERS {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = at(self, c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = at(self, d)?;
            }
            if b - a <= 1e-12 * (hi - lo) {
                break;
            }
        }
        let (t, ft) = if fc <= fd { (c, fc) } else { (d, fd) };
        if ft < current {
            x[axis] = base + t;
            Ok(ft)
        } else {
            Ok(current)
        }
    }

    fn descend(&mut self, start: Vec<f64>) -> Result<(Vec<f64>, f64, usize)> {
        let mut x = start;
        let mut value = self.eval(&x)?;
        let mut sweeps = 0;
        while sweeps < MAX_SWEEPS {
            sweeps += 1;
            let before = value;
            for axis in 0..x.len() {
                value = self.line(&mut x, axis, value)?;
            }
            if before - value <= STOP_REL * before.abs() {
                break;
            }
        }
        Ok((x, value, sweeps))
    }
}

/// Coordinatewise golden-section descent started from the centroid and from `2n`
/// points near the boundary along the coordinate axes. The returned value is attained
/// at `x_star`, so it bounds the true minimum from above.
pub fn minimize_over_translation(k: &VPolytope<f64>, lambda: f64) -> Result<TranslationSolution> {
    let n = k.dim();
    let centroid = k.centroid();
    let mut starts = vec![centroid.clone()];
    for axis in 0..n {
        let (lo, hi) = chord(k, &centroid, axis);
        for t in [lo, hi] {
            let mut p = centroid.clone();
            p[axis] += PROBE_DEPTH * t;
            starts.push(p);
        }
    }
    let mut search = Search { k, lambda, evaluations: 0, certificate: ConvexityCertificate::default() };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut iterations = 0;
    for start in starts {
        let (x, value, sweeps) = search.descend(start)?;
        iterations += sweeps;
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((x, value));
        }
    }
    let (x_star, value) = best.expect("centroid start");
    Ok(TranslationSolution {
        x_star,
        value,
        iterations,
        evaluations: search.evaluations,
        certificate: search.certificate,
    })
}
