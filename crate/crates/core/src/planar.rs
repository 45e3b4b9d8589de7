//! Area- and centroid-preserving vertex removal for centered polygons.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{GeomError, Result};
use crate::geometry::{Point, VPolytope};
use crate::linalg;
use crate::report::CheckReport;
use crate::scalar::{Mode, Scalar};
use crate::simplex::simplex_hull_ratio;

/// Parameters beyond this multiple of the diameter are capped and the step flagged.
pub const PARAMETER_CAP: f64 = 1e6;

fn cross<S: Scalar>(a: &[S], b: &[S]) -> S {
    a[0].clone() * &b[1] - &(a[1].clone() * &b[0])
}

fn tol<S: Scalar>() -> f64 {
    match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-9,
    }
}

/// Vertices in counterclockwise order, starting from the lexicographically smallest.
pub fn ccw_vertices<S: Scalar>(k: &VPolytope<S>) -> Result<Vec<Point<S>>> {
    if k.dim() != 2 {
        return Err(GeomError::DimensionMismatch(2, k.dim()));
    }
    let verts = k.vertices();
    let mut next = vec![usize::MAX; verts.len()];
    for f in k.facets() {
        let (a, b) = (f.vertex_indices[0], f.vertex_indices[1]);
        let d = linalg::sub(&verts[b], &verts[a]);
        // counterclockwise edges have the outward normal on their right
        let right = vec![d[1].clone(), -d[0].clone()];
        if linalg::dot(&right, &f.outward_normal).sign_tol(0.0) == Ordering::Greater {
            next[a] = b;
        } else {
            next[b] = a;
        }
    }
    let mut out = Vec::with_capacity(verts.len());
    let mut i = 0;
    for _ in 0..verts.len() {
        out.push(verts[i].clone());
        i = next[i];
    }
    Ok(out)
}

/// `Area((1-l)K v -lK)`.
pub fn planar_objective<S: Scalar>(k: &VPolytope<S>, lambda: &S) -> Result<S> {
    Ok(k.weighted_hull(&(S::one() - lambda), k, &-lambda.clone())?.volume())
}

/// One removal: the moving vertex `x2` slides parallel to `u = x3 - x1` until it
/// becomes collinear with the neighbouring edge on either side.
#[derive(Clone, Debug)]
pub struct ReductionStep<S> {
    pub before: VPolytope<S>,
    pub after: VPolytope<S>,
    /// Index of the moving vertex in the counterclockwise order of `before`.
    pub vertex_index: usize,
    pub alpha: S,
    pub beta: S,
    pub chosen_t: S,
    pub objective_before: S,
    pub objective_after: S,
    /// The recentering translation `-theta t u`.
    pub shift: Point<S>,
    /// A parameter hit the cap; the vertex count then need not drop.
    pub flagged: bool,
}

impl<S: Scalar> ReductionStep<S> {
    pub fn to_json(&self) -> Value {
        let poly = |p: &VPolytope<S>| -> Value {
            ccw_vertices(p)
                .map(|vs| vs.iter().map(|v| v.iter().map(Scalar::to_json).collect::<Vec<_>>()).collect())
                .unwrap_or(Value::Null)
        };
        json!({
            "before": poly(&self.before),
            "after": poly(&self.after),
            "vertex_index": self.vertex_index,
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "chosen_t": self.chosen_t.to_json(),
            "objective_before": self.objective_before.to_json(),
            "objective_after": self.objective_after.to_json(),
            "shift": self.shift.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "flagged": self.flagged,
        })
    }
}

/// Geometry of a candidate move, before the objective is evaluated.
struct Move<S> {
    ring: Vec<Point<S>>,
    index: usize,
    u: Point<S>,
    alpha: S,
    beta: S,
    alpha_capped: bool,
    beta_capped: bool,
    theta: S,
}

fn diameter<S: Scalar>(ring: &[Point<S>]) -> f64 {
    let mut d: f64 = 0.0;
    for a in ring {
        for b in ring {
            let v = linalg::sub(a, b);
            d = d.max(linalg::dot(&v, &v).to_f64().sqrt());
        }
    }
    d
}

fn polygon_area<S: Scalar>(ring: &[Point<S>]) -> S {
    let n = ring.len();
    let mut acc = S::zero();
    for i in 0..n {
        acc = acc + &cross(&ring[i], &ring[(i + 1) % n]);
    }
    acc / &S::from_i64(2)
}

fn check_centered<S: Scalar>(k: &VPolytope<S>) -> Result<()> {
    if k.centroid().iter().all(|c| c.is_zero_tol(tol::<S>())) {
        Ok(())
    } else {
        Err(GeomError::NotCentered)
    }
}

/// Parameter `t` with `p + t u` on the line through `a` and `b`; `None` when parallel.
fn line_parameter<S: Scalar>(p: &[S], u: &[S], a: &[S], b: &[S]) -> Option<S> {
    let d = linalg::sub(b, a);
    let den = cross(u, &d);
    if den.is_zero_tol(tol::<S>()) {
        return None;
    }
    Some(-(cross(&linalg::sub(p, a), &d) / &den))
}

fn plan_move<S: Scalar>(k: &VPolytope<S>, index: usize) -> Result<Move<S>> {
    let ring = ccw_vertices(k)?;
    let n = ring.len();
    if n < 4 {
        return Err(GeomError::TooFewVertices(n));
    }
    if index >= n {
        return Err(GeomError::InvalidArgument(format!("vertex index {index} out of range for {n} vertices")));
    }
    let at = |off: isize| &ring[((index as isize + off).rem_euclid(n as isize)) as usize];
    let (xn, x1, x2, x3, x4) = (at(-2), at(-1), at(0), at(1), at(2));
    let u = linalg::sub(x3, x1);
    let cap = S::from_f64(PARAMETER_CAP * diameter(&ring));
    let (alpha, alpha_capped) = match line_parameter(x2, &u, xn, x1) {
        Some(a) if (-a.clone()).total_cmp(&cap) != Ordering::Greater => (a, false),
        _ => (-cap.clone(), true),
    };
    let (beta, beta_capped) = match line_parameter(x2, &u, x3, x4) {
        Some(b) if b.total_cmp(&cap) != Ordering::Greater => (b, false),
        _ => (cap, true),
    };
    let tri = polygon_area(&[x1.clone(), x2.clone(), x3.clone()]);
    let theta = tri / &(S::from_i64(3) * &polygon_area(&ring));
    Ok(Move { ring, index, u, alpha, beta, alpha_capped, beta_capped, theta })
}

/// `K_t` as a vertex list; at an uncapped endpoint the absorbed neighbour is dropped.
fn moved_ring<S: Scalar>(m: &Move<S>, t: &S, drop: Option<isize>) -> (Vec<Point<S>>, Point<S>) {
    let n = m.ring.len();
    let shift: Point<S> = m.u.iter().map(|c| -(m.theta.clone() * t * c)).collect();
    let dropped = drop.map(|off| ((m.index as isize + off).rem_euclid(n as isize)) as usize);
    let ring = m
        .ring
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != dropped)
        .map(|(i, p)| {
            let base: Point<S> = if i == m.index {
                p.iter().zip(&m.u).map(|(x, d)| x.clone() + &(t.clone() * d)).collect()
            } else {
                p.clone()
            };
            linalg::add(&base, &shift)
        })
        .collect();
    (ring, shift)
}

fn polygon<S: Scalar>(ring: &[Point<S>]) -> Result<VPolytope<S>> {
    VPolytope::convex_hull_in(2, ring)
}

/// `K_t` for any `t` in `[alpha, beta]`, keeping every vertex.
pub fn moved_polygon<S: Scalar>(k: &VPolytope<S>, index: usize, t: &S) -> Result<VPolytope<S>> {
    let m = plan_move(k, index)?;
    polygon(&moved_ring(&m, t, None).0)
}

/// `(alpha, beta)` for the given moving vertex.
pub fn parameter_interval<S: Scalar>(k: &VPolytope<S>, index: usize) -> Result<(S, S)> {
    let m = plan_move(k, index)?;
    Ok((m.alpha, m.beta))
}

/// Moves vertex `index` to whichever end of `[alpha, beta]` has the larger objective
/// (`alpha` at a tie) and recenters.
pub fn remove_vertex_step<S: Scalar>(k: &VPolytope<S>, lambda: &S, index: usize) -> Result<ReductionStep<S>> {
    check_centered(k)?;
    let m = plan_move(k, index)?;
    let (ring_a, shift_a) = moved_ring(&m, &m.alpha, (!m.alpha_capped).then_some(-1));
    let (ring_b, shift_b) = moved_ring(&m, &m.beta, (!m.beta_capped).then_some(1));
    let (pa, pb) = (polygon(&ring_a)?, polygon(&ring_b)?);
    let (oa, ob) = (planar_objective(&pa, lambda)?, planar_objective(&pb, lambda)?);
    let take_alpha = oa.total_cmp(&ob) != Ordering::Less;
    let (after, objective_after, chosen_t, shift, flagged) = if take_alpha {
        (pa, oa, m.alpha.clone(), shift_a, m.alpha_capped)
    } else {
        (pb, ob, m.beta.clone(), shift_b, m.beta_capped)
    };
    Ok(ReductionStep {
        before: k.clone(),
        after,
        vertex_index: index,
        alpha: m.alpha,
        beta: m.beta,
        chosen_t,
        objective_before: planar_objective(k, lambda)?,
        objective_after,
        shift,
        flagged,
    })
}

/// Which vertex to remove next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Smallest `|alpha| + |beta|`.
    MinPerturbation,
    First,
    Random(u64),
}

/// Translates a polygon so that its centroid is the origin.
pub fn centered<S: Scalar>(k: &VPolytope<S>) -> Result<VPolytope<S>> {
    let c: Point<S> = k.centroid().iter().map(|x| -x.clone()).collect();
    k.translate(&c)
}

/// Removes vertices until a triangle remains. In float mode the input is first
/// rescaled to unit area; in exact mode the area is kept (the objective ratio is
/// scale invariant).
pub fn reduce_to_triangle<S: Scalar>(k: &VPolytope<S>, lambda: &S, policy: Policy) -> Result<Vec<ReductionStep<S>>> {
    check_centered(k)?;
    let mut current = match S::MODE {
        Mode::Float => {
            let a = k.volume().to_f64();
            k.scale(&S::from_f64(1.0 / a.sqrt()))?
        }
        Mode::Exact => k.clone(),
    };
    let mut rng = match policy {
        Policy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut steps = Vec::new();
    while current.num_vertices() > 3 {
        let n = current.num_vertices();
        let index = match policy {
            Policy::First => 0,
            Policy::Random(_) => rng.as_mut().expect("seeded").random_range(0..n),
            Policy::MinPerturbation => {
                let mut best: Option<(usize, S)> = None;
                for i in 0..n {
                    let m = plan_move(&current, i)?;
                    let penalty = if m.alpha_capped || m.beta_capped { S::from_f64(f64::MAX / 4.0) } else { S::zero() };
                    let size = m.beta.clone() - &m.alpha + &penalty;
                    if best.as_ref().is_none_or(|(_, b)| size.total_cmp(b) == Ordering::Less) {
                        best = Some((i, size));
                    }
                }
                best.expect("at least four vertices").0
            }
        };
        let step = remove_vertex_step(&current, lambda, index)?;
        current = step.after.clone();
        steps.push(step);
    }
    Ok(steps)
}

/// `Area((1-l)(K-c) v l(c-K)) <= ratio(2, l) Area(K)` with `c` the centroid.
pub fn verify_planar_gfr<S: Scalar>(k: &VPolytope<S>, lambda: &S) -> Result<CheckReport> {
    let k = centered(k)?;
    let lhs = planar_objective(&k, lambda)?;
    let ratio = simplex_hull_ratio(2, lambda)?.ratio;
    let rhs = ratio * &k.volume();
    Ok(CheckReport::le("planar-gfr", &lhs, &rhs)
        .with_meta("n", 2)
        .with_meta("lambda", lambda.to_json())
        .with_meta("vertices", k.num_vertices()))
}
