//! Incremental beneath-beyond convex hull in dimension `d`.
//!
//! The boundary is maintained as a triangulation into `(d-1)`-simplices with
//! neighbour links across ridges. A point is inserted iff it lies strictly
//! beyond at least one boundary simplex; points on the boundary or inside are
//! skipped. Coplanar simplices are grouped into true facets afterwards.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{GeomError, Result};
use crate::linalg::{self, dot, sub};
use crate::scalar::{Mode, Scalar};

/// Relative tolerance of float-mode predicates.
pub const FLOAT_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Simplex<S> {
    verts: Vec<usize>,
    /// `nbrs[s]` shares the ridge obtained by dropping `verts[s]`.
    nbrs: Vec<usize>,
    normal: Vec<S>,
    offset: S,
    alive: bool,
}

/// Output of the hull kernel, indices refer to the input slice.
#[derive(Clone, Debug)]
pub(crate) struct RawHull<S> {
    /// Indices of the extreme points.
    pub extreme: Vec<usize>,
    /// Boundary triangulation using only extreme points.
    pub simplices: Vec<Vec<usize>>,
    /// One hyperplane per true facet: (normal, offset, extreme points on it).
    pub facets: Vec<(Vec<S>, S, Vec<usize>)>,
    /// A point in the interior of the hull.
    pub interior: Vec<S>,
}

/// Tolerance for predicates on points of the given coordinate scale.
pub(crate) fn tolerance<S: Scalar>(points: &[Vec<S>]) -> f64 {
    match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => {
            let scale = points.iter().map(|p| linalg::max_abs(p)).fold(0.0, f64::max);
            FLOAT_EPS * scale.max(1.0)
        }
    }
}

/// Normal of the hyperplane through `pts` (d points in R^d), unit length in float mode.
fn hyperplane<S: Scalar>(pts: &[&Vec<S>], dim: usize, tol: f64) -> Option<Vec<S>> {
    let base = pts[0];
    let rows: Vec<Vec<S>> = pts[1..].iter().map(|p| sub(p, base)).collect();
    let n = linalg::nullspace_vector(&rows, dim, tol)?;
    Some(normalize(n))
}

/// Canonical scaling of a normal: unit length (float) or first nonzero entry of modulus one (exact).
pub(crate) fn normalize<S: Scalar>(n: Vec<S>) -> Vec<S> {
    match S::MODE {
        Mode::Float => {
            let norm = n.iter().map(|x| x.to_f64() * x.to_f64()).sum::<f64>().sqrt();
            let inv = S::from_f64(1.0 / norm);
            n.into_iter().map(|x| x * &inv).collect()
        }
        Mode::Exact => {
            let Some(first) = n.iter().find(|x| !x.is_zero_tol(0.0)) else {
                return n;
            };
            let inv = S::one() / &first.abs();
            n.into_iter().map(|x| x * &inv).collect()
        }
    }
}

/// Picks `dim + 1` affinely independent points, greedily maximizing the residual.
fn initial_simplex<S: Scalar>(points: &[Vec<S>], dim: usize, tol: f64) -> Result<Vec<usize>> {
    let start = (0..points.len())
        .min_by(|&a, &b| linalg::lex_cmp(&points[a], &points[b]))
        .ok_or(GeomError::TooFewPoints { needed: dim + 1, got: 0 })?;
    let mut chosen = vec![start];
    // Orthogonalized directions, kept in reduced form against each other.
    let mut basis: Vec<(usize, Vec<S>)> = Vec::new();
    for _ in 0..dim {
        let mut best: Option<(usize, usize, Vec<S>, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = sub(p, &points[start]);
            for (pc, b) in &basis {
                if !r[*pc].is_zero_tol(0.0) {
                    let f = r[*pc].clone();
                    for (x, y) in r.iter_mut().zip(b) {
                        *x = x.clone() - &(f.clone() * y);
                    }
                }
            }
            let (pc, mag) = r
                .iter()
                .enumerate()
                .map(|(c, x)| (c, x.to_f64().abs()))
                .fold((0, 0.0), |acc, (c, m)| if m > acc.1 { (c, m) } else { acc });
            let nonzero = match S::MODE {
                Mode::Exact => r.iter().any(|x| !x.is_zero_tol(0.0)),
                Mode::Float => mag > tol,
            };
            if !nonzero {
                continue;
            }
            let better = match (&best, S::MODE) {
                (None, _) => true,
                (Some(_), Mode::Exact) => false,
                (Some((_, _, _, m)), Mode::Float) => mag > *m,
            };
            if better {
                // exact mode: pivot on the first nonzero entry to stay exact
                let pc = match S::MODE {
                    Mode::Exact => r.iter().position(|x| !x.is_zero_tol(0.0)).unwrap(),
                    Mode::Float => pc,
                };
                best = Some((i, pc, r, mag));
            }
        }
        let Some((i, pc, r, _)) = best else {
            return Err(GeomError::DegenerateInput { expected: dim, found: basis.len() });
        };
        let inv = S::one() / &r[pc];
        let r: Vec<S> = r.into_iter().map(|x| x * &inv).collect();
        for (_, b) in basis.iter_mut() {
            if !b[pc].is_zero_tol(0.0) {
                let f = b[pc].clone();
                for (x, y) in b.iter_mut().zip(&r) {
                    *x = x.clone() - &(f.clone() * y);
                }
            }
        }
        basis.push((pc, r));
        chosen.push(i);
    }
    Ok(chosen)
}

fn beneath_beyond<S: Scalar>(
    points: &[Vec<S>],
    dim: usize,
    tol: f64,
) -> Result<(Vec<Simplex<S>>, Vec<S>)> {
    let init = initial_simplex(points, dim, tol)?;
    let mut interior = vec![S::zero(); dim];
    for &i in &init {
        interior = linalg::add(&interior, &points[i]);
    }
    let inv = S::one() / &S::from_i64((dim + 1) as i64);
    interior = linalg::scale(&interior, &inv);

    let make = |verts: Vec<usize>, nbrs: Vec<usize>| -> Result<Simplex<S>> {
        let refs: Vec<&Vec<S>> = verts.iter().map(|&v| &points[v]).collect();
        let mut normal = hyperplane(&refs, dim, tol)
            .ok_or(GeomError::DegenerateInput { expected: dim, found: dim - 1 })?;
        let mut offset = dot(&normal, refs[0]);
        if (dot(&normal, &interior) - &offset).sign_tol(0.0) == Ordering::Greater {
            normal = normal.into_iter().map(|x| -x).collect();
            offset = -offset;
        }
        Ok(Simplex { verts, nbrs, normal, offset, alive: true })
    };

    let mut simplices: Vec<Simplex<S>> = Vec::new();
    for skip in 0..=dim {
        let verts: Vec<usize> = (0..=dim).filter(|&k| k != skip).map(|k| init[k]).collect();
        // dropping init[k] from this facet leads to the facet that skips k
        let nbrs: Vec<usize> = (0..=dim).filter(|&k| k != skip).collect();
        simplices.push(make(verts, nbrs)?);
    }

    let in_init: Vec<bool> = {
        let mut v = vec![false; points.len()];
        for &i in &init {
            v[i] = true;
        }
        v
    };

    let mut visible = vec![false; simplices.len()];
    for (pi, p) in points.iter().enumerate() {
        if in_init[pi] {
            continue;
        }
        visible.resize(simplices.len(), false);
        let mut any = false;
        for (si, s) in simplices.iter().enumerate() {
            let v = s.alive
                && (dot(&s.normal, p) - &s.offset).sign_tol(tol) == Ordering::Greater;
            visible[si] = v;
            any |= v;
        }
        if !any {
            continue;
        }
        let visible_ids: Vec<usize> = (0..simplices.len()).filter(|&i| visible[i]).collect();
        let mut created = Vec::new();
        for &f in &visible_ids {
            for slot in 0..dim {
                let g = simplices[f].nbrs[slot];
                if visible[g] {
                    continue;
                }
                let mut verts: Vec<usize> = simplices[f]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != slot)
                    .map(|(_, &v)| v)
                    .collect();
                verts.push(pi);
                let mut nbrs = vec![usize::MAX; dim];
                nbrs[dim - 1] = g;
                let new_id = simplices.len();
                simplices.push(make(verts, nbrs)?);
                let back = simplices[g].nbrs.iter().position(|&x| x == f).expect("neighbour link");
                simplices[g].nbrs[back] = new_id;
                created.push(new_id);
            }
            simplices[f].alive = false;
        }
        // new simplices meet each other along ridges through the inserted point
        let mut ridge_map: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for &id in &created {
            for k in 0..dim - 1 {
                let mut key: Vec<usize> = simplices[id]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                if let Some((other, oslot)) = ridge_map.remove(&key) {
                    simplices[id].nbrs[k] = other;
                    simplices[other].nbrs[oslot] = id;
                } else {
                    ridge_map.insert(key, (id, k));
                }
            }
        }
    }
    Ok((simplices, interior))
}

/// Convex hull of `points` in `R^dim`.
pub(crate) fn convex_hull<S: Scalar>(points: &[Vec<S>], dim: usize) -> Result<RawHull<S>> {
    if points.len() < dim + 1 {
        return Err(GeomError::TooFewPoints { needed: dim + 1, got: points.len() });
    }
    let tol = tolerance(points);
    let (simplices, interior) = beneath_beyond(points, dim, tol)?;
    let alive: Vec<&Simplex<S>> = simplices.iter().filter(|s| s.alive).collect();

    // group boundary simplices by supporting hyperplane
    let groups = group_by_hyperplane(&alive, tol);

    let mut on_boundary: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (g, (_, _, members)) in groups.iter().enumerate() {
        for &m in members {
            for &v in &alive[m].verts {
                if !on_boundary[v].contains(&g) {
                    on_boundary[v].push(g);
                }
            }
        }
    }
    let rank_tol = match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-9,
    };
    let mut extreme = Vec::new();
    let mut non_extreme_on_boundary = false;
    for (v, gs) in on_boundary.iter().enumerate() {
        if gs.is_empty() {
            continue;
        }
        let normals: Vec<Vec<S>> = gs.iter().map(|&g| groups[g].0.clone()).collect();
        if gs.len() >= dim && linalg::rank(&normals, rank_tol) == dim {
            extreme.push(v);
        } else {
            non_extreme_on_boundary = true;
        }
    }

    if non_extreme_on_boundary {
        let sub_points: Vec<Vec<S>> = extreme.iter().map(|&i| points[i].clone()).collect();
        let inner = convex_hull(&sub_points, dim)?;
        let map = |i: usize| extreme[i];
        return Ok(RawHull {
            extreme: inner.extreme.iter().map(|&i| map(i)).collect(),
            simplices: inner
                .simplices
                .iter()
                .map(|s| s.iter().map(|&i| map(i)).collect())
                .collect(),
            facets: inner
                .facets
                .into_iter()
                .map(|(n, o, vs)| (n, o, vs.into_iter().map(map).collect()))
                .collect(),
            interior: inner.interior,
        });
    }

    let facets = groups
        .into_iter()
        .map(|(normal, offset, members)| {
            let mut vs: Vec<usize> = members.iter().flat_map(|&m| alive[m].verts.clone()).collect();
            vs.sort_unstable();
            vs.dedup();
            (normal, offset, vs)
        })
        .collect();
    Ok(RawHull {
        extreme,
        simplices: alive.iter().map(|s| s.verts.clone()).collect(),
        facets,
        interior,
    })
}

type Group<S> = (Vec<S>, S, Vec<usize>);

fn group_by_hyperplane<S: Scalar>(alive: &[&Simplex<S>], tol: f64) -> Vec<Group<S>> {
    let mut groups: Vec<Group<S>> = Vec::new();
    match S::MODE {
        Mode::Exact => {
            let mut index: HashMap<String, usize> = HashMap::new();
            for (i, s) in alive.iter().enumerate() {
                let key = format!("{:?}", s.normal);
                match index.get(&key) {
                    Some(&g) => groups[g].2.push(i),
                    None => {
                        index.insert(key, groups.len());
                        groups.push((s.normal.clone(), s.offset.clone(), vec![i]));
                    }
                }
            }
        }
        Mode::Float => {
            let angle_tol = 1e-9;
            for (i, s) in alive.iter().enumerate() {
                let found = groups.iter().position(|(n, o, _)| {
                    let d: f64 = n
                        .iter()
                        .zip(&s.normal)
                        .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
                        .fold(0.0, f64::max);
                    d < angle_tol && (o.to_f64() - s.offset.to_f64()).abs() <= 1e3 * tol.max(1e-12)
                });
                match found {
                    Some(g) => groups[g].2.push(i),
                    None => groups.push((s.normal.clone(), s.offset.clone(), vec![i])),
                }
            }
        }
    }
    groups
}
