//! Vertex enumeration for `{x : <a_i, x> <= b_i}` by the double description
//! method on the homogenized cone `{(x, t) : <a_i, x> - b_i t <= 0, t >= 0}`.
//!
//! Extreme rays with `t > 0` are the vertices; rays with `t = 0` witness
//! unboundedness. Adjacency uses the combinatorial test on zero sets.

use std::cmp::Ordering;

use crate::error::{GeomError, Result};
use crate::linalg::{self, dot};
use crate::scalar::{Mode, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Self) -> Self {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_superset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray<S> {
    coords: Vec<S>,
    zeros: BitSet,
}

fn normalize_ray<S: Scalar>(r: Vec<S>) -> Vec<S> {
    let m = match S::MODE {
        Mode::Float => {
            let m = linalg::max_abs(&r);
            if m == 0.0 {
                return r;
            }
            S::from_f64(m)
        }
        Mode::Exact => match r.iter().rev().find(|x| !x.is_zero_tol(0.0)) {
            Some(x) => x.abs(),
            None => return r,
        },
    };
    r.into_iter().map(|x| x / &m).collect()
}

/// Outcome of vertex enumeration.
#[derive(Clone, Debug, PartialEq)]
pub enum Enumeration<S> {
    /// Vertices of a bounded nonempty polyhedron (possibly lower dimensional).
    Bounded(Vec<Vec<S>>),
    Empty,
}

/// Enumerates the vertices of `{x : normals[i] . x <= offsets[i]}` in `R^dim`.
pub fn enumerate_vertices<S: Scalar>(
    dim: usize,
    normals: &[Vec<S>],
    offsets: &[S],
) -> Result<Enumeration<S>> {
    let big = dim + 1;
    // homogenized rows; the last row encodes t >= 0
    let mut rows: Vec<Vec<S>> = normals
        .iter()
        .zip(offsets)
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(-b.clone());
            r
        })
        .collect();
    let mut t_row = vec![S::zero(); big];
    t_row[dim] = -S::one();
    rows.push(t_row);
    let m = rows.len();

    let scale = rows.iter().map(|r| linalg::max_abs(r)).fold(0.0, f64::max);
    let tol = match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-10 * scale.max(1.0),
    };

    // choose an initial set of linearly independent rows, starting with t >= 0
    let mut order: Vec<usize> = vec![m - 1];
    order.extend(0..m - 1);
    let mut basis_rows: Vec<usize> = Vec::new();
    let mut probe: Vec<Vec<S>> = Vec::new();
    for &i in &order {
        probe.push(rows[i].clone());
        if linalg::rank(&probe, tol) > basis_rows.len() {
            basis_rows.push(i);
            if basis_rows.len() == big {
                break;
            }
        } else {
            probe.pop();
        }
    }
    if basis_rows.len() < big {
        // the cone has a lineality space: the polyhedron contains a line
        return Err(GeomError::Unbounded);
    }
    let mat: Vec<Vec<S>> = basis_rows.iter().map(|&i| rows[i].clone()).collect();
    let inv = linalg::inverse(&mat, tol).ok_or(GeomError::Unbounded)?;
    let inv_t = linalg::transpose(&inv);

    let mut rays: Vec<Ray<S>> = Vec::with_capacity(big);
    for (j, col) in inv_t.into_iter().enumerate() {
        let coords: Vec<S> = col.into_iter().map(|x| -x).collect();
        let mut zeros = BitSet::new(m);
        for (k, &bi) in basis_rows.iter().enumerate() {
            if k != j {
                zeros.insert(bi);
            }
        }
        rays.push(Ray { coords: normalize_ray(coords), zeros });
    }

    let processed_initial: Vec<bool> = {
        let mut v = vec![false; m];
        for &i in &basis_rows {
            v[i] = true;
        }
        v
    };

    for i in 0..m {
        if processed_initial[i] {
            continue;
        }
        let row = &rows[i];
        let vals: Vec<S> = rays.iter().map(|r| dot(row, &r.coords)).collect();
        let signs: Vec<Ordering> = vals.iter().map(|v| v.sign_tol(tol)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| signs[k] == Ordering::Greater).collect();
        if pos.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if signs[k] == Ordering::Equal {
                    r.zeros.insert(i);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| signs[k] == Ordering::Less).collect();
        let mut new_rays = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < big {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == p || k == q || !r.zeros.is_superset(&common)
                });
                if !adjacent {
                    continue;
                }
                // vals[p] > 0 > vals[q]: positive combination zeroing row i
                let a = vals[p].clone();
                let b = -vals[q].clone();
                let coords: Vec<S> = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(xq, xp)| a.clone() * xq + &(b.clone() * xp))
                    .collect();
                let mut zeros = common;
                zeros.insert(i);
                new_rays.push(Ray { coords: normalize_ray(coords), zeros });
            }
        }
        let mut kept: Vec<Ray<S>> = Vec::with_capacity(rays.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            match signs[k] {
                Ordering::Greater => {}
                Ordering::Equal => {
                    r.zeros.insert(i);
                    kept.push(r);
                }
                Ordering::Less => kept.push(r),
            }
        }
        kept.extend(new_rays);
        rays = kept;
        if rays.is_empty() {
            return Ok(Enumeration::Empty);
        }
    }

    let mut vertices = Vec::new();
    let mut recession = false;
    for r in &rays {
        let t = &r.coords[dim];
        match t.sign_tol(tol) {
            Ordering::Greater => {
                let inv = S::one() / t;
                vertices.push(r.coords[..dim].iter().map(|x| x.clone() * &inv).collect::<Vec<S>>());
            }
            _ => {
                if r.coords[..dim].iter().any(|x| !x.is_zero_tol(tol)) {
                    recession = true;
                }
            }
        }
    }
    if vertices.is_empty() {
        return Ok(Enumeration::Empty);
    }
    if recession {
        return Err(GeomError::Unbounded);
    }
    vertices.sort_by(|a, b| linalg::lex_cmp(a, b));
    let dedup_tol = match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-9 * scale.max(1.0),
    };
    vertices.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x.clone() - y).is_zero_tol(dedup_tol)));
    Ok(Enumeration::Bounded(vertices))
}
