//! Small dense linear algebra over [`Scalar`]; matrices are row-major `Vec<Vec<S>>`.

use std::cmp::Ordering;

use crate::scalar::{Mode, Scalar};

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + &(x.clone() * y);
    }
    acc
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y).collect()
}

pub fn scale<S: Scalar>(a: &[S], s: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * s).collect()
}

pub fn max_abs<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Index of a usable pivot in `col` among rows `from..`: largest magnitude in
/// float mode, first nonzero in exact mode.
fn pick_pivot<S: Scalar>(m: &[Vec<S>], col: usize, from: usize, tol: f64) -> Option<usize> {
    match S::MODE {
        Mode::Exact => (from..m.len()).find(|&r| !m[r][col].is_zero_tol(tol)),
        Mode::Float => {
            let mut best: Option<(usize, f64)> = None;
            for r in from..m.len() {
                let v = m[r][col].to_f64().abs();
                if v > tol && best.is_none_or(|(_, b)| v > b) {
                    best = Some((r, v));
                }
            }
            best.map(|(r, _)| r)
        }
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut [Vec<S>], tol: f64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pick_pivot(m, c, r, tol) else {
            continue;
        };
        m.swap(r, p);
        let inv = S::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = x.clone() * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero_tol(0.0) {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = f.clone() * &m[r][j];
                    m[i][j] = m[i][j].clone() - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], tol: f64) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, tol).len()
}

/// Determinant by Gaussian elimination.
pub fn det<S: Scalar>(mat: &[Vec<S>]) -> S {
    let n = mat.len();
    let mut m = mat.to_vec();
    let mut acc = S::one();
    for c in 0..n {
        let Some(p) = pick_pivot(&m, c, c, 0.0) else {
            return S::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let piv = m[c][c].clone();
        acc = acc * &piv;
        for r in c + 1..n {
            if m[r][c].is_zero_tol(0.0) {
                continue;
            }
            let f = m[r][c].clone() / &piv;
            for j in c..n {
                let t = f.clone() * &m[c][j];
                m[r][j] = m[r][j].clone() - &t;
            }
        }
    }
    acc
}

/// A nonzero vector `x` with `rows * x = 0`, if the nullspace is nontrivial.
///
/// When the nullspace is one-dimensional the result is unique up to scale.
pub fn nullspace_vector<S: Scalar>(rows: &[Vec<S>], cols: usize, tol: f64) -> Option<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, tol);
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut x = vec![S::zero(); cols];
    x[free] = S::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[r][free].clone();
    }
    Some(x)
}

/// Solves the square system `mat * x = rhs`.
pub fn solve<S: Scalar>(mat: &[Vec<S>], rhs: &[S], tol: f64) -> Option<Vec<S>> {
    let n = mat.len();
    let mut aug: Vec<Vec<S>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, tol);
    if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Matrix inverse, or `None` when singular.
pub fn inverse<S: Scalar>(mat: &[Vec<S>], tol: f64) -> Option<Vec<Vec<S>>> {
    let n = mat.len();
    let mut aug: Vec<Vec<S>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, tol);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec<S: Scalar>(mat: &[Vec<S>], v: &[S]) -> Vec<S> {
    mat.iter().map(|row| dot(row, v)).collect()
}

pub fn transpose<S: Scalar>(mat: &[Vec<S>]) -> Vec<Vec<S>> {
    if mat.is_empty() {
        return Vec::new();
    }
    (0..mat[0].len())
        .map(|j| mat.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Lexicographic comparison under the scalar total order.
pub fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Infinity-norm condition number `|A| |A^-1|`, `inf` when singular.
pub fn condition_number(mat: &[Vec<f64>]) -> f64 {
    let norm = |m: &[Vec<f64>]| {
        m.iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    match inverse(mat, 0.0) {
        Some(inv) => norm(mat) * norm(&inv),
        None => f64::INFINITY,
    }
}
