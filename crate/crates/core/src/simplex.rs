//! Closed forms for hulls of a centered simplex and its negative homothet.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{GeomError, Result};
use crate::geometry::{Point, VPolytope};
use crate::report::CheckReport;
use crate::scalar::{binomial, Mode, Scalar};

/// `Vol((1-l)S v -lS) / Vol(S)` for a centered simplex `S`, with the
/// admissible integer(s) `k` used by the formula.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexHullFormula<S> {
    pub n: usize,
    pub lambda: S,
    /// One entry, or two at a tie (both give the same ratio).
    pub k: Vec<usize>,
    pub ratio: S,
}

impl<S: Scalar> SimplexHullFormula<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "lambda": self.lambda.to_json(),
            "k": self.k,
            "ratio": self.ratio.to_json(),
            "ratio_f64": self.ratio.to_f64(),
        })
    }
}

fn sign_tol<S: Scalar>() -> f64 {
    match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-12,
    }
}

/// `C(n,k) (1-l)^k l^(n-k)`.
pub fn hull_ratio_term<S: Scalar>(n: usize, k: usize, lambda: &S) -> S {
    let one_minus = S::one() - lambda;
    binomial::<S>(n as u32, k as u32) * &one_minus.powi(k as u32) * &lambda.powi((n - k) as u32)
}

/// Integers `k` in `[0, n]` with `(n+1)(1-l) - 1 <= k <= (n+1)(1-l)`.
pub fn admissible_k<S: Scalar>(n: usize, lambda: &S) -> Vec<usize> {
    let x = S::from_i64(n as i64 + 1) * &(S::one() - lambda);
    let tol = sign_tol::<S>();
    (0..=n)
        .filter(|&k| {
            let kk = S::from_i64(k as i64);
            (kk.clone() - &x).sign_tol(tol) != Ordering::Greater
                && (x.clone() - &S::one() - &kk).sign_tol(tol) != Ordering::Greater
        })
        .collect()
}

/// Evaluates the simplex hull formula; at ties both candidate expressions are
/// computed and must agree.
pub fn simplex_hull_ratio<S: Scalar>(n: usize, lambda: &S) -> Result<SimplexHullFormula<S>> {
    let tol = sign_tol::<S>();
    if n == 0 || lambda.sign_tol(tol) == Ordering::Less || (lambda.clone() - &S::one()).sign_tol(tol) == Ordering::Greater {
        return Err(GeomError::InvalidArgument(format!("need n >= 1 and 0 <= lambda <= 1 (n = {n})")));
    }
    let k = admissible_k(n, lambda);
    let values: Vec<S> = k.iter().map(|&k| hull_ratio_term(n, k, lambda)).collect();
    let ratio = values[0].clone();
    let rel = match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-12 * ratio.to_f64().abs().max(1.0),
    };
    if values.iter().any(|v| (v.clone() - &ratio).sign_tol(rel) != Ordering::Equal) {
        return Err(GeomError::InvalidArgument(format!("tie expressions disagree at n = {n}")));
    }
    Ok(SimplexHullFormula { n, lambda: lambda.clone(), k, ratio })
}

/// `sum_k C(n,k) (1-l)^k l^(n-k)`, the hull ratio for a simplex with a vertex at the origin (always 1).
pub fn vertex_at_origin_ratio<S: Scalar>(n: usize, lambda: &S) -> S {
    (0..=n).fold(S::zero(), |acc, k| acc + &hull_ratio_term(n, k, lambda))
}

/// `conv{0, e_1, ..., e_n}`.
pub fn standard_simplex<S: Scalar>(n: usize) -> Result<VPolytope<S>> {
    let mut pts = vec![vec![S::zero(); n]];
    for i in 0..n {
        let mut e = vec![S::zero(); n];
        e[i] = S::one();
        pts.push(e);
    }
    VPolytope::convex_hull_in(n, &pts)
}

/// The standard simplex translated so its centroid is the origin.
pub fn centered_simplex<S: Scalar>(n: usize) -> Result<VPolytope<S>> {
    let s = standard_simplex::<S>(n)?;
    let shift = vec![-(S::one() / &S::from_i64(n as i64 + 1)); n];
    s.translate(&shift)
}

/// Vertex of [`KtBody`]: an original simplex vertex `e_j` or a reflected one `v_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KtVertex {
    Simplex(usize),
    Reflected(usize),
}

/// `S v S_t` for `S = conv{e_1, ..., e_(n+1)}` and `S_t = conv{(1+t)a - t e_j}`,
/// expressed in the chart that drops the last coordinate of the hyperplane
/// `x_1 + ... + x_(n+1) = 1` (constant Jacobian, so volume ratios are preserved).
#[derive(Clone, Debug)]
pub struct KtBody<S> {
    pub n: usize,
    pub t: S,
    pub polytope: VPolytope<S>,
    /// Label of each vertex of `polytope`, in its vertex order.
    pub labels: Vec<KtVertex>,
    /// Volume of `S` in the same chart.
    pub simplex_volume: S,
}

/// Point of `R^(n+1)`: `e_j` or `(1+t)a - t e_j`, with `a` the barycenter.
pub fn kt_point<S: Scalar>(n: usize, t: &S, v: KtVertex) -> Point<S> {
    let a = S::one() / &S::from_i64(n as i64 + 1);
    match v {
        KtVertex::Simplex(j) => (0..=n).map(|i| if i == j { S::one() } else { S::zero() }).collect(),
        KtVertex::Reflected(j) => {
            let base = (S::one() + t) * &a;
            (0..=n).map(|i| if i == j { base.clone() - t } else { base.clone() }).collect()
        }
    }
}

pub fn build_kt<S: Scalar>(n: usize, t: &S) -> Result<KtBody<S>> {
    let tol = sign_tol::<S>();
    let lower = S::one() / &S::from_i64(n as i64);
    if n == 0
        || (lower - t).sign_tol(tol) == Ordering::Greater
        || (t.clone() - &S::one()).sign_tol(tol) == Ordering::Greater
    {
        return Err(GeomError::InvalidArgument(format!("need 1/n <= t <= 1 (n = {n})")));
    }
    let labels_all: Vec<KtVertex> = (0..=n)
        .map(KtVertex::Simplex)
        .chain((0..=n).map(KtVertex::Reflected))
        .collect();
    let chart = |p: Point<S>| p[..n].to_vec();
    let pts: Vec<Point<S>> = labels_all.iter().map(|&l| chart(kt_point(n, t, l))).collect();
    let polytope = VPolytope::convex_hull_in(n, &pts)?;
    let labels = polytope
        .vertices()
        .iter()
        .map(|v| {
            let i = pts.iter().position(|p| p == v).expect("hull vertex comes from the input");
            labels_all[i]
        })
        .collect();
    let simplex_volume = standard_simplex::<S>(n)?.volume();
    Ok(KtBody { n, t: t.clone(), polytope, labels, simplex_volume })
}

/// The normal `u_k = (-t,...,-t, 1,...,1, (1+t)k - n)` (k entries `-t`, `n-k` ones) of the
/// facet spanned by `e_1..e_k` and `v_(k+1)..v_n`.
pub fn facet_normal<S: Scalar>(n: usize, k: usize, t: &S) -> Vec<S> {
    let mut u = vec![-t.clone(); k];
    u.extend(std::iter::repeat_n(S::one(), n - k));
    u.push((S::one() + t) * &S::from_i64(k as i64) - &S::from_i64(n as i64));
    u
}

/// Confirms that `u_k` supports `K_t` at level `-t` from below, touching exactly
/// the `n` vertices of the facet.
pub fn facet_normal_supports<S: Scalar>(n: usize, k: usize, t: &S) -> bool {
    let u = facet_normal(n, k, t);
    let minus_t = -t.clone();
    let tol = sign_tol::<S>();
    let on_facet = |v: KtVertex| match v {
        KtVertex::Simplex(j) => j < k,
        KtVertex::Reflected(j) => j >= k && j < n,
    };
    (0..=n)
        .flat_map(|j| [KtVertex::Simplex(j), KtVertex::Reflected(j)])
        .all(|v| {
            let p = kt_point(n, t, v);
            let s = crate::linalg::dot(&p, &u) - &minus_t;
            match s.sign_tol(tol) {
                Ordering::Less => false,
                Ordering::Equal => on_facet(v),
                Ordering::Greater => !on_facet(v),
            }
        })
}

/// The identity `ratio(n, l, k=j) / ((1-l)^j l^(n-j)) = C(n, j)` at `l = (n+1-j)/(n+1)`.
pub fn gfr_implies_godbersen_bound<S: Scalar>(n: usize, j: usize) -> Result<CheckReport> {
    if j == 0 || j >= n {
        return Err(GeomError::InvalidArgument(format!("need 1 <= j <= n-1, got j = {j}, n = {n}")));
    }
    let lambda = S::from_ratio((n + 1 - j) as i64, (n + 1) as i64);
    let formula = simplex_hull_ratio(n, &lambda)?;
    if !formula.k.contains(&j) {
        return Err(GeomError::InvalidArgument(format!("k = {j} not admissible at the tie")));
    }
    let one_minus = S::one() - &lambda;
    let weight = one_minus.powi(j as u32) * &lambda.powi((n - j) as u32);
    let lhs = formula.ratio / &weight;
    Ok(CheckReport::eq("gfr-implies-godbersen", &lhs, &binomial::<S>(n as u32, j as u32))
        .with_meta("n", n)
        .with_meta("j", j)
        .with_meta("lambda", lambda.to_json()))
}
