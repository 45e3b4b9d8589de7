//! The `(n+1)`-dimensional body `C(K, L) = conv(L x {0}, -K x {1})`, the volume of its
//! `(2n+1)`-dimensional parent, sections and projections, and the inequalities
//! relating `Vol(L v -K)` to `Vol(tK n (1-t)L)` and to the polar harmonic sum.

use std::cmp::Ordering;

use serde_json::Value;

use crate::error::{GeomError, Result};
use crate::geometry::{HPolytope, Halfspace, Point, VPolytope};
use crate::linalg::dot;
use crate::report::CheckReport;
use crate::scalar::{factorial, Mode, Scalar};

/// Largest base dimension for which `C(K, L)` is built.
pub const MAX_BASE_DIM: usize = 4;

/// Outcome of cutting a polytope with an affine coordinate subspace.
#[derive(Clone, Debug)]
pub enum Section<S> {
    Empty,
    /// Nonempty but of lower dimension than the subspace.
    Degenerate,
    Body(VPolytope<S>),
}

impl<S: Scalar> Section<S> {
    pub fn volume(&self) -> S {
        match self {
            Section::Body(p) => p.volume(),
            _ => S::zero(),
        }
    }
}

/// Intersects `p` with `{x : x_i = c for every (i, c) in fixed}`, in the chart of the free coordinates.
pub fn axis_section<S: Scalar>(p: &VPolytope<S>, fixed: &[(usize, S)]) -> Result<Section<S>> {
    let d = p.dim();
    let free: Vec<usize> = (0..d).filter(|i| !fixed.iter().any(|(f, _)| f == i)).collect();
    if free.is_empty() {
        let point: Vec<S> = (0..d)
            .map(|i| fixed.iter().find(|(f, _)| *f == i).map(|(_, c)| c.clone()).unwrap())
            .collect();
        return Ok(if p.contains(&point) { Section::Degenerate } else { Section::Empty });
    }
    let hs: Vec<Halfspace<S>> = p
        .facets()
        .iter()
        .map(|f| {
            let mut offset = f.offset.clone();
            for (i, c) in fixed {
                offset = offset - &(f.outward_normal[*i].clone() * c);
            }
            Halfspace { normal: free.iter().map(|&i| f.outward_normal[i].clone()).collect(), offset }
        })
        .collect();
    let h = HPolytope::new(free.len(), hs)?;
    match h.vertices()? {
        None => Ok(Section::Empty),
        Some(v) => match VPolytope::convex_hull_in(free.len(), &v) {
            Ok(body) => Ok(Section::Body(body)),
            Err(GeomError::DegenerateInput { .. }) | Err(GeomError::TooFewPoints { .. }) => Ok(Section::Degenerate),
            Err(e) => Err(e),
        },
    }
}

/// Orthogonal projection onto the listed coordinate axes.
pub fn axis_projection<S: Scalar>(p: &VPolytope<S>, axes: &[usize]) -> Result<VPolytope<S>> {
    let pts: Vec<Point<S>> = p
        .vertices()
        .iter()
        .map(|v| axes.iter().map(|&i| v[i].clone()).collect())
        .collect();
    VPolytope::convex_hull_in(axes.len(), &pts)
}

/// `(1-t) L + t(-K)`, with the endpoints handled without a zero scaling.
pub fn weighted_difference<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>, theta: &S) -> Result<VPolytope<S>> {
    let one_minus = S::one() - theta;
    if theta.is_zero_tol(0.0) {
        return Ok(l.clone());
    }
    if one_minus.is_zero_tol(0.0) {
        return Ok(k.reflect());
    }
    l.scale(&one_minus)?.minkowski_sum(&k.scale(&-theta.clone())?)
}

/// `C(K, L)` together with its bases.
#[derive(Clone, Debug)]
pub struct CklBody<S> {
    pub base_k: VPolytope<S>,
    pub base_l: VPolytope<S>,
    pub body: VPolytope<S>,
}

/// Heights at which [`build_c`] validates the slice identity.
pub fn slice_heights<S: Scalar>() -> Vec<S> {
    (0..=4).map(|i| S::from_ratio(i, 4)).collect()
}

pub fn build_c<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>) -> Result<CklBody<S>> {
    let n = k.dim();
    if l.dim() != n {
        return Err(GeomError::DimensionMismatch(n, l.dim()));
    }
    if n > MAX_BASE_DIM {
        return Err(GeomError::UnsupportedDimension(n));
    }
    let mut pts: Vec<Point<S>> = Vec::new();
    for v in l.vertices() {
        let mut p = v.clone();
        p.push(S::zero());
        pts.push(p);
    }
    for w in k.vertices() {
        let mut p: Vec<S> = w.iter().map(|x| -x.clone()).collect();
        p.push(S::one());
        pts.push(p);
    }
    let body = VPolytope::convex_hull_in(n + 1, &pts)?;
    let c = CklBody { base_k: k.clone(), base_l: l.clone(), body };
    for theta in slice_heights::<S>() {
        if !c.slice_matches(&theta)? {
            return Err(GeomError::InvalidArgument(format!("slice of C(K,L) at {:?} is wrong", theta.to_f64())));
        }
    }
    Ok(c)
}

impl<S: Scalar> CklBody<S> {
    pub fn n(&self) -> usize {
        self.base_k.dim()
    }

    /// The section at height `theta`, as a polytope in `R^n`.
    pub fn slice(&self, theta: &S) -> Result<Section<S>> {
        axis_section(&self.body, &[(self.n(), theta.clone())])
    }

    /// Whether the slice at `theta` equals `(1-theta) L - theta K`.
    pub fn slice_matches(&self, theta: &S) -> Result<bool> {
        let expected = weighted_difference(&self.base_k, &self.base_l, theta)?;
        Ok(match self.slice(theta)? {
            Section::Body(p) => match S::MODE {
                Mode::Exact => p == expected,
                Mode::Float => (p.volume() - expected.volume()).to_f64().abs() <= 1e-9 * expected.volume().to_f64().max(1.0),
            },
            _ => false,
        })
    }

    pub fn volume(&self) -> S {
        self.body.volume()
    }
}

/// `Vol(K) Vol(L) n! n! / (2n+1)!`, the volume of the `(2n+1)`-dimensional body
/// `{(x, y, t) : t in [0,1], x in tK, x + y in (1-t)L}`.
pub fn g_volume_closed_form<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>) -> Result<S> {
    let n = k.dim();
    if l.dim() != n {
        return Err(GeomError::DimensionMismatch(n, l.dim()));
    }
    let f = factorial::<S>(n as u32);
    Ok(k.volume() * &l.volume() * &f * &f / &factorial::<S>(2 * n as u32 + 1))
}

/// Composite Simpson rule for `f` on `[0, 1]` with `points` nodes (odd).
pub fn simpson_unit<F: FnMut(f64) -> Result<f64>>(points: usize, mut f: F) -> Result<f64> {
    let m = points.max(3) | 1;
    let h = 1.0 / (m - 1) as f64;
    let mut acc = 0.0;
    for i in 0..m {
        let w = if i == 0 || i == m - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * f(i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// The volume of the parent body of `C(K, L)` integrated slice by slice from
/// `C`'s own bases: `int_0^1 Vol(tK) Vol((1-t)L) dt` by 101-point Simpson.
pub fn g_volume_by_quadrature<S: Scalar>(c: &CklBody<S>) -> Result<f64> {
    let n = c.n() as i32;
    let l = match c.slice(&S::zero())? {
        Section::Body(p) => p,
        _ => return Err(GeomError::EmptySection),
    };
    let minus_k = match c.slice(&S::one())? {
        Section::Body(p) => p,
        _ => return Err(GeomError::EmptySection),
    };
    let (vk, vl) = (minus_k.volume().to_f64(), l.volume().to_f64());
    simpson_unit(101, |t| Ok(t.powi(n) * vk * (1.0 - t).powi(n) * vl))
}

/// `int_0^1 Vol((1-t)L - tK) dt` by 101-point Simpson over the exact slice volumes.
pub fn c_volume_by_quadrature<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>) -> Result<f64> {
    simpson_unit(101, |t| Ok(weighted_difference(k, l, &S::from_f64(t))?.volume().to_f64()))
}

/// Axis-aligned affine subspace `{x : x_i = point_i for i not in axes}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSubspace<S> {
    pub axes: Vec<usize>,
    pub point: Point<S>,
}

/// `j!(n-j)!/n! Vol_j(P n E) Vol_(n-j)(P | E^perp) <= Vol_n(P)`.
pub fn section_projection_check<S: Scalar>(p: &VPolytope<S>, e: &AxisSubspace<S>) -> Result<CheckReport> {
    let n = p.dim();
    let j = e.axes.len();
    if e.point.len() != n {
        return Err(GeomError::DimensionMismatch(n, e.point.len()));
    }
    if e.axes.iter().any(|&a| a >= n) {
        return Err(GeomError::InvalidArgument("axis index out of range".into()));
    }
    let others: Vec<usize> = (0..n).filter(|i| !e.axes.contains(i)).collect();
    let fixed: Vec<(usize, S)> = others.iter().map(|&i| (i, e.point[i].clone())).collect();
    let section_vol = if j == 0 {
        if p.contains(&e.point) {
            S::one()
        } else {
            return Err(GeomError::EmptySection);
        }
    } else {
        match axis_section(p, &fixed)? {
            Section::Empty => return Err(GeomError::EmptySection),
            s => s.volume(),
        }
    };
    let proj_vol = if others.is_empty() { S::one() } else { axis_projection(p, &others)?.volume() };
    let factor = factorial::<S>(j as u32) * &factorial::<S>((n - j) as u32) / &factorial::<S>(n as u32);
    let lhs = factor * &section_vol * &proj_vol;
    Ok(CheckReport::le("section-projection", &lhs, &p.volume())
        .with_meta("n", n)
        .with_meta("j", j)
        .with_meta("axes", e.axes.clone()))
}

/// `Vol(tK n (1-t)L)`, zero when the intersection is lower dimensional.
pub fn weighted_intersection_volume<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>, theta: &S) -> Result<S> {
    let one_minus = S::one() - theta;
    if theta.sign_tol(0.0) != Ordering::Greater || one_minus.sign_tol(0.0) != Ordering::Greater {
        return Ok(S::zero());
    }
    let cut = k.to_hrep().scale(theta)?.intersect(&l.to_hrep().scale(&one_minus)?)?;
    cut.polytope.volume()
}

fn is_endpoint<S: Scalar>(theta: &S) -> bool {
    theta.is_zero_tol(0.0) || (S::one() - theta).is_zero_tol(0.0)
}

fn check_unit_interval<S: Scalar>(theta: &S) -> Result<()> {
    if theta.sign_tol(0.0) == Ordering::Less || (theta.clone() - &S::one()).sign_tol(0.0) == Ordering::Greater {
        return Err(GeomError::InvalidArgument("theta must lie in [0, 1]".into()));
    }
    Ok(())
}

/// `Vol_(n+1)(C(K,L)) <= Vol(K) Vol(L) / ((n+1) Vol(tK n (1-t)L))`.
pub fn verify_ckl_bound<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>, theta: &S) -> Result<CheckReport> {
    check_unit_interval(theta)?;
    let c = build_c(k, l)?;
    verify_ckl_bound_with(&c, theta)
}

/// As [`verify_ckl_bound`], reusing an already built `C(K, L)`.
pub fn verify_ckl_bound_with<S: Scalar>(c: &CklBody<S>, theta: &S) -> Result<CheckReport> {
    check_unit_interval(theta)?;
    let n = c.n();
    let inter = weighted_intersection_volume(&c.base_k, &c.base_l, theta)?;
    if inter.is_zero_tol(0.0) {
        return Ok(CheckReport::vacuous("ckl-bound", "degenerate intersection").with_meta("theta", theta.to_f64()));
    }
    let rhs = c.base_k.volume() * &c.base_l.volume() / &(S::from_i64(n as i64 + 1) * &inter);
    Ok(CheckReport::le("ckl-bound", &c.volume(), &rhs)
        .with_meta("n", n)
        .with_meta("theta", theta.to_f64()))
}

/// `Vol_n(-K v L) / (n+1) <= Vol_(n+1)(C(K, L))` for `0 in K n L`.
pub fn ckl_projection_chain<S: Scalar>(c: &CklBody<S>) -> Result<CheckReport> {
    if !c.base_k.contains_origin() || !c.base_l.contains_origin() {
        return Err(GeomError::OriginNotContained);
    }
    let n = c.n();
    let hull = c.base_k.reflect().hull_union(&c.base_l)?.volume();
    Ok(CheckReport::le("ckl-projection", &(hull / &S::from_i64(n as i64 + 1)), &c.volume()).with_meta("n", n))
}

/// `Vol(L v -K) Vol(tK n (1-t)L) <= Vol(K) Vol(L)` for `0 in K n L`.
pub fn verify_kl_inequality<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>, theta: &S) -> Result<CheckReport> {
    check_unit_interval(theta)?;
    if k.dim() != l.dim() {
        return Err(GeomError::DimensionMismatch(k.dim(), l.dim()));
    }
    if !k.contains_origin() || !l.contains_origin() {
        return Err(GeomError::OriginNotContained);
    }
    let rhs = k.volume() * &l.volume();
    if is_endpoint(theta) {
        return Ok(CheckReport::le("kl", &S::zero(), &rhs)
            .with_meta("theta", theta.to_f64())
            .with_meta("vacuous", "endpoint"));
    }
    let hull = l.hull_union(&k.reflect())?.volume();
    let inter = weighted_intersection_volume(k, l, theta)?;
    let mut rep = CheckReport::le("kl", &(hull * &inter), &rhs).with_meta("theta", theta.to_f64());
    if rep.is_equality() {
        rep = rep.with_meta("homothetic", homothety_holds(k, l, theta)?);
    }
    Ok(rep)
}

/// The Minkowski gauge `inf{s >= 0 : x in sK}` for `0 in K`; `None` when infinite.
pub fn gauge<S: Scalar>(k: &VPolytope<S>, x: &[S]) -> Option<S> {
    let tol = match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-12,
    };
    let mut best = S::zero();
    for f in k.facets() {
        let s = dot(&f.outward_normal, x);
        match f.offset.sign_tol(tol) {
            Ordering::Greater => best = S::max_of(best, s / &f.offset),
            _ => {
                if s.sign_tol(tol) == Ordering::Greater {
                    return None;
                }
            }
        }
    }
    Some(best)
}

/// Sample directions: coordinate axes, their negatives and the diagonals `(+-1, ..., +-1)`.
pub fn sample_directions<S: Scalar>(n: usize) -> Vec<Point<S>> {
    let mut out = Vec::new();
    for i in 0..n {
        for s in [1, -1] {
            let mut e = vec![S::zero(); n];
            e[i] = S::from_i64(s);
            out.push(e);
        }
    }
    for mask in 0..1usize << n {
        out.push((0..n).map(|i| S::from_i64(if mask >> i & 1 == 1 { -1 } else { 1 })).collect());
    }
    out
}

/// `h_(L polar) = ((1-t)/t) h_(K polar)` at the sample directions, i.e. `(1-t)L = tK`.
/// The support function of the polar of a body containing the origin is its gauge.
pub fn homothety_holds<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>, theta: &S) -> Result<bool> {
    if is_endpoint(theta) {
        return Ok(false);
    }
    let factor = (S::one() - theta) / theta;
    let tol = match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-9,
    };
    Ok(sample_directions::<S>(k.dim()).iter().all(|u| match (gauge(l, u), gauge(k, u)) {
        (None, None) => true,
        (Some(a), Some(b)) => (a - &(factor.clone() * &b)).is_zero_tol(tol),
        _ => false,
    }))
}

/// `Vol((1-l)K v -lK)` against `Vol(K)` for `0 in K`.
pub fn hull_difference_check<S: Scalar>(k: &VPolytope<S>, lambda: &S) -> Result<CheckReport> {
    check_unit_interval(lambda)?;
    if !k.contains_origin() {
        return Err(GeomError::OriginNotContained);
    }
    let one_minus = S::one() - lambda;
    let lhs = k.weighted_hull(&one_minus, k, &-lambda.clone())?.volume();
    Ok(CheckReport::le("hull-difference", &lhs, &k.volume()).with_meta("lambda", lambda.to_f64()))
}

/// The same bound derived from [`verify_kl_inequality`] applied to `(1-l)K`, `lK` at `t = l`.
pub fn hull_difference_via_kl<S: Scalar>(k: &VPolytope<S>, lambda: &S) -> Result<CheckReport> {
    check_unit_interval(lambda)?;
    if is_endpoint(lambda) {
        return Ok(CheckReport::vacuous("hull-difference-via-kl", "endpoint"));
    }
    let one_minus = S::one() - lambda;
    let rep = verify_kl_inequality(&k.scale(&one_minus)?, &k.scale(lambda)?, lambda)?;
    // divide out the common factor (l (1-l))^(2n) Vol(K)^2 / Vol(K)
    let n = k.dim() as u32;
    let scale = (lambda.clone() * &one_minus).powi(n).to_f64();
    let vol = k.volume().to_f64();
    let mut out = rep.clone();
    out.lhs = rep.lhs / (scale * vol);
    out.rhs = rep.rhs / (scale * vol);
    out.ratio = rep.ratio;
    out.meta.insert("check".into(), Value::from("hull-difference-via-kl"));
    Ok(out)
}

/// `(K polar + L polar) polar` via polar, Minkowski sum and polar; needs `0` interior to both.
pub fn polar_harmonic_sum<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>) -> Result<VPolytope<S>> {
    let kp = k.polar()?.to_vrep()?;
    let lp = l.polar()?.to_vrep()?;
    kp.minkowski_sum(&lp)?.polar()?.to_vrep()
}

/// `{x : gauge_K(x) + gauge_L(x) <= 1}` as half-spaces; valid whenever `0 in K n L`,
/// including the case of the origin on the boundary where the polars are unbounded.
pub fn harmonic_sum_hrep<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>) -> Result<HPolytope<S>> {
    let n = k.dim();
    if l.dim() != n {
        return Err(GeomError::DimensionMismatch(n, l.dim()));
    }
    if !k.contains_origin() || !l.contains_origin() {
        return Err(GeomError::OriginNotContained);
    }
    let tol = match S::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 1e-12,
    };
    let mut cone = Vec::new();
    let mut terms = |p: &VPolytope<S>| {
        let mut scaled = Vec::new();
        for f in p.facets() {
            if f.offset.sign_tol(tol) == Ordering::Greater {
                scaled.push(f.outward_normal.iter().map(|x| x.clone() / &f.offset).collect::<Vec<S>>());
            } else {
                cone.push(Halfspace { normal: f.outward_normal.clone(), offset: S::zero() });
            }
        }
        scaled
    };
    let tk = terms(k);
    let tl = terms(l);
    let mut hs = cone;
    for a in &tk {
        for b in &tl {
            hs.push(Halfspace { normal: a.iter().zip(b).map(|(x, y)| x.clone() + y).collect(), offset: S::one() });
        }
    }
    HPolytope::new(n, hs)
}

/// `Vol(K v -L) Vol((K polar + L polar) polar) <= Vol(K) Vol(L)` for `0` interior to both,
/// plus the inclusion `tK n (1-t)L` inside the harmonic sum on a grid of `t`.
pub fn verify_strange<S: Scalar>(k: &VPolytope<S>, l: &VPolytope<S>) -> Result<CheckReport> {
    if k.dim() != l.dim() {
        return Err(GeomError::DimensionMismatch(k.dim(), l.dim()));
    }
    if !k.has_origin_in_interior() || !l.has_origin_in_interior() {
        return Err(GeomError::OriginNotInterior);
    }
    let m = polar_harmonic_sum(k, l)?;
    let hull = k.hull_union(&l.reflect())?.volume();
    let lhs = hull * &m.volume();
    let rhs = k.volume() * &l.volume();
    let mut inclusion = true;
    for i in 1..10 {
        let theta = S::from_ratio(i, 10);
        let cut = k
            .to_hrep()
            .scale(&theta)?
            .intersect(&l.to_hrep().scale(&(S::one() - &theta))?)?;
        if let Some(vs) = cut.polytope.vertices()? {
            inclusion &= vs.iter().all(|v| m.contains(v));
        }
    }
    Ok(CheckReport::le("strange", &lhs, &rhs).with_meta("inclusion_holds", inclusion))
}

/// For `K = conv{0, e_i}` and `L = conv{0, l_i e_i}`: the three closed forms
/// `Vol(K v -L) = prod(1+l_i)/n!`, `Vol(harmonic sum) = prod(l_i/(1+l_i))/n!` and
/// their product `= Vol(K) Vol(L) = prod(l_i)/n!^2`, each against geometric computation.
pub fn orthogonal_simplices_checks<S: Scalar>(scales: &[S]) -> Result<Vec<CheckReport>> {
    let n = scales.len();
    let simplex = |s: &[S]| {
        let mut pts = vec![vec![S::zero(); n]];
        for (i, si) in s.iter().enumerate() {
            let mut e = vec![S::zero(); n];
            e[i] = si.clone();
            pts.push(e);
        }
        VPolytope::convex_hull_in(n, &pts)
    };
    let k = simplex(&vec![S::one(); n])?;
    let l = simplex(scales)?;
    let f = factorial::<S>(n as u32);
    let hull_formula = scales.iter().fold(S::one(), |acc, s| acc * &(S::one() + s)) / &f;
    let harm_formula = scales.iter().fold(S::one(), |acc, s| acc * &(s.clone() / &(S::one() + s))) / &f;
    let prod_formula = scales.iter().fold(S::one(), |acc, s| acc * s) / &(f.clone() * &f);
    let hull = k.hull_union(&l.reflect())?.volume();
    let harm = harmonic_sum_hrep(&k, &l)?.volume()?;
    let scales_json: Vec<Value> = scales.iter().map(Scalar::to_json).collect();
    Ok(vec![
        CheckReport::eq("remark-hull", &hull, &hull_formula).with_meta("scales", scales_json.clone()),
        CheckReport::eq("remark-harmonic", &harm, &harm_formula).with_meta("scales", scales_json.clone()),
        CheckReport::eq("remark-product", &(hull.clone() * &harm), &(k.volume() * &l.volume()))
            .with_meta("scales", scales_json.clone()),
        CheckReport::eq("remark-product-formula", &(hull * &harm), &prod_formula).with_meta("scales", scales_json),
    ])
}
