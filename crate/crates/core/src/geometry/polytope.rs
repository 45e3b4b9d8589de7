use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::dd::{self, Enumeration};
use super::hull::{self, tolerance};
use crate::error::{GeomError, Result};
use crate::linalg::{self, dot, sub};
use crate::scalar::{self, factorial, Mode, Scalar};

/// Largest ambient dimension accepted by the kernel.
pub const MAX_DIM: usize = 6;

/// Coordinates of a point in `R^d`.
pub type Point<S> = Vec<S>;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        Err(GeomError::UnsupportedDimension(d))
    } else {
        Ok(())
    }
}

/// A facet `{x : <normal, x> = offset}` together with the vertices on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet<S> {
    pub vertex_indices: Vec<usize>,
    pub outward_normal: Point<S>,
    pub offset: S,
}

/// A full-dimensional polytope given by its (canonically sorted) extreme points.
#[derive(Clone, Debug)]
pub struct VPolytope<S> {
    dim: usize,
    vertices: Vec<Point<S>>,
    facets: Vec<Facet<S>>,
    /// Boundary triangulation into `(d-1)`-simplices (vertex indices).
    triangulation: Vec<Vec<usize>>,
    interior: Point<S>,
}

impl<S: Scalar> PartialEq for VPolytope<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

/// Half-space `<normal, x> <= offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<S> {
    pub normal: Point<S>,
    pub offset: S,
}

/// A polyhedron given as an intersection of half-spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope<S> {
    dim: usize,
    halfspaces: Vec<Halfspace<S>>,
}

/// Dimension class of an intersection result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feasibility {
    Empty,
    LowerDimensional,
    FullDimensional,
}

/// Result of [`HPolytope::intersect`].
#[derive(Clone, Debug, PartialEq)]
pub struct Intersection<S> {
    pub polytope: HPolytope<S>,
    pub feasibility: Feasibility,
}

impl<S: Scalar> VPolytope<S> {
    /// Convex hull of `points`; the dimension is taken from the first point.
    pub fn convex_hull(points: &[Point<S>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(GeomError::TooFewPoints { needed: 1, got: 0 })?;
        Self::convex_hull_in(dim, points)
    }

    pub fn convex_hull_in(dim: usize, points: &[Point<S>]) -> Result<Self> {
        check_dim(dim)?;
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(GeomError::DimensionMismatch(dim, p.len()));
        }
        if S::MODE == Mode::Float && points.iter().flatten().any(|x| !x.to_f64().is_finite()) {
            return Err(GeomError::InvalidArgument("non-finite coordinate".into()));
        }
        let raw = hull::convex_hull(points, dim)?;
        let mut order: Vec<usize> = raw.extreme.clone();
        order.sort_by(|&a, &b| linalg::lex_cmp(&points[a], &points[b]));
        let mut remap = vec![usize::MAX; points.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let vertices: Vec<Point<S>> = order.iter().map(|&i| points[i].clone()).collect();
        let mut facets: Vec<Facet<S>> = raw
            .facets
            .into_iter()
            .map(|(normal, offset, vs)| {
                let mut idx: Vec<usize> = vs.into_iter().map(|v| remap[v]).collect();
                idx.sort_unstable();
                Facet { vertex_indices: idx, outward_normal: normal, offset }
            })
            .collect();
        facets.sort_by(|a, b| a.vertex_indices.cmp(&b.vertex_indices));
        let triangulation = raw
            .simplices
            .into_iter()
            .map(|s| s.into_iter().map(|v| remap[v]).collect())
            .collect();
        Ok(VPolytope { dim, vertices, facets, triangulation, interior: raw.interior })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facets(&self) -> &[Facet<S>] {
        &self.facets
    }

    pub fn interior_point(&self) -> &Point<S> {
        &self.interior
    }

    /// Boundary simplices as vertex-index lists.
    pub fn boundary_triangulation(&self) -> &[Vec<usize>] {
        &self.triangulation
    }

    /// Largest coordinate bit-size (numerator plus denominator), 0 in float mode.
    pub fn max_bit_size(&self) -> u64 {
        self.vertices.iter().flatten().map(Scalar::bit_size).max().unwrap_or(0)
    }

    fn tol(&self) -> f64 {
        tolerance(&self.vertices)
    }

    /// Signed simplex volumes of the fan from the interior point, times `d!`.
    fn fan(&self) -> impl Iterator<Item = (S, &Vec<usize>)> + '_ {
        self.triangulation.iter().map(move |s| {
            let rows: Vec<Vec<S>> = s.iter().map(|&v| sub(&self.vertices[v], &self.interior)).collect();
            (linalg::det(&rows).abs(), s)
        })
    }

    /// Lebesgue volume, via a fan triangulation from an interior point.
    pub fn volume(&self) -> S {
        let mut acc = S::zero();
        for (d, _) in self.fan() {
            acc = acc + &d;
        }
        acc / &factorial::<S>(self.dim as u32)
    }

    /// Volume-weighted centroid.
    pub fn centroid(&self) -> Point<S> {
        let d = self.dim;
        let mut total = S::zero();
        let mut acc = vec![S::zero(); d];
        let k = S::from_i64((d + 1) as i64);
        for (w, s) in self.fan() {
            let mut c = self.interior.clone();
            for &v in s {
                c = linalg::add(&c, &self.vertices[v]);
            }
            let c = linalg::scale(&c, &(S::one() / &k));
            acc = linalg::add(&acc, &linalg::scale(&c, &w));
            total = total + &w;
        }
        linalg::scale(&acc, &(S::one() / &total))
    }

    /// Support function `max <v, u>` over the vertices.
    pub fn support(&self, u: &[S]) -> S {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .reduce(S::max_of)
            .expect("polytope has vertices")
    }

    /// Membership test via the facet inequalities (boundary included).
    pub fn contains(&self, p: &[S]) -> bool {
        let tol = self.tol() * 10.0;
        self.facets
            .iter()
            .all(|f| (dot(&f.outward_normal, p) - &f.offset).sign_tol(tol) != Ordering::Greater)
    }

    /// True when `p` satisfies every facet inequality strictly.
    pub fn contains_in_interior(&self, p: &[S]) -> bool {
        let tol = self.tol() * 10.0;
        self.facets
            .iter()
            .all(|f| (dot(&f.outward_normal, p) - &f.offset).sign_tol(tol) == Ordering::Less)
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&vec![S::zero(); self.dim])
    }

    pub fn has_origin_in_interior(&self) -> bool {
        self.contains_in_interior(&vec![S::zero(); self.dim])
    }

    /// Image under `x -> A x + b`.
    pub fn affine_image(&self, a: &[Vec<S>], b: &[S]) -> Result<Self> {
        if a.len() != self.dim || a.iter().any(|r| r.len() != self.dim) || b.len() != self.dim {
            return Err(GeomError::DimensionMismatch(self.dim, a.len()));
        }
        let image: Vec<Point<S>> = self
            .vertices
            .iter()
            .map(|v| linalg::add(&linalg::mat_vec(a, v), b))
            .collect();
        let tol = self.tol();
        let Some(inv) = linalg::inverse(a, tol) else {
            // singular map: whatever is left is re-hulled (and reported degenerate)
            return Self::convex_hull_in(self.dim, &image);
        };
        let det_negative = linalg::det(a).sign_tol(0.0) == Ordering::Less;
        let inv_t = linalg::transpose(&inv);
        let mut order: Vec<usize> = (0..image.len()).collect();
        order.sort_by(|&x, &y| linalg::lex_cmp(&image[x], &image[y]));
        if order.windows(2).any(|w| linalg::lex_cmp(&image[w[0]], &image[w[1]]) == Ordering::Equal) {
            return Self::convex_hull_in(self.dim, &image);
        }
        let mut remap = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let vertices: Vec<Point<S>> = order.iter().map(|&i| image[i].clone()).collect();
        let mut facets: Vec<Facet<S>> = self
            .facets
            .iter()
            .map(|f| {
                let normal = hull::normalize(linalg::mat_vec(&inv_t, &f.outward_normal));
                let anchor = &vertices[remap[f.vertex_indices[0]]];
                let offset = dot(&normal, anchor);
                let mut idx: Vec<usize> = f.vertex_indices.iter().map(|&v| remap[v]).collect();
                idx.sort_unstable();
                Facet { vertex_indices: idx, outward_normal: normal, offset }
            })
            .collect();
        facets.sort_by(|x, y| x.vertex_indices.cmp(&y.vertex_indices));
        let triangulation = self
            .triangulation
            .iter()
            .map(|s| s.iter().map(|&v| remap[v]).collect())
            .collect();
        let interior = linalg::add(&linalg::mat_vec(a, &self.interior), b);
        let _ = det_negative;
        Ok(VPolytope { dim: self.dim, vertices, facets, triangulation, interior })
    }

    pub fn translate(&self, b: &[S]) -> Result<Self> {
        self.affine_image(&identity(self.dim, S::one()), b)
    }

    /// Homothety `x -> s x`; `s = 0` collapses to a point and is rejected.
    pub fn scale(&self, s: &S) -> Result<Self> {
        self.affine_image(&identity(self.dim, s.clone()), &vec![S::zero(); self.dim])
    }

    /// The reflection `-P`.
    pub fn reflect(&self) -> Self {
        self.scale(&-S::one()).expect("reflection is invertible")
    }

    /// Minkowski sum: hull of all pairwise vertex sums.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch(self.dim, other.dim));
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(linalg::add(a, b));
            }
        }
        Self::convex_hull_in(self.dim, &pts)
    }

    /// Convex hull of the union `P v Q`.
    pub fn hull_union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch(self.dim, other.dim));
        }
        let pts: Vec<Point<S>> = self.vertices.iter().chain(&other.vertices).cloned().collect();
        Self::convex_hull_in(self.dim, &pts)
    }

    /// `conv(aK u bL)`; either coefficient may be zero.
    pub fn weighted_hull(&self, a: &S, other: &Self, b: &S) -> Result<Self> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch(self.dim, other.dim));
        }
        let pts: Vec<Point<S>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x.clone() * a).collect())
            .chain(other.vertices.iter().map(|v| v.iter().map(|x| x.clone() * b).collect()))
            .collect();
        Self::convex_hull_in(self.dim, &pts)
    }

    /// Facet description.
    pub fn to_hrep(&self) -> HPolytope<S> {
        HPolytope {
            dim: self.dim,
            halfspaces: self
                .facets
                .iter()
                .map(|f| Halfspace { normal: f.outward_normal.clone(), offset: f.offset.clone() })
                .collect(),
        }
    }

    /// Polar body `{y : <v, y> <= 1 for all vertices v}`.
    pub fn polar(&self) -> Result<HPolytope<S>> {
        if !self.has_origin_in_interior() {
            return Err(GeomError::OriginNotInterior);
        }
        Ok(HPolytope {
            dim: self.dim,
            halfspaces: self
                .vertices
                .iter()
                .map(|v| Halfspace { normal: v.clone(), offset: S::one() })
                .collect(),
        })
    }

    /// Same polytope in another arithmetic mode.
    pub fn convert<T: Scalar>(&self) -> Result<VPolytope<T>> {
        let pts: Vec<Point<T>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(scalar::convert::<S, T>).collect())
            .collect();
        VPolytope::convex_hull_in(self.dim, &pts)
    }
}

pub(crate) fn identity<S: Scalar>(d: usize, diag: S) -> Vec<Vec<S>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { diag.clone() } else { S::zero() }).collect())
        .collect()
}

impl<S: Scalar> HPolytope<S> {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace<S>>) -> Result<Self> {
        check_dim(dim)?;
        if let Some(h) = halfspaces.iter().find(|h| h.normal.len() != dim) {
            return Err(GeomError::DimensionMismatch(dim, h.normal.len()));
        }
        Ok(HPolytope { dim, halfspaces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace<S>] {
        &self.halfspaces
    }

    fn tol(&self) -> f64 {
        match S::MODE {
            Mode::Exact => 0.0,
            Mode::Float => {
                let scale = self
                    .halfspaces
                    .iter()
                    .map(|h| linalg::max_abs(&h.normal).max(h.offset.to_f64().abs()))
                    .fold(0.0, f64::max);
                1e-9 * scale.max(1.0)
            }
        }
    }

    pub fn contains(&self, p: &[S]) -> bool {
        let tol = self.tol();
        self.halfspaces
            .iter()
            .all(|h| (dot(&h.normal, p) - &h.offset).sign_tol(tol) != Ordering::Greater)
    }

    /// Vertex enumeration; `Ok(None)` when the system is infeasible.
    pub fn vertices(&self) -> Result<Option<Vec<Point<S>>>> {
        let normals: Vec<Vec<S>> = self.halfspaces.iter().map(|h| h.normal.clone()).collect();
        let offsets: Vec<S> = self.halfspaces.iter().map(|h| h.offset.clone()).collect();
        match dd::enumerate_vertices(self.dim, &normals, &offsets)? {
            Enumeration::Bounded(v) => Ok(Some(v)),
            Enumeration::Empty => Ok(None),
        }
    }

    /// Vertex description of a bounded, full-dimensional system.
    pub fn to_vrep(&self) -> Result<VPolytope<S>> {
        let verts = self.vertices()?.ok_or(GeomError::EmptyIntersection)?;
        VPolytope::convex_hull_in(self.dim, &verts)
    }

    /// Volume, zero for empty or lower-dimensional systems.
    pub fn volume(&self) -> Result<S> {
        match self.vertices()? {
            None => Ok(S::zero()),
            Some(v) => match VPolytope::convex_hull_in(self.dim, &v) {
                Ok(p) => Ok(p.volume()),
                Err(GeomError::DegenerateInput { .. }) | Err(GeomError::TooFewPoints { .. }) => {
                    Ok(S::zero())
                }
                Err(e) => Err(e),
            },
        }
    }

    /// Polar body of `{x : <a_i, x> <= b_i}` with all `b_i > 0`: the hull of `a_i / b_i`.
    pub fn polar(&self) -> Result<VPolytope<S>> {
        let tol = self.tol();
        if self.halfspaces.iter().any(|h| h.offset.sign_tol(tol) != Ordering::Greater) {
            return Err(GeomError::OriginNotInterior);
        }
        let pts: Vec<Point<S>> = self
            .halfspaces
            .iter()
            .map(|h| linalg::scale(&h.normal, &(S::one() / &h.offset)))
            .collect();
        VPolytope::convex_hull_in(self.dim, &pts).map_err(|e| match e {
            // a polar that is not full dimensional means the system was unbounded
            GeomError::DegenerateInput { .. } => GeomError::Unbounded,
            e => e,
        })
    }

    /// Intersection with redundant half-spaces pruned when the result is full dimensional.
    pub fn intersect(&self, other: &Self) -> Result<Intersection<S>> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch(self.dim, other.dim));
        }
        let joined = HPolytope {
            dim: self.dim,
            halfspaces: self.halfspaces.iter().chain(&other.halfspaces).cloned().collect(),
        };
        match joined.vertices()? {
            None => Ok(Intersection { polytope: joined, feasibility: Feasibility::Empty }),
            Some(v) => match VPolytope::convex_hull_in(self.dim, &v) {
                Ok(p) => Ok(Intersection { polytope: p.to_hrep(), feasibility: Feasibility::FullDimensional }),
                Err(GeomError::DegenerateInput { .. }) | Err(GeomError::TooFewPoints { .. }) => Ok(Intersection {
                    polytope: joined,
                    feasibility: Feasibility::LowerDimensional,
                }),
                Err(e) => Err(e),
            },
        }
    }

    /// Image under `x -> s x` for `s > 0`.
    pub fn scale(&self, s: &S) -> Result<Self> {
        if s.sign_tol(0.0) != Ordering::Greater {
            return Err(GeomError::InvalidArgument("H-polytope scale factor must be positive".into()));
        }
        Ok(HPolytope {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace { normal: h.normal.clone(), offset: h.offset.clone() * s })
                .collect(),
        })
    }
}
