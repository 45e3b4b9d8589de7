//! Polytope kernel: hulls, volumes, Minkowski sums, intersections and polars.

mod dd;
mod hull;
mod polytope;

pub use dd::{enumerate_vertices, Enumeration};
pub use hull::FLOAT_EPS;
pub use polytope::{Facet, Feasibility, HPolytope, Halfspace, Intersection, Point, VPolytope, MAX_DIM};

use serde_json::{json, Value};

use crate::error::{GeomError, Result};
use crate::scalar::{Mode, Scalar};

/// Serializes to `{"dim", "mode", "vertices"}`; exact coordinates become `"p/q"` strings.
pub fn polytope_to_json<S: Scalar>(p: &VPolytope<S>) -> Value {
    json!({
        "dim": p.dim(),
        "mode": S::MODE.as_str(),
        "vertices": p
            .vertices()
            .iter()
            .map(|v| Value::Array(v.iter().map(Scalar::to_json).collect()))
            .collect::<Vec<_>>(),
    })
}

/// Reads the polytope JSON format; the hull is recomputed so stray points are dropped.
pub fn polytope_from_json<S: Scalar>(v: &Value) -> Result<VPolytope<S>> {
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| GeomError::Parse("missing integer field \"dim\"".into()))? as usize;
    let verts = v
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| GeomError::Parse("missing array field \"vertices\"".into()))?;
    let points = verts
        .iter()
        .map(|row| {
            let row = row
                .as_array()
                .ok_or_else(|| GeomError::Parse("vertex must be an array".into()))?;
            if row.len() != dim {
                return Err(GeomError::DimensionMismatch(dim, row.len()));
            }
            row.iter().map(S::from_json).collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    VPolytope::convex_hull_in(dim, &points)
}

/// The `"mode"` field of a polytope document, defaulting to exact.
pub fn json_mode(v: &Value) -> Result<Mode> {
    match v.get("mode").and_then(Value::as_str) {
        None | Some("exact") => Ok(Mode::Exact),
        Some("float") => Ok(Mode::Float),
        Some(other) => Err(GeomError::Parse(format!("unknown mode {other:?}"))),
    }
}
