use serde_json::{json, Value};

use crate::error::{GeomError, Result};

/// Largest dimension for gridded functions.
pub const MAX_GRID_DIM: usize = 3;

/// A regular node grid on the box `[lo, hi]`: `res[a]` nodes per axis, both ends included.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    res: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, res: Vec<usize>) -> Result<Self> {
        let n = lo.len();
        if n == 0 || n > MAX_GRID_DIM {
            return Err(GeomError::UnsupportedDimension(n));
        }
        if hi.len() != n || res.len() != n {
            return Err(GeomError::DimensionMismatch(n, hi.len().max(res.len())));
        }
        for a in 0..n {
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] < hi[a]) {
                return Err(GeomError::InvalidArgument(format!("bad box on axis {a}: [{}, {}]", lo[a], hi[a])));
            }
            if res[a] < 2 {
                return Err(GeomError::InvalidArgument(format!("axis {a} needs at least 2 nodes")));
            }
        }
        Ok(Grid { lo, hi, res })
    }

    /// The cube `[lo, hi]^n` with `res` nodes per axis.
    pub fn cube(n: usize, lo: f64, hi: f64, res: usize) -> Result<Self> {
        Grid::new(vec![lo; n], vec![hi; n], vec![res; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn resolution(&self) -> &[usize] {
        &self.res
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.res[axis] - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major flat index; the last axis varies fastest.
    pub fn flat(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.res).fold(0, |acc, (&i, &r)| acc * r + i)
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = flat % self.res[a];
            flat /= self.res[a];
        }
        out
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.res[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.step(axis)
        }
    }

    pub fn point(&self, multi: &[usize]) -> Vec<f64> {
        multi.iter().enumerate().map(|(a, &i)| self.coord(a, i)).collect()
    }

    /// Nearest node to `x`, clamped to the box.
    pub fn nearest(&self, x: &[f64]) -> Vec<usize> {
        (0..self.dim())
            .map(|a| {
                let t = ((x[a] - self.lo[a]) / self.step(a)).round();
                t.clamp(0.0, (self.res[a] - 1) as f64) as usize
            })
            .collect()
    }

    /// Same grid shifted by `-a`, so that node values of `f` become those of `x -> f(x + a)`.
    pub fn shifted(&self, a: &[f64]) -> Grid {
        Grid {
            lo: self.lo.iter().zip(a).map(|(l, s)| l - s).collect(),
            hi: self.hi.iter().zip(a).map(|(h, s)| h - s).collect(),
            res: self.res.clone(),
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        self.res == other.res && close(&self.lo, &other.lo) && close(&self.hi, &other.hi)
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(GeomError::IncompatibleGrids("boxes or resolutions differ".into()))
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "lo": self.lo, "hi": self.hi })
    }
}

/// A nonnegative function sampled at the nodes of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    log_concave: bool,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, log_concave: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GeomError::InvalidArgument(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(GeomError::InvalidArgument(format!("grid value {v} is not a finite nonnegative number")));
        }
        Ok(GridFunction { grid, values, log_concave })
    }

    pub fn from_fn(grid: Grid, log_concave: bool, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(&grid.multi(i)))).collect();
        GridFunction::new(grid, values, log_concave)
    }

    /// `x -> exp(-phi(x))`; `phi = +inf` gives zero.
    pub fn from_potential(grid: Grid, phi: impl Fn(&[f64]) -> f64) -> Result<Self> {
        GridFunction::from_fn(grid, true, |x| (-phi(x)).exp())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_flagged_log_concave(&self) -> bool {
        self.log_concave
    }

    /// `ln f`, with `-inf` at zeros.
    pub fn log_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| if *v > 0.0 { v.ln() } else { f64::NEG_INFINITY }).collect()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// `c f`, keeping the log-concavity flag.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        GridFunction::new(self.grid.clone(), self.values.iter().map(|v| v * c).collect(), self.log_concave)
    }

    /// Node values reinterpreted as those of `x -> f(x + a)`.
    pub fn translated(&self, a: &[f64]) -> Self {
        GridFunction { grid: self.grid.shifted(a), values: self.values.clone(), log_concave: self.log_concave }
    }

    /// Discrete midpoint test `f(m)^2 >= f(m-h) f(m+h) (1 - tol)` along every axis.
    pub fn passes_log_concavity_test(&self, tol: f64) -> bool {
        let g = &self.grid;
        for flat in 0..g.len() {
            let m = g.multi(flat);
            for a in 0..g.dim() {
                if m[a] == 0 || m[a] + 1 == g.res[a] {
                    continue;
                }
                let mut lo = m.clone();
                lo[a] -= 1;
                let mut hi = m.clone();
                hi[a] += 1;
                let (fl, fh) = (self.values[g.flat(&lo)], self.values[g.flat(&hi)]);
                let mid = self.values[flat];
                if mid * mid < fl * fh * (1.0 - tol) {
                    return false;
                }
            }
        }
        true
    }

    /// Value at `x` by multilinear interpolation of `ln f`; zero outside the box
    /// or when a contributing node is zero.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let n = g.dim();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for a in 0..n {
            let t = (x[a] - g.lo[a]) / g.step(a);
            let last = (g.res[a] - 1) as f64;
            if t < -1e-9 || t > last + 1e-9 {
                return 0.0;
            }
            let t = t.clamp(0.0, last);
            let i = (t.floor() as usize).min(g.res[a] - 2);
            base[a] = i;
            frac[a] = t - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..1usize << n {
            let mut w = 1.0;
            let mut idx = base.clone();
            for a in 0..n {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    idx[a] += 1;
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w <= 1e-15 {
                continue;
            }
            let v = self.values[g.flat(&idx)];
            if v <= 0.0 {
                return 0.0;
            }
            acc += w * v.ln();
        }
        acc.exp()
    }

    /// Resamples onto another grid via [`GridFunction::interpolate`].
    pub fn resampled(&self, grid: Grid) -> Result<Self> {
        let values = (0..grid.len()).map(|i| self.interpolate(&grid.point(&grid.multi(i)))).collect();
        GridFunction::new(grid, values, self.log_concave)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "box": self.grid.to_json(),
            "resolution": self.grid.res,
            "values": self.values,
            "log_concave": self.log_concave,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| GeomError::Parse(format!("grid function: missing or invalid {what}"));
        let floats = |v: Option<&Value>, what: &str| -> Result<Vec<f64>> {
            v.and_then(Value::as_array)
                .ok_or_else(|| bad(what))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| bad(what)))
                .collect()
        };
        let bx = v.get("box").ok_or_else(|| bad("box"))?;
        let lo = floats(bx.get("lo"), "box.lo")?;
        let hi = floats(bx.get("hi"), "box.hi")?;
        let res: Vec<usize> = v
            .get("resolution")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("resolution"))?
            .iter()
            .map(|x| x.as_u64().map(|r| r as usize).ok_or_else(|| bad("resolution")))
            .collect::<Result<_>>()?;
        let values = floats(v.get("values"), "values")?;
        let log_concave = v.get("log_concave").and_then(Value::as_bool).unwrap_or(true);
        GridFunction::new(Grid::new(lo, hi, res)?, values, log_concave)
    }
}

/// Samples of a convex function (values may be `+inf`).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexSamples {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ConvexSamples {
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(&grid.multi(i)))).collect();
        ConvexSamples { grid, values }
    }

    pub fn at(&self, multi: &[usize]) -> f64 {
        self.values[self.grid.flat(multi)]
    }
}
