//! Log-concave functions on node grids: the lambda-difference sup-convolution,
//! quadrature, Legendre transforms and the support-function bridge to polytopes.

mod grid;

pub use grid::{ConvexSamples, Grid, GridFunction, MAX_GRID_DIM};

use crate::error::{GeomError, Result};
use crate::geometry::VPolytope;
use crate::linalg;
use crate::report::CheckReport;
use crate::rs_bodies::gauge;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(GeomError::InvalidArgument(format!("lambda must lie in (0, 1), got {lambda}")))
    }
}

/// A quadrature value with its coarse-grid companion and error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// The same rule on every other node.
    pub coarse: f64,
    /// Mass outside the box, extrapolating the decay of the outermost intervals.
    pub tail: f64,
    /// Richardson estimate `|value - coarse| / 3` plus `tail`.
    pub error: f64,
}

impl Integral {
    /// Richardson extrapolation of the fine and coarse values for a second-order error.
    pub fn extrapolated(&self) -> f64 {
        self.value + (self.value - self.coarse) / 3.0
    }
}

/// Integral of `v` over one interval of width `h`, exact when `v` is exponential on it.
fn interval(v0: f64, v1: f64, h: f64) -> f64 {
    if v0 <= 0.0 || v1 <= 0.0 {
        return 0.5 * h * (v0 + v1);
    }
    let d = v1 - v0;
    if d.abs() <= 1e-12 * v0.max(v1) {
        return 0.5 * h * (v0 + v1);
    }
    h * d / (v1.ln() - v0.ln())
}

fn integrate_line(vals: &[f64], xs: &[f64]) -> f64 {
    vals.windows(2).zip(xs.windows(2)).map(|(v, x)| interval(v[0], v[1], x[1] - x[0])).sum()
}

/// Exponential continuation of a line beyond its ends, where it decays outward.
fn line_tail(vals: &[f64], xs: &[f64]) -> f64 {
    let end = |inner: f64, outer: f64, h: f64| {
        if outer > 0.0 && inner > outer {
            h * outer / (inner / outer).ln()
        } else {
            0.0
        }
    };
    let m = vals.len();
    end(vals[1], vals[0], xs[1] - xs[0]) + end(vals[m - 2], vals[m - 1], xs[m - 1] - xs[m - 2])
}

/// Integrates over the sub-grid formed by `nodes[a]` on each axis, reducing the last
/// axis first; returns the value and the extrapolated outside mass.
fn integrate_on(f: &GridFunction, nodes: &[Vec<usize>]) -> (f64, f64) {
    let g = f.grid();
    let n = g.dim();
    let shape: Vec<usize> = nodes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut data: Vec<f64> = (0..total)
        .map(|flat| {
            let mut rem = flat;
            let mut multi = vec![0; n];
            for a in (0..n).rev() {
                multi[a] = nodes[a][rem % shape[a]];
                rem /= shape[a];
            }
            f.values()[g.flat(&multi)]
        })
        .collect();
    let mut tail = vec![0.0; total];
    for a in (0..n).rev() {
        let xs: Vec<f64> = nodes[a].iter().map(|&i| g.coord(a, i)).collect();
        let m = shape[a];
        tail = data
            .chunks(m)
            .zip(tail.chunks(m))
            .map(|(line, t)| integrate_line(t, &xs) + line_tail(line, &xs))
            .collect();
        data = data.chunks(m).map(|line| integrate_line(line, &xs)).collect();
    }
    (data[0], tail[0])
}

fn coarse_nodes(res: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..res).step_by(2).collect();
    if *v.last().unwrap() != res - 1 {
        v.push(res - 1);
    }
    v
}

/// Node-based quadrature with an exponentially fitted trapezoid rule per interval:
/// `h (v1 - v0) / (ln v1 - ln v0)`, the plain trapezoid where a value is zero.
pub fn integrate(f: &GridFunction) -> Integral {
    let g = f.grid();
    let fine: Vec<Vec<usize>> = g.resolution().iter().map(|&r| (0..r).collect()).collect();
    let coarse: Vec<Vec<usize>> = g.resolution().iter().map(|&r| coarse_nodes(r)).collect();
    let (value, tail) = integrate_on(f, &fine);
    let (coarse, _) = integrate_on(f, &coarse);
    Integral { value, coarse, tail, error: (value - coarse).abs() / 3.0 + tail }
}

/// Pointwise `f^l g^(1-l)` on a shared grid.
pub fn geometric_mean(f: &GridFunction, g: &GridFunction, lambda: f64) -> Result<GridFunction> {
    f.grid().check_same(g.grid())?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(GeomError::InvalidArgument(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let values = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| if *a == 0.0 || *b == 0.0 { 0.0 } else { a.powf(lambda) * b.powf(1.0 - lambda) })
        .collect();
    GridFunction::new(f.grid().clone(), values, f.is_flagged_log_concave() && g.is_flagged_log_concave())
}

/// Per-axis layout of the aligned lattices used by [`lambda_difference`].
struct Alignment {
    f_grid: Grid,
    g_grid: Grid,
    out_grid: Grid,
}

/// Chooses lattices with `(1-l)^2 h_f = l^2 h_g = h'` so that every output node
/// `z = (1-l)^2 p - l^2 q` is hit exactly by node pairs. The body with the larger
/// share keeps its box; the other is trimmed to a whole number of steps.
fn align(f: &Grid, g: &Grid, lambda: f64) -> Result<Alignment> {
    let n = f.dim();
    if g.dim() != n {
        return Err(GeomError::IncompatibleGrids(format!("dimensions {} and {}", n, g.dim())));
    }
    let cf = (1.0 - lambda) * (1.0 - lambda);
    let cg = lambda * lambda;
    let (mut flo, mut fhi, mut fres) = (vec![], vec![], vec![]);
    let (mut glo, mut ghi, mut gres) = (vec![], vec![], vec![]);
    let (mut olo, mut ohi, mut ores) = (vec![], vec![], vec![]);
    for a in 0..n {
        let bf = f.hi()[a] - f.lo()[a];
        let bg = g.hi()[a] - g.lo()[a];
        let (sf, sg) = (cf * bf, cg * bg);
        let total = (f.resolution()[a] - 1 + g.resolution()[a] - 1) as f64;
        let (nf, ng, step) = if sf >= sg {
            let nf = ((total * sf / (sf + sg)).round() as usize).max(1);
            let step = sf / nf as f64;
            let ng = ((sg / step + 1e-9).floor() as usize).max(1);
            (nf, ng, step)
        } else {
            let ng = ((total * sg / (sf + sg)).round() as usize).max(1);
            let step = sg / ng as f64;
            let nf = ((sf / step + 1e-9).floor() as usize).max(1);
            (nf, ng, step)
        };
        let f_hi = if sf >= sg { f.hi()[a] } else { f.lo()[a] + nf as f64 * step / cf };
        let g_hi = if sf >= sg { g.lo()[a] + ng as f64 * step / cg } else { g.hi()[a] };
        flo.push(f.lo()[a]);
        fhi.push(f_hi);
        fres.push(nf + 1);
        glo.push(g.lo()[a]);
        ghi.push(g_hi);
        gres.push(ng + 1);
        let lo = cf * f.lo()[a] - cg * g_hi;
        olo.push(lo);
        ohi.push(lo + (nf + ng) as f64 * step);
        ores.push(nf + ng + 1);
    }
    Ok(Alignment {
        f_grid: Grid::new(flo, fhi, fres)?,
        g_grid: Grid::new(glo, ghi, gres)?,
        out_grid: Grid::new(olo, ohi, ores)?,
    })
}

fn on_grid(f: &GridFunction, grid: &Grid) -> Result<GridFunction> {
    if f.grid().same_as(grid) {
        Ok(f.clone())
    } else {
        f.resampled(grid.clone())
    }
}

/// Finite log values with their flat offsets in the output lattice.
fn offsets(f: &GridFunction, strides: &[usize], sign_flip: bool) -> Vec<(isize, f64)> {
    let g = f.grid();
    let logs = f.log_values();
    (0..g.len())
        .filter(|&i| logs[i].is_finite())
        .map(|i| {
            let m = g.multi(i);
            let off: isize = m.iter().zip(strides).map(|(&x, &s)| (x * s) as isize).sum();
            (if sign_flip { -off } else { off }, logs[i])
        })
        .collect()
}

/// Log of the discrete sup-convolution together with its grid.
fn lambda_difference_log(f: &GridFunction, g: &GridFunction, lambda: f64) -> Result<(Grid, Vec<f64>)> {
    check_lambda(lambda)?;
    let al = align(f.grid(), g.grid(), lambda)?;
    let fa = on_grid(f, &al.f_grid)?;
    let ga = on_grid(g, &al.g_grid)?;
    let out = al.out_grid;
    let n = out.dim();
    let mut strides = vec![1usize; n];
    for a in (0..n.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * out.resolution()[a + 1];
    }
    // output index of (i, k) is i - k + (res_g - 1) on every axis
    let base: isize = (0..n).map(|a| ((al.g_grid.resolution()[a] - 1) * strides[a]) as isize).sum();
    let fo = offsets(&fa, &strides, false);
    let go = offsets(&ga, &strides, true);
    let mut logs = vec![f64::NEG_INFINITY; out.len()];
    for &(oi, lf) in &fo {
        let wf = (1.0 - lambda) * lf;
        for &(ok, lg) in &go {
            let idx = (base + oi + ok) as usize;
            let v = wf + lambda * lg;
            if v > logs[idx] {
                logs[idx] = v;
            }
        }
    }
    Ok((out, logs))
}

/// `z -> sup over (1-l)x + ly = z of f(x/(1-l))^(1-l) g(-y/l)^l`, computed exactly over
/// lattice decompositions after aligning both inputs (log-linear resampling where needed).
pub fn lambda_difference(f: &GridFunction, g: &GridFunction, lambda: f64) -> Result<GridFunction> {
    let (grid, logs) = lambda_difference_log(f, g, lambda)?;
    let values = logs.into_iter().map(f64::exp).collect();
    GridFunction::new(grid, values, f.is_flagged_log_concave() && g.is_flagged_log_concave())
}

/// Tolerance of the discrete log-concavity test.
pub const LOG_CONCAVITY_TOL: f64 = 1e-6;

/// Both integrals of the functional inequality with error bars, and the
/// Prékopa–Leindler lower bound on `int Delta`.
pub fn verify_functional_inequality(f: &GridFunction, g: &GridFunction, lambda: f64) -> Result<CheckReport> {
    check_lambda(lambda)?;
    for (name, h) in [("f", f), ("g", g)] {
        if !h.is_flagged_log_concave() || !h.passes_log_concavity_test(LOG_CONCAVITY_TOL) {
            return Err(GeomError::NotLogConcave(name.into()));
        }
    }
    let n = f.grid().dim() as i32;
    let delta = integrate(&lambda_difference(f, g, lambda)?);
    let mean = integrate(&geometric_mean(f, g, lambda)?);
    let (fi, gi) = (integrate(f), integrate(g));
    let lhs = delta.value * mean.value;
    let rhs = fi.value * gi.value;
    let err_lhs = delta.error * mean.value + mean.error * delta.value;
    let err_rhs = fi.error * gi.value + gi.error * fi.value;
    let rounding = 1e-9 * lhs.abs().max(rhs.abs());
    let band = 3.0 * (err_lhs + err_rhs) + rounding;
    let pl_const = ((1.0 - lambda).powf(1.0 - lambda) * lambda.powf(lambda)).powi(n);
    let pl = pl_const * fi.value.powf(1.0 - lambda) * gi.value.powf(lambda);
    let pl_err = pl * ((1.0 - lambda) * fi.error / fi.value + lambda * gi.error / gi.value);
    let pl_band = 3.0 * (delta.error + pl_err) + 1e-9 * pl;
    Ok(CheckReport::le_with_band("functional", lhs, rhs, band)
        .with_meta("lambda", lambda)
        .with_meta("integral_delta", delta.value)
        .with_meta("integral_delta_err", delta.error)
        .with_meta("integral_mean", mean.value)
        .with_meta("integral_f", fi.value)
        .with_meta("integral_g", gi.value)
        .with_meta("pl_lower", pl)
        .with_meta("pl_holds", delta.value + pl_band >= pl))
}

/// Discrete Legendre transform `x -> max_y (<x, y> - phi(y))` evaluated on `out`.
pub fn legendre(phi: &ConvexSamples, out: &Grid) -> ConvexSamples {
    let g = &phi.grid;
    let nodes: Vec<(Vec<f64>, f64)> = (0..g.len())
        .filter(|&i| phi.values[i].is_finite())
        .map(|i| (g.point(&g.multi(i)), phi.values[i]))
        .collect();
    ConvexSamples::from_fn(out.clone(), |x| {
        nodes
            .iter()
            .map(|(y, v)| linalg::dot(x, y) - v)
            .fold(f64::NEG_INFINITY, f64::max)
    })
}

/// `(phi box psi)(z) = min over x + y = z of phi(x) + psi(y)`; both grids must share the step.
pub fn inf_convolution(phi: &ConvexSamples, psi: &ConvexSamples) -> Result<ConvexSamples> {
    let (a, b) = (&phi.grid, &psi.grid);
    let n = a.dim();
    if b.dim() != n {
        return Err(GeomError::IncompatibleGrids(format!("dimensions {} and {}", n, b.dim())));
    }
    for ax in 0..n {
        if (a.step(ax) - b.step(ax)).abs() > 1e-12 * a.step(ax) {
            return Err(GeomError::IncompatibleGrids(format!("steps differ on axis {ax}")));
        }
    }
    let out = Grid::new(
        (0..n).map(|ax| a.lo()[ax] + b.lo()[ax]).collect(),
        (0..n).map(|ax| a.hi()[ax] + b.hi()[ax]).collect(),
        (0..n).map(|ax| a.resolution()[ax] + b.resolution()[ax] - 1).collect(),
    )?;
    let mut vals = vec![f64::INFINITY; out.len()];
    for i in 0..a.len() {
        let vi = phi.values[i];
        if !vi.is_finite() {
            continue;
        }
        let mi = a.multi(i);
        for k in 0..b.len() {
            let vk = psi.values[k];
            if !vk.is_finite() {
                continue;
            }
            let mk = b.multi(k);
            let m: Vec<usize> = mi.iter().zip(&mk).map(|(x, y)| x + y).collect();
            let idx = out.flat(&m);
            vals[idx] = vals[idx].min(vi + vk);
        }
    }
    Ok(ConvexSamples { grid: out, values: vals })
}

/// `e^(-(x_1 + ... + x_n))` on `[0, extent]^n`, the extremal example of the inequality.
pub fn sharp_exponential(n: usize, extent: f64, res: usize) -> Result<GridFunction> {
    GridFunction::from_potential(Grid::cube(n, 0.0, extent, res)?, |x| x.iter().sum())
}

/// `e^(-|x - c|^2 / (2 s^2))` on `[-w, w]^n`.
pub fn gaussian(n: usize, half_width: f64, res: usize, center: &[f64], sigma: f64) -> Result<GridFunction> {
    let grid = Grid::cube(n, -half_width, half_width, res)?;
    GridFunction::from_potential(grid, |x| {
        x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() / (2.0 * sigma * sigma)
    })
}

/// Indicator of `{x >= 0, x_1 + ... + x_n <= 1}` on `[-1/2, 3/2]^n`.
pub fn indicator_simplex(n: usize, res: usize) -> Result<GridFunction> {
    let grid = Grid::cube(n, -0.5, 1.5, res)?;
    GridFunction::from_fn(grid, true, |x| {
        let inside = x.iter().all(|&v| v >= -1e-12) && x.iter().sum::<f64>() <= 1.0 + 1e-12;
        if inside {
            1.0
        } else {
            0.0
        }
    })
}

/// `|a|/(1-l)` for `a >= 0`, `|a|/l` otherwise.
pub fn lambda_norm(a: f64, lambda: f64) -> f64 {
    if a >= 0.0 {
        a / (1.0 - lambda)
    } else {
        -a / lambda
    }
}

/// Built-in function by name: `sharp-exponential`, `gaussian` or `indicator-simplex`.
pub fn builtin(name: &str, n: usize, res: usize) -> Result<GridFunction> {
    match name {
        "sharp-exponential" => sharp_exponential(n, 40.0, res),
        "gaussian" => gaussian(n, 8.0, res, &vec![0.0; n], 1.0),
        "indicator-simplex" => indicator_simplex(n, res),
        other => Err(GeomError::InvalidArgument(format!("unknown built-in function {other:?}"))),
    }
}

fn circumradius(k: &VPolytope<f64>) -> f64 {
    k.vertices().iter().map(|v| linalg::dot(v, v).sqrt()).fold(0.0, f64::max)
}

fn inradius(k: &VPolytope<f64>) -> f64 {
    k.facets()
        .iter()
        .map(|f| f.offset / linalg::dot(&f.outward_normal, &f.outward_normal).sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// Unit sample directions: 2 in dimension one, 16 on the circle or the sphere otherwise.
pub fn identity_directions(n: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..16).map(|k| {
            let t = 2.0 * PI * k as f64 / 16.0;
            vec![t.cos(), t.sin()]
        })
        .collect(),
        _ => (0..16)
            .map(|k| {
                let z = 1.0 - (2 * k + 1) as f64 / 16.0;
                let r = (1.0 - z * z).sqrt();
                let t = PI * (3.0 - 5f64.sqrt()) * k as f64;
                vec![r * t.cos(), r * t.sin(), z]
            })
            .collect(),
    }
}

/// Nodes per axis used for the normalization integral in [`delta_support_identity_check`].
pub fn normalization_resolution(n: usize) -> usize {
    match n {
        1 => 4001,
        2 => 1025,
        _ => 129,
    }
}

/// `int e^(-h_(K polar))` over a box of half-width `20 R_K` with `res` nodes per axis.
pub fn polar_exponential_integral(k: &VPolytope<f64>, res: usize) -> Result<Integral> {
    if !k.has_origin_in_interior() {
        return Err(GeomError::OriginNotInterior);
    }
    let w = 20.0 * circumradius(k);
    let grid = Grid::cube(k.dim(), -w, w, res)?;
    let f = GridFunction::from_potential(grid, |x| gauge(k, x).unwrap_or(f64::INFINITY))?;
    Ok(integrate(&f))
}

/// Compares the discrete `delta_l` of the polar support functions of `K` and `L` with
/// the gauge of `(1-l)K v -lL` at lattice nodes near the unit sphere, and checks
/// `int e^(-h_(K polar)) = n! Vol(K)`.
pub fn delta_support_identity_check(
    k: &VPolytope<f64>,
    l: &VPolytope<f64>,
    lambda: f64,
    res: usize,
) -> Result<CheckReport> {
    check_lambda(lambda)?;
    let n = k.dim();
    if l.dim() != n {
        return Err(GeomError::DimensionMismatch(n, l.dim()));
    }
    if !k.has_origin_in_interior() || !l.has_origin_in_interior() {
        return Err(GeomError::OriginNotInterior);
    }
    let (rk, rl) = (inradius(k), inradius(l));
    let r_hull = ((1.0 - lambda) * rk).max(lambda * rl);
    let wk = 1.1 * circumradius(k) / ((1.0 - lambda) * r_hull);
    let wl = 1.1 * circumradius(l) / (lambda * r_hull);
    let f = GridFunction::from_potential(Grid::cube(n, -wk, wk, res)?, |x| gauge(k, x).unwrap())?;
    let g = GridFunction::from_potential(Grid::cube(n, -wl, wl, res)?, |x| gauge(l, x).unwrap())?;
    let (grid, logs) = lambda_difference_log(&f, &g, lambda)?;
    let hull = k.scale(&(1.0 - lambda))?.hull_union(&l.scale(&-lambda)?)?;
    let mut worst: f64 = 0.0;
    for dir in identity_directions(n) {
        let node = grid.nearest(&dir);
        let z = grid.point(&node);
        let discrete = -logs[grid.flat(&node)];
        let exact = gauge(&hull, &z).unwrap();
        worst = worst.max((discrete - exact).abs());
    }
    let h = (0..n)
        .map(|a| f.grid().step(a).max(g.grid().step(a)))
        .fold(0.0, f64::max);
    let tol = (1.0 / rk + 1.0 / rl) * h * (n as f64).sqrt();
    let norm = polar_exponential_integral(k, normalization_resolution(n))?;
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    let target = fact * k.volume();
    let norm_err = (norm.extrapolated() - target).abs() / target;
    let mut rep = CheckReport::le_with_band("delta-support-identity", worst, tol, 0.0)
        .with_meta("lambda", lambda)
        .with_meta("directions", identity_directions(n).len())
        .with_meta("normalization", norm.extrapolated())
        .with_meta("normalization_target", target)
        .with_meta("normalization_rel_err", norm_err);
    rep.pass &= norm_err <= 1e-3;
    Ok(rep)
}
