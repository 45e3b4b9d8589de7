//! Configured sweeps: trial generation, checks, re-verification and report files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use godbersen_core::functional::{gaussian, verify_functional_inequality};
use godbersen_core::geometry::{polytope_to_json, VPolytope};
use godbersen_core::mixed::{difference_body_check, mixed_volume_profile, proved_bound};
use godbersen_core::planar::{planar_objective, reduce_to_triangle, verify_planar_gfr, Policy};
use godbersen_core::report::CheckReport;
use godbersen_core::rs_bodies::{
    build_c, ckl_projection_chain, g_volume_by_quadrature, g_volume_closed_form, verify_ckl_bound_with,
    verify_kl_inequality, verify_strange,
};
use godbersen_core::scalar::{binomial, convert, format_rational, parse_rational};
use godbersen_core::simplex::{gfr_implies_godbersen_bound, simplex_hull_ratio};
use godbersen_core::{GeomError, Mode, Rational, Scalar};

use crate::random::{random_polytope, Flavor};
use crate::translation::{minimize_over_translation, translation_objective};

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "GODBERSEN_KIT_THREADS";

/// Relative tolerance of the slice quadrature of the appendix body volume.
pub const G_QUADRATURE_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Godbersen,
    Gfr,
    Kl,
    Strange,
    Ckl,
    Functional,
    Planar,
    GodbersenViaGfr,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Godbersen => "godbersen",
            Kind::Gfr => "gfr",
            Kind::Kl => "kl",
            Kind::Strange => "strange",
            Kind::Ckl => "ckl",
            Kind::Functional => "functional",
            Kind::Planar => "planar",
            Kind::GodbersenViaGfr => "godbersen-via-gfr",
        }
    }

    fn bodies(self) -> usize {
        match self {
            Kind::Functional => 0,
            Kind::Kl | Kind::Strange | Kind::Ckl => 2,
            _ => 1,
        }
    }
}

fn default_trials() -> usize {
    1
}

fn default_mode() -> Mode {
    Mode::Exact
}

fn default_perturbation() -> f64 {
    0.1
}

/// A sweep description. Grid entries are JSON numbers or `"p/q"` strings; numbers are
/// read through their decimal text, so `0.1` means exactly `1/10`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub n: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lambda_grid: Vec<Value>,
    #[serde(default)]
    pub theta_grid: Vec<Value>,
    /// Mixed-volume indices; empty means `1..n`.
    #[serde(default)]
    pub j_list: Vec<usize>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    pub output_path: PathBuf,
    /// Points sampled per random body; defaults to `n + 4`.
    #[serde(default)]
    pub vertices: Option<usize>,
    /// Random body family; polygons default to `hull-of-sphere-points`, everything
    /// else to `hull-of-gaussians`.
    #[serde(default)]
    pub flavor: Option<String>,
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    /// Grid resolution per axis for the functional kind.
    #[serde(default)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: GeomError,
    },
    #[error("I/O error on {path}: {source}; config: {config}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
        config: String,
    },
}

fn parse_grid(name: &str, values: &[Value]) -> Result<Vec<Rational>, ExperimentError> {
    values
        .iter()
        .map(|v| {
            let text = match v {
                Value::Number(x) => x.to_string(),
                Value::String(s) => s.clone(),
                other => return Err(ExperimentError::Config(format!("{name}: expected a number, got {other}"))),
            };
            let r = parse_rational(&text).map_err(|e| ExperimentError::Config(format!("{name}: {e}")))?;
            if r < Rational::from_integer(0.into()) || r > Rational::from_integer(1.into()) {
                return Err(ExperimentError::Config(format!("{name}: {text} is outside [0, 1]")));
            }
            Ok(r)
        })
        .collect()
}

/// A validated config with parsed grids.
#[derive(Clone, Debug)]
struct Plan {
    config: ExperimentConfig,
    lambdas: Vec<Rational>,
    thetas: Vec<Rational>,
    js: Vec<usize>,
    flavor: Flavor,
    vertices: usize,
}

impl Plan {
    fn new(config: &ExperimentConfig) -> Result<Plan, ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        let n = config.n;
        if config.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        let (lo, hi) = match config.kind {
            Kind::Planar => (2, 2),
            Kind::Functional => (1, 2),
            Kind::Ckl => (1, 3),
            Kind::Godbersen | Kind::GodbersenViaGfr => (2, 4),
            _ => (1, 4),
        };
        if n < lo || n > hi {
            return bad(format!("kind {} needs {lo} <= n <= {hi}, got {n}", config.kind.as_str()));
        }
        let lambdas = parse_grid("lambda_grid", &config.lambda_grid)?;
        let thetas = parse_grid("theta_grid", &config.theta_grid)?;
        let js = if config.j_list.is_empty() { (1..n).collect() } else { config.j_list.clone() };
        if let Some(j) = js.iter().find(|&&j| j == 0 || j >= n) {
            return bad(format!("j = {j} outside 1..{n}"));
        }
        let needs_lambda = matches!(config.kind, Kind::Gfr | Kind::Functional | Kind::Planar);
        if needs_lambda && lambdas.is_empty() {
            return bad(format!("kind {} needs a nonempty lambda_grid", config.kind.as_str()));
        }
        if matches!(config.kind, Kind::Kl | Kind::Ckl) && thetas.is_empty() {
            return bad(format!("kind {} needs a nonempty theta_grid", config.kind.as_str()));
        }
        let name = config.flavor.as_deref().unwrap_or(match config.kind {
            Kind::Planar => "hull-of-sphere-points",
            _ => "hull-of-gaussians",
        });
        let flavor = Flavor::parse(name, config.perturbation)
            .ok_or_else(|| ExperimentError::Config(format!("unknown flavor {name:?}")))?;
        let vertices = config.vertices.unwrap_or(n + 4);
        if vertices < n + 1 {
            return bad(format!("vertices must be at least n + 1 = {}", n + 1));
        }
        Ok(Plan { config: config.clone(), lambdas, thetas, js, flavor, vertices })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "VIOLATION-CANDIDATE")]
    ViolationCandidate,
}

/// One line of the JSON-lines report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub kind: &'static str,
    pub n: usize,
    pub j: Option<usize>,
    pub lambda: Option<String>,
    pub theta: Option<String>,
    /// Seed of the trial's bodies.
    pub seed: u64,
    pub trial: usize,
    /// Theorem checks are hard; conjecture checks only ever flag.
    pub hard: bool,
    pub status: Status,
    /// Set when a float-mode flag was re-run in exact arithmetic.
    pub reverified: bool,
    pub report: CheckReport,
    /// Reproduction data attached to failures and violation candidates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
}

impl Record {
    pub fn check(&self) -> &str {
        self.report.check_name()
    }

    fn flagged(&self) -> bool {
        self.status != Status::Pass
    }
}

#[derive(Default)]
struct Cell {
    j: Option<usize>,
    lambda: Option<String>,
    theta: Option<String>,
}

struct Ctx<'a> {
    plan: &'a Plan,
    trial: usize,
    seed: u64,
    out: Vec<Record>,
}

impl Ctx<'_> {
    fn push(&mut self, cell: Cell, report: CheckReport, hard: bool, ok: bool) {
        let status = match (ok, hard) {
            (true, _) => Status::Pass,
            (false, true) => Status::Fail,
            (false, false) => Status::ViolationCandidate,
        };
        self.out.push(Record {
            kind: self.plan.config.kind.as_str(),
            n: self.plan.config.n,
            j: cell.j,
            lambda: cell.lambda,
            theta: cell.theta,
            seed: self.seed,
            trial: self.trial,
            hard,
            status,
            reverified: false,
            report,
            payload: None,
        });
    }

    fn hard(&mut self, cell: Cell, report: CheckReport) {
        let ok = report.pass;
        self.push(cell, report, true, ok);
    }
}

/// Seed of trial `trial` (stream 0) and of its companion bodies (stream 1, ...).
pub fn trial_seed(seed: u64, trial: usize, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * trial as u128);
    rng.random()
}

fn lambda_cell(r: &Rational) -> Cell {
    Cell { lambda: Some(format_rational(r)), ..Cell::default() }
}

fn theta_cell(r: &Rational) -> Cell {
    Cell { theta: Some(format_rational(r)), ..Cell::default() }
}

fn j_cell(j: usize) -> Cell {
    Cell { j: Some(j), ..Cell::default() }
}

fn godbersen_records<S: Scalar>(ctx: &mut Ctx, k: &VPolytope<S>, js: &[usize]) -> godbersen_core::Result<()> {
    let n = k.dim();
    let (profile, _) = mixed_volume_profile(k, &k.reflect())?;
    let vol = k.volume();
    for &j in js {
        let lhs = profile[j].clone() / &vol;
        let bound = CheckReport::le("godbersen-bound", &lhs, &proved_bound::<S>(n, j));
        ctx.hard(j_cell(j), bound);
        let conjecture = CheckReport::le("godbersen-conjecture", &lhs, &binomial::<S>(n as u32, j as u32));
        let ok = conjecture.pass;
        ctx.push(j_cell(j), conjecture, false, ok);
    }
    Ok(())
}

/// Conjectured hull bound at the best translation found, with `x*` in the metadata.
fn gfr_record<S: Scalar>(ctx: &mut Ctx, k: &VPolytope<S>, lambda: &Rational, j: Option<usize>) -> godbersen_core::Result<()> {
    let n = k.dim();
    let lam: S = convert(lambda);
    let sol = minimize_over_translation(&k.convert::<f64>()?, lam.to_f64())?;
    let x: Vec<S> = sol.x_star.iter().map(|&v| S::from_f64(v)).collect();
    let lhs = translation_objective(k, &lam, &x)? / &k.volume();
    let formula = simplex_hull_ratio(n, &lam)?;
    let report = CheckReport::le("gfr", &lhs, &formula.ratio)
        .with_meta("x_star", sol.x_star.clone())
        .with_meta("x_in_body", k.contains(&x))
        .with_meta("search_sweeps", sol.iterations)
        .with_meta("convexity_tests", sol.certificate.tests)
        .with_meta("convexity_violations", sol.certificate.violations);
    let ok = report.pass;
    let cell = Cell { j, ..lambda_cell(lambda) };
    ctx.push(cell, report, false, ok);
    Ok(())
}

fn planar_records<S: Scalar>(ctx: &mut Ctx, k: &VPolytope<S>, lambda: &Rational) -> godbersen_core::Result<()> {
    let lam: S = convert(lambda);
    let area = k.volume();
    let bound = simplex_hull_ratio(2, &lam)?.ratio;
    let start = planar_objective(k, &lam)? / &area;
    let steps = if k.num_vertices() > 3 { reduce_to_triangle(k, &lam, Policy::MinPerturbation)? } else { Vec::new() };
    let mut invariants = true;
    let mut flagged = 0;
    for s in &steps {
        let area_kept = CheckReport::eq("area", &s.after.volume(), &s.before.volume()).pass;
        let centroid_kept = s.after.centroid().iter().all(|c| c.is_zero_tol(1e-9));
        let dropped = s.after.num_vertices() + 1 == s.before.num_vertices();
        let monotone = CheckReport::le("monotone", &s.objective_before, &s.objective_after).pass;
        // Objectives of a float run live on the unit-area rescaling.
        invariants &= area_kept && centroid_kept && (dropped || s.flagged) && monotone;
        flagged += usize::from(s.flagged);
    }
    let finish = match steps.last() {
        Some(s) => s.objective_after.clone() / &s.after.volume(),
        None => start.clone(),
    };
    let final_ok = CheckReport::le("final", &finish, &bound).pass;
    let mut report = CheckReport::le("planar-reduction", &start, &bound)
        .with_meta("vertices", k.num_vertices())
        .with_meta("steps", steps.len())
        .with_meta("flagged_steps", flagged)
        .with_meta("invariants_hold", invariants)
        .with_meta("final_ratio", finish.to_f64())
        .with_meta("final_holds", final_ok);
    report.pass &= invariants && final_ok;
    ctx.hard(lambda_cell(lambda), report);
    Ok(())
}

fn functional_records(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> godbersen_core::Result<()> {
    let n = ctx.plan.config.n;
    let res = ctx.plan.config.resolution.unwrap_or(129);
    let draw = |rng: &mut ChaCha8Rng| -> godbersen_core::Result<_> {
        let center: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sigma = rng.random_range(0.5..1.5);
        gaussian(n, 8.0, res, &center, sigma)
    };
    let f = draw(rng)?;
    let g = draw(rng)?;
    for lambda in &ctx.plan.lambdas.clone() {
        let lam: f64 = convert(lambda);
        let report = if lam <= 0.0 || lam >= 1.0 {
            CheckReport::vacuous("functional", "endpoint")
        } else {
            let mut r = verify_functional_inequality(&f, &g, lam)?;
            r.pass &= r.meta.get("pl_holds") == Some(&Value::Bool(true));
            r
        };
        ctx.hard(lambda_cell(lambda), report);
    }
    Ok(())
}

/// Runs every check of one trial on the given bodies.
fn evaluate<S: Scalar>(plan: &Plan, trial: usize, seed: u64, bodies: &[VPolytope<S>]) -> godbersen_core::Result<Vec<Record>> {
    let mut ctx = Ctx { plan, trial, seed, out: Vec::new() };
    let n = plan.config.n;
    match plan.config.kind {
        Kind::Godbersen => {
            let k = &bodies[0];
            godbersen_records(&mut ctx, k, &plan.js)?;
            let diff = difference_body_check(k)?;
            let mut report = diff.clone();
            report.pass &= diff.meta.get("expansion_holds") == Some(&Value::Bool(true));
            ctx.hard(Cell::default(), report);
        }
        Kind::Gfr => {
            let k = &bodies[0];
            for lambda in &plan.lambdas {
                gfr_record(&mut ctx, k, lambda, None)?;
                let lam: S = convert(lambda);
                if n == 2 {
                    ctx.hard(lambda_cell(lambda), verify_planar_gfr(k, &lam)?);
                }
                if *lambda == Rational::new(1.into(), 2.into()) {
                    let scaled = simplex_hull_ratio(n, &lam)?.ratio * &S::from_i64(1 << n);
                    let report = CheckReport::eq("fary-redei", &scaled, &binomial::<S>(n as u32, n as u32 / 2));
                    ctx.hard(lambda_cell(lambda), report);
                }
            }
        }
        Kind::GodbersenViaGfr => {
            let k = &bodies[0];
            for &j in &plan.js {
                let lambda = Rational::new(((n + 1 - j) as i64).into(), ((n + 1) as i64).into());
                let cell = Cell { j: Some(j), ..lambda_cell(&lambda) };
                ctx.hard(cell, gfr_implies_godbersen_bound::<S>(n, j)?);
                gfr_record(&mut ctx, k, &lambda, Some(j))?;
            }
            godbersen_records(&mut ctx, k, &plan.js)?;
        }
        Kind::Kl => {
            for theta in &plan.thetas {
                let report = verify_kl_inequality(&bodies[0], &bodies[1], &convert::<Rational, S>(theta))?;
                ctx.hard(theta_cell(theta), report);
            }
        }
        Kind::Strange => {
            let mut report = verify_strange(&bodies[0], &bodies[1])?;
            report.pass &= report.meta.get("inclusion_holds") == Some(&Value::Bool(true));
            ctx.hard(Cell::default(), report);
        }
        Kind::Ckl => {
            let (k, l) = (&bodies[0], &bodies[1]);
            let c = build_c(k, l)?;
            for theta in &plan.thetas {
                let t: S = convert(theta);
                let report = if t.is_zero_tol(0.0) || (S::one() - &t).is_zero_tol(0.0) {
                    CheckReport::vacuous("ckl", "endpoint")
                } else {
                    verify_ckl_bound_with(&c, &t)?
                };
                ctx.hard(theta_cell(theta), report);
            }
            ctx.hard(Cell::default(), ckl_projection_chain(&c)?);
            let closed = g_volume_closed_form(k, l)?.to_f64();
            let quad = g_volume_by_quadrature(&c)?;
            ctx.hard(Cell::default(), CheckReport::approx_eq("g-volume", quad, closed, G_QUADRATURE_TOL * closed));
        }
        Kind::Planar => {
            for lambda in &plan.lambdas {
                planar_records(&mut ctx, &bodies[0], lambda)?;
            }
        }
        Kind::Functional => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            functional_records(&mut ctx, &mut rng)?;
        }
    }
    Ok(ctx.out)
}

fn bodies<S: Scalar>(plan: &Plan, trial: usize) -> godbersen_core::Result<Vec<VPolytope<S>>> {
    let cfg = &plan.config;
    (0..cfg.kind.bodies())
        .map(|stream| {
            let seed = trial_seed(cfg.seed, trial, stream as u64);
            let m = match cfg.kind {
                // Polygons with 3 to 15 vertices.
                Kind::Planar if cfg.vertices.is_none() => 3 + (seed % 13) as usize,
                _ => plan.vertices,
            };
            random_polytope::<S>(cfg.n, m, seed, plan.flavor)
        })
        .collect()
}

fn payload<S: Scalar>(plan: &Plan, bodies: &[VPolytope<S>]) -> Value {
    json!({
        "config": plan.config,
        "bodies": bodies.iter().map(polytope_to_json).collect::<Vec<_>>(),
    })
}

fn run_trial_in<S: Scalar>(plan: &Plan, trial: usize) -> godbersen_core::Result<Vec<Record>> {
    let seed = trial_seed(plan.config.seed, trial, 0);
    let bodies = bodies::<S>(plan, trial)?;
    let mut records = evaluate(plan, trial, seed, &bodies)?;
    if !records.iter().any(Record::flagged) {
        return Ok(records);
    }
    let body_based = plan.config.kind != Kind::Functional;
    if S::MODE == Mode::Float && body_based {
        let exact: Vec<VPolytope<Rational>> = bodies.iter().map(|b| b.convert()).collect::<godbersen_core::Result<_>>()?;
        let again = evaluate(plan, trial, seed, &exact)?;
        for (rec, ex) in records.iter_mut().zip(again) {
            if rec.flagged() {
                let float_report = rec.report.to_json();
                *rec = ex;
                rec.reverified = true;
                if rec.flagged() {
                    let mut p = payload(plan, &exact);
                    p["float_report"] = float_report;
                    rec.payload = Some(p);
                }
            }
        }
    } else {
        for rec in records.iter_mut().filter(|r| r.flagged()) {
            rec.payload = Some(payload(plan, &bodies));
        }
    }
    Ok(records)
}

fn run_trial(plan: &Plan, trial: usize) -> Result<Vec<Record>, ExperimentError> {
    let out = match plan.config.mode {
        Mode::Exact => run_trial_in::<Rational>(plan, trial),
        Mode::Float => run_trial_in::<f64>(plan, trial),
    };
    out.map_err(|source| ExperimentError::Trial { trial, source })
}

/// All records of a run, in trial order.
pub fn collect_records(config: &ExperimentConfig) -> Result<Vec<Record>, ExperimentError> {
    let plan = Plan::new(config)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let threads: usize = v
            .parse()
            .map_err(|_| ExperimentError::Config(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
        pool = pool.num_threads(threads.max(1));
    }
    let pool = pool.build().map_err(|e| ExperimentError::Config(e.to_string()))?;
    let per_trial: Vec<_> = pool.install(|| (0..config.trials).into_par_iter().map(|t| run_trial(&plan, t)).collect());
    let mut all = Vec::new();
    for r in per_trial {
        all.extend(r?);
    }
    Ok(all)
}

/// Counts of a finished run and the files written.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub records: usize,
    pub hard_failures: usize,
    pub violation_candidates: usize,
    pub jsonl_path: PathBuf,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

impl RunSummary {
    /// 2 when a theorem check failed, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.hard_failures > 0 {
            2
        } else {
            0
        }
    }
}

/// `run.jsonl` gives `run.csv` and `run.summary.csv`.
pub fn companion_paths(output: &Path) -> (PathBuf, PathBuf) {
    (output.with_extension("csv"), output.with_extension("summary.csv"))
}

#[derive(Serialize)]
struct CsvRow<'a> {
    kind: &'a str,
    n: usize,
    j: Option<usize>,
    lambda: Option<&'a str>,
    theta: Option<&'a str>,
    seed: u64,
    trial: usize,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SummaryRow {
    kind: String,
    n: usize,
    check: String,
    j: Option<usize>,
    lambda: Option<String>,
    theta: Option<String>,
    count: usize,
    min_ratio: f64,
    max_ratio: f64,
    mean_ratio: f64,
    hard_failures: usize,
    violation_candidates: usize,
}

/// Per-cell ratio statistics in order of first appearance; vacuous records are skipped.
fn summarize(records: &[Record]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for r in records.iter().filter(|r| !r.report.is_vacuous()) {
        let idx = rows.iter().position(|s| {
            s.check == r.check() && s.j == r.j && s.lambda == r.lambda && s.theta == r.theta
        });
        let idx = idx.unwrap_or_else(|| {
            rows.push(SummaryRow {
                kind: r.kind.into(),
                n: r.n,
                check: r.check().into(),
                j: r.j,
                lambda: r.lambda.clone(),
                theta: r.theta.clone(),
                count: 0,
                min_ratio: f64::INFINITY,
                max_ratio: f64::NEG_INFINITY,
                mean_ratio: 0.0,
                hard_failures: 0,
                violation_candidates: 0,
            });
            rows.len() - 1
        });
        let s = &mut rows[idx];
        s.count += 1;
        s.min_ratio = s.min_ratio.min(r.report.ratio);
        s.max_ratio = s.max_ratio.max(r.report.ratio);
        // Running sum; divided once all records are in.
        s.mean_ratio += r.report.ratio;
        s.hard_failures += usize::from(r.status == Status::Fail);
        s.violation_candidates += usize::from(r.status == Status::ViolationCandidate);
    }
    for s in &mut rows {
        s.mean_ratio /= s.count as f64;
    }
    rows
}

fn io_error(config: &ExperimentConfig, path: &Path, source: io::Error) -> ExperimentError {
    ExperimentError::Io {
        path: path.to_path_buf(),
        source,
        config: serde_json::to_string(config).unwrap_or_default(),
    }
}

/// Writes the JSON-lines report, the per-record CSV and the summary CSV.
pub fn write_reports(config: &ExperimentConfig, records: &[Record]) -> Result<RunSummary, ExperimentError> {
    let jsonl_path = config.output_path.clone();
    let (csv_path, summary_path) = companion_paths(&jsonl_path);
    let err = |p: &Path| {
        let p = p.to_path_buf();
        move |e: io::Error| io_error(config, &p, e)
    };
    if let Some(dir) = jsonl_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(err(dir))?;
    }

    let mut out = BufWriter::new(File::create(&jsonl_path).map_err(err(&jsonl_path))?);
    for r in records {
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(out, "{line}").map_err(err(&jsonl_path))?;
    }
    out.flush().map_err(err(&jsonl_path))?;

    let mut csv_out = csv::Writer::from_path(&csv_path).map_err(|e| err(&csv_path)(e.into()))?;
    for r in records {
        let row = CsvRow {
            kind: r.kind,
            n: r.n,
            j: r.j,
            lambda: r.lambda.as_deref(),
            theta: r.theta.as_deref(),
            seed: r.seed,
            trial: r.trial,
            lhs: r.report.lhs,
            rhs: r.report.rhs,
            ratio: r.report.ratio,
            pass: r.report.pass,
        };
        csv_out.serialize(row).map_err(|e| err(&csv_path)(e.into()))?;
    }
    csv_out.flush().map_err(err(&csv_path))?;

    let mut sum_out = csv::Writer::from_path(&summary_path).map_err(|e| err(&summary_path)(e.into()))?;
    for row in summarize(records) {
        sum_out.serialize(row).map_err(|e| err(&summary_path)(e.into()))?;
    }
    sum_out.flush().map_err(err(&summary_path))?;

    Ok(RunSummary {
        records: records.len(),
        hard_failures: records.iter().filter(|r| r.status == Status::Fail).count(),
        violation_candidates: records.iter().filter(|r| r.status == Status::ViolationCandidate).count(),
        jsonl_path,
        csv_path,
        summary_path,
    })
}

/// Runs a sweep and writes its report files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let records = collect_records(config)?;
    write_reports(config, &records)
}

/// Reads a JSON config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
        config: String::new(),
    })?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))
}
