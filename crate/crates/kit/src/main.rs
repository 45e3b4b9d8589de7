use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use godbersen_core::geometry::{json_mode, polytope_from_json, VPolytope};
use godbersen_core::mixed::{mixed_volume_general, mixed_volume_pair, mixed_volume_pair_polarized, Method};
use godbersen_core::planar::{centered, planar_objective, reduce_to_triangle, Policy};
use godbersen_core::report::CheckReport;
use godbersen_core::rs_bodies::{verify_ckl_bound, verify_kl_inequality, verify_strange};
use godbersen_core::scalar::{convert, parse_rational};
use godbersen_core::simplex::simplex_hull_ratio;
use godbersen_core::{GeomError, Mode, Rational, Scalar};
use godbersen_kit::experiment::{load_config, run_experiment, ExperimentError, Kind};

const EXIT_VIOLATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "godbersen-kit", version, about = "Exact and numerical checks of convex-body volume inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    MinPerturbation,
    First,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed-volume bound and conjecture over random centered bodies.
    Godbersen(ConfigArg),
    /// Hull-volume conjecture at the best translation found.
    Gfr(ConfigArg),
    /// Intersection-hull inequality over random pairs.
    Kl(ConfigArg),
    /// Hull and harmonic-sum inequality over random pairs.
    Strange(ConfigArg),
    /// Bounds on the body built over a pair of bases.
    Ckl(ConfigArg),
    /// Functional inequality on random log-concave pairs.
    Functional(ConfigArg),
    /// Vertex-removal reduction on random polygons.
    Planar(ConfigArg),
    /// The hull conjecture at the finitely many parameters implying the mixed-volume bound.
    GodbersenViaGfr(ConfigArg),
    /// Reduces one centered polygon to a triangle.
    ReducePlanar {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lambda: String,
        /// Writes every step as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "min-perturbation")]
        policy: PolicyArg,
        /// Seed for `--policy random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed-form hull ratio for the simplex.
    SimplexRatio {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
    },
    /// Mixed volume of polytope files: `V(K[j], T[n-j])` with `--j`, else one copy of each.
    MixedVolume {
        #[arg(long = "body", required = true)]
        bodies: Vec<PathBuf>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, value_enum, default_value = "interpolation")]
        method: MethodArg,
    },
    VerifyKl {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        theta: String,
    },
    VerifyStrange {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
    },
    VerifyCkl {
        #[arg(long)]
        k: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        theta: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Interpolation,
    Polarization,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

/// A command's printed result and whether a proved inequality failed.
struct Outcome {
    output: Value,
    violation: bool,
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
}

fn bodies_mode(docs: &[Value]) -> Result<Mode, CliError> {
    let modes = docs.iter().map(json_mode).collect::<Result<Vec<_>, _>>()?;
    if modes.windows(2).any(|w| w[0] != w[1]) {
        return Err(CliError::Usage("all bodies must use the same mode".into()));
    }
    Ok(modes.first().copied().unwrap_or(Mode::Exact))
}

fn load<S: Scalar>(docs: &[Value]) -> Result<Vec<VPolytope<S>>, CliError> {
    Ok(docs.iter().map(polytope_from_json).collect::<Result<Vec<_>, _>>()?)
}

fn scalar<S: Scalar>(text: &str) -> Result<S, CliError> {
    Ok(convert::<Rational, S>(&parse_rational(text)?))
}

fn report_outcome(r: CheckReport) -> Outcome {
    Outcome { violation: !r.pass, output: r.to_json() }
}

fn experiment(kind: Kind, arg: &ConfigArg) -> Result<Outcome, CliError> {
    let config = load_config(&arg.config)?;
    if config.kind != kind {
        return Err(CliError::Usage(format!(
            "config kind {} does not match subcommand {}",
            config.kind.as_str(),
            kind.as_str()
        )));
    }
    let summary = run_experiment(&config)?;
    Ok(Outcome { violation: summary.hard_failures > 0, output: serde_json::to_value(&summary).expect("summary") })
}

fn reduce<S: Scalar>(doc: &Value, lambda: &str, policy: Policy, trace: Option<&Path>) -> Result<Outcome, CliError> {
    let k = centered(&polytope_from_json::<S>(doc)?)?;
    let lam: S = scalar(lambda)?;
    let bound = simplex_hull_ratio(2, &lam)?.ratio;
    let start = planar_objective(&k, &lam)? / &k.volume();
    let steps = if k.num_vertices() > 3 { reduce_to_triangle(&k, &lam, policy)? } else { Vec::new() };
    let finish = match steps.last() {
        Some(s) => s.objective_after.clone() / &s.after.volume(),
        None => start.clone(),
    };
    let monotone = steps.iter().all(|s| CheckReport::le("step", &s.objective_before, &s.objective_after).pass);
    let final_check = CheckReport::le("planar-final", &finish, &bound);
    if let Some(path) = trace {
        let doc = Value::Array(steps.iter().map(|s| s.to_json()).collect());
        let text = serde_json::to_string_pretty(&doc).expect("trace serializes");
        std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })?;
    }
    Ok(Outcome {
        violation: !(monotone && final_check.pass),
        output: json!({
            "vertices": k.num_vertices(),
            "steps": steps.len(),
            "flagged_steps": steps.iter().filter(|s| s.flagged).count(),
            "initial_ratio": start.to_json(),
            "final_ratio": finish.to_json(),
            "bound": bound.to_json(),
            "monotone": monotone,
            "final_within_bound": final_check.pass,
        }),
    })
}

fn mixed<S: Scalar>(docs: &[Value], j: Option<usize>, method: MethodArg) -> Result<Outcome, CliError> {
    let bodies = load::<S>(docs)?;
    let result = match (j, bodies.as_slice()) {
        (Some(j), [k, t]) => match method {
            MethodArg::Interpolation => mixed_volume_pair(k, t, j)?,
            MethodArg::Polarization => mixed_volume_pair_polarized(k, t, j)?,
        },
        (Some(_), _) => return Err(CliError::Usage("--j needs exactly two bodies".into())),
        (None, list) => mixed_volume_general(list)?,
    };
    let method = match result.method {
        Method::Interpolation => "interpolation",
        Method::Polarization => "polarization",
    };
    Ok(Outcome {
        violation: false,
        output: json!({
            "value": result.value.to_json(),
            "value_f64": result.value.to_f64(),
            "method": method,
            "bodies": result.bodies,
            "condition_estimate": result.condition_estimate,
        }),
    })
}

fn pair_check<S: Scalar>(docs: &[Value], theta: Option<&str>, which: &str) -> Result<Outcome, CliError> {
    let b = load::<S>(docs)?;
    let report = match (which, theta) {
        ("kl", Some(t)) => verify_kl_inequality(&b[0], &b[1], &scalar::<S>(t)?)?,
        ("ckl", Some(t)) => verify_ckl_bound(&b[0], &b[1], &scalar::<S>(t)?)?,
        _ => verify_strange(&b[0], &b[1])?,
    };
    Ok(report_outcome(report))
}

macro_rules! by_mode {
    ($mode:expr, $f:ident ( $($arg:expr),* )) => {
        match $mode {
            Mode::Exact => $f::<Rational>($($arg),*),
            Mode::Float => $f::<f64>($($arg),*),
        }
    };
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Godbersen(a) => experiment(Kind::Godbersen, &a),
        Command::Gfr(a) => experiment(Kind::Gfr, &a),
        Command::Kl(a) => experiment(Kind::Kl, &a),
        Command::Strange(a) => experiment(Kind::Strange, &a),
        Command::Ckl(a) => experiment(Kind::Ckl, &a),
        Command::Functional(a) => experiment(Kind::Functional, &a),
        Command::Planar(a) => experiment(Kind::Planar, &a),
        Command::GodbersenViaGfr(a) => experiment(Kind::GodbersenViaGfr, &a),
        Command::ReducePlanar { input, lambda, trace, policy, seed } => {
            let doc = read_json(&input)?;
            let policy = match policy {
                PolicyArg::MinPerturbation => Policy::MinPerturbation,
                PolicyArg::First => Policy::First,
                PolicyArg::Random => Policy::Random(seed),
            };
            let mode = bodies_mode(std::slice::from_ref(&doc))?;
            by_mode!(mode, reduce(&doc, &lambda, policy, trace.as_deref()))
        }
        Command::SimplexRatio { n, lambda, mode } => {
            let formula = match mode {
                ModeArg::Exact => simplex_hull_ratio(n, &scalar::<Rational>(&lambda)?)?.to_json(),
                ModeArg::Float => simplex_hull_ratio(n, &scalar::<f64>(&lambda)?)?.to_json(),
            };
            Ok(Outcome { violation: false, output: formula })
        }
        Command::MixedVolume { bodies, j, method } => {
            let docs = bodies.iter().map(|p| read_json(p)).collect::<Result<Vec<_>, _>>()?;
            by_mode!(bodies_mode(&docs)?, mixed(&docs, j, method))
        }
        Command::VerifyKl { k, l, theta } => {
            let docs = vec![read_json(&k)?, read_json(&l)?];
            by_mode!(bodies_mode(&docs)?, pair_check(&docs, Some(&theta), "kl"))
        }
        Command::VerifyCkl { k, l, theta } => {
            let docs = vec![read_json(&k)?, read_json(&l)?];
            by_mode!(bodies_mode(&docs)?, pair_check(&docs, Some(&theta), "ckl"))
        }
        Command::VerifyStrange { k, l } => {
            let docs = vec![read_json(&k)?, read_json(&l)?];
            by_mode!(bodies_mode(&docs)?, pair_check(&docs, None, "strange"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.output).expect("output serializes"));
            if out.violation {
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
