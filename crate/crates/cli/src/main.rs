mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use minkbilliard::billiard::{default_max_bounces, random_start, simulate, Mode, PhasePoint};
use minkbilliard::body::BodyParseError;
use minkbilliard::hanner::{verify_hanner, verify_hanner_in, HannerTree};
use minkbilliard::polytope::Polytope;
use minkbilliard::random::case_rng;
use minkbilliard::scalar::{decimal_rational, Scalar};
use minkbilliard::verify::{run_battery, Battery, GENERATOR};
use minkbilliard::{xi, xi_oracle, ConvexBody, TrajectoryRecord, XiOptions};

const MODE_VAR: &str = "MINKBILLIARD_MODE";

#[derive(Parser)]
#[command(name = "minkbilliard", version, about = "Shortest closed Minkowski billiard trajectories, simulation and Hanner checks")]
struct Cli {
    /// Simulator arithmetic, `rational` or `float`. Takes precedence over MINKBILLIARD_MODE.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Add wall-clock timings to the report. Reports are then no longer byte-identical.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute xi_T(K) for a planar body K and norm body T.
    Xi {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        norm: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Objective evaluations per start.
        #[arg(long, default_value_t = 20_000)]
        max_evals: usize,
        /// Also run the brute-force oracle on this many boundary samples.
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Simulate a classical billiard trajectory in K x T.
    Simulate {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        norm: PathBuf,
        /// Start coordinate `x,y,...` on a facet of K; random if omitted.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Start momentum `x,y,...` on a facet of T; random if omitted.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_bounces: Option<usize>,
        /// Also write the report to this file (input for `plot`).
        #[arg(short = 'o', long = "out", visible_alias = "o")]
        out: Option<PathBuf>,
    },
    /// Check length 4, period 2n and central symmetry on random starts in H x H°.
    Hanner {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a named inequality battery.
    Verify {
        /// monotonicity, symmetry, brunn-minkowski, homogeneity, rogers-shepard-finsler,
        /// rogers-shepard-euclid, hanner or constant-width.
        battery: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Draw a trajectory (from `simulate --out`) as SVG.
    Plot {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(short = 'o', long = "out", visible_alias = "o")]
        out: PathBuf,
        /// Body K, if the trajectory file does not carry it.
        #[arg(long)]
        body: Option<PathBuf>,
        /// Norm body T, if the trajectory file does not carry it.
        #[arg(long)]
        norm: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Body { path: PathBuf, source: BodyParseError },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

/// A finished command: the report and the exit status it implies.
struct Outcome {
    fields: Map<String, Value>,
    seed: Option<u64>,
    status: u8,
}

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;
const NUMERICAL: u8 = 3;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_body(path: &Path) -> Result<ConvexBody, CliError> {
    ConvexBody::from_json(&read(path)?).map_err(|source| CliError::Body {
        path: path.to_path_buf(),
        source,
    })
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn fields(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => Map::from_iter([("result".to_string(), other)]),
    }
}

fn resolve_mode(flag: Option<&str>) -> Result<Option<Mode>, CliError> {
    let env = std::env::var(MODE_VAR).ok().filter(|s| !s.is_empty());
    match flag.map(str::to_string).or(env) {
        None => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|e| CliError::Usage(format!("{e}"))),
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Rational => "rational",
        Mode::Float => "float",
    }
}

fn cmd_xi(body: &Path, norm: &Path, opts: XiOptions, oracle: Option<usize>) -> Result<Outcome, CliError> {
    let k = read_body(body)?;
    let t = read_body(norm)?;
    let seed = opts.seed;
    let r = xi(&k, &t, &opts).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = fields(json!({
        "xi": r.value,
        "m": r.m,
        "polyline": r.minimizer.points,
        "alpha": r.alpha_at_min,
        "method": r.method,
        "flagged": r.flagged,
        "cross_check": r.cross_check,
    }));
    if let Some(g) = oracle {
        let o = xi_oracle(&k, &t, g).map_err(|e| CliError::Usage(e.to_string()))?;
        out.insert("oracle".into(), json!({"grid": g, "value": o}));
    }
    Ok(Outcome {
        fields: out,
        seed: Some(seed),
        status: if r.flagged { NUMERICAL } else { PASS },
    })
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, CliError> {
    let v: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == dim && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!("`{text}` is not a point with {dim} coordinates"))),
    }
}

struct SimInput<'a> {
    q: Option<Vec<f64>>,
    p: Option<Vec<f64>>,
    seed: u64,
    max_bounces: usize,
    k: &'a Polytope<f64>,
    t: &'a Polytope<f64>,
}

fn run_simulation<S: Scalar>(
    inp: &SimInput,
    k: &Polytope<S>,
    t: &Polytope<S>,
    conv: impl Fn(f64) -> S,
) -> Result<Map<String, Value>, CliError> {
    let start = match (&inp.q, &inp.p) {
        (Some(q), Some(p)) => PhasePoint::locate(q.iter().map(|&x| conv(x)).collect(), p.iter().map(|&x| conv(x)).collect(), k, t),
        (None, None) => Ok(random_start(k, t, &mut case_rng(inp.seed, 0)).0),
        _ => return Err(CliError::Usage("give both --q and --p, or neither".into())),
    };
    let mut out = Map::new();
    out.insert("body".into(), ConvexBody::Polytope(inp.k.clone()).to_json_value());
    out.insert("norm".into(), ConvexBody::Polytope(inp.t.clone()).to_json_value());
    match start.and_then(|s| simulate(&s, k, t, inp.max_bounces)) {
        Ok(rec) => {
            out.insert("trajectory".into(), rec.to_json_value());
            out.insert("error".into(), Value::Null);
        }
        Err(e) => {
            out.insert("trajectory".into(), Value::Null);
            out.insert("error".into(), Value::String(e.to_string()));
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    body: &Path,
    norm: &Path,
    q: Option<&str>,
    p: Option<&str>,
    seed: u64,
    max_bounces: Option<usize>,
    out: Option<&Path>,
    mode: Option<Mode>,
) -> Result<Outcome, CliError> {
    let kb = read_body(body)?;
    let tb = read_body(norm)?;
    let (Some(k), Some(t)) = (kb.as_polytope(), tb.as_polytope()) else {
        return Err(CliError::Usage("simulate needs polytopes for both K and T".into()));
    };
    if k.dim() != t.dim() {
        return Err(CliError::Usage("K and T have different dimensions".into()));
    }
    let dim = k.dim();
    let inp = SimInput {
        q: q.map(|s| parse_point(s, dim)).transpose()?,
        p: p.map(|s| parse_point(s, dim)).transpose()?,
        seed,
        max_bounces: max_bounces.unwrap_or_else(|| default_max_bounces(dim)),
        k,
        t,
    };
    // Decimal data runs exactly unless float is requested.
    let exact = match (k.to_rational(), t.to_rational()) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    let (mode, mut fields) = match (mode, exact) {
        (Some(Mode::Float), _) | (None, None) => (Mode::Float, run_simulation(&inp, k, t, |x| x)?),
        (_, Some((a, b))) => (
            Mode::Rational,
            run_simulation(&inp, &a, &b, |x| decimal_rational(x, 17).unwrap_or_else(|| <BigRational as Scalar>::from_f64(x)))?,
        ),
        (Some(Mode::Rational), None) => {
            let conv = <BigRational as Scalar>::from_f64;
            let (a, b) = (k.map_scalar(|x| conv(*x)), t.map_scalar(|x| conv(*x)));
            (Mode::Rational, run_simulation(&inp, &a, &b, conv)?)
        }
    };
    fields.insert("mode".into(), json!(mode_name(mode)));
    let status = if fields["error"].is_null() { PASS } else { NUMERICAL };
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&Value::Object(fields.clone())).expect("plain data");
        fs::write(path, text + "\n").map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(Outcome {
        fields,
        seed: Some(seed),
        status,
    })
}

fn cmd_hanner(tree: &Path, samples: usize, seed: u64, mode: Option<Mode>) -> Result<Outcome, CliError> {
    let text = read(tree)?;
    let tree = HannerTree::from_json(&text).map_err(|source| CliError::Json {
        path: tree.to_path_buf(),
        source,
    })?;
    let mode = mode.unwrap_or(Mode::Rational);
    let rep = match mode {
        Mode::Rational => verify_hanner(&tree, samples, seed),
        Mode::Float => verify_hanner_in::<f64>(&tree, samples, seed),
    };
    let mut f = fields(serde_json::to_value(&rep).expect("plain data"));
    f.insert("tree".into(), serde_json::from_str(&tree.to_json()).expect("tree JSON"));
    f.insert("mode".into(), json!(mode_name(mode)));
    f.insert("all_pass".into(), json!(rep.all_pass()));
    Ok(Outcome {
        fields: f,
        seed: Some(seed),
        status: if rep.all_pass() { PASS } else { FAIL },
    })
}

fn cmd_verify(battery: &str, seed: u64, samples: usize) -> Result<Outcome, CliError> {
    let b: Battery = battery.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
    match run_battery(b, seed, samples) {
        Ok(rep) => {
            let status = if rep.all_pass() { PASS } else { FAIL };
            Ok(Outcome {
                fields: fields(serde_json::to_value(&rep).expect("plain data")),
                seed: Some(seed),
                status,
            })
        }
        Err(e) => Ok(Outcome {
            fields: fields(json!({"battery": b, "error": e.to_string()})),
            seed: Some(seed),
            status: NUMERICAL,
        }),
    }
}

fn body_from_value(v: &Value) -> Option<ConvexBody> {
    ConvexBody::from_json(&v.to_string()).ok()
}

fn cmd_plot(trajectory: &Path, out: &Path, body: Option<&Path>, norm: Option<&Path>) -> Result<Outcome, CliError> {
    let v = read_json(trajectory)?;
    let (traj, k, t) = match v.get("trajectory") {
        Some(tr) => (tr.clone(), v.get("body").and_then(body_from_value), v.get("norm").and_then(body_from_value)),
        None => (v.clone(), None, None),
    };
    if traj.is_null() {
        return Err(CliError::Usage(format!("{}: the run recorded no trajectory", trajectory.display())));
    }
    let rec = TrajectoryRecord::<f64>::from_json_value(traj).map_err(|source| CliError::Json {
        path: trajectory.to_path_buf(),
        source,
    })?;
    if rec.bounces.is_empty() {
        return Err(CliError::Usage("trajectory has no bounces".into()));
    }
    let k = match body {
        Some(p) => Some(read_body(p)?),
        None => k,
    };
    let t = match norm {
        Some(p) => Some(read_body(p)?),
        None => t,
    };
    let text = svg::render(&rec, k.as_ref(), t.as_ref());
    fs::write(out, &text).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    Ok(Outcome {
        fields: fields(json!({"svg": out.display().to_string(), "bounces": rec.bounces.len(), "closed": rec.closed})),
        seed: None,
        status: PASS,
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mode = resolve_mode(cli.mode.as_deref())?;
    match &cli.command {
        Command::Xi {
            body,
            norm,
            seed,
            starts,
            max_evals,
            oracle,
        } => {
            let opts = XiOptions {
                seed: *seed,
                starts: *starts,
                max_evals: *max_evals,
                ..XiOptions::default()
            };
            cmd_xi(body, norm, opts, *oracle)
        }
        Command::Simulate {
            body,
            norm,
            q,
            p,
            seed,
            max_bounces,
            out,
        } => cmd_simulate(body, norm, q.as_deref(), p.as_deref(), *seed, *max_bounces, out.as_deref(), mode),
        Command::Hanner { tree, samples, seed } => cmd_hanner(tree, *samples, *seed, mode),
        Command::Verify { battery, seed, samples } => cmd_verify(battery, *seed, *samples),
        Command::Plot {
            trajectory,
            out,
            body,
            norm,
        } => cmd_plot(trajectory, out, body.as_deref(), norm.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let t0 = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    let mut report = Map::new();
    report.insert("command".into(), json!(std::env::args().skip(1).collect::<Vec<_>>()));
    if let Some(seed) = outcome.seed {
        report.insert("seed".into(), json!(seed));
        report.insert("generator".into(), json!(GENERATOR));
    }
    report.insert("status".into(), json!(outcome.status));
    report.extend(outcome.fields);
    if cli.timings {
        report.insert("timings".into(), json!({"total_ms": t0.elapsed().as_secs_f64() * 1e3}));
    }
    // A closed pipe (`| head`) is not an error worth reporting.
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(&Value::Object(report)).expect("plain data")
    );
    ExitCode::from(outcome.status)
}
