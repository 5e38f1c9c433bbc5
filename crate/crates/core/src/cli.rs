//! Command-line front end: argument parsing, run execution and reports.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::objectives::{self, Objective};
use crate::point::Point;
use crate::rng;
use crate::runner::{self, preset_by_name};
use crate::trace::write_trace_csv;
use crate::types::{BacktrackingParams, RunResult, SolverConfig, StepMode, StopReason};

/// Value threshold used for the iterations-to-threshold comparison.
pub const SUMMARY_THRESHOLD: f64 = 1e-6;

pub const DEFAULT_RANDOM_AGENTS: usize = 3;
pub const DEFAULT_BOX: (f64, f64) = (-30.0, 30.0);
/// Upper bound on `--agents`; pairwise coupling costs O(m^2) per iteration.
pub const MAX_AGENTS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "magd",
    version,
    about = "Multi-agent gradient descent with a communication protocol"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the solver on a preset or a built-in objective.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Inline,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepModeArg {
    Fixed,
    Backtracking,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Experiment preset (objective, starting agents, step size and protocol factor).
    #[arg(long, value_parser = ["exp1", "exp2"], conflicts_with = "objective")]
    pub preset: Option<String>,
    #[arg(long, value_parser = objectives::BUILTIN_NAMES)]
    pub objective: Option<String>,
    #[arg(long, value_name = "M")]
    pub agents: Option<usize>,
    #[arg(long, value_enum)]
    pub init: Option<InitArg>,
    /// Starting agents as "x,y;x,y;...".
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
    /// Sampling box for random initialization.
    #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub bounds: Option<Vec<f64>>,
    #[arg(long, value_name = "B", allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, value_name = "L", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub xi: Option<f64>,
    #[arg(long, value_name = "N")]
    pub max_iter: Option<u64>,
    #[arg(long, value_enum)]
    pub step_mode: Option<StepModeArg>,
    /// First backtracking trial step (defaults to --beta).
    #[arg(long, allow_negative_numbers = true)]
    pub bt_initial_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub bt_shrink: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub bt_armijo_c: Option<f64>,
    #[arg(long)]
    pub bt_max_halvings: Option<u32>,
    /// Stop when every direction norm is at most T.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    pub stall_tol: Option<f64>,
    /// Also run with the protocol switched off and report both.
    #[arg(long)]
    pub compare: bool,
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

/// Where the starting agents come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSource {
    Preset(String),
    Inline(Vec<Point>),
    Random {
        agents: usize,
        seed: u64,
        lo: f64,
        hi: f64,
    },
}

/// A validated `run` command.
#[derive(Debug, Clone, PartialEq)]
pub struct CliInvocation {
    pub objective: String,
    pub init: InitSource,
    pub config: SolverConfig,
    pub compare: bool,
    pub trace: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{flag}: {msg}"))
}

/// Parses `"x,y;x,y;..."` into points of equal dimension.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    for (i, chunk) in text.split(';').enumerate() {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            return Err(Error::Parse(format!("point {} is empty", i + 1)));
        }
        let coords = chunk
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("point {}: {s:?} is not a number", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Point::new(coords).map_err(|e| Error::Parse(format!("point {}: {e}", i + 1)))?;
        if let Some(first) = points.first().map(Point::dim) {
            if p.dim() != first {
                return Err(Error::Parse(format!(
                    "point {} has dimension {}, expected {first}",
                    i + 1,
                    p.dim()
                )));
            }
        }
        points.push(p);
    }
    Ok(points)
}

/// Formats points in the `--points` syntax.
pub fn format_points(points: &[Point]) -> String {
    points
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn positive(flag: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => {
            Err(usage(flag, format!("must be positive, got {x}")))
        }
        other => Ok(other),
    }
}

impl RunArgs {
    fn init_source(&self, objective: &dyn Objective) -> Result<InitSource> {
        let init = match (self.init, &self.points) {
            (Some(kind), _) => Some(kind),
            (None, Some(_)) => Some(InitArg::Inline),
            (None, None) => None,
        };
        match init {
            None => match &self.preset {
                Some(name) => {
                    for (flag, set) in [
                        ("--agents", self.agents.is_some()),
                        ("--seed", self.seed.is_some()),
                        ("--box", self.bounds.is_some()),
                    ] {
                        if set {
                            return Err(usage(flag, "only valid with --init"));
                        }
                    }
                    Ok(InitSource::Preset(name.clone()))
                }
                None => Err(usage(
                    "--init",
                    "choose inline (with --points) or random (with --seed)",
                )),
            },
            Some(InitArg::Inline) => {
                if self.seed.is_some() || self.bounds.is_some() {
                    return Err(usage(
                        "--seed",
                        "random-initialization flags conflict with inline points",
                    ));
                }
                let text = self
                    .points
                    .as_deref()
                    .ok_or_else(|| usage("--points", "required with --init inline"))?;
                let points = parse_points(text).map_err(|e| usage("--points", e))?;
                if points[0].dim() != objective.dimension() {
                    return Err(usage(
                        "--points",
                        format!(
                            "{} needs {}-dimensional points, got {}",
                            objective.name(),
                            objective.dimension(),
                            points[0].dim()
                        ),
                    ));
                }
                if let Some(m) = self.agents {
                    if m != points.len() {
                        return Err(usage(
                            "--agents",
                            format!("{m} agents but {} points", points.len()),
                        ));
                    }
                }
                Ok(InitSource::Inline(points))
            }
            Some(InitArg::Random) => {
                if self.points.is_some() {
                    return Err(usage("--points", "conflicts with --init random"));
                }
                let seed = self
                    .seed
                    .ok_or_else(|| usage("--seed", "required with --init random"))?;
                let agents = self.agents.unwrap_or(DEFAULT_RANDOM_AGENTS);
                if agents == 0 || agents > MAX_AGENTS {
                    return Err(usage(
                        "--agents",
                        format!("need between 1 and {MAX_AGENTS} agents, got {agents}"),
                    ));
                }
                let (lo, hi) = match self.bounds.as_deref() {
                    Some(&[lo, hi]) => (lo, hi),
                    Some(_) => return Err(usage("--box", "expects LO HI")),
                    None => DEFAULT_BOX,
                };
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(usage(
                        "--box",
                        format!("need finite LO < HI, got {lo} {hi}"),
                    ));
                }
                Ok(InitSource::Random {
                    agents,
                    seed,
                    lo,
                    hi,
                })
            }
        }
    }

    /// Validates flags and resolves them into an invocation.
    pub fn resolve(&self) -> Result<CliInvocation> {
        let (objective_name, base) = match (&self.preset, &self.objective) {
            (Some(name), _) => {
                let preset = preset_by_name(name)
                    .ok_or_else(|| usage("--preset", format!("unknown preset {name:?}")))?;
                (preset.objective.name().to_string(), Some(preset.protocol))
            }
            (None, Some(name)) => (name.clone(), None),
            (None, None) => {
                return Err(usage(
                    "--objective",
                    "either --preset or --objective is required",
                ))
            }
        };
        let objective = objectives::by_name(&objective_name).ok_or_else(|| {
            usage(
                "--objective",
                format!("unknown objective {objective_name:?}"),
            )
        })?;

        let init = self.init_source(objective.as_ref())?;
        let points = match &init {
            InitSource::Preset(_) => runner::preset_initial_points(),
            InitSource::Inline(points) => points.clone(),
            InitSource::Random {
                agents,
                seed,
                lo,
                hi,
            } => rng::uniform_points(*seed, *agents, objective.dimension(), *lo, *hi)?,
        };

        let mut config = match base {
            Some(cfg) => SolverConfig {
                initial_points: points,
                ..cfg
            },
            None => SolverConfig::new(points),
        };
        if let Some(b) = positive("--beta", self.beta)? {
            config.step_size = b;
        }
        if let Some(l) = self.lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(usage(
                    "--lambda",
                    format!("protocol factor must lie in [0, 1], got {l}"),
                ));
            }
            config.protocol_factor = l;
        }
        if let Some(x) = positive("--xi", self.xi)? {
            config.precision = x;
        }
        if let Some(n) = self.max_iter {
            if n == 0 {
                return Err(usage("--max-iter", "must be at least 1"));
            }
            config.max_iterations = n;
        }
        if let Some(mode) = self.step_mode {
            config.step_mode = match mode {
                StepModeArg::Fixed => StepMode::Fixed,
                StepModeArg::Backtracking => StepMode::Backtracking,
            };
        }
        let mut bt = BacktrackingParams {
            initial_step: positive("--bt-initial-step", self.bt_initial_step)?,
            ..BacktrackingParams::default()
        };
        if let Some(s) = self.bt_shrink {
            if !(s > 0.0 && s < 1.0) {
                return Err(usage("--bt-shrink", format!("must lie in (0, 1), got {s}")));
            }
            bt.shrink = s;
        }
        if let Some(c) = self.bt_armijo_c {
            if !(c > 0.0 && c < 1.0) {
                return Err(usage(
                    "--bt-armijo-c",
                    format!("must lie in (0, 1), got {c}"),
                ));
            }
            bt.armijo_c = c;
        }
        if let Some(h) = self.bt_max_halvings {
            if h == 0 {
                return Err(usage("--bt-max-halvings", "must be at least 1"));
            }
            bt.max_halvings = h;
        }
        config.backtracking = bt;
        if let Some(t) = self.stall_tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(usage(
                    "--stall-tol",
                    format!("must be non-negative, got {t}"),
                ));
            }
            config.stall_tolerance = Some(t);
        }
        config.validate()?;

        Ok(CliInvocation {
            objective: objective_name,
            init,
            config,
            compare: self.compare,
            trace: self.trace.clone(),
            summary: self.summary.clone(),
        })
    }
}

/// Parses `run ...` arguments (without the program name).
pub fn parse_invocation<I, T>(args: I) -> Result<CliInvocation>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("magd")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| Error::Config(e.render().to_string().trim_end().to_string()))?;
    match cli.command {
        Command::Run(args) => args.resolve(),
    }
}

impl CliInvocation {
    /// Arguments that parse back into an equal invocation.
    pub fn to_args(&self) -> Vec<String> {
        let c = &self.config;
        let mut args = vec!["run".to_string()];
        let mut push = |flag: &str, value: String| {
            args.push(flag.to_string());
            args.push(value);
        };
        match &self.init {
            InitSource::Preset(name) => push("--preset", name.clone()),
            InitSource::Inline(points) => {
                push("--objective", self.objective.clone());
                push("--init", "inline".into());
                push("--points", format_points(points));
            }
            InitSource::Random {
                agents,
                seed,
                lo,
                hi,
            } => {
                push("--objective", self.objective.clone());
                push("--init", "random".into());
                push("--agents", agents.to_string());
                push("--seed", seed.to_string());
                push("--box", lo.to_string());
                args.push(hi.to_string());
            }
        }
        let mut push = |flag: &str, value: String| {
            args.push(flag.to_string());
            args.push(value);
        };
        push("--beta", c.step_size.to_string());
        push("--lambda", c.protocol_factor.to_string());
        push("--xi", c.precision.to_string());
        push("--max-iter", c.max_iterations.to_string());
        push("--step-mode", c.step_mode.as_str().into());
        if let Some(a) = c.backtracking.initial_step {
            push("--bt-initial-step", a.to_string());
        }
        push("--bt-shrink", c.backtracking.shrink.to_string());
        push("--bt-armijo-c", c.backtracking.armijo_c.to_string());
        push("--bt-max-halvings", c.backtracking.max_halvings.to_string());
        if let Some(t) = c.stall_tolerance {
            push("--stall-tol", t.to_string());
        }
        if let Some(p) = &self.trace {
            push("--trace", p.display().to_string());
        }
        if let Some(p) = &self.summary {
            push("--summary", p.display().to_string());
        }
        if self.compare {
            args.push("--compare".into());
        }
        args
    }
}

/// Results of an executed invocation, labelled by case.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub objective: String,
    pub runs: Vec<(String, RunResult)>,
}

impl Outcome {
    pub fn diverged(&self) -> bool {
        self.runs
            .iter()
            .any(|(_, r)| r.stop_reason == StopReason::Diverged)
    }
}

/// Trace path for the no-protocol case in compare mode: `out.csv` becomes
/// `out.no_protocol.csv`.
pub fn companion_trace_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.no_protocol.{}", ext.to_string_lossy()),
        None => format!("{stem}.no_protocol"),
    };
    path.with_file_name(name)
}

/// Runs the invocation and writes the requested trace and summary files.
/// The summary goes to `stdout` when no summary path is set.
pub fn execute<W: Write>(inv: &CliInvocation, stdout: W) -> Result<Outcome> {
    let objective = objectives::by_name(&inv.objective).ok_or_else(|| {
        usage(
            "--objective",
            format!("unknown objective {:?}", inv.objective),
        )
    })?;
    let obj = objective.as_ref();
    let runs = if inv.compare {
        let off = inv.config.clone().with_protocol_factor(0.0);
        let (with, without) = std::thread::scope(|s| {
            let h = s.spawn(|| runner::run(&off, obj));
            let with = runner::run(&inv.config, obj);
            (with, h.join().expect("solver thread panicked"))
        });
        vec![
            ("protocol".to_string(), with?),
            ("no protocol".to_string(), without?),
        ]
    } else {
        vec![("protocol".to_string(), runner::run(&inv.config, obj)?)]
    };

    if let Some(path) = &inv.trace {
        write_trace_csv(&runs[0].1.trace, path)?;
        if let Some((_, r)) = runs.get(1) {
            write_trace_csv(&r.trace, &companion_trace_path(path))?;
        }
    }

    let outcome = Outcome {
        objective: inv.objective.clone(),
        runs,
    };
    let labelled: Vec<(&str, &RunResult)> =
        outcome.runs.iter().map(|(l, r)| (l.as_str(), r)).collect();
    match &inv.summary {
        Some(path) => {
            let mut buf = Vec::new();
            write_summary(&outcome.objective, &labelled, &mut buf).expect("writing to memory");
            fs::write(path, buf).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
        }
        None => {
            write_summary(&outcome.objective, &labelled, stdout).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?
        }
    }
    Ok(outcome)
}

fn summary_rows(r: &RunResult) -> Vec<(&'static str, String)> {
    let mut rows = vec![
        ("stop reason", r.stop_reason.to_string()),
        ("iterations", r.iterations().to_string()),
        ("best agent", (r.best_agent_index + 1).to_string()),
        ("x*", r.best_point.to_string()),
        ("f(x*)", format!("{:e}", r.best_value)),
        ("best-ever f", format!("{:e}", r.best_ever_value)),
        (
            "iterations to f <= 1e-6",
            r.iterations_to_reach(SUMMARY_THRESHOLD)
                .map_or_else(|| "not reached".to_string(), |k| k.to_string()),
        ),
    ];
    if let Some(d) = &r.divergence {
        let agent = d
            .agent
            .map_or_else(|| "unknown".to_string(), |a| (a + 1).to_string());
        rows.push(("failing agent", agent));
        rows.push(("last finite iteration", d.last_finite_iteration.to_string()));
    }
    rows
}

/// Human-readable report; side-by-side columns when more than one run is given.
pub fn write_summary<W: Write>(
    objective: &str,
    runs: &[(&str, &RunResult)],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "objective: {objective}")?;
    match runs {
        [] => Ok(()),
        [(_, r)] => {
            for (key, value) in summary_rows(r) {
                writeln!(out, "{key:<24}{value}")?;
            }
            Ok(())
        }
        _ => {
            let columns: Vec<Vec<(&str, String)>> =
                runs.iter().map(|(_, r)| summary_rows(r)).collect();
            let width = columns
                .iter()
                .flatten()
                .map(|(_, v)| v.len())
                .chain(runs.iter().map(|(l, _)| l.len()))
                .max()
                .unwrap_or(0)
                + 2;
            write!(out, "{:<24}", "")?;
            for (label, _) in runs {
                write!(out, "{label:<width$}")?;
            }
            writeln!(out)?;
            let keys: Vec<&str> = columns
                .iter()
                .max_by_key(|c| c.len())
                .map(|c| c.iter().map(|(k, _)| *k).collect())
                .unwrap_or_default();
            for key in keys {
                write!(out, "{key:<24}")?;
                for col in &columns {
                    let value = col
                        .iter()
                        .find(|(k, _)| *k == key)
                        .map_or("-", |(_, v)| v.as_str());
                    write!(out, "{value:<width$}")?;
                }
                writeln!(out)?;
            }
            Ok(())
        }
    }
}
