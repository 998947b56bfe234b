//! Command dispatch for the `ultrastar` binary.
//!
//! [`run`] never touches the process streams, so tests can drive it
//! directly and compare bytes.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ultrastar::generate::GeneratorMode;
use ultrastar::io::to_json;
use ultrastar::star::StarFile;
use ultrastar::*;

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ultrastar", version, about = "Finite ultrametric spaces and labeled star graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the metric and strong triangle inequalities.
    Validate { file: PathBuf },
    /// Decide star generation; exit 0 with the star or 1 with a forbidden quad.
    Diagnose {
        file: PathBuf,
        /// Print DOT instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Build the labeled star of a space, or the metric of a star file.
    Star {
        #[arg(required_unless_present = "from_star", conflicts_with = "from_star")]
        file: Option<PathBuf>,
        #[arg(long)]
        center: Option<String>,
        #[arg(long)]
        dot: bool,
        #[arg(long, value_name = "STAR_FILE")]
        from_star: Option<PathBuf>,
    },
    /// First four-point subspace with the 4-cycle as diametrical graph.
    Scan {
        file: PathBuf,
        #[arg(long)]
        parallel: bool,
    },
    /// Subtract (or with --inverse add) delta on every off-diagonal entry.
    Shift {
        file: PathBuf,
        #[arg(long)]
        delta: Rational,
        #[arg(long)]
        inverse: bool,
    },
    /// Search for a weak similarity from A onto B.
    Weaksim { a: PathBuf, b: PathBuf },
    /// Build a subspace of (R+, d+) or embed a space into it.
    Dplus {
        #[arg(long, value_delimiter = ',', required_unless_present = "embed", conflicts_with = "embed")]
        values: Vec<Rational>,
        #[arg(long, value_name = "FILE")]
        embed: Option<PathBuf>,
    },
    /// Emit generated ultrametric spaces as a JSON array.
    Gen(GenArgs),
    /// Run a conjecture campaign over generated spaces.
    Conjecture {
        #[arg(long)]
        which: String,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    alphabet: Vec<Rational>,
    #[arg(long, default_value = "dendrogram")]
    mode: GeneratorMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    count: Option<u64>,
    /// Lift the exhaustive-mode size caps.
    #[arg(long)]
    unbounded: bool,
}

impl GenArgs {
    fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            n: self.n,
            alphabet: self.alphabet.clone(),
            mode: self.mode,
            seed: self.seed,
            count: self.count,
            unbounded: self.unbounded,
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

struct Reply {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Reply {
    fn new(code: i32, stdout: String) -> Self {
        Reply { code, stdout, stderr: String::new() }
    }

    fn holds(ok: bool, stdout: String) -> Self {
        Reply::new(if ok { EXIT_HOLDS } else { EXIT_FAILS }, stdout)
    }
}

fn load(path: &PathBuf) -> Result<FiniteMetricSpace> {
    parse_space_file(path)
}

fn load_star(path: &PathBuf) -> Result<LabeledStarGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file: StarFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    LabeledStarGraph::try_from(file)
}

fn dispatch(command: Command) -> Result<Reply> {
    match command {
        Command::Validate { file } => {
            let diag = load(&file)?.validate();
            Ok(Reply::holds(diag.is_ultrametric, json(&diag)))
        }
        Command::Diagnose { file, dot } => {
            let space = load(&file)?;
            let report = diagnose(&space)?;
            let ok = report.verdict == Verdict::Us;
            if !dot {
                return Ok(Reply::holds(ok, json(&report)));
            }
            let text = match (&report.star, &report.forbidden) {
                (Some(star), _) => star.to_dot("star"),
                (None, Some(f)) => diametrical_graph(&space.restrict(&f.quad)?)?.to_dot("forbidden"),
                (None, None) => unreachable!("diagnose returns a witness"),
            };
            Ok(Reply::holds(ok, text))
        }
        Command::Star { file, center, dot, from_star } => {
            if let Some(path) = from_star {
                let star = load_star(&path)?;
                let out = if dot { star.to_dot("star") } else { json(&star.star_metric()?) };
                return Ok(Reply::new(EXIT_HOLDS, out));
            }
            let space = load(file.as_ref().expect("clap enforces a file"))?;
            let center = match center {
                Some(c) => c,
                None => match find_center(&space)? {
                    Some(w) => w.center,
                    None => {
                        let witness = forbidden_scan(&space)?;
                        let mut reply = Reply::new(EXIT_FAILS, json(&witness));
                        reply.stderr = "no center: the space is not generated by a labeled star".into();
                        return Ok(reply);
                    }
                },
            };
            match star_from_center(&space, &center) {
                Ok(star) => Ok(Reply::new(EXIT_HOLDS, if dot { star.to_dot("star") } else { json(&star) })),
                Err(e @ Error::NotACenter { .. }) => {
                    let mut reply = Reply::new(EXIT_FAILS, json(&serde_json::Value::Null));
                    reply.stderr = e.to_string();
                    Ok(reply)
                }
                Err(e) => Err(e),
            }
        }
        Command::Scan { file, parallel } => {
            let space = load(&file)?;
            let w = if parallel { forbidden_scan_parallel(&space)? } else { forbidden_scan(&space)? };
            Ok(Reply::holds(w.is_none(), json(&w)))
        }
        Command::Shift { file, delta, inverse } => {
            let space = load(&file)?;
            let out = if inverse { unshift(&space, &delta)? } else { shift(&space, &delta)? };
            Ok(Reply::new(EXIT_HOLDS, json(&out)))
        }
        Command::Weaksim { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let w = weakly_similar(&a, &b)?;
            Ok(Reply::holds(w.is_some(), json(&w)))
        }
        Command::Dplus { values, embed } => match embed {
            Some(path) => {
                let e = embeds_in_dplus(&load(&path)?);
                Ok(Reply::holds(e.is_some(), json(&e)))
            }
            None => Ok(Reply::new(EXIT_HOLDS, json(&dplus_space(&values)?))),
        },
        Command::Gen(args) => {
            let spec = args.spec();
            let spaces: Vec<FiniteMetricSpace> = match spec.mode {
                GeneratorMode::Exhaustive => enumerate_ultrametrics(&spec)?.collect(),
                GeneratorMode::Dendrogram => (0..spec.count.unwrap_or(1))
                    .map(|i| sample_dendrogram_at(&spec, i))
                    .collect::<Result<_>>()?,
            };
            Ok(Reply::new(EXIT_HOLDS, json(&spaces)))
        }
        Command::Conjecture { which, gen, jobs } => {
            let which: ConjectureId = which.parse()?;
            let report = run_campaign(&gen.spec(), which, jobs)?;
            let mut reply = Reply::holds(report.status != CampaignStatus::Counterexample, json(&report));
            reply.stderr = format!(
                "{} instances in {:.3}s",
                report.instances_tested,
                report.wall_time.as_secs_f64()
            );
            Ok(reply)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_HOLDS, stdout: e.to_string(), stderr: String::new() }
                }
                _ => {
                    let rendered = e.to_string();
                    let line = rendered.lines().next().unwrap_or("usage error").to_string();
                    Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: line }
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => Outcome { code: r.code, stdout: r.stdout, stderr: r.stderr },
        Err(e) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}") },
    }
}

/// Writes a space as a JSON space file.
pub fn space_json(space: &FiniteMetricSpace) -> String {
    let mut s = to_json(space);
    s.push('\n');
    s
}
