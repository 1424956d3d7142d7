//! Command-line front end. Exit codes: 0 success, 1 usage or input error,
//! 2 failed check or contradiction.

pub mod builtin;
pub mod csv;
pub mod document;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{classify_limit, profile_grid, sample_trace, Grid, Quantity, TraceConfig};
use crate::discriminance::SamplingPlan;
use builtin::{render_example, run_example, ExampleName};
use document::{to_json, MatrixDocument};
use report::{render_text, AnalysisDocument};
use verify::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "torsionstab", version, about = "Curvature and torsion asymptotics as stability tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report for a matrix document.
    Analyze {
        matrix: PathBuf,
        #[command(flatten)]
        trace: TraceArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Restrict to these quantities (tau, kappa_<i>); repeatable.
        #[arg(long, value_parser = parse_quantity)]
        quantity: Vec<Quantity>,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of volumes, curvatures and torsion along one trajectory.
    Trace {
        matrix: PathBuf,
        /// Initial condition, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        r0: Vec<f64>,
        /// Also print this quantity's limit label to stderr.
        #[arg(long, value_parser = parse_quantity)]
        quantity: Option<Quantity>,
        /// Accept zero coordinates in r0.
        #[arg(long)]
        allow_degenerate: bool,
        #[command(flatten)]
        trace: TraceArgs,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in reference system against its expected behaviour.
    Examples {
        #[arg(value_enum)]
        name: ExampleName,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded batch checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, env = "TORSIONSTAB_SEED", default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid spacing; a linear grid may start at t = 0.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
}

impl TraceArgs {
    pub fn config(&self) -> TraceConfig {
        let d = TraceConfig::default();
        TraceConfig {
            t_start: self.t_start.unwrap_or(d.t_start),
            t_end: self.t_end.unwrap_or(d.t_end),
            num_points: self.points.unwrap_or(d.num_points),
            grid: self.grid.unwrap_or(d.grid),
            ..d
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[arg(long, env = "TORSIONSTAB_SEED", default_value_t = 42)]
    pub seed: u64,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    match s {
        "geometric" => Ok(Grid::Geometric),
        "linear" => Ok(Grid::Linear),
        _ => Err(format!("unknown grid `{s}`; use geometric or linear")),
    }
}

fn parse_quantity(s: &str) -> Result<Quantity, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or usage: exit 1.
    Input(String),
    /// A check failed or the verdicts contradict: exit 2.
    Check(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_document(path: &Path) -> Result<MatrixDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    MatrixDocument::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn plan(trace: TraceConfig, sampling: &SamplingArgs, quantities: Vec<Quantity>) -> Result<SamplingPlan, Failure> {
    trace.validate()?;
    if sampling.samples == 0 {
        return Err(Failure::Input("--samples must be at least 1".into()));
    }
    Ok(SamplingPlan {
        trace,
        samples: sampling.samples,
        seed: sampling.seed,
        quantities,
    })
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            matrix,
            trace,
            sampling,
            quantity,
            out,
        } => {
            let doc = read_document(&matrix)?;
            let plan = plan(trace.config(), &sampling, quantity)?;
            let r = crate::discriminance::reconcile(&doc.matrix(), &plan)?;
            let label = doc.label.as_deref();
            write!(stdout, "{}", render_text(label, doc.n, &plan, &r))?;
            if let Some(path) = out {
                let json = to_json(&AnalysisDocument {
                    label,
                    n: doc.n,
                    plan: &plan,
                    report: &r,
                });
                write_out(&path, &json)?;
            }
            if !r.consistent {
                return Err(Failure::Check(format!(
                    "geometric verdict {:?} contradicts oracle {:?}",
                    r.geometric.verdict, r.oracle.verdict
                )));
            }
        }
        Command::Trace {
            matrix,
            r0,
            quantity,
            allow_degenerate,
            trace,
            out,
        } => {
            let doc = read_document(&matrix)?;
            if r0.len() != doc.n {
                return Err(Failure::Input(format!("--r0 has {} coordinates, matrix is {n} x {n}", r0.len(), n = doc.n)));
            }
            if !allow_degenerate && r0.contains(&0.0) {
                return Err(Failure::Input("--r0 has a zero coordinate; pass --allow-degenerate to accept it".into()));
            }
            let cfg = trace.config();
            let a = doc.matrix();
            let rows = profile_grid(&a, &r0, &cfg)?;
            let mut buf = Vec::new();
            csv::write_trace(&mut buf, doc.n, &rows)?;
            match out {
                Some(path) => write_out(&path, &String::from_utf8_lossy(&buf))?,
                None => stdout.write_all(&buf)?,
            }
            if let Some(q) = quantity {
                let class = classify_limit(&sample_trace(&a, &r0, q, &cfg)?, &cfg)?;
                eprintln!("{q}: {}", class.label);
            }
        }
        Command::Examples { name, sampling, out } => {
            let plan = plan(TraceConfig::default(), &sampling, Vec::new())?;
            let run = run_example(name, &plan)?;
            write!(stdout, "{}", render_example(&run))?;
            if let Some(path) = out {
                write_out(&path, &to_json(&run))?;
            }
            if !run.passed() {
                return Err(Failure::Check(format!("{name:?}: some checks failed")));
            }
        }
        Command::Verify { suite, seed } => {
            let outcome = run_suite(suite, seed)?;
            write!(stdout, "{}", outcome.render())?;
            if outcome.failed() > 0 {
                return Err(Failure::Check(format!("{} cases failed", outcome.failed())));
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the command, and maps the outcome to an exit code.
pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(2)
        }
    }
}
