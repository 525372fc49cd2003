use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hitset_core::harness::{
    gen_instance, run_experiment, verify_instance, BodyKind, GenSpec, Instance, Kind, RunOptions, Selector,
    Style,
};
use hitset_core::oracle::{exact_opt, greedy, Budget, IncidenceMatrix};
use hitset_core::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hitset", version, about = "Online hitting sets: generate, replay, verify")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Replay an instance with an online algorithm and write a CSV report.
    Run(RunArgs),
    /// Check that a hit list meets every object.
    Verify(VerifyArgs),
    /// Offline optimum or greedy hitting set.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Lattice size N for bottomless, coordinate bound for separated disks, M otherwise.
    #[arg(long)]
    cap: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// uniform, clustered or adversarial-nested.
    #[arg(long, default_value = "uniform")]
    generator: String,
    /// triangle, square, 64-gon or random<k> (homothets only).
    #[arg(long, default_value = "triangle")]
    body: String,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    alg: String,
    #[arg(short = 'i', long)]
    input: PathBuf,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    #[arg(long)]
    skip_unhittable: bool,
    /// Also write the final hit list as a JSON array.
    #[arg(long)]
    hits_out: Option<PathBuf>,
    /// Leave the runtime column empty so reports diff cleanly.
    #[arg(long)]
    no_time: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short = 'i', long)]
    input: PathBuf,
    #[arg(long)]
    hits: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Mode {
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    greedy: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(short = 'i', long)]
    input: PathBuf,
    #[command(flatten)]
    mode: Mode,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn load(path: &PathBuf) -> Result<Instance, Failure> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::from_json(&s)?)
}

fn emit(out: &Option<PathBuf>, body: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body).context("writing stdout")?;
        }
    }
    Ok(())
}

fn hits_json(h: &[usize]) -> Vec<u8> {
    let mut s = serde_json::to_vec(h).expect("indices serialize");
    s.push(b'\n');
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Gen(a) => {
            let mut spec = GenSpec::new(a.kind.parse::<Kind>()?, a.n, a.m, a.cap, a.seed);
            spec.style = a.generator.parse::<Style>()?;
            spec.body = a.body.parse::<BodyKind>()?;
            let inst = gen_instance(&spec)?;
            emit(&a.output, inst.to_json().as_bytes())
        }
        Cmd::Run(a) => {
            let inst = load(&a.input)?;
            let sel = a.alg.parse::<Selector>()?;
            let opts = RunOptions { skip_unhittable: a.skip_unhittable, ..Default::default() };
            let rep = run_experiment(&inst, sel, opts)?;
            let mut csv = Vec::new();
            rep.write_csv(&mut csv, !a.no_time)?;
            emit(&a.output, &csv)?;
            if let Some(p) = &a.hits_out {
                fs::write(p, hits_json(&rep.hits)).with_context(|| format!("writing {}", p.display()))?;
            }
            for k in &rep.skipped {
                eprintln!("skipped unhittable object {k}");
            }
            eprintln!(
                "{}: |H|={} |OPT|={} ({:?}) ratio={:.3} ceiling={:.1} fallbacks={}",
                rep.instance, rep.hits.len(), rep.opt, rep.opt_kind, rep.ratio, rep.ceiling, rep.fallbacks
            );
            Ok(())
        }
        Cmd::Verify(a) => {
            let inst = load(&a.input)?;
            let s = fs::read_to_string(&a.hits).with_context(|| format!("reading {}", a.hits.display()))?;
            let hits: Vec<usize> =
                serde_json::from_str(&s).map_err(|e| Error::InvalidInput(format!("hits JSON: {e}")))?;
            if let Some(p) = hits.iter().find(|p| **p >= inst.points.len()) {
                return Err(Error::InvalidInput(format!("hit index {p} out of range")).into());
            }
            verify_instance(&inst, &hits).map_err(|index| Error::Verification { index })?;
            println!("ok: {} objects hit by {} points", inst.objects.len(), hits.len());
            Ok(())
        }
        Cmd::Oracle(a) => {
            let inst = load(&a.input)?;
            let rows: Vec<Vec<usize>> = inst.traces()?.into_iter().filter(|t| !t.is_empty()).collect();
            let hits = if a.mode.exact {
                exact_opt(&IncidenceMatrix::new(inst.points.len(), rows)?, Budget::default())?
            } else {
                greedy(&IncidenceMatrix::new(inst.points.len(), rows)?)
            };
            emit(&a.output, &hits_json(&hits))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Verification { .. } => 2,
                Error::BudgetExceeded(_) => 3,
                Error::Io(_) => 1,
                _ => 4,
            })
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
