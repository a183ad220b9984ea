//! `mteq`: generate instances, solve them, and run seeded benchmarks.
//!
//! Exit codes: 0 on success (for `bench`, every trial produced a solver
//! report), 1 on runtime failures, 2 on invalid configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mteq::bench::{
    run_bench, summary_csv_string, write_json_report, write_raw_csv, write_summary_csv, BenchConfig,
    SolverSelection,
};
use mteq::io::{load_instance, save_instance};
use mteq::problems::{generate, BMode, Problem, ProblemSpec};
use mteq::solvers::{certify_solution, solve, SolverConfig, SolverKind};
use mteq::verify::verify_instances;
use mteq::{BClass, MteqError};

#[derive(Parser)]
#[command(name = "mteq", version, about = "Newton-type solvers for M-tensor equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one seeded instance as <out>.mtns, <out>.vec and <out>.hdr.
    Generate(GenerateArgs),
    /// Solve an instance read from files.
    Solve(SolveArgs),
    /// Run seeded trials and write CSV/JSON reports.
    Bench(BenchArgs),
    /// Check identities, certificates and trace invariants on seeded instances.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Problem family, 1 to 5.
    #[arg(long)]
    problem: u8,
    /// Tensor order m.
    #[arg(long)]
    order: usize,
    /// Dimension n.
    #[arg(long)]
    dim: usize,
    /// Right-hand side: positive, or zeros (draws above 0.6 set to 0).
    #[arg(long, default_value = "positive")]
    b_mode: String,
    /// Left boundary value of problem 3.
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    /// Right boundary value of problem 3.
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
}

impl ProblemArgs {
    fn spec(&self) -> Result<ProblemSpec, MteqError> {
        let spec = ProblemSpec::new(Problem::try_from(self.problem)?, self.order, self.dim)
            .with_b_mode(self.b_mode.parse::<BMode>()?)
            .with_boundary(self.c0, self.c1);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Clone)]
struct StopArgs {
    /// Stop when the scaled residual is at most this.
    #[arg(long, default_value_t = mteq::solvers::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = mteq::solvers::DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream index; trial j of a benchmark uses stream j.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Output path without extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance path without extension; reads <input>.mtns and <input>.vec,
    /// and <input>.hdr when present.
    #[arg(long)]
    input: PathBuf,
    /// inexact, regularized or both; defaults to inexact when b > 0 and
    /// regularized otherwise.
    #[arg(long)]
    solver: Option<String>,
    #[command(flatten)]
    stop: StopArgs,
    /// Write the full reports as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// inexact, regularized or both.
    #[arg(long, default_value = "both")]
    solver: String,
    #[command(flatten)]
    stop: StopArgs,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for raw.csv, summary.csv and report.json; without it the
    /// summary CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random sample points per instance.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Write the check results as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<MteqError> for Failure {
    fn from(e: MteqError) -> Self {
        match e {
            MteqError::Io(_) | MteqError::Json(_) | MteqError::Csv(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn runtime(e: MteqError) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn stop_configs(stop: &StopArgs) -> Result<(SolverConfig, SolverConfig), Failure> {
    Ok((
        SolverConfig::inexact().with_tol(stop.tol)?.with_max_iter(stop.max_iter),
        SolverConfig::regularized().with_tol(stop.tol)?.with_max_iter(stop.max_iter),
    ))
}

fn cmd_generate(a: GenerateArgs) -> Result<bool, Failure> {
    let spec = a.problem.spec()?;
    let eq = generate(&spec, a.seed, a.trial)?;
    save_instance(&eq, &a.out).map_err(runtime)?;
    println!(
        "wrote problem {} (m={}, n={}, b={}) to {}.{{mtns,vec,hdr}}",
        spec.problem,
        eq.order(),
        eq.dim(),
        eq.b_class().as_str(),
        a.out.display()
    );
    Ok(true)
}

fn cmd_solve(a: SolveArgs) -> Result<bool, Failure> {
    let (inexact, regularized) = stop_configs(&a.stop)?;
    let eq = load_instance(&a.input)?;
    let selection = match &a.solver {
        Some(s) => s.parse::<SolverSelection>()?,
        None if eq.b_class() == BClass::StrictlyPositive => SolverSelection::Inexact,
        None => SolverSelection::Regularized,
    };
    let mut reports = Vec::new();
    for &kind in selection.kinds() {
        let cfg = match kind {
            SolverKind::Inexact => &inexact,
            SolverKind::Regularized => &regularized,
        };
        let report = solve(kind, &eq, cfg).map_err(runtime)?;
        println!(
            "{kind}: {} after {} iterations, residual {}, {:.5} ms",
            report.status,
            report.iterations,
            mteq::bench::format_sci(report.final_residual()),
            report.time_ms
        );
        if let Some(msg) = &report.message {
            println!("  {msg}");
        }
        let cert = (!report.x.is_empty()).then(|| certify_solution(&eq, &report.x));
        if let Some(c) = &cert {
            println!("  certified: {}", c.certified);
        }
        let xs: Vec<String> = report.x.iter().map(|v| format!("{v:.12e}")).collect();
        println!("  x = [{}]", xs.join(", "));
        reports.push(serde_json::json!({ "report": report, "certificate": cert }));
    }
    if let Some(out) = &a.out {
        let text = serde_json::to_string_pretty(&reports).map_err(|e| Failure::Runtime(e.to_string()))?;
        fs::write(out, text).map_err(|e| runtime(e.into()))?;
    }
    Ok(true)
}

fn cmd_bench(a: BenchArgs) -> Result<bool, Failure> {
    let (inexact, regularized) = stop_configs(&a.stop)?;
    let mut cfg = BenchConfig::new(a.problem.spec()?, a.solver.parse()?)
        .with_trials(a.trials)
        .with_seed(a.seed)
        .with_jobs(a.jobs);
    cfg.inexact = inexact;
    cfg.regularized = regularized;
    cfg.validate()?;
    let run = run_bench(&cfg).map_err(runtime)?;

    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| runtime(e.into()))?;
            write_outputs(&cfg, &run, dir).map_err(runtime)?;
            eprintln!("wrote raw.csv, summary.csv and report.json to {}", dir.display());
        }
        None => print!("{}", summary_csv_string(&run.summary).map_err(runtime)?),
    }
    if let Some(r) = &run.summary.ratios {
        let show = |v: Option<f64>| v.map_or("NA".to_string(), |v| format!("{v:.3}"));
        eprintln!(
            "ratios {}/{}: iterations {}, time {}",
            r.numerator,
            r.denominator,
            show(r.ir),
            show(r.tr)
        );
    }
    let violations: usize = run.summary.solvers.iter().map(|s| s.invariant_violations).sum();
    if violations > 0 {
        eprintln!("warning: {violations} trace invariant violations");
    }
    Ok(run.all_completed())
}

fn write_outputs(cfg: &BenchConfig, run: &mteq::bench::BenchRun, dir: &Path) -> mteq::Result<()> {
    write_raw_csv(cfg, &run.records, &dir.join("raw.csv"))?;
    write_summary_csv(&run.summary, &dir.join("summary.csv"))?;
    write_json_report(cfg, run, &dir.join("report.json"))
}

fn cmd_verify(a: VerifyArgs) -> Result<bool, Failure> {
    let spec = a.problem.spec()?;
    if a.trials == 0 {
        return Err(Failure::Config("trials must be at least 1".into()));
    }
    let report = verify_instances(&spec, a.trials, a.seed, a.points).map_err(runtime)?;
    for c in &report.checks {
        println!(
            "{} {} ({}/{} ok{})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.samples - c.failures,
            c.samples,
            c.first_failure
                .as_ref()
                .map_or(String::new(), |f| format!("; first failure: {f}"))
        );
    }
    if let Some(out) = &a.out {
        let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
        fs::write(out, text).map_err(|e| runtime(e.into()))?;
    }
    Ok(report.passed())
}
