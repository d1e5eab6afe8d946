//! `pbb`: run step-size experiments and write CSV results.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pbb::analysis::{lemma1_sweep, simulate_dynamics, write_sweep_csv, EpsState, MPolicy, DEFAULT_HORIZON};
use pbb::bench::{
    performance_profile, read_records_csv, run_suite, suite_metadata, write_metadata, write_profile_csv,
    write_records_csv, Metric, SuiteProblem, SuiteSpec,
};
use pbb::exec::Execution;
use pbb::problems::core_functions;
use pbb::stepsize::{RuleConfig, RuleName};
use pbb::Error;

const OUT_DIR_VAR: &str = "PBB_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "pbb", version, about = "Parameterized Barzilai-Borwein experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random quadratics with block spectra.
    Quad(QuadArgs),
    /// Tridiagonal boundary-value quadratics.
    Bvp(BvpArgs),
    /// Two-dimensional Rosenbrock, stopped by distance to (1, 1).
    Rosenbrock(RosenbrockArgs),
    /// Registered nonquadratic test functions.
    Nonquad(NonquadArgs),
    /// Gradient-ratio dynamics on diag(lambda, 1).
    Dynamics(DynamicsArgs),
    /// Performance profiles from a records CSV.
    Profile(ProfileArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Output CSV; defaults to $PBB_OUT_DIR/<command>.csv, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RuleArgs {
    /// Comma-separated rules: bb1, bb2, pbb, abb, abbmin, abbbon, atc, tbb.
    #[arg(long, value_delimiter = ',', required = true)]
    rules: Vec<String>,
    /// Fixed interpolation parameter for pbb instead of the adaptive one.
    #[arg(long)]
    pbb_m: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    cycle: Option<usize>,
    #[arg(long)]
    q: Option<u32>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    max_feval: Option<usize>,
    /// Run cells one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct QuadArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1e3, 1e4])]
    kappa: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2, 3, 4, 5, 6, 7])]
    dist: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-6, 1e-8, 1e-10])]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[command(flatten)]
    rules: RuleArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct BvpArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [500usize, 1000, 2000, 3000, 5000])]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-6, 1e-8, 1e-10])]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[command(flatten)]
    rules: RuleArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct RosenbrockArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1e2, 1e3, 1e4, 1e5])]
    c: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-4, 1e-8])]
    eps: Vec<f64>,
    #[command(flatten)]
    rules: RuleArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct NonquadArgs {
    /// Comma-separated function names; defaults to the twelve core functions.
    #[arg(long, value_delimiter = ',')]
    functions: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-6])]
    eps: Vec<f64>,
    #[command(flatten)]
    rules: RuleArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    /// One value for a trajectory; several for a sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    /// Fixed interpolation parameters in (0, 1].
    #[arg(long, value_delimiter = ',')]
    m: Vec<f64>,
    /// Use the adaptive interpolation parameter.
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 8)]
    q: u32,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    steps: usize,
    /// Sweep over this many seeded starts with both ratios in (1, 100).
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "iterations")]
    metric: String,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidInput(_) | Error::UnknownFunction { .. } | Error::NoRealRoots { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl RuleArgs {
    fn configs(&self, bvp: bool) -> Result<Vec<RuleConfig>, Failure> {
        self.rules
            .iter()
            .map(|name| {
                let name: RuleName = name.trim().parse()?;
                let mut r = RuleConfig::new(name);
                if bvp && name == RuleName::Atc {
                    r.cycle = 8;
                }
                if name == RuleName::Pbb {
                    r.m = self.pbb_m;
                }
                r.eta = self.eta.unwrap_or(r.eta);
                r.xi = self.xi.unwrap_or(r.xi);
                r.window = self.window.unwrap_or(r.window);
                r.cycle = self.cycle.unwrap_or(r.cycle);
                r.q = self.q.unwrap_or(r.q);
                r.validate()?;
                Ok(r)
            })
            .collect()
    }
}

impl RunArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn apply(&self, spec: &mut SuiteSpec) {
        if let Some(v) = self.max_iter {
            spec.solver.max_iter = v;
        }
        if let Some(v) = self.max_feval {
            spec.solver.max_feval = v;
        }
    }
}

fn out_path(output: &Output, command: &str) -> Option<PathBuf> {
    output
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_VAR).map(|d| Path::new(&d).join(format!("{command}.csv"))))
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn meta_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn run_suite_command(command: &str, spec: SuiteSpec, run: &RunArgs, output: &Output) -> Result<(), Failure> {
    let mut spec = spec;
    run.apply(&mut spec);
    let exec = run.execution();
    let records = run_suite(&spec, run.seed, exec)?;
    let path = out_path(output, command);
    write_records_csv(&records, open_out(&path)?)?;
    if let Some(p) = &path {
        let mut meta = suite_metadata(&spec, run.seed, exec);
        meta.insert(0, ("command", command.to_string()));
        write_metadata(File::create(meta_path(p))?, &meta)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Quad(a) => {
            let mut problems = Vec::new();
            for &d in &a.dist {
                for &kappa in &a.kappa {
                    problems.push(SuiteProblem::Quadratic { distribution: d, kappa, n: a.n });
                }
            }
            let spec = SuiteSpec::new(problems, a.rules.configs(false)?, a.eps.clone(), a.reps);
            run_suite_command("quad", spec, &a.run, &a.output)
        }
        Command::Bvp(a) => {
            let problems = a.n.iter().map(|&n| SuiteProblem::Bvp { n }).collect();
            let spec = SuiteSpec::new(problems, a.rules.configs(true)?, a.eps.clone(), a.reps);
            run_suite_command("bvp", spec, &a.run, &a.output)
        }
        Command::Rosenbrock(a) => {
            let problems = a.c.iter().map(|&c| SuiteProblem::Rosenbrock { c }).collect();
            let spec = SuiteSpec::new(problems, a.rules.configs(false)?, a.eps.clone(), 1);
            run_suite_command("rosenbrock", spec, &a.run, &a.output)
        }
        Command::Nonquad(a) => {
            let names = if a.functions.is_empty() { core_functions() } else { a.functions.clone() };
            let problems = names.into_iter().map(|name| SuiteProblem::Function { name, n: None }).collect();
            let spec = SuiteSpec::new(problems, a.rules.configs(false)?, a.eps.clone(), 1);
            run_suite_command("nonquad", spec, &a.run, &a.output)
        }
        Command::Dynamics(a) => dynamics(a),
        Command::Profile(a) => {
            let metric: Metric = a.metric.parse()?;
            let input = File::open(&a.input).map_err(|e| Failure::Config(format!("{}: {e}", a.input.display())))?;
            let records = read_records_csv(input)?;
            let curves = performance_profile(&records, metric)?;
            write_profile_csv(&curves, open_out(&out_path(&a.output, "profile"))?)?;
            Ok(())
        }
    }
}

fn dynamics(a: DynamicsArgs) -> Result<(), Failure> {
    let mut policies: Vec<MPolicy> = a.m.iter().map(|&m| MPolicy::Fixed(m)).collect();
    if a.adaptive {
        policies.push(MPolicy::Adaptive { q: a.q });
    }
    if policies.is_empty() {
        return Err(Failure::Config("give --m or --adaptive".into()));
    }
    let path = out_path(&a.output, "dynamics");
    match a.starts {
        Some(starts) => {
            let exec = if a.sequential { Execution::Sequential } else { Execution::default() };
            let rows = lemma1_sweep(&a.lambda, &policies, starts, (1.0, 100.0), a.seed, a.steps, exec)?;
            write_sweep_csv(&rows, open_out(&path)?)?;
        }
        None => {
            let (Some(e0), Some(e1)) = (a.eps0, a.eps1) else {
                return Err(Failure::Config("a trajectory needs --eps0 and --eps1 (or use --starts)".into()));
            };
            if a.lambda.len() != 1 || policies.len() != 1 {
                return Err(Failure::Config("a trajectory takes one --lambda and one policy".into()));
            }
            let run = simulate_dynamics(EpsState::new(e0, e1, a.lambda[0], policies[0])?, a.steps)?;
            run.write_csv(open_out(&path)?)?;
        }
    }
    Ok(())
}

/// Pulls `--config FILE` out of `args` and appends `--key value` for every
/// `key=value` line whose flag is not already present.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut out = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| Failure::Config("--config needs a file".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            out.push(a);
        }
    }
    let Some(path) = config else { return Ok(out) };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Config(format!("{path}: {e}")))?;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("{path}: expected key=value, got `{line}`")))?;
        let flag = format!("--{}", k.trim());
        let present = out.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match v.trim() {
            "true" => out.push(flag),
            "false" => {}
            v => {
                out.push(flag);
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(Failure::Config(m) | Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
