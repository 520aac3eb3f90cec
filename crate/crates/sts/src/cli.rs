//! Command implementations. Exit codes: 0 success, 1 infeasible or rejected
//! output, 2 malformed input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sts_core::baselines::OracleCaps;
use sts_core::containers::{EnumCaps, Pool};
use sts_core::milp::dump_milp;
use sts_core::model::{classify_jobs, round_instance, stretch_to_rounded, Eps};
use sts_core::nice::to_nice;
use sts_core::rational::one;
use sts_core::rounding::MachinePlan;
use sts_core::schedule::check_time_constraint;
use sts_core::scheme::{eptas_traced, SchemeCaps, Trace};
use sts_core::Instance;

use crate::bench::{run_algo, run_bench, validate, write_csv, Algo, BenchConfig};
use crate::deadline::Deadline;
use crate::gen::{generate, GenParams, SizeDist};
use crate::io::{format_rational, parse_rational, read_instance, read_schedule, write_instance, write_schedule};

#[derive(Debug, Parser)]
#[command(name = "sts", version, about = "Makespan scheduling where every unit window holds at most B jobs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print the schedule as JSON.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Validate { instance: PathBuf, schedule: PathBuf },
    /// Round a feasible schedule and make it nice.
    TransformNice(NiceArgs),
    /// Run the algorithms on seeded random instances and emit CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CapsArgs {
    /// Epsilon as 1/k with k >= 4; overrides the instance file.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long, default_value_t = EnumCaps::default().max_containers)]
    pub caps_containers: usize,
    #[arg(long, default_value_t = EnumCaps::default().max_configurations)]
    pub caps_configurations: usize,
    /// Search nodes for container enumeration.
    #[arg(long, default_value_t = EnumCaps::default().max_nodes)]
    pub caps_enum_nodes: usize,
    /// Branch-and-bound nodes per guess (0 = unlimited).
    #[arg(long, default_value_t = 200_000)]
    pub caps_milp_nodes: u64,
    #[arg(long, default_value_t = OracleCaps::default().max_jobs)]
    pub caps_oracle_jobs: usize,
    #[arg(long, default_value_t = OracleCaps::default().max_machines)]
    pub caps_oracle_machines: usize,
    /// Wall-clock limit in seconds for the whole command.
    #[arg(long)]
    pub caps_time: Option<f64>,
}

impl CapsArgs {
    fn scheme(&self) -> SchemeCaps {
        SchemeCaps {
            enumeration: EnumCaps {
                max_containers: self.caps_containers,
                max_configurations: self.caps_configurations,
                max_nodes: self.caps_enum_nodes,
            },
            milp_nodes: (self.caps_milp_nodes > 0).then_some(self.caps_milp_nodes),
        }
    }

    fn oracle(&self) -> OracleCaps {
        OracleCaps { max_jobs: self.caps_oracle_jobs, max_machines: self.caps_oracle_machines }
    }

    fn eps(&self, from_file: Option<Eps>) -> Result<Eps, CliError> {
        match &self.epsilon {
            Some(e) => {
                let r = parse_rational(e).map_err(|e| CliError::Input(e.to_string()))?;
                Eps::from_rational(&r).map_err(|e| CliError::Input(e.to_string()))
            }
            None => Ok(from_file.unwrap_or(Eps::new(4).expect("4 is valid"))),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Eptas)]
    pub algo: Algo,
    /// Write the schedule here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub caps: CapsArgs,
    /// Containers and configurations of every evaluated guess.
    #[arg(long)]
    pub dump_pools: Option<PathBuf>,
    /// The MILP of the accepted guess in LP format.
    #[arg(long)]
    pub dump_milp: Option<PathBuf>,
    /// Per-machine plan of the accepted guess.
    #[arg(long)]
    pub dump_plan: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NiceArgs {
    pub instance: PathBuf,
    pub schedule: PathBuf,
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Nice schedule output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the rounded instance the nice schedule refers to.
    #[arg(long)]
    pub instance_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Powers,
    Uniform,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::Ls, Algo::Lpt, Algo::Bruteforce, Algo::Eptas])]
    pub algo: Vec<Algo>,
    #[arg(long, default_value_t = GenParams::default().max_jobs)]
    pub max_jobs: usize,
    #[arg(long, default_value_t = GenParams::default().max_machines)]
    pub max_machines: usize,
    #[arg(long, default_value_t = 2)]
    pub min_b: usize,
    #[arg(long, default_value_t = 3)]
    pub max_b: usize,
    #[arg(long, value_enum, default_value_t = Dist::Powers)]
    pub dist: Dist,
    /// Fill the ms column (makes the CSV differ between runs).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub caps: CapsArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Validate { instance, schedule } => cmd_validate(&instance, &schedule),
        Command::TransformNice(a) => cmd_transform_nice(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Failure(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<(Instance, Option<Eps>), CliError> {
    read_instance(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

pub fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let (inst, file_eps) = load_instance(&a.instance)?;
    let eps = a.caps.eps(file_eps)?;
    let budget = Deadline::from_secs(a.caps.caps_time);
    let fail = |e: sts_core::StsError| CliError::Failure(e.to_string());
    let s = if a.algo == Algo::Eptas {
        let (s, trace) = eptas_traced(&inst, eps, &a.caps.scheme(), &budget).map_err(fail)?;
        dump_trace(a, &trace)?;
        s
    } else {
        run_algo(&inst, a.algo, eps, &a.caps.scheme(), a.caps.oracle(), &budget).map_err(fail)?
    };
    validate(&s, &inst).map_err(|d| CliError::Failure(format!("output rejected: {d}")))?;
    write(a.out.as_deref(), &with_newline(write_schedule(&s, &inst)))?;
    eprintln!("algo={} jobs={} machines={} b={} makespan={}", a.algo.name(), inst.len(), inst.machines, inst.burst_limit, format_rational(&s.makespan()));
    Ok(())
}

fn dump_trace(a: &SolveArgs, trace: &Trace) -> Result<(), CliError> {
    if let Some(p) = &a.dump_pools {
        let mut out = String::new();
        for g in &trace.guesses {
            let _ = writeln!(out, "guess {} {:?} containers={} configurations={}", format_rational(&g.guess), g.outcome, g.containers, g.configurations);
        }
        if trace.below_one {
            out.push_str("answered by the makespan-below-one procedure\n");
        }
        if let Some(acc) = &trace.accepted {
            let _ = writeln!(out, "accepted guess {}", format_rational(&acc.guess));
            out.push_str(&format_pool(&acc.pool));
        }
        write(Some(p), &out)?;
    }
    if let Some(p) = &a.dump_milp {
        let text = trace.accepted.as_ref().map(|acc| dump_milp(&acc.model)).unwrap_or_default();
        write(Some(p), &text)?;
    }
    if let Some(p) = &a.dump_plan {
        let text = trace.accepted.as_ref().map(|acc| format_plans(&acc.plans)).unwrap_or_default();
        write(Some(p), &text)?;
    }
    Ok(())
}

pub fn format_pool(pool: &Pool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "c_nice {}", format_rational(&pool.c_nice));
    for (t, (c, l)) in pool.containers.iter().zip(&pool.loads).enumerate() {
        let _ = writeln!(out, "container {t} load={} rounded={} {:?}", format_rational(&l.load), format_rational(&l.rounded), l.class);
        for (k, b) in c.blocks.iter().enumerate() {
            let _ = writeln!(out, "  block {k} S={:?} T={} T'={} D={} P={}", b.s, b.t, u8::from(b.t_prime), b.d, u8::from(b.p));
        }
    }
    for (i, c) in pool.configurations.iter().enumerate() {
        let _ = writeln!(out, "configuration {i} {c:?}");
    }
    out
}

pub fn format_plans(plans: &[MachinePlan]) -> String {
    let mut out = String::new();
    for (i, p) in plans.iter().enumerate() {
        let _ = writeln!(out, "machine {i} configuration={} medium={:?} large={:?}", p.configuration, p.medium, p.large);
        for occ in &p.containers {
            let _ = writeln!(out, "  container {} small={:?} tiny={:?}", occ.container, occ.small, occ.tiny);
        }
    }
    out
}

pub fn cmd_validate(instance: &Path, schedule: &Path) -> Result<(), CliError> {
    let (inst, _) = load_instance(instance)?;
    let s = read_schedule(&read(schedule)?, &inst).map_err(|e| CliError::Input(format!("{}: {e}", schedule.display())))?;
    match validate(&s, &inst) {
        Ok(()) => {
            println!("ok makespan={}", format_rational(&s.makespan()));
            Ok(())
        }
        Err(d) => {
            println!("violation {d}");
            Err(CliError::Failure("schedule rejected".into()))
        }
    }
}

/// The input schedule is stretched onto the rounded instance; the guess is
/// the smallest power of `1+ε` at or above its makespan (and 1).
pub fn cmd_transform_nice(a: &NiceArgs) -> Result<(), CliError> {
    let (inst, file_eps) = load_instance(&a.instance)?;
    let eps = match &a.epsilon {
        Some(e) => parse_rational(e).map_err(|e| CliError::Input(e.to_string())).and_then(|r| Eps::from_rational(&r).map_err(|e| CliError::Input(e.to_string())))?,
        None => file_eps.unwrap_or(Eps::new(4).expect("4 is valid")),
    };
    let s = read_schedule(&read(&a.schedule)?, &inst).map_err(|e| CliError::Input(format!("{}: {e}", a.schedule.display())))?;
    validate(&s, &inst).map_err(|d| CliError::Failure(format!("input schedule rejected: {d}")))?;
    let ri = round_instance(&inst, eps);
    let stretched = stretch_to_rounded(&s, &ri, eps);
    let ms = stretched.makespan();
    let (_, guess) = eps.ceil_power(&if ms > one() { ms } else { one() });
    let ci = classify_jobs(&ri, eps, &guess).map_err(|e| CliError::Failure(e.to_string()))?;
    let nice = to_nice(&stretched, &ci, eps, inst.burst_limit).map_err(|e| CliError::Failure(e.to_string()))?;
    let rounded = ri.instance();
    if !check_time_constraint(&nice, inst.burst_limit).map_err(|e| CliError::Failure(e.to_string()))?.ok {
        return Err(CliError::Failure("nice schedule violates the time constraint".into()));
    }
    if let Some(p) = &a.instance_out {
        write(Some(p), &with_newline(write_instance(&rounded, Some(eps))))?;
    }
    write(a.out.as_deref(), &with_newline(write_schedule(&nice, &rounded)))?;
    eprintln!("guess={} makespan={}", format_rational(&guess), format_rational(&nice.makespan()));
    Ok(())
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let eps = a.caps.eps(None)?;
    if a.max_jobs == 0 || a.max_machines == 0 || a.min_b < 2 || a.min_b > a.max_b {
        return Err(CliError::Input("need max-jobs, max-machines >= 1 and 2 <= min-b <= max-b".into()));
    }
    let dist = match a.dist {
        Dist::Powers => SizeDist::Powers { lo: -16, hi: 3 },
        Dist::Uniform => SizeDist::Uniform { max_num: 8, den: 4 },
    };
    let params = GenParams { max_jobs: a.max_jobs, max_machines: a.max_machines, b_range: (a.min_b, a.max_b), dist };
    let instances = generate(a.seed, a.count, &params, eps);
    let cfg = BenchConfig { eps, algos: a.algo.clone(), caps: a.caps.scheme(), oracle: a.caps.oracle() };
    let rows = run_bench(&instances, &cfg, &Deadline::from_secs(a.caps.caps_time)).map_err(|e| CliError::Failure(e.to_string()))?;
    write(a.out.as_deref(), &write_csv(&rows, a.timing))
}
