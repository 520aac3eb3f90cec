//! Benchmark harness: every algorithm on every instance, each output
//! validated, one CSV row per run.

use std::time::Instant;

use num_integer::Integer;
use num_traits::Signed;
use sts_core::baselines::{brute_force_opt, list_scheduling, lpt, OracleCaps};
use sts_core::model::Eps;
use sts_core::rational::Rational;
use sts_core::schedule::check_time_constraint;
use sts_core::scheme::{eptas, SchemeCaps};
use sts_core::{Budget, Instance, Schedule, StsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Algo {
    Ls,
    Lpt,
    Bruteforce,
    Eptas,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Ls => "ls",
            Algo::Lpt => "lpt",
            Algo::Bruteforce => "bruteforce",
            Algo::Eptas => "eptas",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("instance {instance}, {algo}: {source}")]
    Solver { instance: usize, algo: &'static str, source: StsError },
    #[error("instance {instance}, {algo}: output rejected: {detail}")]
    Invalid { instance: usize, algo: &'static str, detail: String },
}

pub fn run_algo(
    inst: &Instance,
    algo: Algo,
    eps: Eps,
    caps: &SchemeCaps,
    oracle: OracleCaps,
    budget: &impl Budget,
) -> Result<Schedule, StsError> {
    match algo {
        Algo::Ls => Ok(list_scheduling(inst)),
        Algo::Lpt => Ok(lpt(inst)),
        Algo::Bruteforce => brute_force_opt(inst, oracle, budget).map(|(s, _)| s),
        Algo::Eptas => eptas(inst, eps, caps, budget),
    }
}

/// Coverage, machine range and the time constraint.
pub fn validate(s: &Schedule, inst: &Instance) -> Result<(), String> {
    s.check_coverage(inst.len()).map_err(|e| e.to_string())?;
    if let Some(a) = s.assignments.iter().find(|a| a.machine >= inst.machines) {
        return Err(format!("machine {} out of range", a.machine));
    }
    let v = check_time_constraint(s, inst.burst_limit).map_err(|e| e.to_string())?;
    match v.witness {
        None => Ok(()),
        Some(w) => Err(format!("{w:?}")),
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub instance: usize,
    pub algo: Algo,
    pub makespan: Rational,
    pub opt: Option<Rational>,
    pub ms: u128,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub eps: Eps,
    pub algos: Vec<Algo>,
    pub caps: SchemeCaps,
    pub oracle: OracleCaps,
}

/// Rows ordered by instance, then by algorithm in the given order. The
/// optimum is computed whenever the instance fits the oracle caps.
pub fn run_bench(instances: &[Instance], cfg: &BenchConfig, budget: &impl Budget) -> Result<Vec<Row>, BenchError> {
    let mut rows = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let fits = inst.len() <= cfg.oracle.max_jobs && inst.machines <= cfg.oracle.max_machines;
        let opt = if fits {
            let (_, v) = brute_force_opt(inst, cfg.oracle, budget)
                .map_err(|source| BenchError::Solver { instance: i, algo: "bruteforce", source })?;
            Some(v)
        } else {
            None
        };
        for &algo in &cfg.algos {
            let t = Instant::now();
            let s = run_algo(inst, algo, cfg.eps, &cfg.caps, cfg.oracle, budget)
                .map_err(|source| BenchError::Solver { instance: i, algo: algo.name(), source })?;
            let ms = t.elapsed().as_millis();
            validate(&s, inst).map_err(|detail| BenchError::Invalid { instance: i, algo: algo.name(), detail })?;
            rows.push(Row { instance: i, algo, makespan: s.makespan(), opt: opt.clone(), ms });
        }
    }
    Ok(rows)
}

/// Exact decimal rounding (half away from zero) to `places` digits.
pub fn decimal(r: &Rational, places: u32) -> String {
    let scale = num_bigint::BigInt::from(10u32).pow(places);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let q = if rem * 2u32 >= *scaled.denom() { q + 1u32 } else { q };
    let (int, frac) = q.div_rem(&scale);
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = places as usize)
}

/// Header `instance,algo,makespan,opt,ratio,ms`. Without `timing` the `ms`
/// column is left empty so that reruns are byte-identical.
pub fn write_csv(rows: &[Row], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance", "algo", "makespan", "opt", "ratio", "ms"]).expect("in-memory write");
    for r in rows {
        let opt = r.opt.as_ref().map(|o| decimal(o, 6)).unwrap_or_default();
        let ratio = r.opt.as_ref().map(|o| decimal(&(&r.makespan / o), 6)).unwrap_or_default();
        let ms = if timing { r.ms.to_string() } else { String::new() };
        w.write_record([r.instance.to_string(), r.algo.name().to_string(), decimal(&r.makespan, 6), opt, ratio, ms])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}
