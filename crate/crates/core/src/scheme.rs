//! End-to-end driver: rounding, the ascending guess loop, MILP solve and
//! rounding back to a schedule, plus the separate makespan-below-one case.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::budget::Budget;
use crate::containers::{build_pool, EnumCaps, Pool};
use crate::error::{Result, StsError};
use crate::lp::{solve_lp_with_budget, LinearProgram, LpOutcome, Sense};
use crate::milp::{build_milp, solve_milp, MilpModel, MilpOutcome, MilpSolution};
use crate::model::{classify_jobs, makespan_guesses, round_instance, ClassifiedInstance, Eps, Instance};
use crate::rational::{from_usize, one, zero, Rational};
use crate::rounding::{best_fit_round, round_milp_to_schedule, MachinePlan};
use crate::schedule::{check_time_constraint, Schedule, ScheduledJob};
use crate::NodeLimit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeCaps {
    pub enumeration: EnumCaps,
    /// Branch-and-bound nodes per guess; `None` means unlimited.
    pub milp_nodes: Option<u64>,
}

impl Default for SchemeCaps {
    fn default() -> Self {
        SchemeCaps { enumeration: EnumCaps::default(), milp_nodes: Some(200_000) }
    }
}

/// What happened at one guess; collected for `--dump-*` output.
#[derive(Debug, Clone)]
pub enum GuessOutcome {
    /// Pool enumeration hit a cap.
    Explosion,
    Infeasible,
    /// The MILP search ran out of nodes.
    Undecided,
    Feasible,
}

#[derive(Debug, Clone)]
pub struct GuessRecord {
    pub guess: Rational,
    pub outcome: GuessOutcome,
    pub containers: usize,
    pub configurations: usize,
}

/// Everything the driver learned on the way to its answer.
#[derive(Debug, Clone)]
pub struct Trace {
    pub guesses: Vec<GuessRecord>,
    /// Set when the answer came from the main loop.
    pub accepted: Option<Accepted>,
    /// The sub-one procedure produced the answer.
    pub below_one: bool,
}

#[derive(Debug, Clone)]
pub struct Accepted {
    pub guess: Rational,
    pub classified: ClassifiedInstance,
    pub pool: Pool,
    pub model: MilpModel,
    pub solution: MilpSolution,
    pub plans: Vec<MachinePlan>,
}

struct Both<'a, A: Budget, B: Budget>(&'a A, &'a B);

impl<A: Budget, B: Budget> Budget for Both<'_, A, B> {
    fn exhausted(&self) -> bool {
        // both must be ticked on every call
        let a = self.0.exhausted();
        self.1.exhausted() || a
    }
}

pub fn eptas(inst: &Instance, eps: Eps, caps: &SchemeCaps, budget: &impl Budget) -> Result<Schedule> {
    eptas_traced(inst, eps, caps, budget).map(|(s, _)| s)
}

/// The guess grid (from the average rounded load up) is scanned ascending
/// and the first guess whose MILP is
/// feasible is rounded; the result is mapped back to the original sizes
/// (same starts) and validated. A guess whose pool exceeds the caps or whose
/// search runs out of nodes is skipped. `budget` is shared by all solves and
/// its exhaustion aborts the run.
pub fn eptas_traced(inst: &Instance, eps: Eps, caps: &SchemeCaps, budget: &impl Budget) -> Result<(Schedule, Trace)> {
    let ri = round_instance(inst, eps);
    let grid = makespan_guesses(&ri, eps)?;
    let mut trace = Trace { guesses: Vec::new(), accepted: None, below_one: false };
    if grid.below_one {
        if let SmallMakespan::Scheduled(s) = small_makespan_case(inst, budget)? {
            trace.below_one = true;
            return Ok((s, trace));
        }
    }
    // no schedule beats the average load
    let average = ri.rounded_sizes.iter().sum::<Rational>() / from_usize(inst.machines);
    for g in grid.values.into_iter().filter(|g| g >= &average) {
        let ci = classify_jobs(&ri, eps, &g)?;
        let pool = match build_pool(&ci, &g, caps.enumeration) {
            Ok(p) => p,
            Err(StsError::ContainerExplosion) => {
                trace.guesses.push(GuessRecord { guess: g, outcome: GuessOutcome::Explosion, containers: 0, configurations: 0 });
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut record = GuessRecord {
            guess: g.clone(),
            outcome: GuessOutcome::Infeasible,
            containers: pool.containers.len(),
            configurations: pool.configurations.len(),
        };
        if pool.configurations.is_empty() {
            trace.guesses.push(record);
            continue;
        }
        let model = build_milp(&ci, &pool);
        let nodes = NodeLimit::new(caps.milp_nodes.unwrap_or(u64::MAX));
        let outcome = match solve_milp(&model, &Both(budget, &nodes)) {
            Err(StsError::BudgetExceeded) if !budget.exhausted() => {
                record.outcome = GuessOutcome::Undecided;
                trace.guesses.push(record);
                continue;
            }
            other => other?,
        };
        let MilpOutcome::Feasible(solution) = outcome else {
            trace.guesses.push(record);
            continue;
        };
        record.outcome = GuessOutcome::Feasible;
        trace.guesses.push(record);
        let (rounded, plans) = round_milp_to_schedule(&solution, &pool, &ci)?;
        let out = Schedule::new(
            rounded
                .assignments
                .iter()
                .map(|a| ScheduledJob::new(a.job, a.machine, a.start.clone(), inst.jobs[a.job].size.clone()))
                .collect(),
        );
        validate(&out, inst)?;
        trace.accepted = Some(Accepted { guess: g, classified: ci, pool, model, solution, plans });
        return Ok((out, trace));
    }
    Err(StsError::NoGuessAdmitted)
}

fn validate(s: &Schedule, inst: &Instance) -> Result<()> {
    s.check_coverage(inst.len())?;
    if s.assignments.iter().any(|a| a.machine >= inst.machines) {
        return Err(StsError::Internal("machine index out of range".into()));
    }
    if !check_time_constraint(s, inst.burst_limit)?.ok {
        return Err(StsError::Internal("driver output violates the time constraint".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmallMakespan {
    Scheduled(Schedule),
    NotApplicable,
}

/// Makespan below one: every machine runs at most `B` jobs, so any window
/// is trivially fine. Cardinalities are balanced (`⌈n/m⌉` or `⌊n/m⌋`), an
/// LP minimizes the largest fractional load under them, and slot rounding
/// makes it integral at `+p_max`. Jobs run back-to-back from 0 by size.
/// Not applicable when `p_max ≥ 1`, `n > B·m`, or the result is not below one.
pub fn small_makespan_case(inst: &Instance, budget: &impl Budget) -> Result<SmallMakespan> {
    let n = inst.len();
    let m = inst.machines;
    if n == 0 || inst.p_max() >= one() || n > inst.burst_limit * m {
        return Ok(SmallMakespan::NotApplicable);
    }
    let used = m.min(n);
    let caps: Vec<u64> = (0..used).map(|k| (n / used + usize::from(k < n % used)) as u64).collect();
    let sizes = inst.sizes();
    let mut lp = LinearProgram::new();
    let t = lp.add_var("t", zero(), None);
    let y: Vec<Vec<usize>> =
        (0..n).map(|j| (0..used).map(|k| lp.add_var(alloc::format!("y[{j},{k}]"), zero(), None)).collect()).collect();
    for (j, row) in y.iter().enumerate() {
        lp.add_row(alloc::format!("assigned[{j}]"), row.iter().map(|&v| (v, one())).collect(), Sense::Eq, one());
    }
    for k in 0..used {
        lp.add_row(alloc::format!("count[{k}]"), (0..n).map(|j| (y[j][k], one())).collect(), Sense::Eq, from_usize(caps[k] as usize));
        let mut load: Vec<(usize, Rational)> = (0..n).map(|j| (y[j][k], sizes[j].clone())).collect();
        load.push((t, -one()));
        lp.add_row(alloc::format!("load[{k}]"), load, Sense::Le, zero());
    }
    lp.objective = Some(vec![(t, one())]);
    let LpOutcome::Optimal(x) = solve_lp_with_budget(&lp, budget)? else {
        return Err(StsError::Internal("balanced assignment LP has no optimum".into()));
    };
    let frac: Vec<Vec<(usize, Rational)>> = (0..used)
        .map(|k| (0..n).filter(|&j| !x[y[j][k]].is_zero()).map(|j| (j, x[y[j][k]].clone())).collect())
        .collect();
    let loads = vec![x[t].clone(); used];
    let groups = best_fit_round(&frac, &caps, &loads, &sizes)?;
    let mut out = Vec::with_capacity(n);
    for (k, mut jobs) in groups.into_iter().enumerate() {
        jobs.sort_by(|a, b| sizes[*a].cmp(&sizes[*b]).then(a.cmp(b)));
        let mut at = zero();
        for j in jobs {
            out.push(ScheduledJob::new(j, k, at.clone(), sizes[j].clone()));
            at += &sizes[j];
        }
    }
    let s = Schedule::new(out);
    if s.makespan() >= one() {
        return Ok(SmallMakespan::NotApplicable);
    }
    validate(&s, inst)?;
    Ok(SmallMakespan::Scheduled(s))
}
