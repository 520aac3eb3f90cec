//! Greedy start times, List Scheduling, LPT and the exhaustive oracle.
//!
//! For a fixed job order on one machine, `s_i = max(e_{i-1}, e_{i-B} + 1)` is
//! optimal: `B+1` consecutive jobs share a unit window iff the last starts
//! before the first ends plus one, so every feasible start vector satisfies
//! both lower bounds, and the recurrence meets them with equality.

use alloc::vec;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::error::{Result, StsError};
use crate::model::Instance;
use crate::rational::{one, zero, Rational};
use crate::schedule::{Schedule, ScheduledJob};

/// Earliest feasible starts for jobs processed on one machine in the given order.
pub fn earliest_start_times(sizes: &[Rational], b: usize) -> Vec<Rational> {
    let mut starts: Vec<Rational> = Vec::with_capacity(sizes.len());
    let mut ends: Vec<Rational> = Vec::with_capacity(sizes.len());
    for (i, p) in sizes.iter().enumerate() {
        let s = next_start(&ends, i, b);
        ends.push(&s + p);
        starts.push(s);
    }
    starts
}

fn next_start(ends: &[Rational], i: usize, b: usize) -> Rational {
    let mut s = if i == 0 { zero() } else { ends[i - 1].clone() };
    if i >= b {
        let gate = &ends[i - b] + one();
        if gate > s {
            s = gate;
        }
    }
    s
}

fn greedy_in_order(inst: &Instance, order: &[usize]) -> Schedule {
    let b = inst.burst_limit;
    let mut ends: Vec<Vec<Rational>> = vec![Vec::new(); inst.machines];
    let mut out = Vec::with_capacity(order.len());
    for &j in order {
        let mut best: Option<(Rational, usize)> = None;
        for (m, e) in ends.iter().enumerate() {
            let s = next_start(e, e.len(), b);
            if best.as_ref().is_none_or(|(bs, _)| &s < bs) {
                best = Some((s, m));
            }
        }
        let (s, m) = best.expect("at least one machine");
        let p = inst.jobs[j].size.clone();
        ends[m].push(&s + &p);
        out.push(ScheduledJob::new(j, m, s, p));
    }
    Schedule::new(out)
}

/// Jobs in input order, each at its earliest feasible start over all machines.
pub fn list_scheduling(inst: &Instance) -> Schedule {
    let order: Vec<usize> = (0..inst.len()).collect();
    greedy_in_order(inst, &order)
}

/// List Scheduling on the jobs sorted by non-increasing size (ties by id).
pub fn lpt(inst: &Instance) -> Schedule {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| {
        inst.jobs[b].size.cmp(&inst.jobs[a].size).then_with(|| inst.jobs[a].id.cmp(&inst.jobs[b].id))
    });
    greedy_in_order(inst, &order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_jobs: usize,
    pub max_machines: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { max_jobs: 8, max_machines: 4 }
    }
}

/// Best single-machine order for the job set `mask`: (makespan, order).
fn best_order(sizes: &[Rational], mask: usize, b: usize, budget: &impl Budget) -> Result<(Rational, Vec<usize>)> {
    let mut items: Vec<usize> = (0..sizes.len()).filter(|j| mask >> j & 1 == 1).collect();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    // Heap's algorithm over all orders
    let k = items.len();
    let mut c = vec![0usize; k];
    let mut eval = |items: &[usize]| -> Result<()> {
        if budget.exhausted() {
            return Err(StsError::BudgetExceeded);
        }
        let ps: Vec<Rational> = items.iter().map(|&j| sizes[j].clone()).collect();
        let st = earliest_start_times(&ps, b);
        let ms = st.last().map(|s| s + ps.last().unwrap()).unwrap_or_else(zero);
        if best.as_ref().is_none_or(|(bm, _)| &ms < bm) {
            best = Some((ms, items.to_vec()));
        }
        Ok(())
    };
    eval(&items)?;
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            eval(&items)?;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best.expect("at least the identity order"))
}

/// Exact optimum by enumeration: best order per job subset, then the best
/// split of all jobs into at most `m` subsets.
pub fn brute_force_opt(inst: &Instance, caps: OracleCaps, budget: &impl Budget) -> Result<(Schedule, Rational)> {
    let n = inst.len();
    if n > caps.max_jobs || inst.machines > caps.max_machines || n >= usize::BITS as usize {
        return Err(StsError::OracleTooLarge);
    }
    if n == 0 {
        return Ok((Schedule::default(), zero()));
    }
    let b = inst.burst_limit;
    let sizes = inst.sizes();
    let full = (1usize << n) - 1;
    let mut single: Vec<(Rational, Vec<usize>)> = Vec::with_capacity(full + 1);
    for mask in 0..=full {
        single.push(best_order(&sizes, mask, b, budget)?);
    }
    // dp[mask] over k machines: (makespan, chosen last subset)
    let mut dp: Vec<Rational> = single.iter().map(|(ms, _)| ms.clone()).collect();
    let mut choice: Vec<Vec<usize>> = vec![(0..=full).collect()];
    for _ in 1..inst.machines {
        let mut next = dp.clone();
        let mut pick: Vec<usize> = (0..=full).map(|_| 0).collect();
        for mask in 1..=full {
            let mut sub = mask;
            while sub > 0 {
                let v = if dp[mask ^ sub] > single[sub].0 { &dp[mask ^ sub] } else { &single[sub].0 };
                if v < &next[mask] {
                    next[mask] = v.clone();
                    pick[mask] = sub;
                }
                sub = (sub - 1) & mask;
            }
        }
        dp = next;
        choice.push(pick);
    }
    // walk the choices back: machine k-1 takes pick, the rest go to earlier machines
    let mut out = Vec::with_capacity(n);
    let mut mask = full;
    for k in (0..inst.machines).rev() {
        if mask == 0 {
            break;
        }
        let sub = if k == 0 { mask } else { choice[k][mask] };
        if sub == 0 {
            continue;
        }
        let order = &single[sub].1;
        let ps: Vec<Rational> = order.iter().map(|&j| sizes[j].clone()).collect();
        for ((&j, s), p) in order.iter().zip(earliest_start_times(&ps, b)).zip(ps) {
            out.push(ScheduledJob::new(j, k, s, p));
        }
        mask ^= sub;
    }
    out.sort_by_key(|a| a.job);
    Ok((Schedule::new(out), dp[full].clone()))
}
