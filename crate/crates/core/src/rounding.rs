//! Turning a feasible MILP solution into a schedule: machines receive
//! configurations, jobs and containers are assigned to slots, tiny jobs are
//! rounded through the interval LP and a slot matching, and everything is
//! laid out on the ε-grid.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::containers::{container_windows, LoadClass, Pool};
use crate::error::{Result, StsError};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Sense};
use crate::milp::MilpSolution;
use crate::model::{ClassifiedInstance, JobClass};
use crate::rational::{ceil_int, floor_int, from_usize, int, is_integral, one, zero, Rational};
use crate::schedule::{check_time_constraint, Schedule, ScheduledJob};

/// One container placed on a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub container: usize,
    /// Small jobs per block.
    pub small: Vec<Vec<usize>>,
    /// Tiny jobs per block.
    pub tiny: Vec<Vec<usize>>,
}

impl Occurrence {
    /// Nothing placed yet.
    pub fn new(container: usize, blocks: usize) -> Self {
        Occurrence { container, small: vec![Vec::new(); blocks], tiny: vec![Vec::new(); blocks] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachinePlan {
    pub configuration: usize,
    pub containers: Vec<Occurrence>,
    pub medium: Vec<usize>,
    pub large: Vec<usize>,
}

/// Gives every machine a configuration, then fills the configuration's
/// large-job and long-container slots exactly.
pub fn assign_rigid(sol: &MilpSolution, pool: &Pool, ci: &ClassifiedInstance) -> Result<Vec<MachinePlan>> {
    let m = ci.rounded.base.machines;
    let mut plans: Vec<MachinePlan> = Vec::with_capacity(m);
    for (c, &count) in sol.v.iter().enumerate() {
        for _ in 0..count {
            plans.push(MachinePlan { configuration: c, containers: Vec::new(), medium: Vec::new(), large: Vec::new() });
        }
    }
    if plans.len() != m {
        return Err(StsError::Internal(format!("{} configurations chosen for {m} machines", plans.len())));
    }
    for l in 0..pool.large_sizes.len() {
        let mut jobs = ci.jobs_of(JobClass::Large).into_iter().filter(|&j| ci.large_index(ci.size(j)) == Some(l));
        for plan in plans.iter_mut() {
            for _ in 0..pool.configurations[plan.configuration].gamma[l] {
                plan.large.push(jobs.next().ok_or_else(|| StsError::Internal("too many large-job slots".into()))?);
            }
        }
        if jobs.next().is_some() {
            return Err(StsError::Internal("large jobs left over".into()));
        }
    }
    for l in 0..pool.long_classes.len() {
        let mut occ = (0..pool.containers.len())
            .filter(|&t| pool.long_class_of(t) == Some(l))
            .flat_map(|t| core::iter::repeat_n(t, sol.w[t] as usize));
        for plan in plans.iter_mut() {
            for _ in 0..pool.configurations[plan.configuration].alpha[l] {
                let t = occ.next().ok_or_else(|| StsError::Internal("too many long-container slots".into()))?;
                plan.containers.push(Occurrence::new(t, pool.containers[t].blocks.len()));
            }
        }
        if occ.next().is_some() {
            return Err(StsError::Internal("long containers left over".into()));
        }
    }
    Ok(plans)
}

/// Sequential first fit: items in order, machines in order, moving on when
/// the next item would exceed `budget + slack`. Returns the machine per item.
pub fn assign_flexible_greedy(items: &[Rational], budgets: &[Rational], slack: &Rational) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(items.len());
    let mut i = 0;
    let mut load = zero();
    for (x, p) in items.iter().enumerate() {
        while i < budgets.len() && &load + p > &budgets[i] + slack {
            i += 1;
            load = zero();
        }
        if i == budgets.len() {
            return Err(StsError::Internal(format!("item {x} left over by the greedy assignment")));
        }
        load += p;
        out.push(i);
    }
    Ok(out)
}

/// Medium jobs and short containers, each by the greedy rule against the
/// configuration's rounded-down budget.
pub fn assign_flexible(plans: &mut [MachinePlan], sol: &MilpSolution, pool: &Pool, ci: &ClassifiedInstance) -> Result<()> {
    let unit = pool.eps.sq() * &pool.c_nice;
    let slack = &unit + pool.eps.value() * &pool.c_nice;

    let medium = ci.jobs_of(JobClass::Medium);
    let sizes: Vec<Rational> = medium.iter().map(|&j| ci.size(j).clone()).collect();
    let budgets: Vec<Rational> = plans
        .iter()
        .map(|p| {
            let c = &pool.configurations[p.configuration];
            if c.delta_prime {
                int(i64::from(c.delta)) * &unit
            } else {
                zero()
            }
        })
        .collect();
    for (&j, i) in medium.iter().zip(assign_flexible_greedy(&sizes, &budgets, &slack)?) {
        plans[i].medium.push(j);
    }

    let short: Vec<usize> = (0..pool.containers.len())
        .filter(|&t| pool.loads[t].class == LoadClass::Short)
        .flat_map(|t| core::iter::repeat_n(t, sol.w[t] as usize))
        .collect();
    let loads: Vec<Rational> = short.iter().map(|&t| pool.loads[t].load.clone()).collect();
    let budgets: Vec<Rational> = plans
        .iter()
        .map(|p| {
            let c = &pool.configurations[p.configuration];
            if c.beta_prime {
                int(i64::from(c.beta)) * &unit
            } else {
                zero()
            }
        })
        .collect();
    for (&t, i) in short.iter().zip(assign_flexible_greedy(&loads, &budgets, &slack)?) {
        plans[i].containers.push(Occurrence::new(t, pool.containers[t].blocks.len()));
    }
    Ok(())
}

/// Fills the small-job slots of every placed container, size by size.
pub fn assign_small_jobs(plans: &mut [MachinePlan], pool: &Pool, ci: &ClassifiedInstance) -> Result<()> {
    for l in 0..pool.small_sizes.len() {
        let mut jobs = ci.jobs_of(JobClass::Small).into_iter().filter(|&j| ci.small_index(ci.size(j)) == Some(l));
        for plan in plans.iter_mut() {
            for occ in plan.containers.iter_mut() {
                for (k, b) in pool.containers[occ.container].blocks.iter().enumerate() {
                    for _ in 0..b.s[l] {
                        occ.small[k].push(jobs.next().ok_or_else(|| StsError::Internal("too many small-job slots".into()))?);
                    }
                }
            }
        }
        if jobs.next().is_some() {
            return Err(StsError::Internal("small jobs left over".into()));
        }
    }
    Ok(())
}

/// A block of a placed container, with its share of the fractional tiny jobs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalBlock {
    pub machine: usize,
    /// Index into the machine's container list.
    pub occurrence: usize,
    pub block: usize,
    /// `(tiny job, fraction)` with the container's `y` split evenly over its copies.
    pub y: Vec<(usize, Rational)>,
    pub omega: Rational,
}

pub fn universal_blocks(plans: &[MachinePlan], sol: &MilpSolution, pool: &Pool) -> Vec<UniversalBlock> {
    let mut by_block: BTreeMap<(usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
    for (&(j, t, k), f) in &sol.y {
        if !f.is_zero() {
            by_block.entry((t, k)).or_default().push((j, f / int(sol.w[t] as i64)));
        }
    }
    let mut out = Vec::new();
    for (i, plan) in plans.iter().enumerate() {
        for (o, occ) in plan.containers.iter().enumerate() {
            for k in 0..pool.containers[occ.container].blocks.len() {
                let y = by_block.get(&(occ.container, k)).cloned().unwrap_or_default();
                let omega = y.iter().map(|(_, f)| f.clone()).sum();
                out.push(UniversalBlock { machine: i, occurrence: o, block: k, y, omega });
            }
        }
    }
    out
}

/// Integral tiny-job counts per block: each within one of `Ω`, zero where
/// `Ω` is zero, every window within its residual budget, summing to the
/// number of tiny jobs. The constraint matrix has consecutive ones, so a
/// vertex is integral; that is asserted, not assumed.
pub fn solve_omega_lp(blocks: &[UniversalBlock], plans: &[MachinePlan], pool: &Pool, b: usize, tiny: usize) -> Result<Vec<u64>> {
    let mut lp = LinearProgram::new();
    let vars: Vec<Option<usize>> = blocks
        .iter()
        .enumerate()
        .map(|(u, blk)| {
            (!blk.omega.is_zero()).then(|| {
                let lo = Rational::from_integer(floor_int(&blk.omega));
                let hi = Rational::from_integer(ceil_int(&blk.omega));
                lp.add_var(format!("omega[{u}]"), lo, Some(hi))
            })
        })
        .collect();
    // windows of each placed container; blocks of one occurrence are contiguous
    let mut u = 0;
    while u < blocks.len() {
        let (mi, o) = (blocks[u].machine, blocks[u].occurrence);
        let cont = &pool.containers[plans[mi].containers[o].container];
        let n = cont.blocks.len();
        for (lo, hi) in container_windows(n, pool.eps) {
            let row: Vec<_> = (lo..hi).filter_map(|k| vars[u + k].map(|v| (v, one()))).collect();
            if row.is_empty() {
                continue;
            }
            let used: i64 = cont.blocks[lo..hi].iter().map(|x| i64::from(x.small_count())).sum::<i64>() + i64::from(cont.blocks[lo].p);
            lp.add_row(format!("window[{mi},{o},{lo}]"), row, Sense::Le, int(b as i64 - used));
        }
        u += n.max(1);
    }
    let all: Vec<_> = vars.iter().flatten().map(|&v| (v, one())).collect();
    lp.add_row("total", all, Sense::Eq, from_usize(tiny));
    let x = match solve_lp(&lp)? {
        LpOutcome::Optimal(x) => x,
        _ => return Err(StsError::Internal("tiny-count LP has no solution".into())),
    };
    if !x.iter().all(is_integral) {
        return Err(StsError::TuViolation);
    }
    Ok(vars
        .iter()
        .map(|v| v.map_or(0, |v| u64::try_from(floor_int(&x[v])).unwrap_or(0)))
        .collect())
}

/// Rescales the tiny fractions of every block rounded down and tops up the
/// blocks rounded up from the released pool, so each block `u` carries
/// exactly `Ω'_u` jobs.
pub fn repair_tiny_fractional(blocks: &[UniversalBlock], omega_prime: &[u64]) -> Result<Vec<Vec<(usize, Rational)>>> {
    let mut out: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); blocks.len()];
    let mut pool: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut up = Vec::new();
    for (u, blk) in blocks.iter().enumerate() {
        let target = int(omega_prime[u] as i64);
        if target <= blk.omega {
            if blk.omega.is_zero() {
                continue;
            }
            let scale = &target / &blk.omega;
            for (j, f) in &blk.y {
                let kept = f * &scale;
                let freed = f - &kept;
                if !freed.is_zero() {
                    *pool.entry(*j).or_insert_with(zero) += freed;
                }
                if !kept.is_zero() {
                    out[u].push((*j, kept));
                }
            }
        } else {
            out[u] = blk.y.clone();
            up.push((u, target - &blk.omega));
        }
    }
    for (u, mut need) in up {
        while need.is_positive() {
            let Some((&j, avail)) = pool.iter_mut().next() else {
                return Err(StsError::Internal("released tiny fractions do not fill the rounded-up blocks".into()));
            };
            let take = if *avail <= need { avail.clone() } else { need.clone() };
            *avail -= &take;
            need -= &take;
            if avail.is_zero() {
                pool.remove(&j);
            }
            match out[u].iter_mut().find(|(jj, _)| *jj == j) {
                Some((_, f)) => *f += take,
                None => out[u].push((j, take)),
            }
        }
    }
    if pool.values().any(|f| !f.is_zero()) {
        return Err(StsError::Internal("tiny fractions left after repair".into()));
    }
    Ok(out)
}

/// Integral rounding of a fractional assignment of jobs to blocks with
/// integral cardinalities `c_k` and volume bounds `t_k`. Each block's
/// fractions are sorted by non-increasing size and poured into unit slots;
/// a perfect matching of jobs to slots then puts in slot `s` a job no larger
/// than the smallest fraction of slot `s-1`, so the load of block `k` stays
/// within `t_k + p_max`. Returns the jobs per block.
pub fn best_fit_round(
    y: &[Vec<(usize, Rational)>],
    capacities: &[u64],
    loads: &[Rational],
    sizes: &[Rational],
) -> Result<Vec<Vec<usize>>> {
    let mut total: BTreeMap<usize, Rational> = BTreeMap::new();
    for (k, row) in y.iter().enumerate() {
        let mut count = zero();
        let mut vol = zero();
        for (j, f) in row {
            if f.is_negative() || f > &one() {
                return Err(StsError::Precondition(format!("fraction of job {j} in block {k} outside [0, 1]")));
            }
            count += f;
            vol += f * &sizes[*j];
            *total.entry(*j).or_insert_with(zero) += f;
        }
        if count != int(capacities[k] as i64) {
            return Err(StsError::Precondition(format!("block {k} holds {count} jobs, capacity {}", capacities[k])));
        }
        if vol > loads[k] {
            return Err(StsError::Precondition(format!("block {k} exceeds its volume bound")));
        }
    }
    if let Some((j, _)) = total.iter().find(|(_, f)| **f != one()) {
        return Err(StsError::Precondition(format!("job {j} is not fully assigned")));
    }
    let jobs: Vec<usize> = total.keys().copied().collect();
    let index: BTreeMap<usize, usize> = jobs.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    // slots: (block, edges from jobs)
    let mut slot_block = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); jobs.len()];
    for (k, row) in y.iter().enumerate() {
        let mut row: Vec<&(usize, Rational)> = row.iter().filter(|(_, f)| !f.is_zero()).collect();
        row.sort_by(|a, b| sizes[b.0].cmp(&sizes[a.0]).then(a.0.cmp(&b.0)));
        let mut cap = zero();
        for (j, f) in row {
            let mut f = f.clone();
            while f.is_positive() {
                if cap.is_zero() {
                    slot_block.push(k);
                    cap = one();
                }
                let take = if f <= cap { f.clone() } else { cap.clone() };
                f -= &take;
                cap -= &take;
                let s = slot_block.len() - 1;
                if adj[index[j]].last() != Some(&s) {
                    adj[index[j]].push(s);
                }
            }
        }
    }
    let owner = match_jobs_to_slots(&adj, slot_block.len());
    if owner.iter().filter(|o| o.is_some()).count() < jobs.len() {
        return Err(StsError::Internal("no perfect matching of jobs to slots".into()));
    }
    let mut out = vec![Vec::new(); y.len()];
    for (s, o) in owner.iter().enumerate() {
        if let Some(j) = o {
            out[slot_block[s]].push(jobs[*j]);
        }
    }
    for v in out.iter_mut() {
        v.sort_unstable();
    }
    Ok(out)
}

/// Maximum bipartite matching (Hopcroft-Karp with an explicit stack).
/// Returns the left vertex matched to each right vertex.
fn match_jobs_to_slots(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    const INF: u32 = u32::MAX;
    let left = adj.len();
    let mut ml = vec![FREE; left];
    let mut mr = vec![FREE; right];
    for u in 0..left {
        if let Some(&v) = adj[u].iter().find(|&&v| mr[v] == FREE) {
            ml[u] = v;
            mr[v] = u;
        }
    }
    let mut dist = vec![INF; left];
    loop {
        let mut queue: Vec<usize> = Vec::new();
        for u in 0..left {
            dist[u] = if ml[u] == FREE { 0 } else { INF };
            if ml[u] == FREE {
                queue.push(u);
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                let w = mr[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == INF {
                    dist[w] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; left];
        for s in 0..left {
            if ml[s] != FREE {
                continue;
            }
            let mut stack = vec![s];
            while let Some(&u) = stack.last() {
                if it[u] == adj[u].len() {
                    dist[u] = INF;
                    stack.pop();
                    continue;
                }
                let w = mr[adj[u][it[u]]];
                if w == FREE {
                    for &x in &stack {
                        let v = adj[x][it[x]];
                        ml[x] = v;
                        mr[v] = x;
                    }
                    break;
                } else if dist[w] != INF && dist[w] == dist[u] + 1 {
                    stack.push(w);
                } else {
                    it[u] += 1;
                }
            }
        }
    }
    mr.into_iter().map(|u| (u != FREE).then_some(u)).collect()
}

/// Lays every machine out: containers by non-decreasing load from time 0,
/// each block on the ε-grid with idle `D`, then its tiny jobs, then its
/// small jobs (non-decreasing); tiny volume beyond the container's `T`
/// shifts the rest of the container later. The next container starts on the
/// grid one unit after the previous content; medium and large jobs follow in
/// non-decreasing size without idle.
pub fn materialize_schedule(plans: &[MachinePlan], pool: &Pool, ci: &ClassifiedInstance) -> Schedule {
    let e = pool.eps.value();
    let e2 = pool.eps.sq();
    let mut out = Vec::new();
    for (i, plan) in plans.iter().enumerate() {
        let mut order: Vec<&Occurrence> = plan.containers.iter().collect();
        order.sort_by(|a, b| pool.loads[a.container].load.cmp(&pool.loads[b.container].load).then(a.container.cmp(&b.container)));
        let mut base = zero();
        for occ in order {
            let cont = &pool.containers[occ.container];
            let mut cur: Option<Rational> = None;
            let mut shift = zero();
            for (k, blk) in cont.blocks.iter().enumerate() {
                let nominal = &base + int(k as i64) * &e + &shift;
                let mut pos = match &cur {
                    Some(c) if c > &nominal => c.clone(),
                    _ => nominal,
                };
                pos += int(i64::from(blk.d)) * &e2;
                let placed = !occ.tiny[k].is_empty() || !occ.small[k].is_empty();
                let mut tiny_vol = zero();
                for &j in &occ.tiny[k] {
                    out.push(ScheduledJob::new(j, i, pos.clone(), ci.size(j).clone()));
                    pos += ci.size(j);
                    tiny_vol += ci.size(j);
                }
                let mut small = occ.small[k].clone();
                small.sort_by(|a, b| ci.size(*a).cmp(ci.size(*b)).then(a.cmp(b)));
                for j in small {
                    out.push(ScheduledJob::new(j, i, pos.clone(), ci.size(j).clone()));
                    pos += ci.size(j);
                }
                let virtual_tiny = if blk.t_prime { int(i64::from(blk.t)) * &e2 } else { zero() };
                if tiny_vol > virtual_tiny {
                    shift += tiny_vol - virtual_tiny;
                }
                if placed {
                    cur = Some(pos);
                }
            }
            if let Some(end) = cur {
                base = Rational::from_integer(ceil_int(&(&end / &e))) * &e + one();
            }
        }
        let mut big: Vec<usize> = plan.medium.iter().chain(&plan.large).copied().collect();
        big.sort_by(|a, b| ci.size(*a).cmp(ci.size(*b)).then(a.cmp(b)));
        for j in big {
            out.push(ScheduledJob::new(j, i, base.clone(), ci.size(j).clone()));
            base += ci.size(j);
        }
    }
    Schedule::new(out)
}

/// All stages in order; the result is validated before it is returned.
pub fn round_milp_to_schedule(sol: &MilpSolution, pool: &Pool, ci: &ClassifiedInstance) -> Result<(Schedule, Vec<MachinePlan>)> {
    let mut plans = assign_rigid(sol, pool, ci)?;
    assign_flexible(&mut plans, sol, pool, ci)?;
    assign_small_jobs(&mut plans, pool, ci)?;
    let tiny = ci.jobs_of(JobClass::Tiny);
    if !tiny.is_empty() {
        let blocks = universal_blocks(&plans, sol, pool);
        let b = ci.rounded.base.burst_limit;
        let omega_prime = solve_omega_lp(&blocks, &plans, pool, b, tiny.len())?;
        let y = repair_tiny_fractional(&blocks, &omega_prime)?;
        let sizes = &ci.rounded.rounded_sizes;
        let loads: Vec<Rational> = y.iter().map(|row| row.iter().map(|(j, f)| f * &sizes[*j]).sum()).collect();
        let assigned = best_fit_round(&y, &omega_prime, &loads, sizes)?;
        for (blk, jobs) in blocks.iter().zip(assigned) {
            plans[blk.machine].containers[blk.occurrence].tiny[blk.block] = jobs;
        }
    }
    let s = materialize_schedule(&plans, pool, ci);
    s.check_coverage(ci.n())?;
    let v = check_time_constraint(&s, ci.rounded.base.burst_limit)?;
    if !v.ok {
        return Err(StsError::Internal(format!("rounded schedule violates the time constraint: {:?}", v.witness)));
    }
    let bound = (one() + int(10) * pool.eps.value()) * &pool.c_nice;
    if s.makespan() > bound {
        return Err(StsError::Internal(format!("rounded makespan {} exceeds (1+10ε)·C_nice = {bound}", s.makespan())));
    }
    Ok((s, plans))
}
