//! Concrete schedules and the validators for the time constraint, the
//! modified (ε-grid) time constraint and niceness.
//!
//! For jobs ordered by start on one machine, a unit window `[α, α+1)` can
//! meet `B+1` jobs only if it meets `B+1` consecutive ones, and consecutive
//! jobs `a..=a+B` share such a window iff `start(a+B) < end(a) + 1`. Both
//! checks below reduce to that scan; [`oracle`] keeps the window-sliding
//! versions for cross-checking.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Result, StsError};
use crate::model::{ClassifiedInstance, Eps};
use crate::rational::{floor_int, int, one, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledJob {
    /// Index into the instance's job list.
    pub job: usize,
    pub machine: usize,
    pub start: Rational,
    pub size: Rational,
}

impl ScheduledJob {
    pub fn new(job: usize, machine: usize, start: Rational, size: Rational) -> Self {
        ScheduledJob { job, machine, start, size }
    }

    pub fn end(&self) -> Rational {
        &self.start + &self.size
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub assignments: Vec<ScheduledJob>,
}

impl Schedule {
    pub fn new(assignments: Vec<ScheduledJob>) -> Self {
        Schedule { assignments }
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn makespan(&self) -> Rational {
        self.assignments.iter().map(ScheduledJob::end).fold(zero(), |m, e| if e > m { e } else { m })
    }

    /// One past the largest machine index in use.
    pub fn machine_count(&self) -> usize {
        self.assignments.iter().map(|a| a.machine + 1).max().unwrap_or(0)
    }

    /// Jobs of one machine ordered by start (ties by job index).
    pub fn machine_jobs(&self, machine: usize) -> Vec<ScheduledJob> {
        let mut v: Vec<ScheduledJob> = self.assignments.iter().filter(|a| a.machine == machine).cloned().collect();
        v.sort_by(|a, b| a.start.cmp(&b.start).then(a.job.cmp(&b.job)));
        v
    }

    pub fn per_machine(&self, machines: usize) -> Vec<Vec<ScheduledJob>> {
        let machines = machines.max(self.machine_count());
        (0..machines).map(|m| self.machine_jobs(m)).collect()
    }

    /// Finishing time of the last job on `machine`.
    pub fn load(&self, machine: usize) -> Rational {
        self.assignments
            .iter()
            .filter(|a| a.machine == machine)
            .map(ScheduledJob::end)
            .fold(zero(), |m, e| if e > m { e } else { m })
    }

    /// Checks that every job index in `0..n` occurs exactly once.
    pub fn check_coverage(&self, n: usize) -> Result<()> {
        let mut seen = alloc::vec![false; n];
        for a in &self.assignments {
            if a.job >= n {
                return Err(StsError::Coverage(format!("unknown job index {}", a.job)));
            }
            if core::mem::replace(&mut seen[a.job], true) {
                return Err(StsError::Coverage(format!("job {} scheduled twice", a.job)));
            }
            if a.start < zero() {
                return Err(StsError::Coverage(format!("job {} starts before 0", a.job)));
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(StsError::Coverage(format!("job {j} is not scheduled")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// More than `B` jobs meet the window `[start, start + length)`.
    Window { machine: usize, jobs: Vec<usize>, start: Rational, length: Rational },
    /// A niceness condition (1-3) fails.
    Nice { condition: u8, machine: usize, jobs: Vec<usize>, detail: String },
    /// A MILP row or bound fails; carries the row tag.
    Row { tag: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub witness: Option<Violation>,
}

impl Verdict {
    pub fn ok() -> Self {
        Verdict { ok: true, witness: None }
    }

    pub fn fail(v: Violation) -> Self {
        Verdict { ok: false, witness: Some(v) }
    }
}

pub fn makespan(s: &Schedule) -> Rational {
    s.makespan()
}

fn sorted_machines(s: &Schedule) -> Result<Vec<Vec<ScheduledJob>>> {
    let per = s.per_machine(0);
    for (m, jobs) in per.iter().enumerate() {
        for w in jobs.windows(2) {
            if w[1].start < w[0].end() {
                return Err(StsError::NotASchedule { machine: m, first: w[0].job, second: w[1].job });
            }
        }
    }
    Ok(per)
}

pub fn check_time_constraint(s: &Schedule, b: usize) -> Result<Verdict> {
    let per = sorted_machines(s)?;
    for (m, jobs) in per.iter().enumerate() {
        for a in 0..jobs.len().saturating_sub(b) {
            let end_a = jobs[a].end();
            let last_start = &jobs[a + b].start;
            if last_start < &(&end_a + one()) {
                // any α in (last_start - 1, end_a) with α >= 0 works
                let lo = last_start - one();
                let alpha = if lo < zero() { zero() } else { (lo + &end_a) / int(2) };
                let ids = jobs[a..=a + b].iter().map(|j| j.job).collect();
                return Ok(Verdict::fail(Violation::Window { machine: m, jobs: ids, start: alpha, length: one() }));
            }
        }
    }
    Ok(Verdict::ok())
}

/// Windows `[tε, tε + 1 + ε)` for integer `t >= 0`.
pub fn check_modified_time_constraint(s: &Schedule, b: usize, eps: Eps) -> Result<Verdict> {
    let per = sorted_machines(s)?;
    let e = eps.value();
    let len = one() + &e;
    for (m, jobs) in per.iter().enumerate() {
        for a in 0..jobs.len().saturating_sub(b) {
            let end_a = jobs[a].end();
            let last_start = &jobs[a + b].start;
            // need t with tε < end_a and tε + 1 + ε > last_start
            let lower = (last_start - &len) / &e;
            let mut t = floor_int(&lower) + 1;
            if t < 0.into() {
                t = 0.into();
            }
            let window_start = Rational::from_integer(t) * &e;
            if window_start < end_a {
                let ids = jobs[a..=a + b].iter().map(|j| j.job).collect();
                return Ok(Verdict::fail(Violation::Window { machine: m, jobs: ids, start: window_start, length: len }));
            }
        }
    }
    Ok(Verdict::ok())
}

/// One ε-block `[kε, (k+1)ε)` of one machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsBlockView {
    pub machine: usize,
    pub index: usize,
    pub start: Rational,
    pub end: Rational,
    /// Jobs whose start lies in the block, ordered by start.
    pub starters: Vec<usize>,
    /// The job that started in an earlier block and is still running at the block start.
    pub crossing_in: Option<usize>,
    /// Idle time inside the block, not counting time after the machine's last job.
    pub idle: Rational,
}

pub fn eps_blocks(s: &Schedule, machine: usize, eps: Eps) -> Vec<EpsBlockView> {
    let jobs = s.machine_jobs(machine);
    blocks_of_sorted(&jobs, machine, eps)
}

pub(crate) fn blocks_of_sorted(jobs: &[ScheduledJob], machine: usize, eps: Eps) -> Vec<EpsBlockView> {
    let Some(machine_end) = jobs.iter().map(ScheduledJob::end).max() else {
        return Vec::new();
    };
    let e = eps.value();
    let count = crate::rational::ceil_i64(&(&machine_end / &e)) as usize;
    let mut views = Vec::with_capacity(count);
    for k in 0..count {
        let start = int(k as i64) * &e;
        let end = &start + &e;
        let mut starters = Vec::new();
        let mut crossing_in = None;
        let limit = if end < machine_end { end.clone() } else { machine_end.clone() };
        let mut busy = zero();
        for j in jobs {
            let je = j.end();
            if j.start >= start && j.start < end {
                starters.push(j.job);
            } else if j.start < start && je > start {
                crossing_in = Some(j.job);
            }
            let lo = if j.start > start { j.start.clone() } else { start.clone() };
            let hi = if je < limit { je } else { limit.clone() };
            if hi > lo {
                busy += hi - lo;
            }
        }
        let span = &limit - &start;
        let idle = if span > busy { span - busy } else { zero() };
        views.push(EpsBlockView { machine, index: k, start, end, starters, crossing_in, idle });
    }
    views
}

/// The four niceness conditions, checked machine by machine.
pub fn check_nice(s: &Schedule, ci: &ClassifiedInstance, eps: Eps, b: usize) -> Result<Verdict> {
    let per = sorted_machines(s)?;
    let inv = int(i64::from(eps.inv()));
    for (m, jobs) in per.iter().enumerate() {
        // (1) tiny/small, then medium, then large
        for w in jobs.windows(2) {
            if ci.class_of[w[0].job].order_rank() > ci.class_of[w[1].job].order_rank() {
                return Ok(Verdict::fail(Violation::Nice {
                    condition: 1,
                    machine: m,
                    jobs: alloc::vec![w[0].job, w[1].job],
                    detail: "class order".into(),
                }));
            }
        }
        // (2) block-canonical layout
        let views = blocks_of_sorted(jobs, m, eps);
        let by_job = |id: usize| jobs.iter().find(|j| j.job == id).unwrap();
        let last_job = jobs.last().map(|j| j.job);
        for v in &views {
            let starters: Vec<&ScheduledJob> = v.starters.iter().map(|&id| by_job(id)).collect();
            for w in starters.windows(2) {
                if w[1].start != w[0].end() || w[1].size < w[0].size {
                    return Ok(Verdict::fail(Violation::Nice {
                        condition: 2,
                        machine: m,
                        jobs: alloc::vec![w[0].job, w[1].job],
                        detail: format!("starters of block {} not contiguous in non-decreasing size", v.index),
                    }));
                }
            }
            if let Some(last) = starters.last() {
                if last.end() < v.end && Some(last.job) != last_job {
                    return Ok(Verdict::fail(Violation::Nice {
                        condition: 2,
                        machine: m,
                        jobs: alloc::vec![last.job],
                        detail: format!("idle after the starters of block {}", v.index),
                    }));
                }
            }
        }
        // (3) unit idle between jobs whose starts differ by at least 1/ε
        let gaps: Vec<Rational> = jobs.windows(2).map(|w| &w[1].start - w[0].end()).collect();
        for a in 0..jobs.len() {
            let mut widest = zero();
            for bi in a + 1..jobs.len() {
                if gaps[bi - 1] > widest {
                    widest = gaps[bi - 1].clone();
                }
                if &jobs[bi].start - &jobs[a].start >= inv && widest < one() {
                    return Ok(Verdict::fail(Violation::Nice {
                        condition: 3,
                        machine: m,
                        jobs: alloc::vec![jobs[a].job, jobs[bi].job],
                        detail: "no unit idle between far-apart starts".into(),
                    }));
                }
            }
        }
    }
    // (4)
    check_modified_time_constraint(s, b, eps)
}

/// Window-sliding reference checks, independent of the consecutive-jobs scan.
pub mod oracle {
    use super::*;

    /// Number of jobs of `machine` meeting `[start, start + len)`.
    pub fn window_count(s: &Schedule, machine: usize, start: &Rational, len: &Rational) -> usize {
        let end = start + len;
        s.assignments.iter().filter(|a| a.machine == machine && a.start < end && &a.end() > start).count()
    }

    /// Slides a unit window over every critical offset (job starts minus one,
    /// job ends, and midpoints between consecutive critical points).
    pub fn time_constraint_ok(s: &Schedule, b: usize) -> bool {
        for m in 0..s.machine_count() {
            let mut pts: Vec<Rational> = alloc::vec![zero()];
            for a in s.assignments.iter().filter(|a| a.machine == m) {
                let p = &a.start - one();
                if p > zero() {
                    pts.push(p);
                }
                pts.push(a.end());
            }
            pts.sort();
            pts.dedup();
            let mut cands = pts.clone();
            for w in pts.windows(2) {
                cands.push((&w[0] + &w[1]) / int(2));
            }
            if let Some(last) = pts.last() {
                cands.push(last + one());
            }
            if cands.iter().any(|c| window_count(s, m, c, &one()) > b) {
                return false;
            }
        }
        true
    }

    /// Enumerates every grid window `[tε, tε+1+ε)` up to the makespan.
    pub fn modified_time_constraint_ok(s: &Schedule, b: usize, eps: Eps) -> bool {
        let e = eps.value();
        let len = one() + &e;
        let horizon = crate::rational::ceil_i64(&(s.makespan() / &e));
        for m in 0..s.machine_count() {
            for t in 0..=horizon {
                if window_count(s, m, &(int(t) * &e), &len) > b {
                    return false;
                }
            }
        }
        true
    }
}

impl Schedule {
    pub fn is_zero_length(&self) -> bool {
        self.makespan().is_zero()
    }
}
