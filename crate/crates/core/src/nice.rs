//! Turning an arbitrary feasible schedule into a nice one.
//!
//! Every machine goes through five passes: ε-padding around integer time
//! points, 2-unit padding around medium/large jobs, moving medium/large jobs
//! to the end, 2-unit padding at multiples of `1/ε`, and finally the
//! per-ε-block consolidation (idle first, starters sorted by size).
//!
//! Padding passes work on a snapshot: every insertion `(at, len)` delays each
//! job with `start >= at` by `len`, all insertions of one pass at once.

use alloc::vec::Vec;

use crate::error::{Result, StsError};
use crate::model::{ClassifiedInstance, Eps, JobClass};
use crate::rational::{ceil_i64, floor_i64, int, zero, Rational};
use crate::schedule::{blocks_of_sorted, check_time_constraint, Schedule, ScheduledJob};

pub fn to_nice(s: &Schedule, ci: &ClassifiedInstance, eps: Eps, b: usize) -> Result<Schedule> {
    if !check_time_constraint(s, b)?.ok {
        return Err(StsError::InputViolatesTimeConstraint);
    }
    let mut out = Vec::with_capacity(s.assignments.len());
    for m in 0..s.machine_count() {
        let jobs = s.machine_jobs(m);
        if jobs.is_empty() {
            continue;
        }
        out.extend(nice_machine(jobs, ci, eps, m));
    }
    Ok(Schedule::new(out))
}

fn is_big(ci: &ClassifiedInstance, job: usize) -> bool {
    matches!(ci.class_of[job], JobClass::Medium | JobClass::Large)
}

fn machine_end(jobs: &[ScheduledJob]) -> Rational {
    jobs.iter().map(ScheduledJob::end).max().unwrap_or_else(zero)
}

/// The job running strictly across `t`, if any.
fn running_at<'a>(jobs: &'a [ScheduledJob], t: &Rational) -> Option<&'a ScheduledJob> {
    jobs.iter().find(|j| &j.start < t && &j.end() > t)
}

fn apply_insertions(jobs: &mut [ScheduledJob], ins: &[(Rational, Rational)]) {
    let shifts: Vec<Rational> = jobs
        .iter()
        .map(|j| ins.iter().filter(|(at, _)| at <= &j.start).map(|(_, len)| len.clone()).sum())
        .collect();
    for (j, d) in jobs.iter_mut().zip(shifts) {
        j.start += d;
    }
}

/// Padding around the points `t` in `points`: `at_job(j)` gives the
/// insertions used when a job runs across `t`, otherwise `len` goes at `t`.
fn pad_points<F>(jobs: &mut [ScheduledJob], points: &[Rational], len: &Rational, at_job: F)
where
    F: Fn(&ScheduledJob) -> Vec<Rational>,
{
    let mut ins = Vec::new();
    for t in points {
        match running_at(jobs, t) {
            Some(j) => ins.extend(at_job(j).into_iter().map(|p| (p, len.clone()))),
            None => ins.push((t.clone(), len.clone())),
        }
    }
    apply_insertions(jobs, &ins);
}

/// Multiples of `step` strictly inside `(0, end)`.
fn grid_points(step: &Rational, end: &Rational) -> Vec<Rational> {
    let last = ceil_i64(&(end / step)) - 1;
    (1..=last).map(|q| int(q) * step).collect()
}

fn nice_machine(mut jobs: Vec<ScheduledJob>, ci: &ClassifiedInstance, eps: Eps, m: usize) -> Vec<ScheduledJob> {
    let e = eps.value();

    // (1) 2ε at every integer point, around the running job if there is one
    let pts = grid_points(&int(1), &machine_end(&jobs));
    pad_points(&mut jobs, &pts, &(int(2) * &e), |j| alloc::vec![j.start.clone(), j.end()]);

    // (2) 2 units before and after each medium/large job
    let ins: Vec<(Rational, Rational)> = jobs
        .iter()
        .filter(|j| is_big(ci, j.job))
        .flat_map(|j| [(j.start.clone(), int(2)), (j.end(), int(2))])
        .collect();
    apply_insertions(&mut jobs, &ins);

    // (3) pull medium/large jobs out, close their gaps, append them sorted
    let (mut big, mut rest): (Vec<_>, Vec<_>) = jobs.into_iter().partition(|j| is_big(ci, j.job));
    let removed: Vec<(Rational, Rational)> = big.iter().map(|j| (j.start.clone(), j.size.clone())).collect();
    for j in &mut rest {
        let d: Rational = removed.iter().filter(|(at, _)| at < &j.start).map(|(_, p)| p.clone()).sum();
        j.start -= d;
    }
    if !big.is_empty() {
        let prefix_end = machine_end(&rest);
        // the unit gap starts on the ε-grid so no 1'-window sees both sides
        let mut at = int(ceil_i64(&(&prefix_end / &e))) * &e + int(1);
        big.sort_by(|a, b| a.size.cmp(&b.size).then(a.job.cmp(&b.job)));
        for j in &mut big {
            j.start = at.clone();
            at += &j.size;
        }
    }
    rest.extend(big);
    let mut jobs = rest;
    jobs.sort_by(|a, b| a.start.cmp(&b.start).then(a.job.cmp(&b.job)));

    // (4) 2 units at multiples of 1/ε, after the running job if there is one
    let inv = int(i64::from(eps.inv()));
    let pts = grid_points(&inv, &machine_end(&jobs));
    pad_points(&mut jobs, &pts, &int(2), |j| alloc::vec![j.end()]);

    // (5) per ε-block: idle first, then the starters back to back by size
    let views = blocks_of_sorted(&jobs, m, eps);
    let pos = |id: usize, jobs: &[ScheduledJob]| jobs.iter().position(|j| j.job == id).unwrap();
    // crossing ends are read from the pre-pass layout; sorting a block keeps
    // the end of its content but may change which job carries it
    let snapshot = jobs.clone();
    for v in &views {
        if v.starters.is_empty() {
            continue;
        }
        let base = match v.crossing_in {
            Some(c) => snapshot[pos(c, &snapshot)].end(),
            None => v.start.clone(),
        };
        let mut order: Vec<usize> = v.starters.iter().map(|&id| pos(id, &jobs)).collect();
        order.sort_by(|&a, &b| jobs[a].size.cmp(&jobs[b].size).then(jobs[a].job.cmp(&jobs[b].job)));
        let mut at = base + &v.idle;
        for i in order {
            jobs[i].start = at.clone();
            at += &jobs[i].size;
        }
    }
    debug_assert!(jobs.iter().all(|j| floor_i64(&(&j.start / &e)) >= 0));
    jobs
}
