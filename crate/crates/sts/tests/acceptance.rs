//! Acceptance criteria 1-9, one line each. Runs as a plain binary so the
//! report is always printed; exits non-zero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sts_core::baselines::{brute_force_opt, earliest_start_times, OracleCaps};
use sts_core::containers::{
    build_pool, container_load, container_windows, extract_milp_solution, Block, Container, EnumCaps, Pool,
};
use sts_core::lp::{solve_lp, LinearProgram, LpOutcome, Sense};
use sts_core::milp::{build_milp, solve_milp, verify_milp_solution, MilpOutcome};
use sts_core::model::{classify_jobs, round_instance, stretch_to_rounded, ClassifiedInstance, Eps, Instance};
use sts_core::nice::to_nice;
use sts_core::rational::{ceil_int, floor_int, int, is_integral, one, rat, zero, Rational};
use sts_core::rounding::{best_fit_round, solve_omega_lp, MachinePlan, Occurrence, UniversalBlock};
use sts_core::schedule::{check_modified_time_constraint, check_nice, check_time_constraint, oracle};
use sts_core::scheme::{eptas, SchemeCaps};
use sts_core::{Schedule, ScheduledJob, StsError, Unlimited};

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check, Duration); 9] = [
        ("modified constraint implies time constraint", modified_implies_original, secs(10)),
        ("stretching onto rounded sizes", stretch_rounding, secs(30)),
        ("nice transform", nice_transform, secs(60)),
        ("oracle consistency", oracle_consistency, secs(600)),
        ("MILP feasible at the nice guess", milp_at_nice_guess, secs(600)),
        ("interval LPs are integral", interval_lps, secs(600)),
        ("slot rounding", slot_rounding, secs(600)),
        ("end-to-end scheme", end_to_end, secs(600)),
        ("bench determinism", bench_determinism, secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let el = t.elapsed();
        let result = match result {
            Ok(d) if el > *limit => Err(format!("{d}; too slow: {:.1}s > {}s", el.as_secs_f64(), limit.as_secs())),
            r => r,
        };
        match result {
            Ok(d) => println!("criterion {}: PASS {name} ({d}) {:.1}s", i + 1, el.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({d}) {:.1}s", i + 1, el.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn eps4() -> Eps {
    Eps::new(4).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Per machine, jobs in random order; each start is the earliest that keeps
/// the time constraint, plus a random delay.
fn random_feasible(rng: &mut ChaCha8Rng, sizes: &[Rational], machines: usize, b: usize) -> Schedule {
    let mut per: Vec<Vec<usize>> = vec![Vec::new(); machines];
    for j in 0..sizes.len() {
        per[rng.gen_range(0..machines)].push(j);
    }
    let mut out = Vec::new();
    for (m, jobs) in per.into_iter().enumerate() {
        let mut ends: Vec<Rational> = Vec::new();
        for (i, &j) in jobs.iter().enumerate() {
            let mut s = if i == 0 { zero() } else { ends[i - 1].clone() };
            if i >= b && &ends[i - b] + one() > s {
                s = &ends[i - b] + one();
            }
            if rng.gen_bool(0.5) {
                s += rat(rng.gen_range(0..=16), 8);
            }
            ends.push(&s + &sizes[j]);
            out.push(ScheduledJob::new(j, m, s, sizes[j].clone()));
        }
    }
    Schedule::new(out)
}

fn modified_implies_original() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut modified_ok = 0;
    for case in 0..10_000 {
        let n = rng.gen_range(1..=10);
        let m = rng.gen_range(1..=2);
        let b = rng.gen_range(2..=4);
        let mut cursor = vec![zero(); m];
        let mut jobs = Vec::new();
        for j in 0..n {
            let mi = rng.gen_range(0..m);
            let size = rat(rng.gen_range(1..=8), 8);
            let start = &cursor[mi] + rat(rng.gen_range(0..=12), 8);
            cursor[mi] = &start + &size;
            jobs.push(ScheduledJob::new(j, mi, start, size));
        }
        let s = Schedule::new(jobs);
        if check_modified_time_constraint(&s, b, eps4()).map_err(|e| e.to_string())?.ok {
            modified_ok += 1;
            ensure(check_time_constraint(&s, b).map_err(|e| e.to_string())?.ok, || format!("case {case}: {s:?}"))?;
        }
    }
    Ok(format!("{modified_ok} of 10000 schedules pass the modified constraint, all pass the original"))
}

fn stretch_rounding() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let eps = eps4();
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=3);
        let b = rng.gen_range(2..=4);
        let sizes: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=64), 16)).collect();
        let s = random_feasible(&mut rng, &sizes, m, b);
        let inst = Instance::from_sizes(&sizes, m, b).unwrap();
        let ri = round_instance(&inst, eps);
        let out = stretch_to_rounded(&s, &ri, eps);
        out.check_coverage(n).map_err(|e| format!("case {case}: {e}"))?;
        for a in &out.assignments {
            ensure(a.end() - &a.start == ri.rounded_sizes[a.job], || format!("case {case}: job {} not rounded", a.job))?;
        }
        ensure(check_time_constraint(&out, b).unwrap().ok, || format!("case {case}: stretched schedule infeasible"))?;
        ensure(out.makespan() <= eps.growth() * s.makespan(), || format!("case {case}: makespan grew too much"))?;
    }
    Ok("1000 schedules, exact".into())
}

fn nice_transform() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps = eps4();
    let factor = one() + rat(17, 4);
    let mut worst = zero();
    for case in 0..1000 {
        let n = rng.gen_range(1..=10);
        let m = rng.gen_range(1..=3);
        let b = rng.gen_range(2..=4);
        let sizes: Vec<Rational> = (0..n).map(|_| eps.power(rng.gen_range(-16..=14))).collect();
        let inst = Instance::from_sizes(&sizes, m, b).unwrap();
        let ri = round_instance(&inst, eps);
        let s = random_feasible(&mut rng, &sizes, m, b);
        let guess = eps.ceil_power(&s.makespan()).1;
        let ci = classify_jobs(&ri, eps, &guess).unwrap();
        let out = to_nice(&s, &ci, eps, b).map_err(|e| format!("case {case}: {e}"))?;
        let v = check_nice(&out, &ci, eps, b).unwrap();
        ensure(v.ok, || format!("case {case}: {:?}", v.witness))?;
        for mi in 0..m {
            let before = s.load(mi);
            let after = out.load(mi);
            ensure(after <= &factor * &before, || format!("case {case}: machine {mi} load {after} > (1+17ε)·{before}"))?;
            if !before.is_zero() && after.clone() / &before > worst {
                worst = after / before;
            }
        }
    }
    Ok(format!("1000 schedules, worst load ratio {:.3} (bound 5.25)", worst.to_f64().unwrap()))
}

/// Smallest start of each position over all feasible grid schedules of this
/// order (starts on the 1/4 grid up to `horizon`), found by depth-first
/// search with the sliding-window check on every prefix.
fn grid_minimal_starts(sizes: &[Rational], b: usize, horizon: &Rational) -> (Vec<Option<Rational>>, Option<Rational>) {
    fn go(
        k: usize,
        sizes: &[Rational],
        b: usize,
        horizon: &Rational,
        prefix: &mut Vec<ScheduledJob>,
        best: &mut Vec<Option<Rational>>,
        best_ms: &mut Option<Rational>,
    ) {
        if k == sizes.len() {
            for (i, a) in prefix.iter().enumerate() {
                if best[i].as_ref().is_none_or(|v| &a.start < v) {
                    best[i] = Some(a.start.clone());
                }
            }
            let ms = prefix.last().map(ScheduledJob::end).unwrap_or_else(zero);
            if best_ms.as_ref().is_none_or(|v| &ms < v) {
                *best_ms = Some(ms);
            }
            return;
        }
        let mut start = prefix.last().map(ScheduledJob::end).unwrap_or_else(zero);
        while &start + &sizes[k] <= *horizon {
            prefix.push(ScheduledJob::new(k, 0, start.clone(), sizes[k].clone()));
            if oracle::time_constraint_ok(&Schedule::new(prefix.clone()), b) {
                go(k + 1, sizes, b, horizon, prefix, best, best_ms);
            }
            prefix.pop();
            start += rat(1, 4);
        }
    }
    let mut best = vec![None; sizes.len()];
    let mut best_ms = None;
    go(0, sizes, b, horizon, &mut Vec::new(), &mut best, &mut best_ms);
    (best, best_ms)
}

fn oracle_consistency() -> Result<String, String> {
    let palette = [rat(1, 4), rat(1, 2), rat(1, 1)];
    let mut orders = 0;
    for n in 1..=4usize {
        for code in 0..3usize.pow(n as u32) {
            let sizes: Vec<Rational> = (0..n).map(|i| palette[code / 3usize.pow(i as u32) % 3].clone()).collect();
            for b in 2..=3 {
                let starts = earliest_start_times(&sizes, b);
                let ms = &starts[n - 1] + &sizes[n - 1];
                let horizon = &ms + one();
                let (best, best_ms) = grid_minimal_starts(&sizes, b, &horizon);
                for i in 0..n {
                    ensure(best[i].as_ref() == Some(&starts[i]), || format!("{sizes:?} b={b}: position {i} greedy {} grid {:?}", starts[i], best[i]))?;
                }
                ensure(best_ms.as_ref() == Some(&ms), || format!("{sizes:?} b={b}: makespan"))?;
                orders += 1;
            }
        }
    }
    let three = vec![rat(1, 2); 3];
    let one_machine = brute_force_opt(&Instance::from_sizes(&three, 1, 2).unwrap(), OracleCaps::default(), &Unlimited).unwrap().1;
    let two_machines = brute_force_opt(&Instance::from_sizes(&three, 2, 2).unwrap(), OracleCaps::default(), &Unlimited).unwrap().1;
    ensure(one_machine == int(2), || format!("3×0.5, m=1: {one_machine}"))?;
    ensure(two_machines == int(1), || format!("3×0.5, m=2: {two_machines}"))?;
    Ok(format!("{orders} (order, B) pairs; 3×0.5 gives 2 and 1"))
}

struct CorpusItem {
    inst: Instance,
    ci: ClassifiedInstance,
    nice: Schedule,
}

/// Tiny instances whose nice optimum fits the single-container regime
/// (C_nice = 1/ε = 4).
fn corpus(count: usize) -> Vec<CorpusItem> {
    let eps = eps4();
    let c = int(4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=2);
        let b = rng.gen_range(2..=3);
        let sizes: Vec<Rational> = (0..n).map(|_| eps.power(rng.gen_range(-16..=3))).collect();
        let inst = Instance::from_sizes(&sizes, m, b).unwrap();
        let ri = round_instance(&inst, eps);
        let (opt, _) = brute_force_opt(&ri.instance(), OracleCaps::default(), &Unlimited).unwrap();
        let ci = classify_jobs(&ri, eps, &c).unwrap();
        let nice = to_nice(&opt, &ci, eps, b).unwrap();
        if nice.makespan() <= c {
            out.push(CorpusItem { inst, ci, nice });
        }
    }
    out
}

fn milp_at_nice_guess() -> Result<String, String> {
    let c = int(4);
    let items = corpus(200);
    let mut largest = 0;
    for (i, it) in items.iter().enumerate() {
        let (pool, sol) = extract_milp_solution(&it.nice, &it.ci, &c).map_err(|e| format!("instance {i}: extraction: {e}"))?;
        let v = verify_milp_solution(&build_milp(&it.ci, &pool), &sol);
        ensure(v.ok, || format!("instance {i}: extracted solution violates {:?}", v.witness))?;
        let pool = build_pool(&it.ci, &c, EnumCaps::default()).map_err(|e| format!("instance {i}: {e}"))?;
        let model = build_milp(&it.ci, &pool);
        largest = largest.max(model.lp.num_vars());
        match solve_milp(&model, &Unlimited).map_err(|e| format!("instance {i}: {e}"))? {
            MilpOutcome::Feasible(sol) => {
                let v = verify_milp_solution(&model, &sol);
                ensure(v.ok, || format!("instance {i}: solver output violates {:?}", v.witness))?;
            }
            MilpOutcome::Infeasible => return Err(format!("instance {i}: solver reports infeasible")),
        }
    }
    Ok(format!("{} instances, largest MILP {largest} variables", items.len()))
}

fn interval_lps() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut optimal = 0;
    for case in 0..1000 {
        let k = rng.gen_range(2..=8);
        let mut lp = LinearProgram::new();
        let vars: Vec<usize> = (0..k).map(|i| lp.add_var(format!("x{i}"), zero(), Some(int(rng.gen_range(1..=3))))).collect();
        for r in 0..rng.gen_range(1..=6) {
            let a = rng.gen_range(0..k);
            let b = rng.gen_range(a..k);
            let sense = [Sense::Le, Sense::Ge, Sense::Eq][rng.gen_range(0..3)];
            let row = (a..=b).map(|i| (vars[i], one())).collect();
            lp.add_row(format!("r{r}"), row, sense, int(rng.gen_range(0..=2 * (b - a + 1) as i64)));
        }
        lp.objective = Some(vars.iter().map(|&v| (v, int(rng.gen_range(-3..=3)))).collect());
        if let LpOutcome::Optimal(x) = solve_lp(&lp).map_err(|e| e.to_string())? {
            optimal += 1;
            ensure(x.iter().all(is_integral), || format!("case {case}: fractional vertex {x:?}"))?;
        }
    }
    let (matched, empty) = omega_cases()?;
    Ok(format!("{optimal} of 1000 interval LPs optimal, all integral; {matched} count LPs match enumeration ({empty} infeasible)"))
}

/// Random containers on one machine (at most six blocks in total) with
/// random Ω, compared against enumeration of all integral points.
fn omega_cases() -> Result<(usize, usize), String> {
    let eps = eps4();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let small = vec![rat(1, 2)];
    let mut empty = 0;
    for case in 0..1000 {
        let mut containers = Vec::new();
        let mut left = 6;
        while left > 0 && (containers.is_empty() || rng.gen_bool(0.4)) {
            let len = rng.gen_range(1..=left);
            left -= len;
            let blocks = (0..len)
                .map(|k| Block { s: vec![u32::from(rng.gen_bool(0.2))], t: 0, t_prime: true, d: 0, p: k > 0 && rng.gen_bool(0.3) })
                .collect();
            containers.push(Container { blocks });
        }
        let c_nice = int(8);
        let loads = containers.iter().map(|c| container_load(c, eps, &small, &c_nice)).collect();
        let pool = Pool {
            eps,
            c_nice,
            small_sizes: small.clone(),
            large_sizes: vec![],
            containers: containers.clone(),
            loads,
            long_classes: vec![],
            configurations: vec![],
        };
        let plan = MachinePlan {
            configuration: 0,
            containers: containers.iter().enumerate().map(|(t, c)| Occurrence::new(t, c.blocks.len())).collect(),
            medium: vec![],
            large: vec![],
        };
        let mut blocks = Vec::new();
        for (o, c) in containers.iter().enumerate() {
            for k in 0..c.blocks.len() {
                let omega = rat(rng.gen_range(0..=4), 2);
                blocks.push(UniversalBlock { machine: 0, occurrence: o, block: k, y: vec![(0, omega.clone())], omega });
            }
        }
        let b = rng.gen_range(2..=5);
        let total: Rational = blocks.iter().map(|u| u.omega.clone()).sum();
        // mostly the realistic target, sometimes one off
        let slack = i64::from(rng.gen_bool(0.1));
        let lo = (floor_int(&total).to_i64().unwrap() - slack).max(0);
        let tiny = rng.gen_range(lo..=ceil_int(&total).to_i64().unwrap() + slack) as usize;
        // enumeration
        let ranges: Vec<(i64, i64)> =
            blocks.iter().map(|u| (floor_int(&u.omega).to_i64().unwrap(), ceil_int(&u.omega).to_i64().unwrap())).collect();
        let feasible = |x: &[i64]| -> bool {
            if x.iter().sum::<i64>() != tiny as i64 {
                return false;
            }
            let mut base = 0;
            for c in &containers {
                let n = c.blocks.len();
                for (wlo, whi) in container_windows(n, eps) {
                    if (wlo..whi).all(|k| blocks[base + k].omega.is_zero()) {
                        continue;
                    }
                    let used: i64 = c.blocks[wlo..whi].iter().map(|x| i64::from(x.small_count())).sum::<i64>() + i64::from(c.blocks[wlo].p);
                    if (wlo..whi).map(|k| x[base + k]).sum::<i64>() > b as i64 - used {
                        return false;
                    }
                }
                base += n;
            }
            true
        };
        let mut points = Vec::new();
        let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            if feasible(&x) {
                points.push(x.clone());
            }
            let mut i = 0;
            while i < x.len() && x[i] == ranges[i].1 {
                x[i] = ranges[i].0;
                i += 1;
            }
            if i == x.len() {
                break;
            }
            x[i] += 1;
        }
        match solve_omega_lp(&blocks, &[plan], &pool, b, tiny) {
            Ok(got) => {
                let got: Vec<i64> = got.iter().map(|&v| v as i64).collect();
                ensure(points.contains(&got), || format!("case {case}: {got:?} is not a feasible integral point"))?;
            }
            Err(StsError::Internal(_)) => {
                ensure(points.is_empty(), || format!("case {case}: solver found nothing, enumeration found {:?}", points[0]))?;
                empty += 1;
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    Ok((1000, empty))
}

/// Marginals: job `j` in block `assign[j]`.
fn random_assignment(rng: &mut ChaCha8Rng, caps: &[u64]) -> Vec<usize> {
    let mut slots: Vec<usize> = caps.iter().enumerate().flat_map(|(k, &c)| std::iter::repeat_n(k, c as usize)).collect();
    slots.shuffle(rng);
    slots
}

/// A fractional system: a convex mix of two random integral assignments
/// with the same cardinalities.
fn fractional_system(rng: &mut ChaCha8Rng, n: usize, blocks: usize) -> (Vec<Vec<(usize, Rational)>>, Vec<u64>) {
    let mut caps = vec![0u64; blocks];
    for _ in 0..n {
        caps[rng.gen_range(0..blocks)] += 1;
    }
    let a = random_assignment(rng, &caps);
    let b = random_assignment(rng, &caps);
    let lambda = [rat(1, 2), rat(1, 3), rat(3, 4)][rng.gen_range(0..3)].clone();
    let mut y: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); blocks];
    for j in 0..n {
        if a[j] == b[j] {
            y[a[j]].push((j, one()));
        } else {
            y[a[j]].push((j, lambda.clone()));
            y[b[j]].push((j, one() - &lambda));
        }
    }
    (y, caps)
}

fn check_rounding(y: &[Vec<(usize, Rational)>], caps: &[u64], sizes: &[Rational]) -> Result<(), String> {
    let loads: Vec<Rational> = y.iter().map(|r| r.iter().map(|(j, f)| f * &sizes[*j]).sum()).collect();
    let p_max = sizes.iter().max().cloned().unwrap_or_else(zero);
    let got = best_fit_round(y, caps, &loads, sizes).map_err(|e| e.to_string())?;
    let mut seen = vec![false; sizes.len()];
    for (k, jobs) in got.iter().enumerate() {
        ensure(jobs.len() as u64 == caps[k], || format!("block {k}: {} jobs, capacity {}", jobs.len(), caps[k]))?;
        let vol: Rational = jobs.iter().map(|&j| sizes[j].clone()).sum();
        ensure(vol <= &loads[k] + &p_max, || format!("block {k}: load {vol} > {} + p_max", loads[k]))?;
        for &j in jobs {
            ensure(!std::mem::replace(&mut seen[j], true), || format!("job {j} twice"))?;
        }
    }
    ensure(seen.iter().all(|&s| s), || "a job is missing".into())
}

fn slot_rounding() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..1000 {
        let n = rng.gen_range(1..=30);
        let blocks = rng.gen_range(1..=6);
        let sizes: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=64), 64)).collect();
        let (y, caps) = fractional_system(&mut rng, n, blocks);
        check_rounding(&y, &caps, &sizes).map_err(|e| format!("case {case}: {e}"))?;
    }
    let n = 100_000;
    let sizes: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=64), 64)).collect();
    let (y, caps) = fractional_system(&mut rng, n, 1000);
    let t = Instant::now();
    check_rounding(&y, &caps, &sizes).map_err(|e| format!("smoke: {e}"))?;
    let el = t.elapsed().as_secs_f64();
    ensure(el < 5.0, || format!("n = 10^5 took {el:.1}s"))?;
    Ok(format!("1000 systems; n = 10^5 in {el:.2}s"))
}

fn end_to_end() -> Result<String, String> {
    let bound = (one() + rat(1, 4)) * (one() + rat(1, 4)) * (one() + rat(17, 4)) * (one() + rat(10, 4));
    let items = corpus(200);
    let mut ratios = Vec::new();
    let mut slowest = 0.0f64;
    for (i, it) in items.iter().enumerate() {
        let (_, opt) = brute_force_opt(&it.inst, OracleCaps::default(), &Unlimited).unwrap();
        let t = Instant::now();
        let s = eptas(&it.inst, eps4(), &SchemeCaps::default(), &Unlimited).map_err(|e| format!("instance {i}: {e}"))?;
        let el = t.elapsed().as_secs_f64();
        slowest = slowest.max(el);
        ensure(el <= 120.0, || format!("instance {i}: {el:.1}s"))?;
        s.check_coverage(it.inst.len()).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(check_time_constraint(&s, it.inst.burst_limit).unwrap().ok, || format!("instance {i}: time constraint"))?;
        let ratio = s.makespan() / &opt;
        ensure(ratio <= bound, || format!("instance {i}: ratio {ratio}"))?;
        ratios.push(ratio.to_f64().unwrap());
    }
    ratios.sort_by(f64::total_cmp);
    let q = |p: f64| ratios[((ratios.len() - 1) as f64 * p).round() as usize];
    let exact = ratios.iter().filter(|&&r| r == 1.0).count();
    Ok(format!(
        "{} instances, ratio min {:.3} median {:.3} p90 {:.3} max {:.3}, {exact} optimal, bound {:.2}, slowest {slowest:.2}s",
        ratios.len(),
        q(0.0),
        q(0.5),
        q(0.9),
        q(1.0),
        bound.to_f64().unwrap()
    ))
}

fn bench_determinism() -> Result<String, String> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_sts")).args(["bench", "--seed", "7"]).output().map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    ensure(a.status.success(), || String::from_utf8_lossy(&a.stderr).into_owned())?;
    ensure(a.stdout == b.stdout, || "CSV differs between runs".into())?;
    Ok(format!("{} identical CSV lines", String::from_utf8_lossy(&a.stdout).lines().count()))
}
