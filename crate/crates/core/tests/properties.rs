mod common;

use common::eps4;
use proptest::prelude::*;
use sts_core::baselines::{brute_force_opt, earliest_start_times, OracleCaps};
use sts_core::model::{classify_jobs, makespan_guesses, round_instance, Eps, Instance, JobClass};
use sts_core::rational::{int, one, rat, Rational};
use sts_core::rounding::best_fit_round;
use sts_core::schedule::{check_modified_time_constraint, check_time_constraint, oracle};
use sts_core::scheme::{eptas_traced, GuessOutcome, SchemeCaps};
use sts_core::{Schedule, ScheduledJob, Unlimited};

fn sizes(max_num: i64, den: i64, max_len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((1..=max_num).prop_map(move |k| rat(k, den)), 1..=max_len)
}

/// Jobs in order on their machines, each after its predecessor plus a gap.
fn schedules() -> impl Strategy<Value = (Schedule, usize)> {
    (prop::collection::vec((0..2usize, 1..=8i64, 0..=12i64), 1..=10), 2..=4usize).prop_map(|(jobs, b)| {
        let mut cursor = [Rational::from_integer(0.into()), Rational::from_integer(0.into())];
        let out = jobs
            .into_iter()
            .enumerate()
            .map(|(j, (m, size, gap))| {
                let start = &cursor[m] + rat(gap, 8);
                cursor[m] = &start + rat(size, 8);
                ScheduledJob::new(j, m, start, rat(size, 8))
            })
            .collect();
        (Schedule::new(out), b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rounding_stays_within_one_step(ps in sizes(1000, 37, 8), k in 4u32..=8) {
        let eps = Eps::new(k).unwrap();
        let inst = Instance::from_sizes(&ps, 1, 2).unwrap();
        let ri = round_instance(&inst, eps);
        for (p, q) in ps.iter().zip(&ri.rounded_sizes) {
            prop_assert!(p <= q && q <= &(eps.growth() * p));
            prop_assert_eq!(eps.ceil_power(q).1, q.clone());
        }
    }

    #[test]
    fn classification_partitions_and_bounds(ps in sizes(4000, 64, 10), step in 0usize..6) {
        let eps = eps4();
        let ri = round_instance(&Instance::from_sizes(&ps, 1, 2).unwrap(), eps);
        let grid = makespan_guesses(&ri, eps).unwrap();
        let guess = grid.values[step.min(grid.values.len() - 1)].clone();
        let ci = classify_jobs(&ri, eps, &guess).unwrap();
        let theta = if eps.value() * &guess > int(4) { eps.value() * &guess } else { int(4) };
        for (j, p) in ri.rounded_sizes.iter().enumerate() {
            let expect = if p <= &eps.sq() {
                JobClass::Tiny
            } else if p <= &int(4) {
                JobClass::Small
            } else if p <= &theta {
                JobClass::Medium
            } else {
                JobClass::Large
            };
            prop_assert_eq!(ci.class_of[j], expect);
        }
        // distinct powers of 5/4 in (1/16, 4] and (θ, guess]
        let count = |lo: &Rational, hi: &Rational| {
            let (mut e, mut v) = eps.ceil_power(lo);
            if &v == lo { e += 1; v = eps.power(e); }
            let mut c = 0;
            while &v <= hi { c += 1; v *= eps.growth(); }
            c
        };
        prop_assert!(ci.small_sizes.len() <= count(&eps.sq(), &int(4)));
        prop_assert!(ci.large_sizes.len() <= count(&theta, &guess));
    }

    #[test]
    fn modified_constraint_implies_original((s, b) in schedules()) {
        if check_modified_time_constraint(&s, b, eps4()).unwrap().ok {
            prop_assert!(check_time_constraint(&s, b).unwrap().ok);
        }
        prop_assert_eq!(check_time_constraint(&s, b).unwrap().ok, oracle::time_constraint_ok(&s, b));
        prop_assert_eq!(check_modified_time_constraint(&s, b, eps4()).unwrap().ok, oracle::modified_time_constraint_ok(&s, b, eps4()));
    }

    #[test]
    fn earliest_starts_are_feasible(ps in sizes(16, 8, 7), b in 2usize..=4) {
        let st = earliest_start_times(&ps, b);
        let s = Schedule::new(ps.iter().zip(&st).enumerate().map(|(j, (p, t))| ScheduledJob::new(j, 0, t.clone(), p.clone())).collect());
        prop_assert!(oracle::time_constraint_ok(&s, b));
    }

    #[test]
    fn slot_rounding_respects_cardinality_and_load(
        ps in sizes(64, 64, 20),
        split in prop::collection::vec((0..4usize, 0..4usize, 1..=3i64), 20),
    ) {
        // a convex mix of an integral assignment and a permutation of it,
        // so both have the same block counts
        let n = ps.len();
        let a: Vec<usize> = (0..n).map(|j| split[j].0).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&j| (split[j].1, j));
        let b: Vec<usize> = perm.iter().map(|&j| a[j]).collect();
        let mut caps = vec![0u64; 4];
        for &k in &a { caps[k] += 1; }
        let lambda = rat(split[0].2, 4);
        let mut y: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); 4];
        for j in 0..n {
            if a[j] == b[j] {
                y[a[j]].push((j, one()));
            } else {
                y[a[j]].push((j, lambda.clone()));
                y[b[j]].push((j, one() - &lambda));
            }
        }
        let loads: Vec<Rational> = y.iter().map(|r| r.iter().map(|(j, f)| f * &ps[*j]).sum()).collect();
        let p_max = ps.iter().max().unwrap().clone();
        let got = best_fit_round(&y, &caps, &loads, &ps).unwrap();
        let mut seen = vec![false; n];
        for (k, jobs) in got.iter().enumerate() {
            prop_assert_eq!(jobs.len() as u64, caps[k]);
            let vol: Rational = jobs.iter().map(|&j| ps[j].clone()).sum();
            prop_assert!(vol <= &loads[k] + &p_max);
            for &j in jobs { prop_assert!(!std::mem::replace(&mut seen[j], true)); }
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_brackets_the_optimum(exps in prop::collection::vec(-12i64..=4, 1..=4), m in 1usize..=2, b in 2usize..=3) {
        let eps = eps4();
        let ps: Vec<Rational> = exps.iter().map(|&e| eps.power(e)).collect();
        let inst = Instance::from_sizes(&ps, m, b).unwrap();
        let (_, opt) = brute_force_opt(&inst, OracleCaps::default(), &Unlimited).unwrap();
        let grid = makespan_guesses(&round_instance(&inst, eps), eps).unwrap();
        if opt >= one() {
            prop_assert!(grid.values.iter().any(|v| &opt <= v && v <= &(eps.growth() * &opt)));
        } else {
            prop_assert!(grid.below_one);
        }
    }

    #[test]
    fn scheme_output_is_feasible_and_within_bound(exps in prop::collection::vec(-16i64..=3, 1..=5), m in 1usize..=2, b in 2usize..=3) {
        let eps = eps4();
        let ps: Vec<Rational> = exps.iter().map(|&e| eps.power(e)).collect();
        let inst = Instance::from_sizes(&ps, m, b).unwrap();
        let (_, opt) = brute_force_opt(&inst, OracleCaps::default(), &Unlimited).unwrap();
        let (s, trace) = eptas_traced(&inst, eps, &SchemeCaps::default(), &Unlimited).unwrap();
        s.check_coverage(ps.len()).unwrap();
        prop_assert!(check_time_constraint(&s, b).unwrap().ok);
        let bound = rat(5, 4) * rat(5, 4) * rat(21, 4) * rat(14, 4);
        prop_assert!(s.makespan() <= bound * opt);
        // the accepted guess is the first feasible one
        if let Some(acc) = trace.accepted {
            for r in &trace.guesses {
                prop_assert!(r.guess <= acc.guess);
                prop_assert_eq!(matches!(r.outcome, GuessOutcome::Feasible), r.guess == acc.guess);
            }
        }
    }
}
